//! Deterministic master-equation integration.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{DynamicsError, StateTrajectory, TimeGrid};
use crate::models::LindbladModel;
use crate::operators::{DensityMatrix, Operator, POSITIVITY_TOL};

/// The right-hand side of the Lindblad equation,
/// −(i/ħ)[H_γ, ρ] + (1/ħ)Σ_k(L_k ρ L_k† − ½L_k†L_k ρ − ½ρ L_k†L_k).
///
/// The result is traceless and Hermitian (both hold algebraically; tests
/// pin the floating-point residues).
pub fn lindblad_rhs(rho: &DensityMatrix, model: &LindbladModel) -> Result<Operator, DynamicsError> {
    if rho.dim() != model.dim() {
        return Err(DynamicsError::DimMismatch { left: rho.dim(), right: model.dim() });
    }
    let prepared = PreparedModel::new(model);
    Ok(Operator::from_matrix(prepared.rhs(rho.op().matrix()))?)
}

/// Hamiltonian and jump operators pre-staged for the inner loop
/// (L† and L†L are computed once).
pub(crate) struct PreparedModel {
    pub h: DMatrix<Complex64>,
    pub jumps: Vec<PreparedJump>,
    pub hbar: f64,
}

pub(crate) struct PreparedJump {
    pub l: DMatrix<Complex64>,
    pub l_dag: DMatrix<Complex64>,
    pub ldl: DMatrix<Complex64>,
}

impl PreparedModel {
    pub fn new(model: &LindbladModel) -> Self {
        let jumps = model
            .jumps()
            .iter()
            .map(|l| {
                let lm = l.matrix().clone();
                let l_dag = lm.adjoint();
                let ldl = &l_dag * &lm;
                PreparedJump { l: lm, l_dag, ldl }
            })
            .collect();
        Self { h: model.h_eff().matrix().clone(), jumps, hbar: model.hbar() }
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    fn rhs(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let minus_i_over_hbar = Complex64::new(0.0, -1.0 / self.hbar);
        let mut out = (&self.h * rho - rho * &self.h) * minus_i_over_hbar;
        let half = Complex64::new(0.5 / self.hbar, 0.0);
        let inv_hbar = Complex64::new(1.0 / self.hbar, 0.0);
        for j in &self.jumps {
            out += (&j.l * rho * &j.l_dag) * inv_hbar;
            out -= (&j.ldl * rho + rho * &j.ldl) * half;
        }
        out
    }
}

/// Integration diagnostics: the worst per-step Hermiticity drift seen before
/// re-symmetrization, and the snapped step size.
#[derive(Debug, Clone, Copy)]
pub struct IntegrationStats {
    pub steps: usize,
    pub dt_eff: f64,
    pub max_hermiticity_drift: f64,
}

/// Classical 4th-order fixed-step integration of the master equation.
///
/// After every step ρ is symmetrized exactly, and the trace renormalized if
/// it drifted beyond 1e-12. Stored frames are validated density matrices;
/// a frame whose smallest eigenvalue drops below the tolerance aborts the
/// run with the offending time.
pub fn integrate_lindblad(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<StateTrajectory, DynamicsError> {
    integrate_lindblad_with_stats(model, rho0, grid).map(|(traj, _)| traj)
}

pub fn integrate_lindblad_with_stats(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<(StateTrajectory, IntegrationStats), DynamicsError> {
    grid.validate()?;
    if rho0.dim() != model.dim() {
        return Err(DynamicsError::DimMismatch { left: rho0.dim(), right: model.dim() });
    }
    let prepared = PreparedModel::new(model);
    let steps = grid.steps();
    let dt = grid.dt_eff();
    let stride = grid.frame_stride;

    let mut rho = rho0.op().matrix().clone();
    let mut frames = Vec::with_capacity(grid.frame_count());
    let mut times = Vec::with_capacity(grid.frame_count());
    let mut max_drift = 0.0f64;

    let dim = prepared.dim();
    let store = |rho: &DMatrix<Complex64>, t: f64, frames: &mut Vec<DensityMatrix>, times: &mut Vec<f64>| -> Result<(), DynamicsError> {
        let op = Operator::from_matrix(rho.clone())?;
        let min_eig = smallest_eigenvalue(&op);
        if min_eig < -POSITIVITY_TOL {
            return Err(DynamicsError::PositivityViolation { t, min_eig });
        }
        let frame = DensityMatrix::new(op)
            .map_err(|source| DynamicsError::FrameInvariant { t, source })?;
        frames.push(frame);
        times.push(t);
        Ok(())
    };

    store(&rho, grid.t_start, &mut frames, &mut times)?;

    let half_dt = Complex64::new(0.5 * dt, 0.0);
    let dt_c = Complex64::new(dt, 0.0);
    let sixth = Complex64::new(dt / 6.0, 0.0);
    for step in 1..=steps {
        let k1 = prepared.rhs(&rho);
        let k2 = prepared.rhs(&(&rho + &k1 * half_dt));
        let k3 = prepared.rhs(&(&rho + &k2 * half_dt));
        let k4 = prepared.rhs(&(&rho + &k3 * dt_c));
        rho += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * sixth;

        // monitored invariant: the scheme only drifts off Hermitian at fp level
        let drift = hermiticity_drift(&rho, dim);
        max_drift = max_drift.max(drift);
        symmetrize(&mut rho, dim);
        let trace: Complex64 = rho.diagonal().iter().sum();
        if (trace.re - 1.0).abs() > 1e-12 {
            rho.scale_mut(1.0 / trace.re);
        }

        if step % stride == 0 {
            let t = grid.t_start + step as f64 * dt;
            store(&rho, t, &mut frames, &mut times)?;
        }
    }

    let traj = StateTrajectory::new(times, frames)?;
    Ok((traj, IntegrationStats { steps, dt_eff: dt, max_hermiticity_drift: max_drift }))
}

/// Max-norm difference between the final frames of a dt run and a dt/2 run:
/// the optional step-halving convergence self-check.
pub fn step_halving_residue(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<f64, DynamicsError> {
    let coarse = integrate_lindblad(model, rho0, grid)?;
    let fine = integrate_lindblad(model, rho0, &grid.halved())?;
    let a = coarse.frames().last().expect("nonempty").op();
    let b = fine.frames().last().expect("nonempty").op();
    Ok(a.sub(b)?.max_norm())
}

fn symmetrize(rho: &mut DMatrix<Complex64>, dim: usize) {
    for i in 0..dim {
        rho[(i, i)] = Complex64::new(rho[(i, i)].re, 0.0);
        for j in (i + 1)..dim {
            let avg = (rho[(i, j)] + rho[(j, i)].conj()) * 0.5;
            rho[(i, j)] = avg;
            rho[(j, i)] = avg.conj();
        }
    }
}

fn hermiticity_drift(rho: &DMatrix<Complex64>, dim: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in i..dim {
            worst = worst.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
        }
    }
    worst
}

fn smallest_eigenvalue(op: &Operator) -> f64 {
    op.matrix()
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
}
