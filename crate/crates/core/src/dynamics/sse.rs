//! Stochastic Schrödinger unraveling and ensemble averaging.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::lindblad::PreparedModel;
use super::{DynamicsError, EnsembleSpec, StateTrajectory, TimeGrid};
use crate::models::LindbladModel;
use crate::operators::{DensityMatrix, Operator, StateVector};

/// How many trajectories one work item sums sequentially. The partition is
/// fixed, so chunk sums and their in-order reduction are independent of the
/// thread schedule.
const MAX_CHUNKS: usize = 64;

/// One Euler–Maruyama step of the normalized unraveling. `noise` holds one
/// Gaussian increment dW_k ~ Normal(0, dt) per jump operator. The scheme
/// preserves the norm only to O(dt), so the state is renormalized explicitly;
/// a pre-normalization norm below 1e-8 aborts (dt too large).
pub fn sse_step(
    psi: &StateVector,
    model: &LindbladModel,
    dt: f64,
    noise: &[f64],
) -> Result<StateVector, DynamicsError> {
    if psi.dim() != model.dim() {
        return Err(DynamicsError::DimMismatch { left: psi.dim(), right: model.dim() });
    }
    if noise.len() != model.jumps().len() {
        return Err(DynamicsError::BadNoiseCount {
            got: noise.len(),
            expected: model.jumps().len(),
        });
    }
    let prepared = PreparedModel::new(model);
    let mut state = DVector::from_column_slice(psi.amplitudes());
    step_raw(&mut state, &prepared, dt, noise, 0.0)?;
    Ok(StateVector::new(state.iter().copied().collect())
        .expect("renormalized state has unit norm"))
}

fn step_raw(
    psi: &mut DVector<Complex64>,
    prepared: &PreparedModel,
    dt: f64,
    noise: &[f64],
    t: f64,
) -> Result<(), DynamicsError> {
    let hbar = prepared.hbar;
    let mut delta = &prepared.h * &*psi * Complex64::new(0.0, -dt / hbar);
    for (jump, &dw) in prepared.jumps.iter().zip(noise) {
        let l_psi = &jump.l * &*psi;
        // ⟨L⟩ = ψ†Lψ; ⟨L†⟩ = conj⟨L⟩ for a normalized ψ
        let exp_l: Complex64 = psi.iter().zip(l_psi.iter()).map(|(a, b)| a.conj() * b).sum();
        let ldl_psi = &jump.ldl * &*psi;

        let drift = (l_psi.clone() * exp_l.conj() - ldl_psi * Complex64::new(0.5, 0.0)
            - &*psi * Complex64::new(0.5 * exp_l.norm_sqr(), 0.0))
            * Complex64::new(dt / hbar, 0.0);
        let diffusion = (l_psi - &*psi * exp_l) * Complex64::new(dw / hbar.sqrt(), 0.0);
        delta += drift + diffusion;
    }
    *psi += delta;
    let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-8 {
        return Err(DynamicsError::NormCollapse { t, norm });
    }
    psi.scale_mut(1.0 / norm);
    Ok(())
}

/// Integrates a single trajectory, returning the normalized state at every
/// frame time. Each jump operator draws from its own ChaCha stream keyed by
/// `seed`, so the trajectory is a pure function of (seed, grid, model).
pub fn run_sse_trajectory(
    model: &LindbladModel,
    psi0: &StateVector,
    grid: &TimeGrid,
    seed: u64,
) -> Result<Vec<StateVector>, DynamicsError> {
    grid.validate()?;
    if psi0.dim() != model.dim() {
        return Err(DynamicsError::DimMismatch { left: psi0.dim(), right: model.dim() });
    }
    let prepared = PreparedModel::new(model);
    trajectory_frames(&prepared, psi0, grid, seed)
        .map(|frames| frames.into_iter().map(into_state_vector).collect())
}

fn into_state_vector(v: DVector<Complex64>) -> StateVector {
    StateVector::new(v.iter().copied().collect()).expect("frames are renormalized")
}

fn trajectory_frames(
    prepared: &PreparedModel,
    psi0: &StateVector,
    grid: &TimeGrid,
    seed: u64,
) -> Result<Vec<DVector<Complex64>>, DynamicsError> {
    let steps = grid.steps();
    let dt = grid.dt_eff();
    let sqrt_dt = dt.sqrt();
    let stride = grid.frame_stride;

    let mut rngs: Vec<ChaCha8Rng> = (0..prepared.jumps.len())
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            rng
        })
        .collect();

    let mut psi = DVector::from_column_slice(psi0.amplitudes());
    let mut frames = Vec::with_capacity(grid.frame_count());
    frames.push(psi.clone());

    let mut noise = vec![0.0f64; prepared.jumps.len()];
    for step in 1..=steps {
        for (k, rng) in rngs.iter_mut().enumerate() {
            let n: f64 = StandardNormal.sample(rng);
            noise[k] = n * sqrt_dt;
        }
        let t = grid.t_start + step as f64 * dt;
        step_raw(&mut psi, prepared, dt, &noise, t)?;
        if step % stride == 0 {
            frames.push(psi.clone());
        }
    }
    Ok(frames)
}

/// Averages `spec.n_traj` independent trajectories into a density-matrix
/// trajectory, ρ(t) = (1/M)Σ_i |ψ_i(t)⟩⟨ψ_i(t)|.
///
/// Trajectories are partitioned into at most [`MAX_CHUNKS`] fixed index
/// ranges; chunks run in parallel, each summing its outer products in index
/// order, and chunk sums are reduced in chunk order afterwards. The result is
/// therefore bit-identical for any thread count or schedule.
pub fn run_ensemble(
    model: &LindbladModel,
    psi0: &StateVector,
    grid: &TimeGrid,
    spec: &EnsembleSpec,
) -> Result<StateTrajectory, DynamicsError> {
    grid.validate()?;
    if spec.n_traj == 0 {
        return Err(DynamicsError::EmptyEnsemble);
    }
    if psi0.dim() != model.dim() {
        return Err(DynamicsError::DimMismatch { left: psi0.dim(), right: model.dim() });
    }
    let prepared = PreparedModel::new(model);
    let dim = model.dim();
    let n_frames = grid.frame_count();

    let chunk_size = spec.n_traj.div_ceil(MAX_CHUNKS);
    let ranges: Vec<(usize, usize)> = (0..spec.n_traj)
        .step_by(chunk_size)
        .map(|start| (start, (start + chunk_size).min(spec.n_traj)))
        .collect();

    let chunk_sums: Result<Vec<Vec<DMatrix<Complex64>>>, DynamicsError> = ranges
        .par_iter()
        .map(|&(start, end)| {
            let mut acc = vec![DMatrix::<Complex64>::zeros(dim, dim); n_frames];
            for index in start..end {
                let seed = spec.trajectory_seed(index);
                let frames = trajectory_frames(&prepared, psi0, grid, seed).map_err(|e| {
                    DynamicsError::TrajectoryFailed { index, source: Box::new(e) }
                })?;
                for (slot, psi) in acc.iter_mut().zip(&frames) {
                    accumulate_outer(slot, psi);
                }
            }
            Ok(acc)
        })
        .collect();
    let chunk_sums = chunk_sums?;

    let weight = 1.0 / spec.n_traj as f64;
    let times = grid.frame_times();
    let mut frames = Vec::with_capacity(n_frames);
    for (f, &t) in times.iter().enumerate() {
        let mut total = DMatrix::<Complex64>::zeros(dim, dim);
        for chunk in &chunk_sums {
            total += &chunk[f];
        }
        total.scale_mut(weight);
        let frame = DensityMatrix::new(Operator::from_matrix(total)?)
            .map_err(|source| DynamicsError::FrameInvariant { t, source })?;
        frames.push(frame);
    }
    StateTrajectory::new(times, frames)
}

fn accumulate_outer(acc: &mut DMatrix<Complex64>, psi: &DVector<Complex64>) {
    let dim = psi.len();
    for j in 0..dim {
        let cj = psi[j].conj();
        for i in 0..dim {
            acc[(i, j)] += psi[i] * cj;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate_lindblad, lindblad_rhs};
    use crate::models::{build_qubit_damping, spin, LindbladModel};
    use crate::operators::hermitian_eig;
    use approx::assert_abs_diff_eq;

    fn up() -> StateVector {
        StateVector::basis_state(2, 0).unwrap()
    }

    /// ½ Tr |a − b| for Hermitian frames.
    fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        let diff = a.op().sub(b.op()).unwrap();
        0.5 * diff
            .matrix()
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .map(|e| e.abs())
            .sum::<f64>()
    }

    #[test]
    fn closed_step_approximates_unitary_evolution() {
        // no jumps: the step is an explicit Euler step of the Schrödinger
        // equation; fidelity loss against exp(−iH dt)ψ shrinks like dt²
        let h = spin::pauli_x().add(&spin::pauli_z().scale(Complex64::new(0.5, 0.0))).unwrap();
        let model = LindbladModel::new(h.clone(), vec![], 1.0, "closed").unwrap();
        let basis = hermitian_eig(&h).unwrap();
        let psi0 = up();

        let exact = |dt: f64| -> Vec<Complex64> {
            // exp(−iHdt) via the eigendecomposition
            let u = basis.vectors().matrix();
            let mut phases = DMatrix::<Complex64>::zeros(2, 2);
            for (k, &e) in basis.energies().iter().enumerate() {
                phases[(k, k)] = Complex64::from_polar(1.0, -e * dt);
            }
            let prop = u * phases * u.adjoint();
            let v = prop * DVector::from_column_slice(psi0.amplitudes());
            v.iter().copied().collect()
        };

        let infidelity = |dt: f64| -> f64 {
            let stepped = sse_step(&psi0, &model, dt, &[]).unwrap();
            let target = StateVector::normalized(exact(dt)).unwrap();
            1.0 - stepped.inner(&target).norm()
        };

        let i1 = infidelity(1e-2);
        let i2 = infidelity(5e-3);
        assert!(i1 < 1e-3, "infidelity too large: {i1}");
        let ratio = i1 / i2;
        assert!(
            (2.5..=6.0).contains(&ratio),
            "infidelity should scale ~dt² (ratio ~4), got {ratio}"
        );
    }

    #[test]
    fn zero_noise_on_jump_eigenstate_is_smooth_drift() {
        // |↓⟩ is an eigenstate of σ⁻ with eigenvalue 0: the diffusion term
        // vanishes, so the state is stationary for any dW
        let model = build_qubit_damping(1.0).unwrap();
        let down = StateVector::basis_state(2, 1).unwrap();
        let stepped = sse_step(&down, &model, 1e-3, &[0.0]).unwrap();
        for (a, b) in stepped.amplitudes().iter().zip(down.amplitudes()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
        }
        // diffusion vanishes on the eigenstate even with dW ≠ 0
        let kicked = sse_step(&down, &model, 1e-3, &[0.4]).unwrap();
        for (a, b) in kicked.amplitudes().iter().zip(down.amplitudes()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
        }
    }

    #[test]
    fn noise_count_is_checked() {
        let model = build_qubit_damping(1.0).unwrap();
        assert!(matches!(
            sse_step(&up(), &model, 1e-3, &[]),
            Err(DynamicsError::BadNoiseCount { .. })
        ));
    }

    #[test]
    fn single_trajectory_frames_stay_pure() {
        let model = build_qubit_damping(1.0).unwrap();
        let grid = TimeGrid::from_duration(0.5, 1e-3, 100).unwrap();
        let spec = EnsembleSpec::new(1, 11);
        let traj = run_ensemble(&model, &up(), &grid, &spec).unwrap();
        for frame in traj.frames() {
            assert_abs_diff_eq!(frame.purity(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn closed_ensemble_is_deterministic_and_matches_lindblad() {
        let h = spin::pauli_x();
        let model = LindbladModel::new(h, vec![], 1.0, "closed").unwrap();
        let grid = TimeGrid::from_duration(1.0, 1e-3, 200).unwrap();
        let seeds = [3u64, 999];
        let mut results = Vec::new();
        for &s in &seeds {
            let traj = run_ensemble(&model, &up(), &grid, &EnsembleSpec::new(4, s)).unwrap();
            results.push(traj);
        }
        // no noise enters: any seed gives the same answer
        for (a, b) in results[0].frames().iter().zip(results[1].frames()) {
            assert!(a.op().sub(b.op()).unwrap().max_norm() <= 1e-14);
        }
        let det = integrate_lindblad(&model, &DensityMatrix::from_pure(&up()), &grid).unwrap();
        for (a, b) in results[0].frames().iter().zip(det.frames()) {
            // Euler vs RK4: agreement limited by the SSE step order
            assert!(trace_distance(a, b) <= 5e-3);
        }
    }

    #[test]
    fn ensemble_is_bit_reproducible() {
        let model = build_qubit_damping(1.0).unwrap();
        let grid = TimeGrid::from_duration(0.5, 1e-3, 50).unwrap();
        let spec = EnsembleSpec::new(64, 271828);
        let a = run_ensemble(&model, &up(), &grid, &spec).unwrap();
        let b = run_ensemble(&model, &up(), &grid, &spec).unwrap();
        for (fa, fb) in a.frames().iter().zip(b.frames()) {
            assert_eq!(fa.op(), fb.op());
        }
    }

    #[test]
    fn damping_ensemble_tracks_analytic_mean_within_three_sigma() {
        let gamma = 1.0;
        let model = build_qubit_damping(gamma).unwrap();
        let grid = TimeGrid::from_duration(1.0, 1e-3, 1000).unwrap();
        let m = 2000usize;
        let spec = EnsembleSpec::new(m, 7);

        // per-trajectory populations at t = 1/γ for the standard error
        let mut populations = Vec::with_capacity(m);
        for i in 0..m {
            let frames =
                run_sse_trajectory(&model, &up(), &grid, spec.trajectory_seed(i)).unwrap();
            let last = frames.last().unwrap();
            populations.push(last.amplitudes()[0].norm_sqr());
        }
        let mean = populations.iter().sum::<f64>() / m as f64;
        let var = populations.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0);
        let se = (var / m as f64).sqrt();
        let want = (-1.0f64).exp();
        assert!(
            (mean - want).abs() <= 3.0 * se,
            "ensemble mean {mean} vs analytic {want} (se {se})"
        );

        // and the ensemble average equals the same mean on the diagonal
        let traj = run_ensemble(&model, &up(), &grid, &spec).unwrap();
        let rho_uu = traj.frames().last().unwrap().op().entry(0, 0).re;
        assert_abs_diff_eq!(rho_uu, mean, epsilon = 1e-12);
    }

    #[test]
    fn rhs_connection_sanity() {
        // drift-only average over many noise draws approximates the Lindblad rhs
        // for one short step (weak consistency of the unraveling)
        let model = build_qubit_damping(1.0).unwrap();
        let psi = StateVector::normalized(vec![
            Complex64::new(0.8, 0.0),
            Complex64::new(0.6, 0.0),
        ])
        .unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let dt = 1e-5;
        let n = 20_000;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut acc = DMatrix::<Complex64>::zeros(2, 2);
        for _ in 0..n {
            let dw: f64 = {
                let g: f64 = StandardNormal.sample(&mut rng);
                g * dt.sqrt()
            };
            let stepped = sse_step(&psi, &model, dt, &[dw]).unwrap();
            accumulate_outer(&mut acc, &DVector::from_column_slice(stepped.amplitudes()));
        }
        acc.scale_mut(1.0 / n as f64);
        let emp = (acc - rho.op().matrix()) / Complex64::new(dt, 0.0);
        let rhs = lindblad_rhs(&rho, &model).unwrap();
        let diff = (emp - rhs.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        // Monte Carlo error ~ 1/√(n·dt) scaled by the diffusion magnitude
        assert!(diff <= 0.2, "empirical generator deviates by {diff}");
    }
}
