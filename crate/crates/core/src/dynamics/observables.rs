//! Expectation-value time series extracted from a trajectory.

use num_complex::Complex64;

use super::{DynamicsError, StateTrajectory};
use crate::models::spin;
use crate::operators::{expectation, Operator, HERMITICITY_TOL};

/// What to measure: named Hermitian observables, plus (for chain models) the
/// per-site transverse moments ⟨σ_j⁺⟩ used for helix winding analysis — the
/// one non-Hermitian channel allowed through.
#[derive(Debug, Clone, Default)]
pub struct NamedObservables {
    pub hermitian: Vec<(String, Operator)>,
    pub chain_sites: Option<usize>,
}

impl NamedObservables {
    pub fn hermitian_only(list: Vec<(String, Operator)>) -> Self {
        Self { hermitian: list, chain_sites: None }
    }

    pub fn with_chain_sites(mut self, n_sites: usize) -> Self {
        self.chain_sites = Some(n_sites);
        self
    }
}

/// Column-oriented table of real time series.
#[derive(Debug, Clone)]
pub struct SeriesTable {
    pub time: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl SeriesTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|(n, _)| n.as_str()).collect()
    }
}

/// Per-frame Re⟨A⟩ for each named Hermitian observable, always followed by
/// the purity Tr ρ², and per-site |⟨σ_j⁺⟩| / arg⟨σ_j⁺⟩ when `chain_sites`
/// is set.
pub fn observables_series(
    traj: &StateTrajectory,
    obs: &NamedObservables,
) -> Result<SeriesTable, DynamicsError> {
    let dim = traj.dim();
    for (name, op) in &obs.hermitian {
        if op.dim() != dim {
            return Err(DynamicsError::DimMismatch { left: op.dim(), right: dim });
        }
        let residue = op.hermiticity_residue();
        if residue > HERMITICITY_TOL {
            return Err(DynamicsError::NonHermitianObservable { name: name.clone(), residue });
        }
    }
    if let Some(n_sites) = obs.chain_sites {
        if dim != 1usize << n_sites {
            return Err(DynamicsError::DimMismatch { left: dim, right: 1usize << n_sites });
        }
    }

    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    for (name, op) in &obs.hermitian {
        let series: Result<Vec<f64>, DynamicsError> = traj
            .frames()
            .iter()
            .map(|f| Ok(expectation(f, op)?.re))
            .collect();
        columns.push((name.clone(), series?));
    }

    let purity: Vec<f64> = traj.frames().iter().map(|f| f.purity()).collect();
    columns.push(("purity".to_string(), purity));

    if let Some(n_sites) = obs.chain_sites {
        for j in 1..=n_sites {
            let sp = spin::site_operator(&spin::sigma_plus(), j, n_sites)
                .map_err(|_| DynamicsError::DimMismatch { left: dim, right: dim })?;
            let moments: Vec<Complex64> = traj
                .frames()
                .iter()
                .map(|f| transverse_moment(f.op(), &sp))
                .collect();
            columns.push((
                format!("abs_sp_{j}"),
                moments.iter().map(|m| m.norm()).collect(),
            ));
            columns.push((
                format!("arg_sp_{j}"),
                moments.iter().map(|m| m.arg()).collect(),
            ));
        }
    }

    Ok(SeriesTable { time: traj.times().to_vec(), columns })
}

fn transverse_moment(rho: &Operator, sp: &Operator) -> Complex64 {
    // Tr(ρσ⁺) without the Hermiticity gate
    let rm = rho.matrix();
    let sm = sp.matrix();
    let d = rho.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += rm[(i, j)] * sm[(j, i)];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate_lindblad, TimeGrid};
    use crate::models::{build_double_well, truncate_to_eigenbasis, DoubleWellParams, GridSpec};
    use crate::operators::{hermitian_eig, DensityMatrix, StateVector};
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_ground_state_gives_flat_energy_and_unit_purity() {
        let grid = GridSpec { n_points: 96, x_max: 6.0, mass: 2.0 };
        let params = DoubleWellParams { c4: 0.05, c2: 0.35, gamma: 0.0, kt: 0.0, mass: 2.0 };
        let model = build_double_well(&grid, &params).unwrap();
        let basis = hermitian_eig(model.h_eff()).unwrap();
        let model_t = truncate_to_eigenbasis(&model, &basis, 6).unwrap();
        let rho0 = DensityMatrix::from_pure(&StateVector::basis_state(6, 0).unwrap());
        let tg = TimeGrid::from_duration(3.0, 0.01, 60).unwrap();
        let traj = integrate_lindblad(&model_t, &rho0, &tg).unwrap();

        let obs = NamedObservables::hermitian_only(vec![(
            "energy".to_string(),
            model_t.h_eff().clone(),
        )]);
        let table = observables_series(&traj, &obs).unwrap();
        let e = table.column("energy").unwrap();
        let p = table.column("purity").unwrap();
        let e0 = basis.energies()[0];
        for (&ei, &pi) in e.iter().zip(p) {
            assert_abs_diff_eq!(ei, e0, epsilon = 1e-8);
            assert_abs_diff_eq!(pi, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn maximally_mixed_qubit_reads_zero_magnetization_and_half_purity() {
        let rho = DensityMatrix::maximally_mixed(2);
        let traj = StateTrajectory::new(vec![0.0], vec![rho]).unwrap();
        let obs = NamedObservables::hermitian_only(vec![(
            "sz".to_string(),
            spin::pauli_z(),
        )]);
        let table = observables_series(&traj, &obs).unwrap();
        assert_abs_diff_eq!(table.column("sz").unwrap()[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(table.column("purity").unwrap()[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn tunnelling_extrema_alternate_with_steady_amplitude() {
        // two-level coherent oscillation: ⟨X⟩ extrema alternate in sign with
        // |extremum| essentially constant
        let grid = GridSpec { n_points: 128, x_max: 6.0, mass: 2.0 };
        let params = DoubleWellParams { c4: 0.05, c2: 0.35, gamma: 0.0, kt: 0.0, mass: 2.0 };
        let model = build_double_well(&grid, &params).unwrap();
        let basis = hermitian_eig(model.h_eff()).unwrap();
        let rank = 8;
        let model_t = truncate_to_eigenbasis(&model, &basis, rank).unwrap();
        let gap = basis.energies()[1] - basis.energies()[0];
        let period = 2.0 * std::f64::consts::PI / gap;

        let mut amps = vec![Complex64::new(0.0, 0.0); rank];
        amps[0] = Complex64::new(1.0, 0.0);
        amps[1] = Complex64::new(1.0, 0.0);
        let rho0 = DensityMatrix::from_pure(&StateVector::normalized(amps).unwrap());

        let (x_full, _) = crate::models::build_position_operators(&grid).unwrap();
        let u_r = basis.with_rank(rank).unwrap().projector();
        let x_t = Operator::from_matrix(u_r.adjoint() * x_full.matrix() * &u_r).unwrap();

        let tg = TimeGrid::from_duration(2.0 * period, period / 1000.0, 5).unwrap();
        let traj = integrate_lindblad(&model_t, &rho0, &tg).unwrap();
        let obs = NamedObservables::hermitian_only(vec![("x".to_string(), x_t)]);
        let table = observables_series(&traj, &obs).unwrap();
        let xs = table.column("x").unwrap();

        let mut extrema = Vec::new();
        for i in 1..xs.len() - 1 {
            if (xs[i] - xs[i - 1]) * (xs[i + 1] - xs[i]) < 0.0 {
                extrema.push(xs[i]);
            }
        }
        assert!(extrema.len() >= 3, "found {} extrema", extrema.len());
        for pair in extrema.windows(2) {
            assert!(pair[0] * pair[1] < 0.0, "extrema did not alternate: {pair:?}");
        }
        let reference = extrema[0].abs();
        for e in &extrema {
            assert!(
                (e.abs() - reference).abs() <= 0.05 * reference,
                "extremum magnitude wandered: {} vs {}",
                e.abs(),
                reference
            );
        }
    }

    #[test]
    fn non_hermitian_observable_is_rejected() {
        let rho = DensityMatrix::maximally_mixed(2);
        let traj = StateTrajectory::new(vec![0.0], vec![rho]).unwrap();
        let obs = NamedObservables::hermitian_only(vec![(
            "sp".to_string(),
            spin::sigma_plus(),
        )]);
        assert!(matches!(
            observables_series(&traj, &obs),
            Err(DynamicsError::NonHermitianObservable { .. })
        ));
    }

    #[test]
    fn chain_transverse_moments_report_magnitude_and_phase() {
        // product state with site phases 0.3 and 1.0: ⟨σ_j⁺⟩ = ρ_{↓↑} = ½e^{+iφ_j}
        let phi = [0.3f64, 1.0];
        let site = |p: f64| {
            vec![
                Complex64::new(1.0 / 2.0f64.sqrt(), 0.0),
                Complex64::from_polar(1.0 / 2.0f64.sqrt(), p),
            ]
        };
        let mut amps = vec![Complex64::new(0.0, 0.0); 4];
        let a = site(phi[0]);
        let b = site(phi[1]);
        for i in 0..2 {
            for j in 0..2 {
                amps[i * 2 + j] = a[i] * b[j];
            }
        }
        let psi = StateVector::normalized(amps).unwrap();
        let traj =
            StateTrajectory::new(vec![0.0], vec![DensityMatrix::from_pure(&psi)]).unwrap();
        let obs = NamedObservables::default().with_chain_sites(2);
        let table = observables_series(&traj, &obs).unwrap();
        for (j, &p) in phi.iter().enumerate() {
            let mag = table.column(&format!("abs_sp_{}", j + 1)).unwrap()[0];
            let arg = table.column(&format!("arg_sp_{}", j + 1)).unwrap()[0];
            assert_abs_diff_eq!(mag, 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(arg, p, epsilon = 1e-12);
        }
    }
}
