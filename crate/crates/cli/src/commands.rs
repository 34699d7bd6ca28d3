//! The three pipelines behind the CLI verbs: spectrum, evolve, render.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use openqs::dynamics::{
    integrate_lindblad_with_stats, observables_series, run_ensemble, NamedObservables,
    SeriesTable, StateTrajectory,
};
use openqs::models::{
    build_double_well, build_position_operators, build_qubit_damping, build_xxz_chain, spin,
    truncate_to_eigenbasis, DoubleWellParams, GridSpec, LindbladModel, XXZParams,
};
use openqs::operators::{hermitian_eig, DensityMatrix, EnergyBasis, Operator, StateVector};
use openqs::sonify::{
    channel_coherence_metric, map_frequencies, render_binaural, to_energy_basis, wav,
    SonificationParams,
};

use crate::config::{DynamicsConfig, InitialState, ModelConfig, RunConfig};
use crate::error::CliError;
use crate::store;
use crate::table;

/// Window length for the channel-coherence CSV.
const COHERENCE_WINDOW_SECS: f64 = 0.25;

/// Model, eigenbasis, and dynamics-ready operators assembled from a config.
pub struct Assembly {
    /// Ready for the integrators (projected to the kept rank for wells).
    pub model: LindbladModel,
    /// Eigenbasis of the γ = 0 Hamiltonian, full dimension, kept rank set.
    pub spectrum_basis: EnergyBasis,
    /// Basis handed to `to_energy_basis` for rendering (identity for wells,
    /// whose dynamics already run in energy coordinates).
    pub render_basis: EnergyBasis,
    pub kind: AssemblyKind,
}

pub enum AssemblyKind {
    DoubleWell { grid: GridSpec, params: DoubleWellParams, rank: usize },
    Xxz { params: XXZParams },
    Qubit,
}

pub fn build_assembly(model_cfg: &ModelConfig) -> Result<Assembly, CliError> {
    match model_cfg {
        ModelConfig::DoubleWell { params, grid, rank } => {
            let closed = DoubleWellParams { gamma: 0.0, kt: 0.0, ..*params };
            let closed_model = build_double_well(grid, &closed)?;
            let basis = hermitian_eig(closed_model.h_eff())?.with_rank(*rank)?;
            let full_model = build_double_well(grid, params)?;
            let model = truncate_to_eigenbasis(&full_model, &basis, *rank)?;
            let render_basis = basis.identity_for_truncated()?;
            Ok(Assembly {
                model,
                spectrum_basis: basis,
                render_basis,
                kind: AssemblyKind::DoubleWell { grid: *grid, params: *params, rank: *rank },
            })
        }
        ModelConfig::Xxz(params) => {
            let model = build_xxz_chain(params)?;
            let basis = hermitian_eig(model.h_eff())?;
            Ok(Assembly {
                render_basis: basis.clone(),
                spectrum_basis: basis,
                model,
                kind: AssemblyKind::Xxz { params: *params },
            })
        }
        ModelConfig::QubitDamping { gamma } => {
            let model = build_qubit_damping(*gamma)?;
            let basis = hermitian_eig(model.h_eff())?;
            Ok(Assembly {
                render_basis: basis.clone(),
                spectrum_basis: basis,
                model,
                kind: AssemblyKind::Qubit,
            })
        }
    }
}

/// The pure initial state, or None for the maximally mixed state.
pub fn build_initial_pure(
    state: &InitialState,
    assembly: &Assembly,
) -> Result<Option<StateVector>, CliError> {
    let dim = assembly.model.dim();
    let level_vector = |n: usize| -> Result<StateVector, CliError> {
        match &assembly.kind {
            // well dynamics run in energy coordinates: level n is e_n
            AssemblyKind::DoubleWell { .. } | AssemblyKind::Qubit => {
                Ok(StateVector::basis_state(dim, n)?)
            }
            // chain dynamics run in the computational basis
            AssemblyKind::Xxz { .. } => Ok(assembly.spectrum_basis.eigenvector(n)?),
        }
    };
    let state = match state {
        InitialState::Eigenstate(n) => Some(level_vector(*n)?),
        InitialState::SymmetricCombo { n1, n2, relative_phase } => {
            let a = level_vector(*n1)?;
            let b = level_vector(*n2)?;
            let phase = Complex64::from_polar(1.0, *relative_phase);
            let amps: Vec<Complex64> = a
                .amplitudes()
                .iter()
                .zip(b.amplitudes())
                .map(|(x, y)| x + phase * y)
                .collect();
            Some(StateVector::normalized(amps)?)
        }
        InitialState::ProductSpins(angles) => {
            let mut amps = vec![Complex64::new(1.0, 0.0)];
            for (theta, phi) in angles {
                let up = Complex64::new((theta / 2.0).cos(), 0.0);
                let down = Complex64::from_polar((theta / 2.0).sin(), *phi);
                let mut next = Vec::with_capacity(amps.len() * 2);
                for a in &amps {
                    next.push(a * up);
                    next.push(a * down);
                }
                amps = next;
            }
            Some(StateVector::normalized(amps)?)
        }
        InitialState::Custom(amps) => Some(StateVector::normalized(amps.clone())?),
        InitialState::MaximallyMixed => None,
    };
    Ok(state)
}

/// Observable set matching the documented CSV columns for each model family.
pub fn build_observables(assembly: &Assembly) -> Result<NamedObservables, CliError> {
    match &assembly.kind {
        AssemblyKind::DoubleWell { grid, .. } => {
            let (x, p) = build_position_operators(grid)?;
            let u_r = assembly.spectrum_basis.projector();
            let project = |op: &Operator| -> Result<Operator, CliError> {
                Ok(Operator::from_matrix(u_r.adjoint() * op.matrix() * &u_r)
                    .map_err(openqs::models::ModelError::Operator)?
                    .hermitized())
            };
            Ok(NamedObservables::hermitian_only(vec![
                ("x".to_string(), project(&x)?),
                ("p".to_string(), project(&p)?),
                ("energy".to_string(), assembly.model.h_eff().clone()),
            ]))
        }
        AssemblyKind::Xxz { params } => {
            let n = params.n_sites;
            let mut list = Vec::new();
            for j in 1..=n {
                list.push((format!("sx_{j}"), spin::site_operator(&spin::pauli_x(), j, n)?));
                list.push((format!("sy_{j}"), spin::site_operator(&spin::pauli_y(), j, n)?));
                list.push((format!("sz_{j}"), spin::site_operator(&spin::pauli_z(), j, n)?));
            }
            Ok(NamedObservables { hermitian: list, chain_sites: Some(n) })
        }
        AssemblyKind::Qubit => {
            let half = Complex64::new(0.5, 0.0);
            let id = Operator::identity(2);
            Ok(NamedObservables::hermitian_only(vec![
                ("rho_uu".to_string(), id.add(&spin::pauli_z()).unwrap().scale(half)),
                ("rho_dd".to_string(), id.sub(&spin::pauli_z()).unwrap().scale(half)),
                ("re_rho_ud".to_string(), spin::pauli_x().scale(half)),
                ("im_rho_ud".to_string(), spin::pauli_y().scale(-half)),
                ("sigma_z".to_string(), spin::pauli_z()),
            ]))
        }
    }
}

pub struct DynamicsOutcome {
    pub trajectory: StateTrajectory,
    pub steps: usize,
    pub dt_eff: f64,
    pub max_hermiticity_drift: Option<f64>,
    pub n_traj: Option<usize>,
    pub base_seed: Option<u64>,
}

pub fn run_dynamics(
    assembly: &Assembly,
    config: &RunConfig,
) -> Result<DynamicsOutcome, CliError> {
    let Some(dynamics) = &config.dynamics else {
        return Err(CliError::Config("this command needs a [dynamics] section".into()));
    };
    let pure = build_initial_pure(&config.initial_state, assembly)?;
    match dynamics {
        DynamicsConfig::Lindblad { grid } => {
            let rho0 = match &pure {
                Some(psi) => DensityMatrix::from_pure(psi),
                None => DensityMatrix::maximally_mixed(assembly.model.dim()),
            };
            let (trajectory, stats) =
                integrate_lindblad_with_stats(&assembly.model, &rho0, grid)?;
            Ok(DynamicsOutcome {
                trajectory,
                steps: stats.steps,
                dt_eff: stats.dt_eff,
                max_hermiticity_drift: Some(stats.max_hermiticity_drift),
                n_traj: None,
                base_seed: None,
            })
        }
        DynamicsConfig::Sse { grid, ensemble } => {
            let psi0 = pure.ok_or_else(|| {
                CliError::Config("stochastic dynamics needs a pure initial state".into())
            })?;
            let trajectory = run_ensemble(&assembly.model, &psi0, grid, ensemble)?;
            Ok(DynamicsOutcome {
                trajectory,
                steps: grid.steps(),
                dt_eff: grid.dt_eff(),
                max_hermiticity_drift: None,
                n_traj: Some(ensemble.n_traj),
                base_seed: Some(ensemble.base_seed),
            })
        }
    }
}

#[derive(Serialize)]
struct RunMetadata {
    command: String,
    model: String,
    dynamics_dim: usize,
    steps: usize,
    dt_eff: f64,
    frame_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_hermiticity_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_traj: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    base_seed: Option<u64>,
    wall_time_secs: f64,
}

#[derive(Serialize)]
struct AudioMetadata {
    f0_hz: f64,
    sample_rate: u32,
    duration_secs: f64,
    amplitude_floor: f64,
    headroom: f64,
    /// Constant added to every energy before the frequency map (0 if E0 > 0).
    energy_shift: f64,
    /// Audio seconds per unit of simulation time.
    dilation: f64,
    normalization: f64,
    peak_before_normalization: f64,
    max_phase_rate: f64,
    phase_rate_limit: f64,
    warnings: Vec<String>,
    frequencies_hz: Vec<f64>,
}

fn write_text(path: &Path, text: &str, overwrite: bool) -> Result<(), CliError> {
    if path.exists() && !overwrite {
        return Err(CliError::Io(format!(
            "refusing to overwrite {} (pass --overwrite)",
            path.display()
        )));
    }
    fs::write(path, text)?;
    Ok(())
}

fn write_echo(config: &RunConfig, out_dir: &Path, overwrite: bool) -> Result<(), CliError> {
    let echo = config.echo(out_dir);
    let text = toml::to_string_pretty(&echo)
        .map_err(|e| CliError::Io(format!("serializing config echo: {e}")))?;
    write_text(&out_dir.join("config_echo.toml"), &text, overwrite)
}

fn note(quiet: bool, msg: &str) {
    if !quiet {
        eprintln!("{msg}");
    }
}

/// `spectrum`: eigenvalues, mapped frequencies, and (for wells) probability
/// densities of the lowest eigenvectors and their ± combinations.
pub fn cmd_spectrum(config: &RunConfig, out_dir: &Path, quiet: bool) -> Result<(), CliError> {
    let assembly = build_assembly(&config.model)?;
    let overwrite = config.overwrite;
    fs::create_dir_all(out_dir)?;

    let basis = &assembly.spectrum_basis;
    let son = config.sonification.unwrap_or_default();
    let freq_map = map_frequencies(basis, &son);
    let freqs = match &freq_map {
        Ok(map) => map.freqs_hz.clone(),
        Err(e) => {
            note(quiet, &format!("warning: no frequency map for this spectrum: {e}"));
            Vec::new()
        }
    };

    let energies = basis.energies();
    let index: Vec<f64> = (0..energies.len()).map(|i| i as f64).collect();
    let freq_col: Vec<f64> = (0..energies.len())
        .map(|i| freqs.get(i).copied().unwrap_or(f64::NAN))
        .collect();
    table::write_columns(
        &out_dir.join("spectrum.csv"),
        &["index", "energy", "frequency_hz"],
        &[&index, energies, &freq_col],
        overwrite,
    )?;

    if let AssemblyKind::DoubleWell { grid, params, rank } = &assembly.kind {
        let pts = grid.points();
        let h = grid.spacing();
        let potential: Vec<f64> = pts.iter().map(|&x| params.potential(x)).collect();
        let mut header: Vec<String> = vec!["x".into(), "potential".into()];
        let mut columns: Vec<Vec<f64>> = vec![pts.clone(), potential];
        let density = |v: &StateVector| -> Vec<f64> {
            v.amplitudes().iter().map(|a| a.norm_sqr() / h).collect()
        };
        for n in 0..*rank {
            header.push(format!("density_{n}"));
            columns.push(density(&basis.eigenvector(n)?));
        }
        // the Fig. 1 combinations |ψ0 ± ψ1|²/2
        let e0 = basis.eigenvector(0)?;
        let e1 = basis.eigenvector(1)?;
        for (name, sign) in [("density_sym_01", 1.0), ("density_antisym_01", -1.0)] {
            let col: Vec<f64> = e0
                .amplitudes()
                .iter()
                .zip(e1.amplitudes())
                .map(|(a, b)| (a + sign * b).norm_sqr() / (2.0 * h))
                .collect();
            header.push(name.to_string());
            columns.push(col);
        }
        let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        let column_refs: Vec<&[f64]> = columns.iter().map(|c| c.as_slice()).collect();
        table::write_columns(&out_dir.join("densities.csv"), &header_refs, &column_refs, overwrite)?;
    }

    write_echo(config, out_dir, overwrite)?;
    note(quiet, &format!("spectrum written to {}", out_dir.display()));
    Ok(())
}

/// `evolve`: run the configured dynamics; write the observable table, the
/// binary trajectory store, and run metadata.
pub fn cmd_evolve(config: &RunConfig, out_dir: &Path, quiet: bool) -> Result<StateTrajectory, CliError> {
    let started = Instant::now();
    let assembly = build_assembly(&config.model)?;
    let overwrite = config.overwrite;
    fs::create_dir_all(out_dir)?;

    let outcome = run_dynamics(&assembly, config)?;
    let obs = build_observables(&assembly)?;
    let series: SeriesTable = observables_series(&outcome.trajectory, &obs)?;
    table::write_series(&out_dir.join("observables.csv"), &series, overwrite)?;
    store::write_store(&out_dir.join("trajectory.bin"), &outcome.trajectory, overwrite)?;

    let metadata = RunMetadata {
        command: "evolve".into(),
        model: assembly.model.label().to_string(),
        dynamics_dim: assembly.model.dim(),
        steps: outcome.steps,
        dt_eff: outcome.dt_eff,
        frame_count: outcome.trajectory.len(),
        max_hermiticity_drift: outcome.max_hermiticity_drift,
        n_traj: outcome.n_traj,
        base_seed: outcome.base_seed,
        wall_time_secs: started.elapsed().as_secs_f64(),
    };
    let text = toml::to_string_pretty(&metadata)
        .map_err(|e| CliError::Io(format!("serializing run metadata: {e}")))?;
    write_text(&out_dir.join("run_metadata.toml"), &text, overwrite)?;
    write_echo(config, out_dir, overwrite)?;
    note(
        quiet,
        &format!(
            "evolved {} frames (dim {}) in {:.2}s",
            outcome.trajectory.len(),
            assembly.model.dim(),
            started.elapsed().as_secs_f64()
        ),
    );
    Ok(outcome.trajectory)
}

/// `render`: evolve (or reuse a stored trajectory), express it in the energy
/// basis, and write WAV + metadata sidecar + channel-coherence CSV.
pub fn cmd_render(config: &RunConfig, out_dir: &Path, quiet: bool) -> Result<(), CliError> {
    let assembly = build_assembly(&config.model)?;
    let overwrite = config.overwrite;
    let Some(son) = config.sonification else {
        return Err(CliError::Config("render needs a [sonification] section".into()));
    };
    fs::create_dir_all(out_dir)?;

    let store_path = out_dir.join("trajectory.bin");
    let trajectory = if store_path.exists() {
        let stored = store::read_store(&store_path)?;
        if stored.dim() != assembly.model.dim() {
            return Err(CliError::Config(format!(
                "existing trajectory store has dim {} but the config needs {}; \
                 delete it or change --out",
                stored.dim(),
                assembly.model.dim()
            )));
        }
        note(quiet, &format!("reusing trajectory store {}", store_path.display()));
        stored
    } else {
        cmd_evolve(config, out_dir, quiet)?
    };

    let energy_traj = to_energy_basis(&trajectory, &assembly.render_basis)?;
    let freq_map = map_frequencies(&assembly.render_basis, &son)?;
    let (buffer, report) = render_binaural(&energy_traj, &freq_map.freqs_hz, &son)?;
    for w in &report.warnings {
        note(quiet, &format!("warning: {w}"));
    }

    wav::write_wav(&buffer, &out_dir.join("audio.wav"), overwrite)?;

    let window = COHERENCE_WINDOW_SECS.min(son.duration / 4.0).max(0.010);
    let coherence = channel_coherence_metric(&buffer, window)?;
    table::write_columns(
        &out_dir.join("coherence.csv"),
        &["time", "coherence"],
        &[&coherence.times, &coherence.values],
        overwrite,
    )?;

    let metadata = AudioMetadata {
        f0_hz: son.f0,
        sample_rate: son.sample_rate,
        duration_secs: son.duration,
        amplitude_floor: son.amplitude_floor,
        headroom: son.headroom,
        energy_shift: freq_map.shift,
        dilation: report.dilation,
        normalization: report.normalization,
        peak_before_normalization: report.peak,
        max_phase_rate: report.max_phase_rate,
        phase_rate_limit: report.phase_rate_limit,
        warnings: report.warnings.clone(),
        frequencies_hz: freq_map.freqs_hz.clone(),
    };
    let text = toml::to_string_pretty(&metadata)
        .map_err(|e| CliError::Io(format!("serializing audio metadata: {e}")))?;
    write_text(&out_dir.join("audio_metadata.toml"), &text, overwrite)?;
    write_echo(config, out_dir, overwrite)?;
    note(quiet, &format!("audio written to {}", out_dir.join("audio.wav").display()));
    Ok(())
}
