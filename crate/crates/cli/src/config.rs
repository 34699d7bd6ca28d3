//! Run configuration: TOML schema, defaulting, validation, and the
//! round-trippable echo.
//!
//! Unknown keys are hard errors (anti-typo policy) with a nearest-key
//! suggestion; the resolved config serializes back to TOML with every
//! default materialized, and that echo parses to the identical run.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use openqs::dynamics::{EnsembleSpec, TimeGrid};
use openqs::models::{DoubleWellParams, GridSpec, XXZParams};
use openqs::sonify::SonificationParams;

use crate::error::CliError;

pub const DEFAULT_GRID_POINTS: usize = 256;
pub const DEFAULT_X_MAX: f64 = 6.0;
pub const DEFAULT_RANK: usize = 16;
pub const DEFAULT_MASS: f64 = 1.0;
pub const DEFAULT_DT: f64 = 0.005;
pub const DEFAULT_DURATION_SECS: f64 = 10.0;
/// When frame_stride is omitted, aim for about this many stored frames.
pub const TARGET_FRAMES: usize = 200;

// ---------------------------------------------------------------- schema --

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: ModelSection,
    pub initial_state: InitialStateSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sonification: Option<SonificationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum ModelSection {
    DoubleWell(DoubleWellSection),
    Xxz(XxzSection),
    QubitDamping(QubitDampingSection),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleWellSection {
    pub c2: f64,
    pub c4: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, alias = "kT", skip_serializing_if = "Option::is_none")]
    pub kt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XxzSection {
    pub n_sites: usize,
    #[serde(alias = "J")]
    pub j: f64,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_l: Option<ComplexValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_l: Option<ComplexValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_r: Option<ComplexValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_r: Option<ComplexValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitDampingSection {
    pub gamma: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum InitialStateSection {
    Eigenstate {
        n: usize,
    },
    SymmetricCombo {
        n1: usize,
        n2: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        relative_phase: Option<f64>,
    },
    ProductSpins {
        /// One [theta, phi] Bloch pair per site.
        angles: Vec<[f64; 2]>,
    },
    Custom {
        amplitudes: Vec<ComplexValue>,
    },
    MaximallyMixed {},
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum DynamicsSection {
    Lindblad(LindbladSection),
    Sse(SseSection),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_start: Option<f64>,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_stride: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SseSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_start: Option<f64>,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_stride: Option<usize>,
    pub n_traj: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SonificationSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_rate: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headroom: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overwrite: Option<bool>,
}

/// A float, or a [re, im] pair for complex rates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn to_complex(self) -> Complex64 {
        match self {
            ComplexValue::Real(re) => Complex64::new(re, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }

    /// Canonical form: a bare float when the imaginary part is zero.
    pub fn from_complex(z: Complex64) -> Self {
        if z.im == 0.0 {
            ComplexValue::Real(z.re)
        } else {
            ComplexValue::Pair([z.re, z.im])
        }
    }
}

// -------------------------------------------------------------- resolved --

/// Fully materialized run description: every default filled in, every
/// invariant checked.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub initial_state: InitialState,
    pub dynamics: Option<DynamicsConfig>,
    pub sonification: Option<SonificationParams>,
    pub out_dir: Option<PathBuf>,
    pub overwrite: bool,
}

#[derive(Debug, Clone)]
pub enum ModelConfig {
    DoubleWell { params: DoubleWellParams, grid: GridSpec, rank: usize },
    Xxz(XXZParams),
    QubitDamping { gamma: f64 },
}

impl ModelConfig {
    /// Dimension the dynamics runs at (truncated rank for wells).
    pub fn dynamics_dim(&self) -> usize {
        match self {
            ModelConfig::DoubleWell { rank, .. } => *rank,
            ModelConfig::Xxz(p) => 1usize << p.n_sites,
            ModelConfig::QubitDamping { .. } => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub enum InitialState {
    Eigenstate(usize),
    SymmetricCombo { n1: usize, n2: usize, relative_phase: f64 },
    ProductSpins(Vec<(f64, f64)>),
    Custom(Vec<Complex64>),
    MaximallyMixed,
}

#[derive(Debug, Clone)]
pub enum DynamicsConfig {
    Lindblad { grid: TimeGrid },
    Sse { grid: TimeGrid, ensemble: EnsembleSpec },
}

impl DynamicsConfig {
    pub fn grid(&self) -> &TimeGrid {
        match self {
            DynamicsConfig::Lindblad { grid } => grid,
            DynamicsConfig::Sse { grid, .. } => grid,
        }
    }
}

// --------------------------------------------------------------- parsing --

/// Parses TOML text into the raw schema, decorating unknown-key errors with
/// the nearest valid key.
pub fn parse_config(text: &str) -> Result<ConfigFile, CliError> {
    toml::from_str::<ConfigFile>(text).map_err(|e| CliError::Config(describe_toml_error(&e)))
}

fn describe_toml_error(err: &toml::de::Error) -> String {
    let msg = err.to_string();
    if let Some(unknown) = extract_backticked_after(&msg, "unknown field `") {
        let expected = all_backticked_after(&msg, "expected ");
        if let Some(best) = nearest_key(&unknown, &expected) {
            return format!("{msg}\nhint: unknown key `{unknown}` — did you mean `{best}`?");
        }
    }
    msg
}

fn extract_backticked_after(msg: &str, prefix: &str) -> Option<String> {
    let start = msg.find(prefix)? + prefix.len();
    let rest = &msg[start..];
    let end = rest.find('`')?;
    Some(rest[..end].to_string())
}

fn all_backticked_after(msg: &str, anchor: &str) -> Vec<String> {
    let Some(pos) = msg.find(anchor) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut rest = &msg[pos..];
    while let Some(open) = rest.find('`') {
        rest = &rest[open + 1..];
        if let Some(close) = rest.find('`') {
            out.push(rest[..close].to_string());
            rest = &rest[close + 1..];
        } else {
            break;
        }
    }
    out
}

fn nearest_key(unknown: &str, candidates: &[String]) -> Option<String> {
    candidates
        .iter()
        .map(|c| (levenshtein(unknown, c), c))
        .min_by_key(|(d, _)| *d)
        .filter(|(d, _)| *d <= 3)
        .map(|(_, c)| c.clone())
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur[j + 1] = (prev[j + 1] + 1).min(cur[j] + 1).min(prev[j] + cost);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

// ------------------------------------------------------------- resolving --

impl ConfigFile {
    /// Fills defaults and validates cross-field invariants.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let model = match &self.model {
            ModelSection::DoubleWell(s) => {
                let mass = s.mass.unwrap_or(DEFAULT_MASS);
                let grid = GridSpec {
                    n_points: s.grid.as_ref().and_then(|g| g.n_points).unwrap_or(DEFAULT_GRID_POINTS),
                    x_max: s.grid.as_ref().and_then(|g| g.x_max).unwrap_or(DEFAULT_X_MAX),
                    mass,
                };
                let rank = s.rank.unwrap_or(DEFAULT_RANK);
                if rank < 2 {
                    return Err(CliError::Config(format!(
                        "model.double_well.rank = {rank}: sonification needs at least two levels"
                    )));
                }
                if rank > grid.n_points {
                    return Err(CliError::Config(format!(
                        "model.double_well.rank = {rank} exceeds grid.n_points = {}",
                        grid.n_points
                    )));
                }
                let params = DoubleWellParams {
                    c4: s.c4,
                    c2: s.c2,
                    gamma: s.gamma.unwrap_or(0.0),
                    kt: s.kt.unwrap_or(0.0),
                    mass,
                };
                params.validate().map_err(|e| CliError::Config(format!("model.double_well: {e}")))?;
                grid.validate().map_err(|e| CliError::Config(format!("model.double_well.grid: {e}")))?;
                ModelConfig::DoubleWell { params, grid, rank }
            }
            ModelSection::Xxz(s) => {
                let params = XXZParams {
                    n_sites: s.n_sites,
                    coupling: s.j,
                    delta: s.delta,
                    alpha_l: s.alpha_l.map(ComplexValue::to_complex).unwrap_or_default(),
                    beta_l: s.beta_l.map(ComplexValue::to_complex).unwrap_or_default(),
                    alpha_r: s.alpha_r.map(ComplexValue::to_complex).unwrap_or_default(),
                    beta_r: s.beta_r.map(ComplexValue::to_complex).unwrap_or_default(),
                    r: s.r.unwrap_or(0.0),
                    phi: s.phi.unwrap_or(0.0),
                };
                params.validate().map_err(|e| CliError::Config(format!("model.xxz: {e}")))?;
                ModelConfig::Xxz(params)
            }
            ModelSection::QubitDamping(s) => {
                if s.gamma < 0.0 {
                    return Err(CliError::Config(format!(
                        "model.qubit_damping.gamma = {} must be non-negative",
                        s.gamma
                    )));
                }
                ModelConfig::QubitDamping { gamma: s.gamma }
            }
        };

        let dynamics = match &self.dynamics {
            None => None,
            Some(DynamicsSection::Lindblad(s)) => Some(DynamicsConfig::Lindblad {
                grid: resolve_time_grid(s.t_start, s.t_end, s.dt, s.frame_stride)?,
            }),
            Some(DynamicsSection::Sse(s)) => {
                let grid = resolve_time_grid(s.t_start, s.t_end, s.dt, s.frame_stride)?;
                if s.n_traj == 0 {
                    return Err(CliError::Config(
                        "dynamics.sse.n_traj must be at least 1".into(),
                    ));
                }
                Some(DynamicsConfig::Sse {
                    grid,
                    ensemble: EnsembleSpec::new(s.n_traj, s.base_seed.unwrap_or(0)),
                })
            }
        };

        if self.sonification.is_some() && dynamics.is_none() {
            return Err(CliError::Config(
                "sonification requires a dynamics section (nothing to render)".into(),
            ));
        }
        // a sonification block is materialized whenever dynamics is present
        let sonification = dynamics.as_ref().map(|_| {
            let s = self.sonification.clone().unwrap_or(SonificationSection {
                f0: None,
                sample_rate: None,
                duration: None,
                amplitude_floor: None,
                headroom: None,
            });
            let defaults = SonificationParams::default();
            SonificationParams {
                f0: s.f0.unwrap_or(defaults.f0),
                sample_rate: s.sample_rate.unwrap_or(defaults.sample_rate),
                duration: s.duration.unwrap_or(DEFAULT_DURATION_SECS),
                amplitude_floor: s.amplitude_floor.unwrap_or(defaults.amplitude_floor),
                headroom: s.headroom.unwrap_or(defaults.headroom),
            }
        });
        if let Some(p) = &sonification {
            p.validate().map_err(|e| CliError::Config(format!("sonification: {e}")))?;
        }

        let initial_state = resolve_initial_state(&self.initial_state, &model, &dynamics)?;

        let out_dir = self
            .output
            .as_ref()
            .and_then(|o| o.dir.as_ref())
            .map(PathBuf::from);
        let overwrite = self.output.as_ref().and_then(|o| o.overwrite).unwrap_or(false);

        Ok(RunConfig { model, initial_state, dynamics, sonification, out_dir, overwrite })
    }
}

fn resolve_time_grid(
    t_start: Option<f64>,
    t_end: f64,
    dt: Option<f64>,
    frame_stride: Option<usize>,
) -> Result<TimeGrid, CliError> {
    let t_start = t_start.unwrap_or(0.0);
    let dt = dt.unwrap_or(DEFAULT_DT);
    let provisional = TimeGrid::new(t_start, t_end, dt, 1)
        .map_err(|e| CliError::Config(format!("dynamics: {e}")))?;
    let stride = frame_stride.unwrap_or_else(|| (provisional.steps() / TARGET_FRAMES).max(1));
    TimeGrid::new(t_start, t_end, dt, stride).map_err(|e| CliError::Config(format!("dynamics: {e}")))
}

fn resolve_initial_state(
    section: &InitialStateSection,
    model: &ModelConfig,
    dynamics: &Option<DynamicsConfig>,
) -> Result<InitialState, CliError> {
    let dim = model.dynamics_dim();
    let state = match section {
        InitialStateSection::Eigenstate { n } => {
            if *n >= dim {
                return Err(CliError::Config(format!(
                    "initial_state.eigenstate.n = {n} out of range (dynamics dimension {dim})"
                )));
            }
            InitialState::Eigenstate(*n)
        }
        InitialStateSection::SymmetricCombo { n1, n2, relative_phase } => {
            if *n1 >= dim || *n2 >= dim {
                return Err(CliError::Config(format!(
                    "initial_state.symmetric_combo levels ({n1}, {n2}) out of range (dimension {dim})"
                )));
            }
            if n1 == n2 {
                return Err(CliError::Config(
                    "initial_state.symmetric_combo needs two distinct levels".into(),
                ));
            }
            InitialState::SymmetricCombo {
                n1: *n1,
                n2: *n2,
                relative_phase: relative_phase.unwrap_or(0.0),
            }
        }
        InitialStateSection::ProductSpins { angles } => {
            let ModelConfig::Xxz(params) = model else {
                return Err(CliError::Config(
                    "initial_state.product_spins only applies to chain models".into(),
                ));
            };
            if angles.len() != params.n_sites {
                return Err(CliError::Config(format!(
                    "initial_state.product_spins has {} angle pairs but the chain has {} sites",
                    angles.len(),
                    params.n_sites
                )));
            }
            InitialState::ProductSpins(angles.iter().map(|[t, p]| (*t, *p)).collect())
        }
        InitialStateSection::Custom { amplitudes } => {
            if amplitudes.len() != dim {
                return Err(CliError::Config(format!(
                    "initial_state.custom has {} amplitudes but the dynamics dimension is {dim}",
                    amplitudes.len()
                )));
            }
            InitialState::Custom(amplitudes.iter().map(|c| c.to_complex()).collect())
        }
        InitialStateSection::MaximallyMixed {} => InitialState::MaximallyMixed,
    };

    if matches!(state, InitialState::MaximallyMixed)
        && matches!(dynamics, Some(DynamicsConfig::Sse { .. }))
    {
        return Err(CliError::Config(
            "initial_state.maximally_mixed cannot seed stochastic trajectories (pure states only)"
                .into(),
        ));
    }
    Ok(state)
}

// ----------------------------------------------------------------- echo --

impl RunConfig {
    /// Rebuilds the file schema with every default explicit. Serializing this
    /// and parsing it back yields the identical run (closure property).
    pub fn echo(&self, out_dir: &std::path::Path) -> ConfigFile {
        let model = match &self.model {
            ModelConfig::DoubleWell { params, grid, rank } => {
                ModelSection::DoubleWell(DoubleWellSection {
                    c2: params.c2,
                    c4: params.c4,
                    gamma: Some(params.gamma),
                    kt: Some(params.kt),
                    mass: Some(params.mass),
                    rank: Some(*rank),
                    grid: Some(GridSection {
                        n_points: Some(grid.n_points),
                        x_max: Some(grid.x_max),
                    }),
                })
            }
            ModelConfig::Xxz(p) => ModelSection::Xxz(XxzSection {
                n_sites: p.n_sites,
                j: p.coupling,
                delta: p.delta,
                alpha_l: Some(ComplexValue::from_complex(p.alpha_l)),
                beta_l: Some(ComplexValue::from_complex(p.beta_l)),
                alpha_r: Some(ComplexValue::from_complex(p.alpha_r)),
                beta_r: Some(ComplexValue::from_complex(p.beta_r)),
                r: Some(p.r),
                phi: Some(p.phi),
            }),
            ModelConfig::QubitDamping { gamma } => {
                ModelSection::QubitDamping(QubitDampingSection { gamma: *gamma })
            }
        };

        let initial_state = match &self.initial_state {
            InitialState::Eigenstate(n) => InitialStateSection::Eigenstate { n: *n },
            InitialState::SymmetricCombo { n1, n2, relative_phase } => {
                InitialStateSection::SymmetricCombo {
                    n1: *n1,
                    n2: *n2,
                    relative_phase: Some(*relative_phase),
                }
            }
            InitialState::ProductSpins(angles) => InitialStateSection::ProductSpins {
                angles: angles.iter().map(|(t, p)| [*t, *p]).collect(),
            },
            InitialState::Custom(amps) => InitialStateSection::Custom {
                amplitudes: amps.iter().map(|z| ComplexValue::from_complex(*z)).collect(),
            },
            InitialState::MaximallyMixed => InitialStateSection::MaximallyMixed {},
        };

        let dynamics = self.dynamics.as_ref().map(|d| match d {
            DynamicsConfig::Lindblad { grid } => DynamicsSection::Lindblad(LindbladSection {
                t_start: Some(grid.t_start),
                t_end: grid.t_end,
                dt: Some(grid.dt),
                frame_stride: Some(grid.frame_stride),
            }),
            DynamicsConfig::Sse { grid, ensemble } => DynamicsSection::Sse(SseSection {
                t_start: Some(grid.t_start),
                t_end: grid.t_end,
                dt: Some(grid.dt),
                frame_stride: Some(grid.frame_stride),
                n_traj: ensemble.n_traj,
                base_seed: Some(ensemble.base_seed),
            }),
        });

        let sonification = self.sonification.as_ref().map(|p| SonificationSection {
            f0: Some(p.f0),
            sample_rate: Some(p.sample_rate),
            duration: Some(p.duration),
            amplitude_floor: Some(p.amplitude_floor),
            headroom: Some(p.headroom),
        });

        ConfigFile {
            model,
            initial_state,
            dynamics,
            sonification,
            output: Some(OutputSection {
                dir: Some(out_dir.display().to_string()),
                overwrite: Some(self.overwrite),
            }),
        }
    }

    /// Replaces the stochastic base seed (the `--seed` override).
    pub fn override_seed(&mut self, seed: u64) {
        if let Some(DynamicsConfig::Sse { ensemble, .. }) = &mut self.dynamics {
            ensemble.base_seed = seed;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[model.double_well]
c2 = 0.35
c4 = 0.05

[initial_state.eigenstate]
n = 0

[dynamics.lindblad]
t_end = 1.0
"#;

    #[test]
    fn minimal_config_materializes_documented_defaults() {
        let cfg = parse_config(MINIMAL).unwrap().resolve().unwrap();
        let ModelConfig::DoubleWell { params, grid, rank } = &cfg.model else {
            panic!("wrong model variant");
        };
        assert_eq!(grid.n_points, 256);
        assert_eq!(grid.x_max, 6.0);
        assert_eq!(*rank, 16);
        assert_eq!(params.gamma, 0.0);
        assert_eq!(params.mass, 1.0);
        let son = cfg.sonification.expect("sonification materialized");
        assert_eq!(son.f0, 220.0);
        assert_eq!(son.sample_rate, 44_100);
        let Some(DynamicsConfig::Lindblad { grid }) = &cfg.dynamics else {
            panic!("wrong dynamics variant");
        };
        assert_eq!(grid.dt, DEFAULT_DT);
        assert_eq!(grid.frame_stride, 1); // 200 steps / TARGET_FRAMES
    }

    #[test]
    fn unknown_key_names_itself_and_the_nearest_valid_key() {
        let text = MINIMAL.replace("c2 = 0.35", "c2 = 0.35\ngamm = 0.1");
        let err = parse_config(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("gamm"), "{msg}");
        assert!(msg.contains("did you mean `gamma`"), "{msg}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let err = parse_config("[model.double_well\nc2 = 0.35").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn echo_round_trips_to_the_same_run() {
        let cfg = parse_config(MINIMAL).unwrap().resolve().unwrap();
        let echo = cfg.echo(std::path::Path::new("out"));
        let text = toml::to_string_pretty(&echo).unwrap();
        let again = parse_config(&text).unwrap().resolve().unwrap();
        let echo2 = again.echo(std::path::Path::new("out"));
        let text2 = toml::to_string_pretty(&echo2).unwrap();
        assert_eq!(text, text2, "echo of echo must be byte-identical");
    }

    #[test]
    fn sonification_without_dynamics_is_rejected() {
        let text = r#"
[model.qubit_damping]
gamma = 1.0

[initial_state.custom]
amplitudes = [[1.0, 0.0], [0.0, 0.0]]

[sonification]
duration = 2.0
"#;
        let err = parse_config(text).unwrap().resolve().unwrap_err();
        assert!(err.to_string().contains("dynamics"));
    }

    #[test]
    fn maximally_mixed_rejected_for_sse() {
        let text = r#"
[model.qubit_damping]
gamma = 1.0

[initial_state.maximally_mixed]

[dynamics.sse]
t_end = 1.0
n_traj = 10
"#;
        let err = parse_config(text).unwrap().resolve().unwrap_err();
        assert!(err.to_string().contains("pure states"));
    }

    #[test]
    fn complex_rates_accept_float_or_pair() {
        let text = r#"
[model.xxz]
n_sites = 2
j = 1.0
delta = 0.5
beta_l = 2.0
beta_r = [0.0, 1.5]
r = 1.0

[initial_state.maximally_mixed]

[dynamics.lindblad]
t_end = 1.0
"#;
        let cfg = parse_config(text).unwrap().resolve().unwrap();
        let ModelConfig::Xxz(p) = &cfg.model else { panic!() };
        assert_eq!(p.beta_l, Complex64::new(2.0, 0.0));
        assert_eq!(p.beta_r, Complex64::new(0.0, 1.5));
    }

    #[test]
    fn state_dimension_checks() {
        let bad = MINIMAL.replace("n = 0", "n = 99");
        let err = parse_config(&bad).unwrap().resolve().unwrap_err();
        assert!(err.to_string().contains("out of range"));
    }
}
