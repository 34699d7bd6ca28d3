//! Binaural rendering of a density-matrix trajectory.
//!
//! Expressed in the Hamiltonian eigenbasis, ρ = Σ r_kl e^{iθ_kl}|k⟩⟨l|.
//! Level n sounds at f_n = (E_n/E_0)·f₀, and every lower-triangle entry
//! (k ≥ l) contributes one oscillator per ear:
//!
//! ```text
//!   left(τ)  += r_kl · sin(2π f_k τ + θ_kl)     (ket index)
//!   right(τ) += r_kl · sin(2π f_l τ − θ_kl)     (bra index)
//! ```
//!
//! Populations (k = l) sound identically in both ears; coherences beat
//! between the ears and die away as the state decoheres, collapsing the
//! stereo image to mono.

mod render;
pub mod wav;

pub use render::{render_binaural, RenderReport};

use thiserror::Error;

use crate::dynamics::{DynamicsError, StateTrajectory};
use crate::operators::{DensityMatrix, EnergyBasis, Operator, OperatorError};

#[derive(Debug, Error)]
pub enum SonifyError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("sonification needs at least two levels (rank {rank})")]
    RankTooSmall { rank: usize },
    #[error("invalid sonification parameters: {0}")]
    InvalidParams(String),
    #[error(
        "ground level is degenerate (E1 - E0 = {gap:.3e}); the frequency map \
         f_n = (E_n/E_0)f0 has no usable reference"
    )]
    DegenerateGround { gap: f64 },
    #[error(
        "aliasing guard: max mapped frequency {f_max:.1} Hz exceeds {limit:.1} Hz; \
         lower the rank or lower f0"
    )]
    AliasingGuard { f_max: f64, limit: f64 },
    #[error("trajectory frames are not uniformly spaced")]
    NonUniformSpacing,
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("metric window must be at least 10 ms (got {got_ms:.3} ms)")]
    WindowTooShort { got_ms: f64 },
    #[error("metric window of {window_samples} samples exceeds the buffer ({buffer_samples})")]
    WindowTooLong { window_samples: usize, buffer_samples: usize },
    #[error("audio buffer invalid: {0}")]
    BadBuffer(String),
    #[error("refusing to overwrite {0} (pass the overwrite flag)")]
    PathExists(std::path::PathBuf),
    #[error("not a supported WAV file: {0}")]
    BadWav(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Frequency map, loudness floor, and output format for a render.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SonificationParams {
    /// Fundamental assigned to the ground level, Hz.
    pub f0: f64,
    pub sample_rate: u32,
    /// Audio length in seconds; simulation time is dilated onto it.
    pub duration: f64,
    /// Oscillators with r_kl below this are silent.
    pub amplitude_floor: f64,
    /// Peak after global normalization, in (0, 1].
    pub headroom: f64,
}

impl Default for SonificationParams {
    fn default() -> Self {
        Self {
            f0: 220.0,
            sample_rate: 44_100,
            duration: 10.0,
            amplitude_floor: 1e-4,
            headroom: 0.89,
        }
    }
}

impl SonificationParams {
    pub fn validate(&self) -> Result<(), SonifyError> {
        if !(self.f0 > 0.0) {
            return Err(SonifyError::InvalidParams(format!("f0 = {} must be positive", self.f0)));
        }
        if self.sample_rate == 0 {
            return Err(SonifyError::InvalidParams("sample_rate must be positive".into()));
        }
        if !(self.duration > 0.0) {
            return Err(SonifyError::InvalidParams(format!(
                "duration = {} must be positive",
                self.duration
            )));
        }
        if self.amplitude_floor < 0.0 {
            return Err(SonifyError::InvalidParams(format!(
                "amplitude_floor = {} must be non-negative",
                self.amplitude_floor
            )));
        }
        if !(self.headroom > 0.0 && self.headroom <= 1.0) {
            return Err(SonifyError::InvalidParams(format!(
                "headroom = {} must lie in (0, 1]",
                self.headroom
            )));
        }
        Ok(())
    }

    /// Anti-aliasing ceiling for mapped frequencies.
    pub fn frequency_limit(&self) -> f64 {
        self.sample_rate as f64 / 2.0 - 1000.0
    }
}

/// Paired stereo samples in [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct StereoBuffer {
    sample_rate: u32,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl StereoBuffer {
    pub fn new(sample_rate: u32, left: Vec<f64>, right: Vec<f64>) -> Result<Self, SonifyError> {
        if left.len() != right.len() {
            return Err(SonifyError::BadBuffer(format!(
                "channel lengths differ: {} vs {}",
                left.len(),
                right.len()
            )));
        }
        if left.is_empty() {
            return Err(SonifyError::BadBuffer("buffer is empty".into()));
        }
        if sample_rate == 0 {
            return Err(SonifyError::BadBuffer("sample rate must be positive".into()));
        }
        let out_of_range = |v: &Vec<f64>| v.iter().any(|&x| !(-1.0..=1.0).contains(&x));
        if out_of_range(&left) || out_of_range(&right) {
            return Err(SonifyError::BadBuffer("samples outside [-1, 1]".into()));
        }
        Ok(Self { sample_rate, left, right })
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }

    pub fn duration(&self) -> f64 {
        self.left.len() as f64 / self.sample_rate as f64
    }
}

/// Mapped frequencies plus the spectrum shift that made E'₀ positive.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyMap {
    pub freqs_hz: Vec<f64>,
    /// Constant added to every energy before mapping (0 when E₀ > 0).
    pub shift: f64,
}

/// Re-expresses every frame in the energy eigenbasis: ρ ↦ U_r†ρU_r.
///
/// Accepts either a trajectory in the operator basis of `basis` (full
/// transform) or one already living in truncated energy coordinates
/// (dim == rank, identity transform). Frames keep their density-matrix
/// invariants, so any population outside the kept rank must be negligible.
pub fn to_energy_basis(
    traj: &StateTrajectory,
    basis: &EnergyBasis,
) -> Result<StateTrajectory, SonifyError> {
    let dim = traj.dim();
    if dim == basis.rank() && basis.vectors().dim() == basis.rank() {
        // already in energy coordinates
        return Ok(traj.clone());
    }
    if dim != basis.dim() {
        return Err(SonifyError::DimMismatch { left: dim, right: basis.dim() });
    }
    let u_r = basis.projector();
    let mut frames = Vec::with_capacity(traj.len());
    for (frame, &t) in traj.frames().iter().zip(traj.times()) {
        let projected = u_r.adjoint() * frame.op().matrix() * &u_r;
        let op = Operator::from_matrix(projected)?.hermitized();
        let dm = DensityMatrix::new(op)
            .map_err(|source| SonifyError::Dynamics(DynamicsError::FrameInvariant { t, source }))?;
        frames.push(dm);
    }
    Ok(StateTrajectory::new(traj.times().to_vec(), frames)?)
}

/// Maps the kept energies onto frequencies f_n = (E'_n/E'₀)·f₀.
///
/// Spectra that start at or below zero are first shifted by
/// s = −E₀ + (E₁ − E₀) (a global energy shift is unobservable); the shift is
/// reported for the metadata sidecar. Degenerate levels map to the same
/// pitch; a degenerate ground level is rejected.
pub fn map_frequencies(
    basis: &EnergyBasis,
    params: &SonificationParams,
) -> Result<FrequencyMap, SonifyError> {
    params.validate()?;
    let energies = basis.kept_energies();
    if energies.len() < 2 {
        return Err(SonifyError::RankTooSmall { rank: energies.len() });
    }
    let e0 = energies[0];
    let shift = if e0 <= 0.0 {
        let gap = energies[1] - e0;
        if gap <= 0.0 {
            return Err(SonifyError::DegenerateGround { gap });
        }
        -e0 + gap
    } else {
        0.0
    };
    let reference = e0 + shift;
    let freqs_hz: Vec<f64> = energies.iter().map(|&e| (e + shift) / reference * params.f0).collect();
    let f_max = freqs_hz.last().copied().unwrap_or(params.f0);
    let limit = params.frequency_limit();
    if f_max > limit {
        return Err(SonifyError::AliasingGuard { f_max, limit });
    }
    Ok(FrequencyMap { freqs_hz, shift })
}

/// Time series of windowed zero-lag normalized cross-correlation between the
/// channels: 1 for identical channels, −1 for opposite, drifting up toward 1
/// as the render loses its coherences.
#[derive(Debug, Clone)]
pub struct CoherenceSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn channel_coherence_metric(
    buf: &StereoBuffer,
    window_secs: f64,
) -> Result<CoherenceSeries, SonifyError> {
    if window_secs < 0.010 {
        return Err(SonifyError::WindowTooShort { got_ms: window_secs * 1e3 });
    }
    let w = (window_secs * buf.sample_rate() as f64).round() as usize;
    if w > buf.len() {
        return Err(SonifyError::WindowTooLong {
            window_samples: w,
            buffer_samples: buf.len(),
        });
    }
    let n_windows = buf.len() / w;
    let mut times = Vec::with_capacity(n_windows);
    let mut values = Vec::with_capacity(n_windows);
    for k in 0..n_windows {
        let start = k * w;
        let l = &buf.left()[start..start + w];
        let r = &buf.right()[start..start + w];
        let mut lr = 0.0;
        let mut ll = 0.0;
        let mut rr = 0.0;
        for (a, b) in l.iter().zip(r) {
            lr += a * b;
            ll += a * a;
            rr += b * b;
        }
        let value = if ll == 0.0 && rr == 0.0 {
            1.0
        } else if ll == 0.0 || rr == 0.0 {
            0.0
        } else {
            lr / (ll * rr).sqrt()
        };
        times.push((start + w / 2) as f64 / buf.sample_rate() as f64);
        values.push(value);
    }
    Ok(CoherenceSeries { times, values })
}
