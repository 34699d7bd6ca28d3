//! Time evolution of a [`LindbladModel`]: deterministic master-equation
//! integration, stochastic trajectory unraveling, and ensemble averaging.
//!
//! The master equation
//!
//! ```text
//!   dρ/dt = −(i/ħ)[H_γ, ρ] + (1/ħ) Σ_k (L_k ρ L_k† − ½L_k†L_k ρ − ½ρ L_k†L_k)
//! ```
//!
//! is integrated with a classical fixed-step 4th-order scheme (frames must
//! land on a uniform grid for audio rendering, so adaptive stepping buys
//! nothing here); each step re-symmetrizes ρ exactly and renormalizes the
//! trace. The stochastic unraveling propagates normalized pure states with
//! an Euler–Maruyama step of
//!
//! ```text
//!   |dψ⟩ = [−(i/ħ)H_γ + (1/ħ)Σ_k(−½L_k†L_k + ⟨L_k†⟩L_k − ½⟨L_k†⟩⟨L_k⟩)]|ψ⟩ dt
//!        + (1/√ħ) Σ_k (L_k − ⟨L_k⟩)|ψ⟩ dW_k
//! ```
//!
//! and averaging trajectories recovers the Lindblad solution. Trajectories
//! are seeded individually from (base_seed, index), so ensembles are
//! bit-reproducible and may run concurrently in any schedule.

mod lindblad;
mod observables;
mod sse;

pub use lindblad::{
    integrate_lindblad, integrate_lindblad_with_stats, lindblad_rhs, step_halving_residue,
    IntegrationStats,
};
pub use observables::{observables_series, NamedObservables, SeriesTable};
pub use sse::{run_ensemble, run_sse_trajectory, sse_step};

use thiserror::Error;

use crate::operators::{DensityMatrix, OperatorError};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),
    #[error(
        "positivity violated at t = {t:.6}: smallest eigenvalue {min_eig:.3e} \
         (dt too large or model bug)"
    )]
    PositivityViolation { t: f64, min_eig: f64 },
    #[error("state norm collapsed to {norm:.3e} at t = {t:.6} before renormalization (dt too large)")]
    NormCollapse { t: f64, norm: f64 },
    #[error("trajectory {index} failed: {source}")]
    TrajectoryFailed {
        index: usize,
        #[source]
        source: Box<DynamicsError>,
    },
    #[error("ensemble needs at least one trajectory")]
    EmptyEnsemble,
    #[error("observable '{name}' is not Hermitian (residue {residue:.3e})")]
    NonHermitianObservable { name: String, residue: f64 },
    #[error("SSE noise count {got} does not match jump count {expected}")]
    BadNoiseCount { got: usize, expected: usize },
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("frame invariant violated at t = {t:.6}: {source}")]
    FrameInvariant {
        t: f64,
        #[source]
        source: OperatorError,
    },
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// Fixed-step integration window; every k-th step is stored as a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    pub frame_stride: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, dt: f64, frame_stride: usize) -> Result<Self, DynamicsError> {
        let grid = Self { t_start, t_end, dt, frame_stride };
        grid.validate()?;
        Ok(grid)
    }

    /// Window starting at t = 0.
    pub fn from_duration(t_end: f64, dt: f64, frame_stride: usize) -> Result<Self, DynamicsError> {
        Self::new(0.0, t_end, dt, frame_stride)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.t_end > self.t_start) {
            return Err(DynamicsError::InvalidTimeGrid(format!(
                "t_end = {} must exceed t_start = {}",
                self.t_end, self.t_start
            )));
        }
        if !(self.dt > 0.0) {
            return Err(DynamicsError::InvalidTimeGrid(format!("dt = {} must be positive", self.dt)));
        }
        if (self.t_end - self.t_start) / self.dt < 1.0 - 1e-9 {
            return Err(DynamicsError::InvalidTimeGrid(
                "the window must span at least one step".into(),
            ));
        }
        if self.frame_stride == 0 {
            return Err(DynamicsError::InvalidTimeGrid("frame_stride must be positive".into()));
        }
        Ok(())
    }

    /// Number of steps; dt is snapped so that steps·dt_eff spans the window
    /// exactly (uniform frames need an exact landing on t_end).
    pub fn steps(&self) -> usize {
        let raw = (self.t_end - self.t_start) / self.dt;
        (raw.round() as usize).max(1)
    }

    pub fn dt_eff(&self) -> f64 {
        (self.t_end - self.t_start) / self.steps() as f64
    }

    /// floor(steps/frame_stride) + 1 frames, starting at t_start.
    pub fn frame_count(&self) -> usize {
        self.steps() / self.frame_stride + 1
    }

    pub fn frame_times(&self) -> Vec<f64> {
        let dt = self.dt_eff();
        (0..self.frame_count())
            .map(|k| self.t_start + (k * self.frame_stride) as f64 * dt)
            .collect()
    }

    /// Same window with dt halved (frame times unchanged).
    pub fn halved(&self) -> Self {
        Self {
            t_start: self.t_start,
            t_end: self.t_end,
            dt: self.dt_eff() / 2.0,
            frame_stride: self.frame_stride * 2,
        }
    }
}

/// Stored frames of an evolution, one validated density matrix per time.
#[derive(Debug, Clone)]
pub struct StateTrajectory {
    times: Vec<f64>,
    frames: Vec<DensityMatrix>,
}

impl StateTrajectory {
    pub fn new(times: Vec<f64>, frames: Vec<DensityMatrix>) -> Result<Self, DynamicsError> {
        if frames.is_empty() {
            return Err(DynamicsError::EmptyTrajectory);
        }
        if times.len() != frames.len() {
            return Err(DynamicsError::DimMismatch { left: times.len(), right: frames.len() });
        }
        for pair in times.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(DynamicsError::InvalidTimeGrid(
                    "frame times must be strictly increasing".into(),
                ));
            }
        }
        let dim = frames[0].dim();
        if frames.iter().any(|f| f.dim() != dim) {
            return Err(DynamicsError::DimMismatch { left: dim, right: 0 });
        }
        Ok(Self { times, frames })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn frames(&self) -> &[DensityMatrix] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.frames[0].dim()
    }

    /// Frame spacing if uniform (within 1e-9 relative), else None.
    pub fn uniform_spacing(&self) -> Option<f64> {
        if self.times.len() < 2 {
            return Some(0.0);
        }
        let dt = self.times[1] - self.times[0];
        for pair in self.times.windows(2) {
            let d = pair[1] - pair[0];
            if (d - dt).abs() > 1e-9 * dt.abs().max(1.0) {
                return None;
            }
        }
        Some(dt)
    }
}

/// Trajectory count and root seed for a stochastic ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub n_traj: usize,
    pub base_seed: u64,
}

impl EnsembleSpec {
    pub fn new(n_traj: usize, base_seed: u64) -> Self {
        Self { n_traj, base_seed }
    }

    /// Per-trajectory seed: splitmix64 of (base_seed, index). Identical spec
    /// ⇒ identical seeds ⇒ bit-identical ensembles, independent of how
    /// trajectories are scheduled.
    pub fn trajectory_seed(&self, index: usize) -> u64 {
        let mut z = self
            .base_seed
            .wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_grid_frame_accounting() {
        let grid = TimeGrid::from_duration(1.0, 0.1, 3).unwrap();
        assert_eq!(grid.steps(), 10);
        assert_eq!(grid.frame_count(), 4); // steps 0, 3, 6, 9
        let times = grid.frame_times();
        assert_eq!(times.len(), 4);
        assert!((times[3] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn time_grid_rejects_degenerate_windows() {
        assert!(TimeGrid::new(1.0, 1.0, 0.1, 1).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0.0, 1).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0.1, 0).is_err());
        assert!(TimeGrid::new(0.0, 0.05, 0.1, 1).is_err());
    }

    #[test]
    fn trajectory_seeds_differ_and_reproduce() {
        let spec = EnsembleSpec::new(8, 42);
        let seeds: Vec<u64> = (0..8).map(|i| spec.trajectory_seed(i)).collect();
        let again: Vec<u64> = (0..8).map(|i| spec.trajectory_seed(i)).collect();
        assert_eq!(seeds, again);
        for i in 0..8 {
            for j in 0..i {
                assert_ne!(seeds[i], seeds[j]);
            }
        }
    }

    #[test]
    fn trajectory_requires_increasing_times() {
        let rho = DensityMatrix::maximally_mixed(2);
        let err = StateTrajectory::new(vec![0.0, 0.0], vec![rho.clone(), rho]).unwrap_err();
        assert!(matches!(err, DynamicsError::InvalidTimeGrid(_)));
    }
}
