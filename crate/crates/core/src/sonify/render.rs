//! Block rendering of the oscillator bank.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{SonificationParams, SonifyError, StereoBuffer};
use crate::dynamics::StateTrajectory;
use crate::operators::HERMITICITY_TOL;

/// Samples per parallel work item. Each sample depends only on absolute time
/// and the two bracketing frames, so any block partition renders bit-identical
/// audio.
const BLOCK: usize = 16_384;

/// Fraction of the carrier angular rate that residual phase drift may reach
/// before the renderer recommends a longer duration.
const PHASE_RATE_FRACTION: f64 = 0.2;

/// What the renderer did: the global normalization scalar, the observed
/// peak, the time-dilation factor, and any advisory warnings.
#[derive(Debug, Clone)]
pub struct RenderReport {
    /// Peak |sample| before normalization.
    pub peak: f64,
    /// Single global scalar applied to both channels.
    pub normalization: f64,
    /// Audio seconds per unit of simulation time.
    pub dilation: f64,
    /// Fastest |dθ/dτ| seen among audible coherences, rad/s of audio time.
    pub max_phase_rate: f64,
    /// Warning threshold 0.2·2π·f0.
    pub phase_rate_limit: f64,
    pub warnings: Vec<String>,
}

/// Renders a trajectory (already in the energy basis) into stereo audio.
///
/// Audio time maps affinely onto the trajectory's time span; ρ entries are
/// interpolated linearly in re/im between bracketing frames (interpolating
/// magnitude/phase instead would tear at r ≈ 0), and every lower-triangle
/// entry with r_kl ≥ amplitude_floor drives one oscillator per ear. The final
/// buffer is scaled once so the peak hits `headroom`.
pub fn render_binaural(
    traj: &StateTrajectory,
    freqs_hz: &[f64],
    params: &SonificationParams,
) -> Result<(StereoBuffer, RenderReport), SonifyError> {
    params.validate()?;
    if traj.is_empty() {
        return Err(SonifyError::EmptyTrajectory);
    }
    let rank = traj.dim();
    if freqs_hz.len() != rank {
        return Err(SonifyError::DimMismatch { left: freqs_hz.len(), right: rank });
    }
    if traj.uniform_spacing().is_none() {
        return Err(SonifyError::NonUniformSpacing);
    }
    // Eq. (2) guard: phases must be antisymmetric, i.e. frames Hermitian
    for frame in traj.frames() {
        let residue = frame.op().hermiticity_residue();
        if residue > HERMITICITY_TOL {
            return Err(SonifyError::BadBuffer(format!(
                "frame violates phase antisymmetry (Hermiticity residue {residue:.3e})"
            )));
        }
    }

    let sr = params.sample_rate as f64;
    let n_samples = (params.duration * sr).round() as usize;
    if n_samples == 0 {
        return Err(SonifyError::InvalidParams("duration shorter than one sample".into()));
    }
    let n_frames = traj.len();
    let intervals = n_frames.saturating_sub(1).max(1);

    // Terms whose magnitude stays below the floor at both interval ends can
    // never rise above it in between (linear interpolation is convex), so
    // skipping whole intervals is exact.
    let active: Vec<Vec<(u32, u32)>> = (0..intervals)
        .map(|j| {
            let a = traj.frames()[j].op();
            let b = traj.frames()[(j + 1).min(n_frames - 1)].op();
            let mut list = Vec::new();
            for k in 0..rank {
                for l in 0..=k {
                    let r_max = a.entry(k, l).norm().max(b.entry(k, l).norm());
                    if r_max >= params.amplitude_floor {
                        list.push((k as u32, l as u32));
                    }
                }
            }
            list
        })
        .collect();

    let mut left = vec![0.0f64; n_samples];
    let mut right = vec![0.0f64; n_samples];
    let two_pi = 2.0 * std::f64::consts::PI;
    let frame_scale = (n_frames - 1) as f64 / params.duration;

    left.par_chunks_mut(BLOCK)
        .zip(right.par_chunks_mut(BLOCK))
        .enumerate()
        .for_each(|(block, (lc, rc))| {
            let base = block * BLOCK;
            for (off, (l_out, r_out)) in lc.iter_mut().zip(rc.iter_mut()).enumerate() {
                let tau = (base + off) as f64 / sr;
                let (j, w) = if n_frames == 1 {
                    (0usize, 0.0)
                } else {
                    let s = tau * frame_scale;
                    let j = (s.floor() as usize).min(intervals - 1);
                    (j, s - j as f64)
                };
                let fa = traj.frames()[j].op();
                let fb = traj.frames()[(j + 1).min(n_frames - 1)].op();
                let mut acc_l = 0.0;
                let mut acc_r = 0.0;
                for &(k, l) in &active[j] {
                    let (k, l) = (k as usize, l as usize);
                    let za = fa.entry(k, l);
                    let zb = fb.entry(k, l);
                    let z = Complex64::new(
                        za.re + w * (zb.re - za.re),
                        za.im + w * (zb.im - za.im),
                    );
                    let r = z.norm();
                    if r < params.amplitude_floor {
                        continue;
                    }
                    let theta = if r < 1e-12 { 0.0 } else { z.arg() };
                    acc_l += r * (two_pi * freqs_hz[k] * tau + theta).sin();
                    acc_r += r * (two_pi * freqs_hz[l] * tau - theta).sin();
                }
                *l_out = acc_l;
                *r_out = acc_r;
            }
        });

    let peak = left
        .par_iter()
        .chain(right.par_iter())
        .map(|x| x.abs())
        .reduce(|| 0.0, f64::max);
    let normalization = if peak > 0.0 { params.headroom / peak } else { 1.0 };
    if peak > 0.0 {
        left.par_iter_mut().for_each(|x| *x *= normalization);
        right.par_iter_mut().for_each(|x| *x *= normalization);
    }

    let span = traj.times().last().unwrap() - traj.times()[0];
    let dilation = if span > 0.0 { params.duration / span } else { f64::INFINITY };
    let max_phase_rate = fastest_phase_drift(traj, params);
    let phase_rate_limit = PHASE_RATE_FRACTION * two_pi * params.f0;
    let mut warnings = Vec::new();
    if max_phase_rate > phase_rate_limit {
        warnings.push(format!(
            "residual phase drift {max_phase_rate:.1} rad/s exceeds {phase_rate_limit:.1} \
             (0.2·2π·f0); increase the audio duration so the carriers stay dominant"
        ));
    }

    let buffer = StereoBuffer::new(params.sample_rate, left, right)?;
    Ok((buffer, RenderReport { peak, normalization, dilation, max_phase_rate, phase_rate_limit, warnings }))
}

/// max |Δθ_kl| / Δτ over audible coherences and frame intervals, with phase
/// differences wrapped into (−π, π].
fn fastest_phase_drift(traj: &StateTrajectory, params: &SonificationParams) -> f64 {
    let n_frames = traj.len();
    if n_frames < 2 {
        return 0.0;
    }
    let rank = traj.dim();
    let frame_dtau = params.duration / (n_frames - 1) as f64;
    let mut worst = 0.0f64;
    for j in 0..n_frames - 1 {
        let a = traj.frames()[j].op();
        let b = traj.frames()[j + 1].op();
        for k in 1..rank {
            for l in 0..k {
                let za = a.entry(k, l);
                let zb = b.entry(k, l);
                if za.norm() < params.amplitude_floor || zb.norm() < params.amplitude_floor {
                    continue;
                }
                let mut dtheta = zb.arg() - za.arg();
                while dtheta > std::f64::consts::PI {
                    dtheta -= 2.0 * std::f64::consts::PI;
                }
                while dtheta <= -std::f64::consts::PI {
                    dtheta += 2.0 * std::f64::consts::PI;
                }
                worst = worst.max(dtheta.abs() / frame_dtau);
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::StateTrajectory;
    use crate::operators::{DensityMatrix, Operator, StateVector};
    use approx::assert_abs_diff_eq;

    fn static_traj(rho: DensityMatrix, n_frames: usize) -> StateTrajectory {
        let times: Vec<f64> = (0..n_frames).map(|i| i as f64).collect();
        StateTrajectory::new(times, vec![rho; n_frames]).unwrap()
    }

    fn short_params() -> SonificationParams {
        SonificationParams { duration: 0.25, ..Default::default() }
    }

    #[test]
    fn single_population_renders_one_scaled_sine_in_both_ears() {
        let rho = DensityMatrix::from_pure(&StateVector::basis_state(2, 0).unwrap());
        let traj = static_traj(rho, 2);
        let freqs = [220.0, 440.0];
        let params = short_params();
        let (buf, report) = render_binaural(&traj, &freqs, &params).unwrap();
        assert_eq!(buf.left(), buf.right());
        // left(τ) = headroom-normalized sin(2πf₀τ)
        let sr = params.sample_rate as f64;
        for (i, &s) in buf.left().iter().enumerate().step_by(997) {
            let tau = i as f64 / sr;
            let raw = (2.0 * std::f64::consts::PI * 220.0 * tau).sin();
            assert_abs_diff_eq!(s, raw * report.normalization, epsilon = 1e-12);
        }
        assert!(report.peak <= 1.0 + 1e-12);
    }

    #[test]
    fn diagonal_trajectory_renders_bit_identical_channels() {
        let rho = DensityMatrix::new(Operator::from_real_diagonal(&[0.5, 0.3, 0.2])).unwrap();
        let traj = static_traj(rho, 4);
        let freqs = [220.0, 330.0, 550.0];
        let (buf, _) = render_binaural(&traj, &freqs, &short_params()).unwrap();
        assert_eq!(buf.left(), buf.right());
    }

    #[test]
    fn static_coherence_matches_the_analytic_oscillator_sum() {
        // ρ from (|0⟩+|1⟩)/√2: terms (0,0), (1,1), (1,0) with r = ½, θ = 0
        let psi = StateVector::normalized(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        let traj = static_traj(DensityMatrix::from_pure(&psi), 2);
        let freqs = [220.0, 330.0];
        let params = short_params();
        let (buf, report) = render_binaural(&traj, &freqs, &params).unwrap();
        let sr = params.sample_rate as f64;
        let tp = 2.0 * std::f64::consts::PI;
        for (i, (&l, &r)) in buf.left().iter().zip(buf.right()).enumerate().step_by(739) {
            let tau = i as f64 / sr;
            let l_want = 0.5 * (tp * 220.0 * tau).sin()
                + 0.5 * (tp * 330.0 * tau).sin()
                + 0.5 * (tp * 330.0 * tau).sin();
            let r_want = 0.5 * (tp * 220.0 * tau).sin()
                + 0.5 * (tp * 330.0 * tau).sin()
                + 0.5 * (tp * 220.0 * tau).sin();
            assert_abs_diff_eq!(l, l_want * report.normalization, epsilon = 1e-12);
            assert_abs_diff_eq!(r, r_want * report.normalization, epsilon = 1e-12);
        }
    }

    #[test]
    fn phase_enters_ears_with_opposite_sign() {
        // ρ from (|0⟩ + i|1⟩)/√2 ⇒ θ₁₀ = π/2
        let psi = StateVector::normalized(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ])
        .unwrap();
        let traj = static_traj(DensityMatrix::from_pure(&psi), 2);
        let freqs = [200.0, 300.0];
        let params = short_params();
        let (buf, report) = render_binaural(&traj, &freqs, &params).unwrap();
        let sr = params.sample_rate as f64;
        let tp = 2.0 * std::f64::consts::PI;
        let th = std::f64::consts::FRAC_PI_2;
        for (i, (&l, &r)) in buf.left().iter().zip(buf.right()).enumerate().step_by(613) {
            let tau = i as f64 / sr;
            let l_want = 0.5 * (tp * 200.0 * tau).sin()
                + 0.5 * (tp * 300.0 * tau).sin()
                + 0.5 * (tp * 300.0 * tau + th).sin();
            let r_want = 0.5 * (tp * 200.0 * tau).sin()
                + 0.5 * (tp * 300.0 * tau).sin()
                + 0.5 * (tp * 200.0 * tau - th).sin();
            assert_abs_diff_eq!(l, l_want * report.normalization, epsilon = 1e-12);
            assert_abs_diff_eq!(r, r_want * report.normalization, epsilon = 1e-12);
        }
    }

    #[test]
    fn amplitude_floor_silences_weak_terms() {
        // coherence at r = 1e-6 with a floor of 1e-4: channels identical
        let eps = 1e-6;
        let op = Operator::from_rows(
            2,
            &[
                Complex64::new(0.6, 0.0),
                Complex64::new(eps, 0.0),
                Complex64::new(eps, 0.0),
                Complex64::new(0.4, 0.0),
            ],
        )
        .unwrap();
        let rho = DensityMatrix::new(op).unwrap();
        let traj = static_traj(rho, 2);
        let (buf, _) = render_binaural(&traj, &[220.0, 440.0], &short_params()).unwrap();
        assert_eq!(buf.left(), buf.right());
    }

    #[test]
    fn normalization_is_a_single_global_scalar() {
        // a decaying coherence: relative amplitudes across time must survive
        let frames: Vec<DensityMatrix> = (0..3)
            .map(|i| {
                let c = 0.4 / (i + 1) as f64;
                let op = Operator::from_rows(
                    2,
                    &[
                        Complex64::new(0.5, 0.0),
                        Complex64::new(c, 0.0),
                        Complex64::new(c, 0.0),
                        Complex64::new(0.5, 0.0),
                    ],
                )
                .unwrap();
                DensityMatrix::new(op).unwrap()
            })
            .collect();
        let traj = StateTrajectory::new(vec![0.0, 1.0, 2.0], frames).unwrap();
        let params = short_params();
        let (buf, report) = render_binaural(&traj, &[220.0, 440.0], &params).unwrap();
        let max = buf
            .left()
            .iter()
            .chain(buf.right())
            .fold(0.0f64, |a, &b| a.max(b.abs()));
        assert!(max <= params.headroom + 1e-12);
        assert!(max >= params.headroom - 1e-3, "peak {max} should touch headroom");
        assert!(report.normalization > 0.0);
    }

    #[test]
    fn rejects_non_uniform_spacing_and_bad_freq_count() {
        let rho = DensityMatrix::maximally_mixed(2);
        let traj =
            StateTrajectory::new(vec![0.0, 1.0, 3.0], vec![rho.clone(), rho.clone(), rho.clone()])
                .unwrap();
        assert!(matches!(
            render_binaural(&traj, &[220.0, 440.0], &short_params()),
            Err(SonifyError::NonUniformSpacing)
        ));
        let ok = StateTrajectory::new(vec![0.0, 1.0], vec![rho.clone(), rho]).unwrap();
        assert!(matches!(
            render_binaural(&ok, &[220.0], &short_params()),
            Err(SonifyError::DimMismatch { .. })
        ));
    }

    #[test]
    fn slow_phase_drift_passes_fast_drift_warns() {
        let frame = |theta: f64| {
            let z = Complex64::from_polar(0.4, theta);
            DensityMatrix::new(
                Operator::from_rows(
                    2,
                    &[Complex64::new(0.5, 0.0), z.conj(), z, Complex64::new(0.5, 0.0)],
                )
                .unwrap(),
            )
            .unwrap()
        };
        let params = short_params();
        // 0.3 rad over the whole render: far below the limit
        let slow = StateTrajectory::new(vec![0.0, 1.0], vec![frame(0.0), frame(0.3)]).unwrap();
        let (_, report) = render_binaural(&slow, &[220.0, 440.0], &params).unwrap();
        assert!(report.warnings.is_empty(), "unexpected warnings {:?}", report.warnings);
        // ~3 rad per frame across many frames in 0.25 s: far above the limit
        let frames: Vec<DensityMatrix> = (0..40).map(|i| frame(3.0 * i as f64)).collect();
        let times: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let fast = StateTrajectory::new(times, frames).unwrap();
        let (_, report) = render_binaural(&fast, &[220.0, 440.0], &params).unwrap();
        assert!(!report.warnings.is_empty());
    }
}
