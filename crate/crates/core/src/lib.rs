//! Open-quantum-system simulation with binaural sonification.
//!
//! The pipeline: build a [`models::LindbladModel`] (heat-bath double well,
//! boundary-driven XXZ chain, or the amplitude-damping qubit oracle), evolve
//! it with [`dynamics`] (deterministic master equation or stochastic
//! trajectory ensemble), express the density-matrix trajectory in the energy
//! eigenbasis, and render it to stereo audio with [`sonify`] — populations as
//! steady tones, coherences as binaural structure that decays to mono as the
//! state decoheres.

pub mod dynamics;
pub mod models;
pub mod operators;
pub mod sonify;

pub use operators::{DensityMatrix, EnergyBasis, Operator, StateVector};

#[cfg(test)]
pub(crate) mod test_support {
    use num_complex::Complex64;

    use crate::operators::Operator;

    /// Deterministic pseudo-random matrix (splitmix64 entries); no RNG crate
    /// involved so expected values can be frozen.
    pub fn random_operator(dim: usize, seed: u64) -> Operator {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let entries: Vec<Complex64> =
            (0..dim * dim).map(|_| Complex64::new(next(), next())).collect();
        Operator::from_rows(dim, &entries).expect("dim > 0")
    }

    pub fn random_hermitian(dim: usize, seed: u64) -> Operator {
        random_operator(dim, seed).hermitized()
    }
}
