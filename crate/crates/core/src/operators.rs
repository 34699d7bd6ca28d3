//! Dense complex linear algebra for open-system simulation.
//!
//! Everything downstream runs on four value types: [`Operator`] (a dense
//! complex square matrix — Hamiltonians, jump operators, observables),
//! [`DensityMatrix`] (Hermitian, unit-trace, positive semidefinite),
//! [`StateVector`] (a normalized pure state), and [`EnergyBasis`] (the
//! sorted eigendecomposition ĤU = U·diag(E) that bridges dynamics and
//! sonification).
//!
//! All types are immutable after construction and cheap to share between
//! threads; the free functions are pure.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Max |A − A†| entry allowed for "Hermitian" inputs.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// |Tr ρ − 1| allowed for a density matrix.
pub const TRACE_TOL: f64 = 1e-8;
/// Density-matrix eigenvalues may undershoot zero by this much.
pub const POSITIVITY_TOL: f64 = 1e-8;
/// Norm slack for state vectors.
pub const NORM_TOL: f64 = 1e-10;
/// Largest dimension `kron` will produce unless given an explicit limit.
pub const DEFAULT_MAX_KRON_DIM: usize = 4096;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("operator dimension must be at least 1")]
    ZeroDim,
    #[error("{got} entries cannot fill a {dim}x{dim} matrix")]
    BadEntryCount { dim: usize, got: usize },
    #[error(
        "kron would produce dimension {dim} > {max}: model too large for dense representation"
    )]
    KronTooLarge { dim: usize, max: usize },
    #[error("not Hermitian: max |A - A\u{2020}| = {residue:.3e} exceeds {tol:.1e}")]
    NotHermitian { residue: f64, tol: f64 },
    #[error("trace {trace:.17} deviates from 1 by more than {tol:.1e}")]
    BadTrace { trace: f64, tol: f64 },
    #[error("smallest eigenvalue {min_eig:.3e} below -{tol:.1e}: not positive semidefinite")]
    NotPositive { min_eig: f64, tol: f64 },
    #[error("state norm {norm:.17} deviates from 1 by more than {tol:.1e}")]
    BadNorm { norm: f64, tol: f64 },
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("rank {rank} out of range for dimension {dim} (need 1 <= rank <= dim)")]
    BadRank { rank: usize, dim: usize },
    #[error("energies must be ascending (index {index})")]
    EnergiesNotAscending { index: usize },
    #[error("basis vectors not unitary: max |U\u{2020}U - I| = {residue:.3e}")]
    NotUnitary { residue: f64 },
}

/// Dense complex square matrix with dimension metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<Complex64>,
}

impl Operator {
    /// Wraps a square nalgebra matrix.
    pub fn from_matrix(mat: DMatrix<Complex64>) -> Result<Self, OperatorError> {
        if mat.nrows() == 0 {
            return Err(OperatorError::ZeroDim);
        }
        if mat.nrows() != mat.ncols() {
            return Err(OperatorError::DimMismatch { left: mat.nrows(), right: mat.ncols() });
        }
        Ok(Self { mat })
    }

    /// Builds from `dim*dim` entries in row-major order.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self, OperatorError> {
        if dim == 0 {
            return Err(OperatorError::ZeroDim);
        }
        if entries.len() != dim * dim {
            return Err(OperatorError::BadEntryCount { dim, got: entries.len() });
        }
        Ok(Self { mat: DMatrix::from_row_slice(dim, dim, entries) })
    }

    /// Builds from real entries in row-major order.
    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self, OperatorError> {
        let complex: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_rows(dim, &complex)
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: DMatrix::identity(dim, dim) }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut mat = DMatrix::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            mat[(i, i)] = d;
        }
        Self { mat }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let entries: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&entries)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    /// Conjugate transpose A†.
    pub fn dagger(&self) -> Self {
        Self { mat: self.mat.adjoint() }
    }

    /// Kronecker product with the default dimension cap.
    pub fn kron(&self, other: &Self) -> Result<Self, OperatorError> {
        self.kron_with_limit(other, DEFAULT_MAX_KRON_DIM)
    }

    /// Kronecker product; errors if the result would exceed `max_dim`.
    pub fn kron_with_limit(&self, other: &Self, max_dim: usize) -> Result<Self, OperatorError> {
        let dim = self.dim() * other.dim();
        if dim > max_dim {
            return Err(OperatorError::KronTooLarge { dim, max: max_dim });
        }
        Ok(Self { mat: self.mat.kronecker(&other.mat) })
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.diagonal().iter().sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { mat: &self.mat * c }
    }

    /// Largest entry modulus (max-norm).
    pub fn max_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |A − A†| over entries.
    pub fn hermiticity_residue(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let r = (self.mat[(i, j)] - self.mat[(j, i)].conj()).norm();
                worst = worst.max(r);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residue() <= tol
    }

    /// Exact symmetrization (A + A†)/2.
    pub fn hermitized(&self) -> Self {
        Self { mat: (&self.mat + self.mat.adjoint()).scale(0.5) }
    }

    /// [A, B] = AB − BA.
    pub fn commutator(&self, other: &Self) -> Result<Self, OperatorError> {
        self.check_same_dim(other)?;
        Ok(Self { mat: &self.mat * &other.mat - &other.mat * &self.mat })
    }

    /// {A, B} = AB + BA.
    pub fn anticommutator(&self, other: &Self) -> Result<Self, OperatorError> {
        self.check_same_dim(other)?;
        Ok(Self { mat: &self.mat * &other.mat + &other.mat * &self.mat })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, OperatorError> {
        self.check_same_dim(other)?;
        Ok(Self { mat: &self.mat * &other.mat })
    }

    pub fn add(&self, other: &Self) -> Result<Self, OperatorError> {
        self.check_same_dim(other)?;
        Ok(Self { mat: &self.mat + &other.mat })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, OperatorError> {
        self.check_same_dim(other)?;
        Ok(Self { mat: &self.mat - &other.mat })
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector, OperatorError> {
        if self.dim() != psi.dim() {
            return Err(OperatorError::DimMismatch { left: self.dim(), right: psi.dim() });
        }
        let amps = &self.mat * nalgebra::DVector::from_column_slice(psi.amplitudes());
        Ok(StateVector { amps: amps.iter().copied().collect() })
    }

    fn check_same_dim(&self, other: &Self) -> Result<(), OperatorError> {
        if self.dim() != other.dim() {
            return Err(OperatorError::DimMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(())
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator { mat: &self.mat + &rhs.mat }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator { mat: &self.mat - &rhs.mat }
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator { mat: &self.mat * &rhs.mat }
    }
}

impl std::ops::Mul<Complex64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: Complex64) -> Operator {
        self.scale(rhs)
    }
}

impl std::ops::Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

/// Conjugate transpose, as a free function.
pub fn dagger(a: &Operator) -> Operator {
    a.dagger()
}

/// Kronecker product with the default dimension cap.
pub fn kron(a: &Operator, b: &Operator) -> Result<Operator, OperatorError> {
    a.kron(b)
}

/// [A, B] = AB − BA.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator, OperatorError> {
    a.commutator(b)
}

/// Tr(ρ·A).
pub fn expectation(rho: &DensityMatrix, a: &Operator) -> Result<Complex64, OperatorError> {
    if rho.dim() != a.dim() {
        return Err(OperatorError::DimMismatch { left: rho.dim(), right: a.dim() });
    }
    // Tr(ρA) = Σ_ij ρ_ij A_ji without forming the product
    let rm = rho.op().matrix();
    let am = a.matrix();
    let d = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += rm[(i, j)] * am[(j, i)];
        }
    }
    Ok(acc)
}

/// ⟨ψ|A|ψ⟩ for a normalized state.
pub fn pure_expectation(psi: &StateVector, a: &Operator) -> Result<Complex64, OperatorError> {
    let apsi = a.apply(psi)?;
    Ok(psi.inner(&apsi))
}

/// Hermitian, unit-trace, positive-semidefinite operator: the simulated state.
///
/// Construction validates all three invariants (Hermiticity ≤ 1e-10 max-norm,
/// |Tr − 1| ≤ 1e-8, smallest eigenvalue ≥ −1e-8); the phase antisymmetry
/// θ_kl = −θ_lk of the polar decomposition ρ_kl = r_kl e^{iθ_kl} then holds
/// automatically.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self, OperatorError> {
        let residue = op.hermiticity_residue();
        if residue > HERMITICITY_TOL {
            return Err(OperatorError::NotHermitian { residue, tol: HERMITICITY_TOL });
        }
        let trace = op.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(OperatorError::BadTrace { trace, tol: TRACE_TOL });
        }
        let min_eig = min_eigenvalue(&op);
        if min_eig < -POSITIVITY_TOL {
            return Err(OperatorError::NotPositive { min_eig, tol: POSITIVITY_TOL });
        }
        Ok(Self { op })
    }

    /// |ψ⟩⟨ψ| — always a valid state for a normalized ψ.
    pub fn from_pure(psi: &StateVector) -> Self {
        Self { op: psi.outer_product() }
    }

    /// I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        let w = Complex64::new(1.0 / dim as f64, 0.0);
        Self { op: Operator::from_diagonal(&vec![w; dim]) }
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_op(self) -> Operator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn trace(&self) -> f64 {
        self.op.trace().re
    }

    /// Tr ρ² — 1 for pure states, 1/d for the maximally mixed state.
    pub fn purity(&self) -> f64 {
        let m = self.op.matrix();
        // Tr(ρρ) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ
        m.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.op)
    }

    /// Sum of |ρ_kl| over k > l: the coherence weight that decoheres away.
    pub fn offdiagonal_l1(&self) -> f64 {
        let m = self.op.matrix();
        let d = self.op.dim();
        let mut acc = 0.0;
        for k in 1..d {
            for l in 0..k {
                acc += m[(k, l)].norm();
            }
        }
        acc
    }
}

fn min_eigenvalue(op: &Operator) -> f64 {
    op.matrix()
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
}

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Accepts amplitudes already normalized within 1e-10.
    pub fn new(amps: Vec<Complex64>) -> Result<Self, OperatorError> {
        if amps.is_empty() {
            return Err(OperatorError::ZeroDim);
        }
        let norm = norm_of(&amps);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(OperatorError::BadNorm { norm, tol: NORM_TOL });
        }
        Ok(Self { amps })
    }

    /// Rescales arbitrary amplitudes to unit norm.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self, OperatorError> {
        if amps.is_empty() {
            return Err(OperatorError::ZeroDim);
        }
        let norm = norm_of(&amps);
        if norm < 1e-300 {
            return Err(OperatorError::ZeroVector);
        }
        let inv = 1.0 / norm;
        for a in &mut amps {
            *a *= inv;
        }
        Ok(Self { amps })
    }

    /// e_n.
    pub fn basis_state(dim: usize, n: usize) -> Result<Self, OperatorError> {
        if n >= dim {
            return Err(OperatorError::BadRank { rank: n, dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[n] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        norm_of(&self.amps)
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |ψ⟩⟨ψ|.
    pub fn outer_product(&self) -> Operator {
        let d = self.amps.len();
        let mut mat = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                mat[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        Operator { mat }
    }
}

fn norm_of(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Ascending eigenvalues and gauge-fixed eigenvectors of a Hermitian operator.
///
/// `rank` marks how many of the lowest levels downstream consumers keep;
/// a fresh decomposition has `rank == dim`.
#[derive(Debug, Clone)]
pub struct EnergyBasis {
    energies: Vec<f64>,
    vectors: Operator,
    rank: usize,
}

impl EnergyBasis {
    pub fn new(energies: Vec<f64>, vectors: Operator, rank: usize) -> Result<Self, OperatorError> {
        let dim = vectors.dim();
        if energies.len() != dim {
            return Err(OperatorError::DimMismatch { left: energies.len(), right: dim });
        }
        if rank < 1 || rank > dim {
            return Err(OperatorError::BadRank { rank, dim });
        }
        for i in 1..energies.len() {
            if energies[i] < energies[i - 1] {
                return Err(OperatorError::EnergiesNotAscending { index: i });
            }
        }
        let u = vectors.matrix();
        let residue = (u.adjoint() * u - DMatrix::<Complex64>::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if residue > 1e-8 {
            return Err(OperatorError::NotUnitary { residue });
        }
        Ok(Self { energies, vectors, rank })
    }

    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// The kept (lowest `rank`) energies.
    pub fn kept_energies(&self) -> &[f64] {
        &self.energies[..self.rank]
    }

    /// Full unitary eigenvector matrix; column n is |n⟩.
    pub fn vectors(&self) -> &Operator {
        &self.vectors
    }

    /// Same decomposition with a smaller kept rank.
    pub fn with_rank(&self, rank: usize) -> Result<Self, OperatorError> {
        if rank < 1 || rank > self.dim() {
            return Err(OperatorError::BadRank { rank, dim: self.dim() });
        }
        Ok(Self { energies: self.energies.clone(), vectors: self.vectors.clone(), rank })
    }

    /// dim × rank slice U_r of the eigenvector matrix.
    pub fn projector(&self) -> DMatrix<Complex64> {
        self.vectors.matrix().columns(0, self.rank).into_owned()
    }

    /// A basis whose vectors are the identity: frames expressed in truncated
    /// energy coordinates are already in the eigenbasis.
    pub fn identity_for_truncated(&self) -> Result<Self, OperatorError> {
        Self::new(
            self.energies[..self.rank].to_vec(),
            Operator::identity(self.rank),
            self.rank,
        )
    }

    pub fn eigenvector(&self, n: usize) -> Result<StateVector, OperatorError> {
        if n >= self.dim() {
            return Err(OperatorError::BadRank { rank: n, dim: self.dim() });
        }
        let col: Vec<Complex64> = self.vectors.matrix().column(n).iter().copied().collect();
        StateVector::new(col)
    }
}

/// Eigendecomposition of a Hermitian operator with a deterministic gauge.
///
/// Post-conditions: eigenvalues ascending; U unitary; H·U ≈ U·diag(E);
/// in each eigenvector the first entry of largest modulus is made real and
/// non-negative (so eigenvectors are reproducible up to degeneracy). Exactly
/// equal eigenvalues are ordered by the gauge-fixed eigenvectors'
/// lexicographic order, which is documented but not physically meaningful.
pub fn hermitian_eig(h: &Operator) -> Result<EnergyBasis, OperatorError> {
    let residue = h.hermiticity_residue();
    if residue > HERMITICITY_TOL {
        return Err(OperatorError::NotHermitian { residue, tol: HERMITICITY_TOL });
    }
    let dim = h.dim();
    // symmetrize exactly so the solver never sees the fp asymmetry
    let eig = h.hermitized().into_matrix().symmetric_eigen();

    let mut columns: Vec<(f64, Vec<Complex64>)> = (0..dim)
        .map(|k| {
            let mut col: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
            gauge_fix(&mut col);
            (eig.eigenvalues[k], col)
        })
        .collect();

    columns.sort_by(|(ea, va), (eb, vb)| {
        ea.total_cmp(eb).then_with(|| lex_cmp(va, vb))
    });

    let energies: Vec<f64> = columns.iter().map(|(e, _)| *e).collect();
    let mut u = DMatrix::zeros(dim, dim);
    for (k, (_, col)) in columns.iter().enumerate() {
        for i in 0..dim {
            u[(i, k)] = col[i];
        }
    }
    EnergyBasis::new(energies, Operator { mat: u }, dim)
}

/// Rotates the phase so the first entry of largest modulus is real non-negative.
fn gauge_fix(col: &mut [Complex64]) {
    let mut best = 0usize;
    let mut best_mod = -1.0f64;
    for (i, z) in col.iter().enumerate() {
        let m = z.norm();
        if m > best_mod + 1e-300 && m > best_mod {
            best_mod = m;
            best = i;
        }
    }
    let pivot = col[best];
    let m = pivot.norm();
    if m > 0.0 {
        let phase = pivot.conj() / m;
        for z in col.iter_mut() {
            *z *= phase;
        }
        // pin the pivot exactly real
        col[best] = Complex64::new(col[best].re.abs(), 0.0);
    }
}

fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let c = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if c != std::cmp::Ordering::Equal {
            return c;
        }
    }
    std::cmp::Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    use crate::test_support::{random_hermitian, random_operator};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_x() -> Operator {
        Operator::from_rows(2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
    }

    fn sigma_y() -> Operator {
        Operator::from_rows(2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap()
    }

    fn sigma_z() -> Operator {
        Operator::from_rows(2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]).unwrap()
    }

    #[test]
    fn dagger_identity_is_identity() {
        let i4 = Operator::identity(4);
        assert_eq!(dagger(&i4), i4);
    }

    #[test]
    fn dagger_lowering_gives_raising() {
        // σ⁻ = [[0,0],[1,0]] and σ⁺ = [[0,1],[0,0]] in basis (↑,↓)
        let sm = Operator::from_rows(2, &[c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.)]).unwrap();
        let sp = Operator::from_rows(2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]).unwrap();
        assert_eq!(dagger(&sm), sp);
    }

    #[test]
    fn dagger_conjugates_entries() {
        let a = Operator::from_rows(2, &[c(0., 0.), c(0., 1.), c(0., 0.), c(0., 0.)]).unwrap();
        let expect =
            Operator::from_rows(2, &[c(0., 0.), c(0., 0.), c(0., -1.), c(0., 0.)]).unwrap();
        assert_eq!(dagger(&a), expect);
    }

    #[test]
    fn dagger_is_involution_and_antihomomorphism() {
        for seed in 0..20u64 {
            let a = random_operator(5, seed);
            let b = random_operator(5, seed + 1000);
            assert_eq!(dagger(&dagger(&a)), a);
            let ab_dag = dagger(&a.matmul(&b).unwrap());
            let bdag_adag = dagger(&b).matmul(&dagger(&a)).unwrap();
            let diff = ab_dag.sub(&bdag_adag).unwrap().max_norm();
            assert!(diff <= 1e-12, "(AB)† vs B†A† differ by {diff}");
        }
    }

    #[test]
    fn kron_identities() {
        let i2 = Operator::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), Operator::identity(4));
    }

    #[test]
    fn kron_sigma_z_with_identity() {
        let got = kron(&sigma_z(), &Operator::identity(2)).unwrap();
        let expect = Operator::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]);
        assert_eq!(got, expect);
    }

    #[test]
    fn kron_sigma_x_pair_maps_e0_to_e3() {
        // hand expansion: σ^x⊗σ^x is the anti-diagonal permutation
        let xx = kron(&sigma_x(), &sigma_x()).unwrap();
        let e0 = StateVector::basis_state(4, 0).unwrap();
        let out = xx.apply(&e0).unwrap();
        let e3 = StateVector::basis_state(4, 3).unwrap();
        assert_eq!(out.amplitudes(), e3.amplitudes());
    }

    #[test]
    fn kron_is_associative_and_multiplies_dims() {
        let a = random_operator(2, 7);
        let b = random_operator(3, 8);
        let d = random_operator(2, 9);
        let left = kron(&kron(&a, &b).unwrap(), &d).unwrap();
        let right = kron(&a, &kron(&b, &d).unwrap()).unwrap();
        assert_eq!(left.dim(), 12);
        assert_eq!(left, right);
    }

    #[test]
    fn kron_dimension_cap() {
        let big = Operator::identity(128);
        let err = big.kron_with_limit(&Operator::identity(64), 4096).unwrap_err();
        match err {
            OperatorError::KronTooLarge { dim, max } => {
                assert_eq!(dim, 8192);
                assert_eq!(max, 4096);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn eig_sigma_z_sorted() {
        let basis = hermitian_eig(&sigma_z()).unwrap();
        assert_abs_diff_eq!(basis.energies()[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(basis.energies()[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eig_sigma_x_gauge_fixed_vectors() {
        let basis = hermitian_eig(&sigma_x()).unwrap();
        assert_abs_diff_eq!(basis.energies()[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(basis.energies()[1], 1.0, epsilon = 1e-12);
        let s = 1.0 / 2.0f64.sqrt();
        let v0 = basis.eigenvector(0).unwrap();
        let v1 = basis.eigenvector(1).unwrap();
        // gauge: first largest-modulus entry real non-negative
        assert_abs_diff_eq!(v0.amplitudes()[0].re, s, epsilon = 1e-12);
        assert_abs_diff_eq!(v0.amplitudes()[1].re, -s, epsilon = 1e-12);
        assert_abs_diff_eq!(v1.amplitudes()[0].re, s, epsilon = 1e-12);
        assert_abs_diff_eq!(v1.amplitudes()[1].re, s, epsilon = 1e-12);
    }

    #[test]
    fn eig_sorts_diagonal_with_permutation_vectors() {
        let h = Operator::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let basis = hermitian_eig(&h).unwrap();
        assert_eq!(basis.energies(), &[1.0, 2.0, 3.0]);
        // eigenvector of E=1 is e1, E=2 is e2, E=3 is e0
        for (k, idx) in [(0usize, 1usize), (1, 2), (2, 0)] {
            let v = basis.eigenvector(k).unwrap();
            for (i, a) in v.amplitudes().iter().enumerate() {
                let expect = if i == idx { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(a.re, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a = Operator::from_rows(2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]).unwrap();
        assert!(matches!(hermitian_eig(&a), Err(OperatorError::NotHermitian { .. })));
    }

    #[test]
    fn eig_reconstruction_up_to_dim_64() {
        for &dim in &[2usize, 5, 16, 64] {
            let h = random_hermitian(dim, 42 + dim as u64);
            let basis = hermitian_eig(&h).unwrap();
            let u = basis.vectors().matrix();
            let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                dim,
                basis.energies().iter().map(|&e| c(e, 0.0)),
            ));
            let rec = u * lam * u.adjoint();
            let err = (rec - h.matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            let bound = 1e-8 * h.max_norm().max(1.0);
            assert!(err <= bound, "dim {dim}: reconstruction error {err} > {bound}");
            let uni = (basis.vectors().matrix().adjoint() * basis.vectors().matrix()
                - DMatrix::<Complex64>::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
            assert!(uni <= 1e-8, "dim {dim}: unitarity residue {uni}");
        }
    }

    #[test]
    fn eig_is_deterministic() {
        let h = random_hermitian(24, 9_001);
        let a = hermitian_eig(&h).unwrap();
        let b = hermitian_eig(&h).unwrap();
        assert_eq!(a.energies(), b.energies());
        assert_eq!(a.vectors(), b.vectors());
    }

    #[test]
    fn trace_is_similarity_invariant() {
        let h = random_hermitian(12, 5);
        let basis = hermitian_eig(&h).unwrap();
        let a = random_operator(12, 77);
        let u = basis.vectors();
        let rotated = u.dagger().matmul(&a).unwrap().matmul(u).unwrap();
        let diff = (rotated.trace() - a.trace()).norm();
        assert!(diff <= 1e-10, "trace drift {diff}");
    }

    #[test]
    fn expectation_examples() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert_abs_diff_eq!(expectation(&rho, &sigma_z()).unwrap().re, 0.0, epsilon = 1e-15);

        let up = StateVector::basis_state(2, 0).unwrap();
        let rho_up = DensityMatrix::from_pure(&up);
        assert_abs_diff_eq!(expectation(&rho_up, &sigma_z()).unwrap().re, 1.0, epsilon = 1e-15);

        let plus = StateVector::normalized(vec![c(1., 0.), c(1., 0.)]).unwrap();
        let rho_plus = DensityMatrix::from_pure(&plus);
        assert_abs_diff_eq!(expectation(&rho_plus, &sigma_x()).unwrap().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn expectation_hermitian_has_negligible_imaginary_part() {
        for seed in 0..10u64 {
            let h = random_hermitian(6, 300 + seed);
            let psi = StateVector::normalized(
                random_operator(6, 400 + seed).matrix().column(0).iter().copied().collect(),
            )
            .unwrap();
            let rho = DensityMatrix::from_pure(&psi);
            let v = expectation(&rho, &h).unwrap();
            assert!(v.im.abs() <= 1e-10, "imaginary residue {}", v.im);
        }
    }

    #[test]
    fn expectation_dim_mismatch() {
        let rho = DensityMatrix::maximally_mixed(2);
        let a = Operator::identity(3);
        assert!(matches!(
            expectation(&rho, &a),
            Err(OperatorError::DimMismatch { .. })
        ));
    }

    #[test]
    fn commutator_pauli_algebra() {
        // [σx, σy] = 2iσz
        let got = commutator(&sigma_x(), &sigma_y()).unwrap();
        let expect = sigma_z().scale(c(0., 2.));
        assert!(got.sub(&expect).unwrap().max_norm() <= 1e-15);
    }

    #[test]
    fn commutator_with_identity_and_self() {
        let a = random_operator(4, 11);
        let zero = commutator(&Operator::identity(4), &a).unwrap();
        assert_eq!(zero.max_norm(), 0.0);
        let self_comm = commutator(&a, &a).unwrap();
        assert_eq!(self_comm.max_norm(), 0.0);
    }

    #[test]
    fn diagonal_matrices_commute() {
        let a = Operator::from_real_diagonal(&[1.0, 2.0]);
        let b = Operator::from_real_diagonal(&[3.0, 4.0]);
        assert_eq!(commutator(&a, &b).unwrap().max_norm(), 0.0);
    }

    #[test]
    fn density_matrix_validation() {
        // trace off
        let bad = Operator::from_real_diagonal(&[0.7, 0.7]);
        assert!(matches!(DensityMatrix::new(bad), Err(OperatorError::BadTrace { .. })));
        // not hermitian
        let bad = Operator::from_rows(
            2,
            &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
        )
        .unwrap();
        assert!(matches!(DensityMatrix::new(bad), Err(OperatorError::NotHermitian { .. })));
        // negative eigenvalue
        let bad = Operator::from_real_diagonal(&[1.5, -0.5]);
        assert!(matches!(DensityMatrix::new(bad), Err(OperatorError::NotPositive { .. })));
        // valid
        let rho = DensityMatrix::new(Operator::from_real_diagonal(&[0.25, 0.75])).unwrap();
        assert_abs_diff_eq!(rho.purity(), 0.625, epsilon = 1e-15);
    }

    #[test]
    fn state_vector_norm_contract() {
        assert!(matches!(
            StateVector::new(vec![c(0.9, 0.0), c(0.0, 0.0)]),
            Err(OperatorError::BadNorm { .. })
        ));
        let psi = StateVector::normalized(vec![c(3.0, 0.0), c(4.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.amplitudes()[0].re, 0.6, epsilon = 1e-15);
    }
}
