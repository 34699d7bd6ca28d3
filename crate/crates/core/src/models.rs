//! The two physical systems, constructed as [`LindbladModel`] values.
//!
//! A heat-bath particle in a quartic double well,
//!
//! ```text
//!   H_γ = P²/2m + c₄X⁴ − c₂X² + (γ/2)(XP + PX)
//!   L   = √(4γmk_BT/ħ)·X + i·√(γħ/(4mk_BT))·P
//! ```
//!
//! on a uniform position grid, and a boundary-driven XXZ spin-½ chain,
//!
//! ```text
//!   H = J Σ_j [σ_j^x σ_{j+1}^x + σ_j^y σ_{j+1}^y + Δ(σ_j^z σ_{j+1}^z − I)]
//! ```
//!
//! with rank-one raising/lowering drives on sites 1 and N that pin the edge
//! spins of a helix. Units are ħ = 1 with k_B folded into kT.

use num_complex::Complex64;
use thiserror::Error;

use crate::operators::{
    hermitian_eig, EnergyBasis, Operator, OperatorError, HERMITICITY_TOL,
};

/// Hard cap on chain length: dim = 2^8 = 256 is the largest dense chain.
pub const MAX_CHAIN_SITES: usize = 8;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("chain of {n_sites} sites exceeds the dense cap of {max} (dim 2^{max})")]
    ModelTooLarge { n_sites: usize, max: usize },
    #[error("truncation rank {rank} invalid for dimension {dim} (need 2 <= rank <= dim)")]
    BadTruncationRank { rank: usize, dim: usize },
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// Uniform position grid on [−x_max, +x_max].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n_points: usize,
    pub x_max: f64,
    pub mass: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n_points: 256, x_max: 6.0, mass: 1.0 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_points < 16 {
            return Err(ModelError::InvalidGrid(format!(
                "n_points = {} but at least 16 are required",
                self.n_points
            )));
        }
        if !(self.x_max > 0.0) {
            return Err(ModelError::InvalidGrid(format!("x_max = {} must be positive", self.x_max)));
        }
        if !(self.mass > 0.0) {
            return Err(ModelError::InvalidGrid(format!("mass = {} must be positive", self.mass)));
        }
        Ok(())
    }

    /// Grid spacing h = 2·x_max/(n_points − 1).
    pub fn spacing(&self) -> f64 {
        2.0 * self.x_max / (self.n_points as f64 - 1.0)
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_points).map(|i| -self.x_max + i as f64 * h).collect()
    }
}

/// Quartic double well V(x) = c₄x⁴ − c₂x² coupled to a heat bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleWellParams {
    pub c4: f64,
    pub c2: f64,
    /// Damping coefficient γ; zero means a closed system.
    pub gamma: f64,
    /// k_B·T product; only meaningful (and required positive) when γ > 0.
    pub kt: f64,
    pub mass: f64,
}

impl DoubleWellParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.mass > 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "mass = {} must be positive",
                self.mass
            )));
        }
        if self.gamma < 0.0 {
            return Err(ModelError::InvalidParams(format!(
                "gamma = {} must be non-negative",
                self.gamma
            )));
        }
        if self.gamma > 0.0 && !(self.kt > 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "kT = {} must be positive when gamma > 0 (the jump operator divides by kT)",
                self.kt
            )));
        }
        // c2 < 0 turns the well into +|c2|x²; the potential just has to confine
        if self.c4 < 0.0 || (self.c4 == 0.0 && self.c2 >= 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "potential c4 x^4 - c2 x^2 with c4 = {}, c2 = {} is not confining",
                self.c4, self.c2
            )));
        }
        Ok(())
    }

    /// V(x) = c₄x⁴ − c₂x².
    pub fn potential(&self, x: f64) -> f64 {
        self.c4 * x.powi(4) - self.c2 * x * x
    }
}

/// Boundary-driven XXZ chain parameters. Rates may be complex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XXZParams {
    pub n_sites: usize,
    /// Exchange coupling J.
    pub coupling: f64,
    /// Anisotropy Δ = cos η.
    pub delta: f64,
    pub alpha_l: Complex64,
    pub beta_l: Complex64,
    pub alpha_r: Complex64,
    pub beta_r: Complex64,
    /// Dark-state amplitude ratio of the boundary drives.
    pub r: f64,
    /// Helix twist Φ accumulated across the chain.
    pub phi: f64,
}

impl XXZParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_sites < 2 {
            return Err(ModelError::InvalidParams(format!(
                "n_sites = {} but a chain needs at least 2 sites",
                self.n_sites
            )));
        }
        if self.n_sites > MAX_CHAIN_SITES {
            return Err(ModelError::ModelTooLarge { n_sites: self.n_sites, max: MAX_CHAIN_SITES });
        }
        if self.r < 0.0 {
            return Err(ModelError::InvalidParams(format!("r = {} must be non-negative", self.r)));
        }
        Ok(())
    }
}

/// Effective Hamiltonian plus ordered jump operators: the complete
/// dynamical specification consumed by the integrators.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    h_eff: Operator,
    jumps: Vec<Operator>,
    hbar: f64,
    label: String,
}

impl LindbladModel {
    pub fn new(
        h_eff: Operator,
        jumps: Vec<Operator>,
        hbar: f64,
        label: impl Into<String>,
    ) -> Result<Self, ModelError> {
        if !(hbar > 0.0) {
            return Err(ModelError::InvalidParams(format!("hbar = {hbar} must be positive")));
        }
        let residue = h_eff.hermiticity_residue();
        if residue > HERMITICITY_TOL {
            return Err(ModelError::Operator(OperatorError::NotHermitian {
                residue,
                tol: HERMITICITY_TOL,
            }));
        }
        for (k, l) in jumps.iter().enumerate() {
            if l.dim() != h_eff.dim() {
                return Err(ModelError::InvalidParams(format!(
                    "jump operator {} has dim {} but h_eff has dim {}",
                    k,
                    l.dim(),
                    h_eff.dim()
                )));
            }
        }
        Ok(Self { h_eff, jumps, hbar, label: label.into() })
    }

    pub fn h_eff(&self) -> &Operator {
        &self.h_eff
    }

    pub fn jumps(&self) -> &[Operator] {
        &self.jumps
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.h_eff.dim()
    }
}

/// Position and momentum on the grid: X diagonal, P = −iħD with the
/// antisymmetric central-difference D (Dirichlet boundaries), which makes
/// P exactly Hermitian.
pub fn build_position_operators(grid: &GridSpec) -> Result<(Operator, Operator), ModelError> {
    grid.validate()?;
    let n = grid.n_points;
    let h = grid.spacing();
    let x = Operator::from_real_diagonal(&grid.points());

    let mut p = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    let w = Complex64::new(0.0, -1.0) / (2.0 * h); // −iħ/(2h), ħ = 1
    for i in 0..n {
        if i + 1 < n {
            p[(i, i + 1)] = w;
        }
        if i > 0 {
            p[(i, i - 1)] = -w;
        }
    }
    Ok((x, Operator::from_matrix(p)?))
}

/// Kinetic energy P²/2m as the 3-point second-difference stencil.
///
/// The matrix square of the central-difference P couples only next-nearest
/// grid sites, splitting the problem into two decoupled sublattices whose
/// spectra coincide; the 3-point stencil keeps the physical tunnelling gap.
fn kinetic_operator(grid: &GridSpec, mass: f64) -> Operator {
    let n = grid.n_points;
    let h = grid.spacing();
    let diag = 1.0 / (mass * h * h);
    let off = -0.5 / (mass * h * h);
    let mut t = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        t[(i, i)] = Complex64::new(diag, 0.0);
        if i + 1 < n {
            t[(i, i + 1)] = Complex64::new(off, 0.0);
        }
        if i > 0 {
            t[(i, i - 1)] = Complex64::new(off, 0.0);
        }
    }
    Operator::from_matrix(t).expect("square by construction")
}

/// Heat-bath double well: H_γ = T + V + (γ/2)(XP+PX) with the single jump
/// operator L = √(4γmkT/ħ)·X + i√(γħ/(4mkT))·P; γ = 0 gives a closed system
/// with no jumps.
pub fn build_double_well(
    grid: &GridSpec,
    params: &DoubleWellParams,
) -> Result<LindbladModel, ModelError> {
    grid.validate()?;
    params.validate()?;
    let hbar = 1.0;
    let (x, p) = build_position_operators(grid)?;
    let t = kinetic_operator(grid, params.mass);
    let v = Operator::from_real_diagonal(
        &grid.points().iter().map(|&xi| params.potential(xi)).collect::<Vec<_>>(),
    );

    let mut h_eff = t.add(&v)?;
    let mut jumps = Vec::new();
    if params.gamma > 0.0 {
        let xp_px = x.matmul(&p)?.add(&p.matmul(&x)?)?;
        h_eff = h_eff.add(&xp_px.scale(Complex64::new(0.5 * params.gamma, 0.0)))?;

        let cx = (4.0 * params.gamma * params.mass * params.kt / hbar).sqrt();
        let cp = (params.gamma * hbar / (4.0 * params.mass * params.kt)).sqrt();
        let l = x.scale(Complex64::new(cx, 0.0)).add(&p.scale(Complex64::new(0.0, cp)))?;
        jumps.push(l);
    }
    // (XP+PX)† = XP+PX, so h_eff stays Hermitian; enforce it exactly
    LindbladModel::new(h_eff.hermitized(), jumps, hbar, "double_well")
}

/// Pauli matrices and spin-chain embedding helpers, basis (↑, ↓) per site
/// with σ⁺|↓⟩ = |↑⟩.
pub mod spin {
    use super::*;

    pub fn identity() -> Operator {
        Operator::identity(2)
    }

    pub fn pauli_x() -> Operator {
        Operator::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_y() -> Operator {
        Operator::from_rows(
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap()
    }

    pub fn pauli_z() -> Operator {
        Operator::from_real_rows(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    /// σ⁺ = (σ^x + iσ^y)/2 = |↑⟩⟨↓|.
    pub fn sigma_plus() -> Operator {
        Operator::from_real_rows(2, &[0.0, 1.0, 0.0, 0.0]).unwrap()
    }

    /// σ⁻ = (σ^x − iσ^y)/2 = |↓⟩⟨↑|.
    pub fn sigma_minus() -> Operator {
        Operator::from_real_rows(2, &[0.0, 0.0, 1.0, 0.0]).unwrap()
    }

    /// Embeds `op` at `site` (1-based; site 1 is the leftmost tensor factor)
    /// of an `n_sites` chain.
    pub fn site_operator(op: &Operator, site: usize, n_sites: usize) -> Result<Operator, ModelError> {
        if site == 0 || site > n_sites {
            return Err(ModelError::InvalidParams(format!(
                "site {site} out of range for a {n_sites}-site chain"
            )));
        }
        let mut out = Operator::identity(1);
        for k in 1..=n_sites {
            let factor = if k == site { op.clone() } else { identity() };
            out = out.kron_with_limit(&factor, 1 << MAX_CHAIN_SITES)?;
        }
        Ok(out)
    }
}

/// Boundary-driven XXZ chain with the helix-pinning jump operators
///
/// ```text
///   L_L = α_L(r σ₁⁻σ₁⁺) − β_L[(σ₁^z − I)/2 − r σ₁⁻]
///   L_R = α_R(r e^{−iΦ} σ_N⁻σ_N⁺) − β_R[(σ_N^z − I)/2 − r e^{iΦ} σ_N⁻]
/// ```
///
/// kept exactly in this form, including the asymmetry that the first term of
/// L_L carries no phase while L_R does.
pub fn build_xxz_chain(params: &XXZParams) -> Result<LindbladModel, ModelError> {
    params.validate()?;
    let n = params.n_sites;
    let dim = 1usize << n;
    let identity = Operator::identity(dim);

    let mut h = Operator::zeros(dim);
    for j in 1..n {
        let xx = spin::site_operator(&spin::pauli_x(), j, n)?
            .matmul(&spin::site_operator(&spin::pauli_x(), j + 1, n)?)?;
        let yy = spin::site_operator(&spin::pauli_y(), j, n)?
            .matmul(&spin::site_operator(&spin::pauli_y(), j + 1, n)?)?;
        let zz = spin::site_operator(&spin::pauli_z(), j, n)?
            .matmul(&spin::site_operator(&spin::pauli_z(), j + 1, n)?)?;
        let aniso = zz.sub(&identity)?.scale(Complex64::new(params.delta, 0.0));
        h = h.add(&xx)?.add(&yy)?.add(&aniso)?;
    }
    let h = h.scale(Complex64::new(params.coupling, 0.0));

    let r = Complex64::new(params.r, 0.0);
    let phase_minus = Complex64::from_polar(1.0, -params.phi);
    let phase_plus = Complex64::from_polar(1.0, params.phi);

    let l_left = {
        let sm = spin::site_operator(&spin::sigma_minus(), 1, n)?;
        let sp = spin::site_operator(&spin::sigma_plus(), 1, n)?;
        let sz = spin::site_operator(&spin::pauli_z(), 1, n)?;
        let proj = sm.matmul(&sp)?; // σ⁻σ⁺ = |↓⟩⟨↓| on site 1
        let half = sz.sub(&identity)?.scale(Complex64::new(0.5, 0.0));
        proj.scale(params.alpha_l * r)
            .sub(&half.sub(&sm.scale(r))?.scale(params.beta_l))?
    };

    let l_right = {
        let sm = spin::site_operator(&spin::sigma_minus(), n, n)?;
        let sp = spin::site_operator(&spin::sigma_plus(), n, n)?;
        let sz = spin::site_operator(&spin::pauli_z(), n, n)?;
        let proj = sm.matmul(&sp)?;
        let half = sz.sub(&identity)?.scale(Complex64::new(0.5, 0.0));
        proj.scale(params.alpha_r * r * phase_minus)
            .sub(&half.sub(&sm.scale(r * phase_plus))?.scale(params.beta_r))?
    };

    LindbladModel::new(h, vec![l_left, l_right], 1.0, "xxz_chain")
}

/// H = 0 qubit with the single jump L = √γ·σ⁻: the amplitude-damping channel,
/// the one Lindblad model with a closed-form solution. Ships as a first-class
/// model purely for verification.
pub fn build_qubit_damping(gamma: f64) -> Result<LindbladModel, ModelError> {
    if gamma < 0.0 {
        return Err(ModelError::InvalidParams(format!(
            "gamma = {gamma} must be non-negative"
        )));
    }
    let jumps = if gamma > 0.0 {
        vec![spin::sigma_minus().scale(Complex64::new(gamma.sqrt(), 0.0))]
    } else {
        vec![]
    };
    LindbladModel::new(Operator::zeros(2), jumps, 1.0, "qubit_damping")
}

/// Projects every operator of `model` onto the lowest `rank` states of
/// `basis` (O ↦ U_r†·O·U_r). The basis must come from the γ = 0 Hamiltonian
/// of the same model family; the projected model lives in energy coordinates.
pub fn truncate_to_eigenbasis(
    model: &LindbladModel,
    basis: &EnergyBasis,
    rank: usize,
) -> Result<LindbladModel, ModelError> {
    let dim = model.dim();
    if basis.dim() != dim {
        return Err(ModelError::Operator(OperatorError::DimMismatch {
            left: basis.dim(),
            right: dim,
        }));
    }
    if rank < 2 || rank > dim {
        return Err(ModelError::BadTruncationRank { rank, dim });
    }
    let u_r = basis.with_rank(rank)?.projector();
    let project = |op: &Operator| -> Operator {
        Operator::from_matrix(u_r.adjoint() * op.matrix() * &u_r).expect("rank x rank")
    };
    let h_t = project(model.h_eff()).hermitized();
    let jumps_t: Vec<Operator> = model.jumps().iter().map(|l| project(l)).collect();
    LindbladModel::new(h_t, jumps_t, model.hbar(), model.label().to_string())
}
