//! Analytic logical operators on the three-qubit computational subspace.
//!
//! Matrices are 8×8 in logical order `|000>..|111>`, i.e. the order of
//! [`ProductBasis::computational_embedding`](crate::hilbert::ProductBasis::computational_embedding).

use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::dynamics::{gate_time, CavityParams};
use crate::error::{Error, Result};
use crate::grover::MarkedState;

pub type Matrix8 = SMatrix<Complex64, 8, 8>;
pub type Vector8 = SVector<Complex64, 8>;

/// Relative tolerance on the designed coupling ratios.
const RATIO_TOL: f64 = 1e-9;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Dense 8×8 operator on the logical subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalOperator(Matrix8);

impl LogicalOperator {
    pub fn zeros() -> Self {
        Self(Matrix8::zeros())
    }

    pub fn identity() -> Self {
        Self(Matrix8::identity())
    }

    pub fn from_matrix(m: Matrix8) -> Self {
        Self(m)
    }

    pub fn from_diagonal(d: [Complex64; 8]) -> Self {
        Self(Matrix8::from_diagonal(&Vector8::from(d)))
    }

    pub fn from_real_diagonal(d: [f64; 8]) -> Self {
        Self::from_diagonal(d.map(c))
    }

    pub fn matrix(&self) -> &Matrix8 {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.0[(row, col)] = value;
    }

    pub fn diagonal(&self) -> [Complex64; 8] {
        std::array::from_fn(|i| self.0[(i, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn apply(&self, state: &LogicalState) -> LogicalState {
        LogicalState(self.0 * state.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `O†O = I` within `tol`, entrywise.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_finite()
            && (self.0.adjoint() * self.0 - Matrix8::identity())
                .iter()
                .all(|z| z.norm() <= tol)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry magnitude off the diagonal, skipping column `skip_col`.
    pub fn max_off_diagonal(&self, skip_col: Option<usize>) -> f64 {
        let mut m: f64 = 0.0;
        for col in 0..8 {
            if Some(col) == skip_col {
                continue;
            }
            for row in (0..8).filter(|&r| r != col) {
                m = m.max(self.0[(row, col)].norm());
            }
        }
        m
    }
}

impl Mul for LogicalOperator {
    type Output = LogicalOperator;

    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl Mul for &LogicalOperator {
    type Output = LogicalOperator;

    fn mul(self, rhs: Self) -> LogicalOperator {
        LogicalOperator(self.0 * rhs.0)
    }
}

/// State vector on the logical subspace; unnormalized after decayed gates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalState(pub Vector8);

impl LogicalState {
    /// Computational basis state `|bits>`.
    pub fn basis(bits: u8) -> Self {
        let mut v = Vector8::zeros();
        v[(bits & 7) as usize] = c(1.0);
        Self(v)
    }

    pub fn amplitude(&self, bits: u8) -> Complex64 {
        self.0[(bits & 7) as usize]
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.norm_squared()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0.dotc(&other.0)
    }
}

/// Diagonal entries `(μ, γ, β, α)` of the decayed phase gate, at logical
/// slots `|000>, |001>, |010>, |011>` (with `−μ` at `|000>`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateDiagonal {
    pub mu: f64,
    pub gamma: f64,
    pub beta: f64,
    pub alpha: f64,
}

impl GateDiagonal {
    /// Closed forms for couplings `omega`, decay `kappa`, and interaction
    /// time `t`. The phase `cos(√65·π)` is fixed by the designed ratios.
    pub fn from_couplings(omega: [f64; 3], kappa: f64, t: f64) -> Self {
        let [w1, w2, w3] = omega.map(|w| w * w);
        let damp = (-kappa * t / 4.0).exp();
        let phase = (65f64.sqrt() * PI).cos();
        Self {
            mu: damp,
            gamma: 1.0 - w1 / (w1 + w3) * (1.0 - damp * phase),
            beta: 1.0 - w1 / (w1 + w2) * (1.0 - damp),
            alpha: 1.0 - w1 / (w1 + w2 + w3) * (1.0 - damp),
        }
    }

    /// `diag{−μ, γ, β, α, 1, 1, 1, 1}`
    pub fn to_operator(&self) -> LogicalOperator {
        LogicalOperator::from_real_diagonal([
            -self.mu, self.gamma, self.beta, self.alpha, 1.0, 1.0, 1.0, 1.0,
        ])
    }

    /// Entry-wise power, the diagonal of `n` identical gates applied in a row.
    pub fn powi(&self, n: i32) -> Self {
        Self {
            mu: self.mu.powi(n),
            gamma: self.gamma.powi(n),
            beta: self.beta.powi(n),
            alpha: self.alpha.powi(n),
        }
    }
}

/// Realized diagonal slot at `|e1 i2 g3>` without decay:
/// `(Ω1² cos(√65π) + Ω3²) / (Ω1² + Ω3²)`.
pub fn gamma0(params: &CavityParams) -> f64 {
    let [w1, _, w3] = params.omega().map(|w| w * w);
    (w1 * (65f64.sqrt() * PI).cos() + w3) / (w1 + w3)
}

fn require_designed(params: &CavityParams) -> Result<()> {
    if params.has_designed_ratios(RATIO_TOL) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "couplings {:?} violate the 1:√35:8 design",
            params.omega()
        )))
    }
}

/// Three-qubit Hadamard layer `(H ⊗ H ⊗ H)`.
pub fn hadamard3() -> LogicalOperator {
    let norm = 1.0 / 8f64.sqrt();
    LogicalOperator::from_matrix(Matrix8::from_fn(|r, col| {
        let sign = if (r & col).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        c(sign * norm)
    }))
}

/// Bit flip on logical qubit `qubit` (1-based, qubit 1 is the leading bit).
pub fn pauli_x(qubit: usize) -> Result<LogicalOperator> {
    if !(1..=3).contains(&qubit) {
        return Err(Error::Domain(format!("qubit index {qubit} not in 1..=3")));
    }
    let mask = 1 << (3 - qubit);
    Ok(LogicalOperator::from_matrix(Matrix8::from_fn(|r, col| {
        if r == col ^ mask {
            c(1.0)
        } else {
            c(0.0)
        }
    })))
}

/// Decay-free phase gate. `exact` gives `I − 2|000><000|`; otherwise the
/// realized `diag{−1, γ0, 1, …, 1}`.
pub fn ideal_i000(params: &CavityParams, exact: bool) -> Result<LogicalOperator> {
    require_designed(params)?;
    let g = if exact { 1.0 } else { gamma0(params) };
    Ok(LogicalOperator::from_real_diagonal([
        -1.0, g, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0,
    ]))
}

/// `I − 2|000><000|` without any parameter checks.
pub fn exact_i000() -> LogicalOperator {
    LogicalOperator::from_real_diagonal([-1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0])
}

/// Phase gate under weak cavity decay at the interaction time `π/A1κ`.
pub fn decayed_i000(params: &CavityParams) -> Result<(LogicalOperator, GateDiagonal)> {
    require_designed(params)?;
    let t = gate_time(params)?;
    let d = GateDiagonal::from_couplings(params.omega(), params.kappa(), t);
    Ok((d.to_operator(), d))
}

/// Moves the marked slot of `base` from `|000>` to `|tau>` by conjugating
/// with bit flips on every set bit of `tau`.
pub fn marked_gate(tau: MarkedState, base: &LogicalOperator) -> LogicalOperator {
    let mut flips = LogicalOperator::identity();
    for q in 1..=3 {
        if tau.bit(q) {
            flips = flips * pauli_x(q).expect("qubit in range");
        }
    }
    (&flips * base) * flips
}

/// Inversion about the mean, `D_ij = 2/N − δ_ij`.
pub fn diffusion() -> LogicalOperator {
    LogicalOperator::from_matrix(Matrix8::from_fn(|r, col| {
        c(0.25 - if r == col { 1.0 } else { 0.0 })
    }))
}
