//! Infidelity budgets for two experimental imperfections: atom 1 leaving the
//! cavity late, and coupling strengths offset from their designed values.
//!
//! Both closed forms use the uniform-input fidelity functional
//! `|<ψ0|R†U|ψ0>|² / ‖Uψ0‖²` with `ψ0` the uniform superposition and `R` the
//! target operator. Each has a dynamical counterpart that evolves the full
//! no-jump Hamiltonian instead.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::{
    build_effective_hamiltonian, coupling_hamiltonian, damped_frequency, extract_gate,
    extract_sequence, gate_time, CavityParams, EvolutionSettings,
};
use crate::error::{Error, Result};
use crate::gates::{exact_i000, GateDiagonal, LogicalOperator};
use crate::grover::initial_state;
use crate::hilbert::ProductBasis;

/// `1 − |<ψ0|R†U|ψ0>|² / (‖Uψ0‖²‖Rψ0‖²)` on the uniform state `ψ0`.
pub fn uniform_infidelity(actual: &LogicalOperator, reference: &LogicalOperator) -> f64 {
    let psi = initial_state();
    let out = actual.apply(&psi);
    let target = reference.apply(&psi);
    let norm = out.norm_squared() * target.norm_squared();
    if norm == 0.0 {
        return 1.0;
    }
    (1.0 - target.inner(&out).norm_sqr() / norm).clamp(0.0, 1.0)
}

/// Closed form of [`uniform_infidelity`] for a diagonal gate against
/// `I − 2|000><000|` (or the identity, for an even number of phase gates).
/// `d` holds the entries at slots `|000>..|011>` with signs removed.
fn diagonal_infidelity(d: [f64; 4]) -> f64 {
    let sum: f64 = 4.0 + d.iter().sum::<f64>();
    let sq: f64 = 4.0 + d.iter().map(|x| x * x).sum::<f64>();
    (1.0 - sum * sum / (8.0 * sq)).clamp(0.0, 1.0)
}

fn require_designed(params: &CavityParams) -> Result<()> {
    if params.has_designed_ratios(1e-9) {
        Ok(())
    } else {
        Err(Error::Config(
            "imperfection models assume the 1:√35:8 coupling design".into(),
        ))
    }
}

/// Atom 1 exits `delta_t` after atoms 2 and 3, which leave at the gate time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingScenario {
    delta_t: f64,
    params: CavityParams,
}

impl TimingScenario {
    pub fn new(delta_t: f64, params: CavityParams) -> Result<Self> {
        require_designed(&params)?;
        let t0 = gate_time(&params)?;
        if !(delta_t.is_finite() && (0.0..=t0).contains(&delta_t)) {
            return Err(Error::Domain(format!(
                "timing offset {delta_t} s outside [0, t0 = {t0} s]"
            )));
        }
        Ok(Self { delta_t, params })
    }

    /// Scenario with `delta_t = fraction · t0`.
    pub fn from_fraction(fraction: f64, params: CavityParams) -> Result<Self> {
        Self::new(fraction * gate_time(&params)?, params)
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    pub fn params(&self) -> &CavityParams {
        &self.params
    }
}

/// Closed-form single-gate infidelity for a late atom 1.
///
/// During the extra `δt` only atom 1 couples. Its vacuum amplitude picks up
/// `ξ = e^{−κδt/4}[cos(A1κ δt) + κ/(4A1κ) sin(A1κ δt)]`, and the photon left
/// behind by the `|e1 i2 g3>` block feeds back through
/// `Ω1²/(A1κ A3κ) e^{−κδt/4} sin(A1κ δt) sin(√65π)` with
/// `A3κ = √(Ω1² + Ω3² − κ²/16)`.
pub fn timing_infidelity(s: &TimingScenario) -> Result<f64> {
    let p = &s.params;
    let [w1, _, w3] = p.omega();
    let k = p.kappa();
    let dt = s.delta_t;
    let a1 = p.a1_kappa()?;
    let a3 = damped_frequency(w1 * w1 + w3 * w3, k)?;
    let d = GateDiagonal::from_couplings(p.omega(), k, gate_time(p)?);

    let damp = (-k * dt / 4.0).exp();
    let xi = damp * ((a1 * dt).cos() + k / (4.0 * a1) * (a1 * dt).sin());
    let feedback =
        w1 * w1 / (a1 * a3) * damp * (a1 * dt).sin() * (65f64.sqrt() * std::f64::consts::PI).sin();
    Ok(diagonal_infidelity([
        xi * d.mu,
        xi * d.gamma - feedback,
        xi * d.beta,
        xi * d.alpha,
    ]))
}

/// Full-dynamics counterpart of [`timing_infidelity`]: all three atoms
/// couple for `t0`, then atom 1 alone for `δt`.
pub fn timing_oracle(s: &TimingScenario, settings: &EvolutionSettings) -> Result<f64> {
    let p = &s.params;
    let basis = ProductBasis::new(p.photon_cutoff())?;
    let full = build_effective_hamiltonian(p, &basis);
    let atom1 = coupling_hamiltonian([p.omega1(), 0.0, 0.0], p.kappa(), &basis);
    let gate = extract_sequence(
        &basis,
        &[(full, gate_time(p)?), (atom1, s.delta_t)],
        settings,
    )?;
    Ok(uniform_infidelity(&gate.restricted, &exact_i000()))
}

/// How the offset constant `η` maps onto the three couplings:
/// `Ω'_j = (1 + η·w_j) Ω_j` for per-atom weights `w`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum OffsetModel {
    /// `w = (1, 0, 0)`
    #[default]
    Atom1Only,
    /// `w = (1, 1, 1)`; leaves every coupling ratio unchanged.
    Uniform,
    /// Arbitrary per-atom weights.
    PerAtom([f64; 3]),
}

impl OffsetModel {
    pub fn weights(&self) -> [f64; 3] {
        match self {
            OffsetModel::Atom1Only => [1.0, 0.0, 0.0],
            OffsetModel::Uniform => [1.0, 1.0, 1.0],
            OffsetModel::PerAtom(w) => *w,
        }
    }
}

impl fmt::Display for OffsetModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OffsetModel::Atom1Only => f.write_str("atom1"),
            OffsetModel::Uniform => f.write_str("uniform"),
            OffsetModel::PerAtom([a, b, c]) => write!(f, "per_atom({a},{b},{c})"),
        }
    }
}

impl FromStr for OffsetModel {
    type Err = Error;

    /// `atom1`, `uniform`, or `per_atom(w1,w2,w3)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "atom1" => return Ok(OffsetModel::Atom1Only),
            "uniform" => return Ok(OffsetModel::Uniform),
            _ => {}
        }
        let bad = || {
            Error::Config(format!(
                "offset model must be atom1, uniform or per_atom(w1,w2,w3), got {s:?}"
            ))
        };
        let inner = s
            .strip_prefix("per_atom(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let parts: Vec<f64> = inner
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        match parts.as_slice() {
            &[a, b, c] if parts.iter().all(|w| w.is_finite()) => {
                Ok(OffsetModel::PerAtom([a, b, c]))
            }
            _ => Err(bad()),
        }
    }
}

/// `chi` of the four cavities in a two-iteration search carry couplings
/// offset by `eta` under `model`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetScenario {
    eta: f64,
    chi: u32,
    model: OffsetModel,
    params: CavityParams,
}

impl OffsetScenario {
    /// Phase gates in a two-iteration search.
    pub const CAVITIES: u32 = 4;

    pub fn new(eta: f64, chi: u32, model: OffsetModel, params: CavityParams) -> Result<Self> {
        require_designed(&params)?;
        if !(1..=Self::CAVITIES).contains(&chi) {
            return Err(Error::Domain(format!(
                "imperfect cavity count {chi} not in 1..=4"
            )));
        }
        if !(eta.is_finite() && eta.abs() < 1.0) {
            return Err(Error::Domain(format!(
                "offset constant {eta} must satisfy |η| < 1"
            )));
        }
        let s = Self {
            eta,
            chi,
            model,
            params,
        };
        if s.offset_couplings()
            .iter()
            .any(|w| !(w.is_finite() && *w > 0.0))
        {
            return Err(Error::Domain(format!(
                "offset {eta} under {model} removes a coupling"
            )));
        }
        Ok(s)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn chi(&self) -> u32 {
        self.chi
    }

    pub fn model(&self) -> OffsetModel {
        self.model
    }

    /// Primed couplings `Ω'_j` of an imperfect cavity.
    pub fn offset_couplings(&self) -> [f64; 3] {
        let w = self.model.weights();
        let omega = self.params.omega();
        std::array::from_fn(|j| (1.0 + self.eta * w[j]) * omega[j])
    }
}

/// Primed coupling triple for `s`.
pub fn offset_couplings(s: &OffsetScenario) -> [f64; 3] {
    s.offset_couplings()
}

/// Closed-form infidelity of four phase gates, `chi` of them with offset
/// couplings, all run for the ideal interaction time.
pub fn coupling_offset_infidelity(s: &OffsetScenario) -> Result<f64> {
    let p = &s.params;
    let t0 = gate_time(p)?;
    let good = GateDiagonal::from_couplings(p.omega(), p.kappa(), t0)
        .powi((OffsetScenario::CAVITIES - s.chi) as i32);
    let bad = GateDiagonal::from_couplings(s.offset_couplings(), p.kappa(), t0).powi(s.chi as i32);
    Ok(diagonal_infidelity([
        bad.mu * good.mu,
        bad.gamma * good.gamma,
        bad.beta * good.beta,
        bad.alpha * good.alpha,
    ]))
}

/// Full-dynamics counterpart of [`coupling_offset_infidelity`]: the product
/// of `chi` simulated offset gates and `4 − chi` simulated ideal gates,
/// compared against the identity.
pub fn offset_oracle(s: &OffsetScenario, settings: &EvolutionSettings) -> Result<f64> {
    let p = &s.params;
    let t0 = gate_time(p)?;
    let good = extract_gate(p, t0, settings)?.restricted;
    let bad = extract_gate(&p.with_couplings(s.offset_couplings())?, t0, settings)?.restricted;
    let mut total = LogicalOperator::identity();
    for i in 0..OffsetScenario::CAVITIES {
        total = if i < s.chi { bad * total } else { good * total };
    }
    Ok(uniform_infidelity(&total, &LogicalOperator::identity()))
}
