//! Iterated three-qubit Grover search on the logical subspace.
//!
//! One iteration applies the marking gate `I_τ`, then `H⊗3`, the phase gate
//! `I_000`, and `H⊗3` again. With a decayed phase gate the state is the
//! no-jump branch and its squared norm is the survival probability.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::CavityParams;
use crate::error::{Error, Result};
use crate::gates::{
    decayed_i000, exact_i000, hadamard3, ideal_i000, marked_gate, GateDiagonal, LogicalOperator,
    LogicalState, Vector8,
};

/// Label of the searched state, a 3-bit value with qubit 1 as the leading bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MarkedState(u8);

impl MarkedState {
    pub fn new(bits: u8) -> Result<Self> {
        if bits < 8 {
            Ok(Self(bits))
        } else {
            Err(Error::Domain(format!(
                "marked state {bits} is not a 3-bit value"
            )))
        }
    }

    pub fn bits(&self) -> u8 {
        self.0
    }

    /// Logical value of qubit `q` (1-based).
    pub fn bit(&self, q: usize) -> bool {
        debug_assert!((1..=3).contains(&q));
        self.0 >> (3 - q) & 1 == 1
    }

    pub fn all() -> impl Iterator<Item = MarkedState> {
        (0..8).map(MarkedState)
    }
}

impl fmt::Display for MarkedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:03b}", self.0)
    }
}

impl FromStr for MarkedState {
    type Err = Error;

    /// Accepts exactly three binary digits, e.g. `101`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() != 3 || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Config(format!(
                "marked state must be three binary digits, got {s:?}"
            )));
        }
        let bits = u8::from_str_radix(s, 2).expect("validated binary digits");
        Self::new(bits)
    }
}

/// Which phase gate the search uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateVariant {
    /// `I − 2|000><000|`
    Exact,
    /// `diag{−1, γ0, 1, …}` without decay.
    Ideal,
    /// `diag{−μ1, γ1, β1, α1, 1, …}` at the params' decay rate.
    Decayed,
}

impl GateVariant {
    pub fn gate(&self, params: &CavityParams) -> Result<LogicalOperator> {
        match self {
            GateVariant::Exact => ideal_i000(params, true),
            GateVariant::Ideal => ideal_i000(params, false),
            GateVariant::Decayed => decayed_i000(params).map(|(op, _)| op),
        }
    }
}

impl fmt::Display for GateVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateVariant::Exact => "exact",
            GateVariant::Ideal => "ideal",
            GateVariant::Decayed => "decayed",
        })
    }
}

impl FromStr for GateVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(GateVariant::Exact),
            "ideal" => Ok(GateVariant::Ideal),
            "decayed" => Ok(GateVariant::Decayed),
            other => Err(Error::Config(format!(
                "gate variant must be exact, ideal or decayed, got {other:?}"
            ))),
        }
    }
}

/// Search figures after `iteration` Grover steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchRecord {
    pub iteration: usize,
    /// `|<τ|ψ̃>|²` on the unnormalized state: no decay and correct readout.
    pub p_find: f64,
    /// `‖ψ̃‖²`
    pub survival: f64,
    /// Normalized overlap with the exact-gate trajectory.
    pub fidelity: f64,
}

/// Uniform superposition `H⊗3 |000>`.
pub fn initial_state() -> LogicalState {
    LogicalState(Vector8::repeat((1.0 / 8f64.sqrt()).into()))
}

pub fn grover_step(state: &LogicalState, tau: MarkedState, i000: &LogicalOperator) -> LogicalState {
    let h = hadamard3();
    let marked = marked_gate(tau, i000);
    h.apply(&i000.apply(&h.apply(&marked.apply(state))))
}

/// `|<ideal|actual>|² / ‖actual‖²`, zero for a vanished state.
pub fn trajectory_fidelity(ideal: &LogicalState, actual: &LogicalState) -> f64 {
    let n = actual.norm_squared();
    if n == 0.0 {
        0.0
    } else {
        (ideal.inner(actual).norm_sqr() / (n * ideal.norm_squared())).min(1.0)
    }
}

/// Runs `k_max` iterations from the uniform state and records each one.
pub fn run_search(
    tau: MarkedState,
    k_max: usize,
    variant: GateVariant,
    params: &CavityParams,
) -> Result<Vec<SearchRecord>> {
    if k_max == 0 {
        return Err(Error::Domain("search needs at least one iteration".into()));
    }
    let gate = variant.gate(params)?;
    let exact = exact_i000();
    let mut actual = initial_state();
    let mut ideal = actual;
    let mut records = Vec::with_capacity(k_max);
    for iteration in 1..=k_max {
        actual = grover_step(&actual, tau, &gate);
        ideal = grover_step(&ideal, tau, &exact);
        records.push(SearchRecord {
            iteration,
            p_find: actual.amplitude(tau.bits()).norm_sqr(),
            survival: actual.norm_squared(),
            fidelity: trajectory_fidelity(&ideal, &actual),
        });
    }
    Ok(records)
}

/// Iteration with the largest `p_find`; the earliest wins ties.
pub fn best_iteration(records: &[SearchRecord]) -> Option<usize> {
    records
        .iter()
        .fold(None::<&SearchRecord>, |best, r| match best {
            Some(b) if b.p_find >= r.p_find => Some(b),
            _ => Some(r),
        })
        .map(|r| r.iteration)
}

/// Probability that the phase gate acts without a photon loss on a
/// normalized logical state.
pub fn phase_gate_success(state: &LogicalState, diag: &GateDiagonal) -> Result<f64> {
    let norm = state.norm_squared();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Input(format!(
            "phase-gate success needs a normalized state, squared norm is {norm}"
        )));
    }
    let weights = [
        diag.mu.powi(2),
        diag.gamma.powi(2),
        diag.beta.powi(2),
        diag.alpha.powi(2),
        1.0,
        1.0,
        1.0,
        1.0,
    ];
    Ok((0..8u8)
        .map(|b| state.amplitude(b).norm_sqr() * weights[b as usize])
        .sum())
}

/// `sin²((2k+1)·asin(1/√8))`, the textbook success probability after `k`
/// perfect iterations.
pub fn closed_form_probability(k: usize) -> f64 {
    let theta = (1.0 / 8f64.sqrt()).asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}
