//! Resonant atom-cavity dynamics.
//!
//! Builds the resonant coupling Hamiltonian and its no-jump decay variant on
//! a [`ProductBasis`], propagates states, and extracts the realized 8×8
//! logical gate by simulation. Rates are in rad/s and times in seconds.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::LogicalOperator;
use crate::hilbert::{AtomLevel, ProductBasis, PureState};

/// Dense complex operator on a product basis.
pub type Operator = DMatrix<Complex64>;

const IM: Complex64 = Complex64::new(0.0, 1.0);

/// Designed coupling ratios `Ω1c : Ω2c : Ω3c = 1 : √35 : 8`.
pub fn designed_ratios() -> [f64; 3] {
    [1.0, 35f64.sqrt(), 8.0]
}

/// Couplings, cavity decay rate, and photon truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    omega: [f64; 3],
    kappa: f64,
    photon_cutoff: usize,
}

impl CavityParams {
    pub fn new(omega: [f64; 3], kappa: f64, photon_cutoff: usize) -> Result<Self> {
        if omega.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Config(format!(
                "couplings must be positive, got {omega:?}"
            )));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::Config(format!(
                "decay rate must be non-negative, got {kappa}"
            )));
        }
        if kappa >= 4.0 * omega[0] {
            return Err(Error::Config(format!(
                "decay rate {kappa} must stay below 4·Ω1c = {}",
                4.0 * omega[0]
            )));
        }
        if photon_cutoff == 0 {
            return Err(Error::Config("photon cutoff must be at least 1".into()));
        }
        Ok(Self {
            omega,
            kappa,
            photon_cutoff,
        })
    }

    /// Couplings in the designed `1 : √35 : 8` ratio with photon cutoff 1.
    pub fn designed(omega1: f64, kappa: f64) -> Result<Self> {
        let r = designed_ratios();
        Self::new([omega1 * r[0], omega1 * r[1], omega1 * r[2]], kappa, 1)
    }

    pub fn with_photon_cutoff(self, photon_cutoff: usize) -> Result<Self> {
        Self::new(self.omega, self.kappa, photon_cutoff)
    }

    pub fn with_couplings(self, omega: [f64; 3]) -> Result<Self> {
        Self::new(omega, self.kappa, self.photon_cutoff)
    }

    pub fn omega(&self) -> [f64; 3] {
        self.omega
    }

    pub fn omega1(&self) -> f64 {
        self.omega[0]
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn photon_cutoff(&self) -> usize {
        self.photon_cutoff
    }

    /// Whether the couplings sit in the designed ratio within `rel_tol`.
    pub fn has_designed_ratios(&self, rel_tol: f64) -> bool {
        let r = designed_ratios();
        (1..3).all(|j| ((self.omega[j] / self.omega[0]) / r[j] - 1.0).abs() <= rel_tol)
    }

    /// Damped Rabi frequency of atom 1 alone, `√(Ω1c² − κ²/16)`.
    pub fn a1_kappa(&self) -> Result<f64> {
        damped_frequency(self.omega[0].powi(2), self.kappa)
    }
}

/// `√(ω² − κ²/16)`, the decay-shifted frequency of a resonant block.
pub(crate) fn damped_frequency(omega_sq: f64, kappa: f64) -> Result<f64> {
    let arg = omega_sq - kappa * kappa / 16.0;
    if arg > 0.0 {
        Ok(arg.sqrt())
    } else {
        Err(Error::Domain(format!(
            "decay rate {kappa} overdamps a block of frequency {}",
            omega_sq.sqrt()
        )))
    }
}

/// How states are propagated under a time-independent Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolutionMethod {
    /// Dense matrix exponential `exp(−iHt)` (reference method).
    MatrixExponential,
    /// Classical fourth-order Runge-Kutta with a fixed number of steps.
    FixedStepIntegrator { steps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvolutionSettings {
    pub method: EvolutionMethod,
}

impl EvolutionSettings {
    pub const MIN_STEPS: usize = 100;

    pub fn matrix_exponential() -> Self {
        Self {
            method: EvolutionMethod::MatrixExponential,
        }
    }

    pub fn integrator(steps: usize) -> Result<Self> {
        if steps < Self::MIN_STEPS {
            return Err(Error::Config(format!(
                "integrator needs at least {} steps, got {steps}",
                Self::MIN_STEPS
            )));
        }
        Ok(Self {
            method: EvolutionMethod::FixedStepIntegrator { steps },
        })
    }
}

impl Default for EvolutionSettings {
    fn default() -> Self {
        Self::matrix_exponential()
    }
}

/// Realized logical gate and the population it leaks out of the
/// computational subspace, per input column.
#[derive(Debug, Clone, PartialEq)]
pub struct GateExtract {
    pub restricted: LogicalOperator,
    pub leakage: [f64; 8],
}

impl GateExtract {
    pub fn diagonal(&self) -> [Complex64; 8] {
        self.restricted.diagonal()
    }
}

/// Resonant Hamiltonian `Σ_j Ω_j (a⁺ S_j⁻ + a S_j⁺)` for arbitrary couplings,
/// including zero, with an optional `−i(κ/2) a⁺a` term.
pub(crate) fn coupling_hamiltonian(omega: [f64; 3], kappa: f64, basis: &ProductBasis) -> Operator {
    let dim = basis.dim();
    let mut h = Operator::zeros(dim, dim);
    for (col, state) in basis.states().iter().enumerate() {
        for (atom, &coupling) in omega.iter().enumerate() {
            // a⁺ S⁻ takes |e, n> to |g, n+1> with amplitude √(n+1).
            if state.levels[atom] != AtomLevel::E || state.photons == basis.photon_cutoff() {
                continue;
            }
            let mut target = *state;
            target.levels[atom] = AtomLevel::G;
            target.photons += 1;
            let row = basis.index(&target).expect("lowered state lies in basis");
            let element = Complex64::new(coupling * (target.photons as f64).sqrt(), 0.0);
            h[(row, col)] += element;
            h[(col, row)] += element;
        }
        if kappa != 0.0 {
            h[(col, col)] -= IM * (0.5 * kappa * state.photons as f64);
        }
    }
    h
}

/// Hermitian resonant Hamiltonian on `basis`.
pub fn build_hamiltonian(params: &CavityParams, basis: &ProductBasis) -> Operator {
    coupling_hamiltonian(params.omega, 0.0, basis)
}

/// No-jump Hamiltonian `H − i(κ/2) a⁺a`.
pub fn build_effective_hamiltonian(params: &CavityParams, basis: &ProductBasis) -> Operator {
    coupling_hamiltonian(params.omega, params.kappa, basis)
}

/// Compressed-row copy of a sparse operator for the integrator.
struct SparseOperator {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseOperator {
    fn from_dense(h: &Operator) -> Self {
        let mut row_start = Vec::with_capacity(h.nrows() + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_start.push(0);
        for r in 0..h.nrows() {
            for c in 0..h.ncols() {
                let v = h[(r, c)];
                if v != Complex64::new(0.0, 0.0) {
                    cols.push(c);
                    values.push(v);
                }
            }
            row_start.push(cols.len());
        }
        Self {
            row_start,
            cols,
            values,
        }
    }

    /// out = −i·H·x
    fn apply_generator(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_start[r]..self.row_start[r + 1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            *o = -IM * acc;
        }
    }
}

fn rk4(h: &Operator, t: f64, psi: &DVector<Complex64>, steps: usize) -> DVector<Complex64> {
    let gen = SparseOperator::from_dense(h);
    let n = psi.len();
    let dt = t / steps as f64;
    let zero = Complex64::new(0.0, 0.0);
    let mut y: Vec<Complex64> = psi.iter().copied().collect();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
    );
    for _ in 0..steps {
        gen.apply_generator(&y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (0.5 * dt);
        }
        gen.apply_generator(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + k2[i] * (0.5 * dt);
        }
        gen.apply_generator(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + k3[i] * dt;
        }
        gen.apply_generator(&tmp, &mut k4);
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
    DVector::from_vec(y)
}

/// `exp(−iHt)` as a dense matrix.
pub fn propagator(h: &Operator, t: f64) -> Operator {
    (h * (-IM * t)).exp()
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "evolution time must be finite and non-negative, got {t}"
        )))
    }
}

/// Propagates `psi0` by `exp(−iHt)`. For a non-Hermitian `h` the result is
/// the unnormalized no-jump branch.
pub fn evolve(
    h: &Operator,
    t: f64,
    psi0: &PureState,
    settings: &EvolutionSettings,
) -> Result<PureState> {
    if h.nrows() != psi0.dim() || h.ncols() != psi0.dim() {
        return Err(Error::Input(format!(
            "operator is {}×{} but state has dimension {}",
            h.nrows(),
            h.ncols(),
            psi0.dim()
        )));
    }
    check_time(t)?;
    let amps = evolve_vector(h, t, psi0.amplitudes(), settings);
    let out = PureState::from_vector(amps);
    if !out.is_finite() {
        return Err(Error::Numerical(format!(
            "non-finite amplitudes after evolving for {t} s"
        )));
    }
    Ok(out)
}

fn evolve_vector(
    h: &Operator,
    t: f64,
    psi: &DVector<Complex64>,
    settings: &EvolutionSettings,
) -> DVector<Complex64> {
    if t == 0.0 {
        return psi.clone();
    }
    match settings.method {
        EvolutionMethod::MatrixExponential => propagator(h, t) * psi,
        EvolutionMethod::FixedStepIntegrator { steps } => rk4(h, t, psi, steps),
    }
}

/// Fails when `state` carries more than 1e−10 squared amplitude on the
/// truncation boundary.
pub fn check_truncation(basis: &ProductBasis, state: &PureState) -> Result<()> {
    const LIMIT: f64 = 1e-10;
    let weight = state.weight_on(&basis.boundary_indices());
    if weight > LIMIT {
        Err(Error::Cutoff {
            cutoff: basis.photon_cutoff(),
            weight,
        })
    } else {
        Ok(())
    }
}

/// Evolves every computational basis state through consecutive segments
/// `(H, duration)` and restricts the result to the computational subspace.
pub fn extract_sequence(
    basis: &ProductBasis,
    segments: &[(Operator, f64)],
    settings: &EvolutionSettings,
) -> Result<GateExtract> {
    for (h, t) in segments {
        check_time(*t)?;
        if h.nrows() != basis.dim() {
            return Err(Error::Input(
                "segment Hamiltonian does not match basis".into(),
            ));
        }
    }
    // One exponential per segment, shared by all eight columns.
    let propagators: Option<Vec<Operator>> = match settings.method {
        EvolutionMethod::MatrixExponential => {
            Some(segments.iter().map(|(h, t)| propagator(h, *t)).collect())
        }
        EvolutionMethod::FixedStepIntegrator { .. } => None,
    };
    let embedding = basis.computational_embedding();
    let mut restricted = LogicalOperator::zeros();
    let mut leakage = [0.0; 8];
    for (col, &start) in embedding.iter().enumerate() {
        let mut state = PureState::basis_vector(basis, start)?;
        for (i, (h, t)) in segments.iter().enumerate() {
            state = match &propagators {
                Some(u) => {
                    let next = PureState::from_vector(&u[i] * state.amplitudes());
                    if !next.is_finite() {
                        return Err(Error::Numerical(format!(
                            "non-finite amplitudes after evolving for {t} s"
                        )));
                    }
                    next
                }
                None => evolve(h, *t, &state, settings)?,
            };
            check_truncation(basis, &state)?;
        }
        let mut kept = 0.0;
        for (row, &idx) in embedding.iter().enumerate() {
            let a = state.amplitude(idx);
            restricted.set(row, col, a);
            kept += a.norm_sqr();
        }
        leakage[col] = (state.norm_squared() - kept).max(0.0);
    }
    Ok(GateExtract {
        restricted,
        leakage,
    })
}

/// Realized three-qubit gate after evolving under the no-jump Hamiltonian
/// for time `t`.
pub fn extract_gate(
    params: &CavityParams,
    t: f64,
    settings: &EvolutionSettings,
) -> Result<GateExtract> {
    let basis = ProductBasis::new(params.photon_cutoff)?;
    let h = build_effective_hamiltonian(params, &basis);
    extract_sequence(&basis, &[(h, t)], settings)
}

/// Interaction time `π / √(Ω1c² − κ²/16)`.
pub fn gate_time(params: &CavityParams) -> Result<f64> {
    Ok(PI / params.a1_kappa()?)
}

/// Standing-wave coupling `Ω0 cos(2πz/λ0)` near the cavity centre.
pub fn coupling_at_position(z: f64, omega0: f64, lambda0: f64) -> f64 {
    omega0 * (2.0 * PI * z / lambda0).cos()
}

/// Transit offsets along the cavity axis and the couplings they realize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomPositions {
    /// Axial offsets `z1, z2, z3` in meters.
    pub z: [f64; 3],
    /// Couplings at those offsets in rad/s.
    pub couplings: [f64; 3],
}

impl AtomPositions {
    /// `|z1| / |z2|`.
    pub fn offset_ratio(&self) -> f64 {
        self.z[0].abs() / self.z[1].abs()
    }
}

/// Places atom 3 on the axis and atoms 1, 2 on the first lobe so that the
/// couplings are `Ω0/8 · (1, √35, 8)`.
pub fn positions_for_ratio(omega0: f64, lambda0: f64) -> Result<AtomPositions> {
    if !(lambda0.is_finite() && lambda0 > 0.0) {
        return Err(Error::Domain(format!(
            "wavelength must be positive, got {lambda0}"
        )));
    }
    let r = designed_ratios();
    let z = r.map(|ratio| lambda0 * (ratio / r[2]).acos() / (2.0 * PI));
    let couplings = z.map(|zj| coupling_at_position(zj, omega0, lambda0));
    Ok(AtomPositions { z, couplings })
}
