//! Atomic level schemes, the logical-qubit encoding, and the truncated
//! atoms-plus-cavity product basis.
//!
//! The basis is ordered lexicographically in (atom 1, atom 2, atom 3, photon
//! number) with level order `E < G` for atom 1 and `I < G < E` for atoms 2
//! and 3. Atom 1 never occupies `I`, so the dimension is `2·3·3·(cutoff+1)`.

use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Internal level of a three-level Rydberg atom.
///
/// `I` sits below `E` and never couples to the cavity; the cavity drives the
/// `G <-> E` transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomLevel {
    I,
    G,
    E,
}

impl fmt::Display for AtomLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AtomLevel::I => "i",
            AtomLevel::G => "g",
            AtomLevel::E => "e",
        };
        f.write_str(s)
    }
}

/// Levels available to atom 1, in basis order.
const ATOM1_LEVELS: [AtomLevel; 2] = [AtomLevel::E, AtomLevel::G];
/// Levels available to atoms 2 and 3, in basis order.
const OUTER_LEVELS: [AtomLevel; 3] = [AtomLevel::I, AtomLevel::G, AtomLevel::E];

/// Fixed map between logical bits and atomic levels.
///
/// Atom 1 stores logical 0 in `E` and 1 in `G`; atoms 2 and 3 store 0 in `I`
/// and 1 in `G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitEncoding;

impl QubitEncoding {
    /// Level that encodes `bit` on `atom` (1-based).
    pub fn level(atom: usize, bit: bool) -> Result<AtomLevel> {
        match (atom, bit) {
            (1, false) => Ok(AtomLevel::E),
            (2 | 3, false) => Ok(AtomLevel::I),
            (1..=3, true) => Ok(AtomLevel::G),
            _ => Err(Error::Domain(format!("atom index {atom} not in 1..=3"))),
        }
    }

    /// Logical bit stored in `level` on `atom`, or `None` for a non-logical level.
    pub fn bit(atom: usize, level: AtomLevel) -> Option<bool> {
        match (atom, level) {
            (1, AtomLevel::E) | (2 | 3, AtomLevel::I) => Some(false),
            (1..=3, AtomLevel::G) => Some(true),
            _ => None,
        }
    }

    /// Atomic levels for the logical state `bits` (bit 2 is qubit 1).
    pub fn levels(bits: u8) -> [AtomLevel; 3] {
        let bit = |q: usize| bits >> (3 - q) & 1 == 1;
        [
            if bit(1) { AtomLevel::G } else { AtomLevel::E },
            if bit(2) { AtomLevel::G } else { AtomLevel::I },
            if bit(3) { AtomLevel::G } else { AtomLevel::I },
        ]
    }
}

/// One product state `|l1, l2, l3, n>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub levels: [AtomLevel; 3],
    pub photons: usize,
}

impl BasisState {
    pub fn new(l1: AtomLevel, l2: AtomLevel, l3: AtomLevel, photons: usize) -> Self {
        Self {
            levels: [l1, l2, l3],
            photons,
        }
    }

    /// Photon number plus the number of atoms in `E`.
    pub fn excitation_number(&self) -> usize {
        self.photons + self.levels.iter().filter(|&&l| l == AtomLevel::E).count()
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.levels;
        write!(f, "|{a}1 {b}2 {c}3, {}>", self.photons)
    }
}

/// The ordered product basis with photon numbers `0..=cutoff`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductBasis {
    photon_cutoff: usize,
    states: Vec<BasisState>,
}

impl ProductBasis {
    pub fn new(photon_cutoff: usize) -> Result<Self> {
        if photon_cutoff == 0 {
            return Err(Error::Domain(
                "photon cutoff must be at least 1 for the resonant exchange".into(),
            ));
        }
        let mut states = Vec::with_capacity(18 * (photon_cutoff + 1));
        for &l1 in &ATOM1_LEVELS {
            for &l2 in &OUTER_LEVELS {
                for &l3 in &OUTER_LEVELS {
                    for n in 0..=photon_cutoff {
                        states.push(BasisState::new(l1, l2, l3, n));
                    }
                }
            }
        }
        Ok(Self {
            photon_cutoff,
            states,
        })
    }

    pub fn photon_cutoff(&self) -> usize {
        self.photon_cutoff
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> Option<&BasisState> {
        self.states.get(index)
    }

    /// Position of `|l1, l2, l3, n>` in the basis, computed arithmetically.
    pub fn index_of(&self, l1: AtomLevel, l2: AtomLevel, l3: AtomLevel, n: usize) -> Result<usize> {
        let i1 = match l1 {
            AtomLevel::E => 0,
            AtomLevel::G => 1,
            AtomLevel::I => {
                return Err(Error::Domain("atom 1 has no level i in the basis".into()));
            }
        };
        if n > self.photon_cutoff {
            return Err(Error::Domain(format!(
                "photon number {n} exceeds cutoff {}",
                self.photon_cutoff
            )));
        }
        let outer = |l: AtomLevel| match l {
            AtomLevel::I => 0,
            AtomLevel::G => 1,
            AtomLevel::E => 2,
        };
        let layers = self.photon_cutoff + 1;
        Ok(((i1 * 3 + outer(l2)) * 3 + outer(l3)) * layers + n)
    }

    pub fn index(&self, state: &BasisState) -> Result<usize> {
        let [a, b, c] = state.levels;
        self.index_of(a, b, c, state.photons)
    }

    /// Indices of the eight photon-vacuum logical states, in logical order
    /// `|e1 i2 i3>, |e1 i2 g3>, ..., |g1 g2 g3>` (logical `|000>` to `|111>`).
    pub fn computational_embedding(&self) -> [usize; 8] {
        let mut out = [0; 8];
        for (bits, slot) in out.iter_mut().enumerate() {
            let [a, b, c] = QubitEncoding::levels(bits as u8);
            // Logical levels are always legal and n = 0 is within any cutoff.
            *slot = self.index_of(a, b, c, 0).expect("logical state in basis");
        }
        out
    }

    pub fn excitation_number(&self, index: usize) -> Result<usize> {
        self.state(index)
            .map(BasisState::excitation_number)
            .ok_or_else(|| Error::Domain(format!("basis position {index} out of range")))
    }

    /// Positions on the truncation boundary: top photon layer with at least
    /// one atom in `E`, where the resonant coupling would need `cutoff + 1`
    /// photons.
    pub fn boundary_indices(&self) -> Vec<usize> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| s.photons == self.photon_cutoff && s.excitation_number() > s.photons)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Complex amplitudes over a [`ProductBasis`]. Under decay the vector is the
/// unnormalized no-jump branch.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
}

impl PureState {
    pub fn zeros(basis: &ProductBasis) -> Self {
        Self {
            amplitudes: DVector::zeros(basis.dim()),
        }
    }

    /// The basis vector at `index`.
    pub fn basis_vector(basis: &ProductBasis, index: usize) -> Result<Self> {
        if index >= basis.dim() {
            return Err(Error::Domain(format!(
                "basis position {index} out of range"
            )));
        }
        let mut s = Self::zeros(basis);
        s.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(basis: &ProductBasis, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::Input(format!(
                "state length {} does not match basis dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        Ok(Self { amplitudes })
    }

    pub(crate) fn from_vector(amplitudes: DVector<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// Squared weight on the given positions.
    pub fn weight_on(&self, indices: &[usize]) -> f64 {
        indices.iter().map(|&i| self.amplitudes[i].norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }
}
