//! States of `N` identical copies, expanded in the symmetric subspace.
//!
//! Qubit states live on the Dicke basis `|N, n>` (`n` = number of ones).
//! Qudit multiphase states live on type classes: occupation vectors
//! `(n_0, ..., n_{d-1})` summing to `N`, listed in lexicographic order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{log_binomial, log_multinomial};

const NORM_TOLERANCE: f64 = 1e-10;

/// Amplitudes of an `N`-copy qubit state over the Dicke basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SymmetricStateRepr", try_from = "SymmetricStateRepr")]
pub struct SymmetricState {
    copies: u64,
    amplitudes: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct SymmetricStateRepr {
    #[serde(rename = "N")]
    copies: u64,
    amplitudes: Vec<[f64; 2]>,
}

impl From<SymmetricState> for SymmetricStateRepr {
    fn from(s: SymmetricState) -> Self {
        SymmetricStateRepr {
            copies: s.copies,
            amplitudes: s.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

impl TryFrom<SymmetricStateRepr> for SymmetricState {
    type Error = Error;

    fn try_from(r: SymmetricStateRepr) -> Result<Self> {
        SymmetricState::new(r.copies, r.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
    }
}

impl SymmetricState {
    /// Checks the length (`N + 1`) and unit norm.
    pub fn new(copies: u64, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() as u64 != copies + 1 {
            return Err(Error::invalid(
                "amplitudes",
                format!("expected {} Dicke amplitudes, got {}", copies + 1, amplitudes.len()),
            ));
        }
        let state = SymmetricState { copies, amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid("amplitudes", format!("squared norm {norm} is not 1")));
        }
        Ok(state)
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(copies: u64, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::invalid("amplitudes", "zero vector cannot be normalized"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        SymmetricState::new(copies, amplitudes)
    }

    /// The basis state `|N, n>`.
    pub fn dicke(copies: u64, ones: u64) -> Result<Self> {
        if ones > copies {
            return Err(Error::invalid("ones", format!("{ones} exceeds N = {copies}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); copies as usize + 1];
        amplitudes[ones as usize] = Complex64::new(1.0, 0.0);
        Ok(SymmetricState { copies, amplitudes })
    }

    pub fn copies(&self) -> u64 {
        self.copies
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &SymmetricState) -> Complex64 {
        assert_eq!(self.copies, other.copies, "overlap between different copy numbers");
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &SymmetricState) -> f64 {
        self.overlap(other).norm_sqr()
    }
}

/// `|psi_t>^{(x)N}` for the equatorial qubit `(|0> + e^{-it}|1>)/sqrt 2`.
pub fn equatorial_expand(copies: u64, t: f64) -> SymmetricState {
    let half_log2 = 0.5 * copies as f64 * std::f64::consts::LN_2;
    let amplitudes = (0..=copies)
        .map(|n| {
            let magnitude = (0.5 * log_binomial(copies, n as i64).ln() - half_log2).exp();
            Complex64::from_polar(magnitude, -(n as f64) * t)
        })
        .collect();
    SymmetricState { copies, amplitudes }
}

/// Energy-basis description of a clock state `e^{-itH}|psi>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClockSpec {
    probabilities: Vec<f64>,
    energies: Vec<f64>,
}

impl ClockSpec {
    pub fn new(probabilities: Vec<f64>, energies: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::invalid("probabilities", "need at least one level"));
        }
        if probabilities.len() != energies.len() {
            return Err(Error::invalid(
                "energies",
                format!("{} energies for {} probabilities", energies.len(), probabilities.len()),
            ));
        }
        if probabilities.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::invalid("probabilities", "entries must be nonnegative"));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("probabilities", format!("sum to {total}, not 1")));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::invalid("energies", "entries must be finite"));
        }
        Ok(ClockSpec { probabilities, energies })
    }

    /// `d` levels with equal weight and energies `0, 1, ..., d-1`.
    pub fn uniform(levels: usize) -> Result<Self> {
        Self::new(vec![1.0 / levels as f64; levels], (0..levels).map(|j| j as f64).collect())
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Number of distinct energy values carrying nonzero weight.
    pub fn level_count(&self) -> usize {
        self.energy_distribution().len()
    }

    /// Smallest nonzero probability of the energy distribution.
    pub fn p_min(&self) -> f64 {
        self.energy_distribution().into_iter().map(|(_, p)| p).fold(f64::INFINITY, f64::min)
    }

    fn energy_distribution(&self) -> Vec<(f64, f64)> {
        let mut levels: Vec<(f64, f64)> = Vec::new();
        for (&p, &e) in self.probabilities.iter().zip(&self.energies) {
            if p == 0.0 {
                continue;
            }
            match levels.iter_mut().find(|(energy, _)| *energy == e) {
                Some(level) => level.1 += p,
                None => levels.push((e, p)),
            }
        }
        levels
    }
}

/// Amplitudes of `|psi>^{(x)N}` for a qudit state, indexed by type class.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeClassState {
    levels: usize,
    copies: u64,
    occupations: Vec<Vec<u64>>,
    amplitudes: Vec<Complex64>,
}

impl Serialize for TypeClassState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("TypeClassState", 4)?;
        s.serialize_field("N", &self.copies)?;
        s.serialize_field("d", &self.levels)?;
        s.serialize_field("occupations", &self.occupations)?;
        let pairs: Vec<[f64; 2]> = self.amplitudes.iter().map(|a| [a.re, a.im]).collect();
        s.serialize_field("amplitudes", &pairs)?;
        s.end()
    }
}

impl TypeClassState {
    pub(crate) fn from_parts(levels: usize, copies: u64, amplitudes: Vec<Complex64>) -> Self {
        let occupations = compositions(copies, levels);
        debug_assert_eq!(occupations.len(), amplitudes.len());
        TypeClassState { levels, copies, occupations, amplitudes }
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn copies(&self) -> u64 {
        self.copies
    }

    pub fn occupations(&self) -> &[Vec<u64>] {
        &self.occupations
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude on a given occupation vector, zero if it is not a type of this state.
    pub fn amplitude_at(&self, occupation: &[u64]) -> Complex64 {
        self.occupations
            .binary_search_by(|o| o.as_slice().cmp(occupation))
            .map(|i| self.amplitudes[i])
            .unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn overlap(&self, other: &TypeClassState) -> Complex64 {
        assert_eq!((self.levels, self.copies), (other.levels, other.copies));
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &TypeClassState) -> f64 {
        self.overlap(other).norm_sqr()
    }
}

/// All occupation vectors of length `levels` summing to `total`, lexicographically ascending.
pub fn compositions(total: u64, levels: usize) -> Vec<Vec<u64>> {
    fn fill(prefix: &mut Vec<u64>, remaining: u64, slots: usize, out: &mut Vec<Vec<u64>>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=remaining {
            prefix.push(first);
            fill(prefix, remaining - first, slots - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if levels > 0 {
        fill(&mut Vec::with_capacity(levels), total, levels, &mut out);
    }
    out
}

/// `|psi_theta>^{(x)N}` for `|psi_theta> = sqrt(p_0)|0> + sum_j sqrt(p_j) e^{i theta_j}|j>`.
pub fn multiphase_expand(spec: &ClockSpec, copies: u64, phases: &[f64]) -> Result<TypeClassState> {
    let levels = spec.probabilities().len();
    if levels < 2 {
        return Err(Error::invalid("levels", "multiphase states need d >= 2"));
    }
    if phases.len() != levels - 1 {
        return Err(Error::invalid(
            "phases",
            format!("expected {} phases for d = {levels}, got {}", levels - 1, phases.len()),
        ));
    }
    let ln_p: Vec<f64> = spec.probabilities().iter().map(|p| p.ln()).collect();
    let amplitudes = compositions(copies, levels)
        .iter()
        .map(|occ| {
            let mut ln_weight = log_multinomial(occ).ln();
            for (&n, &lp) in occ.iter().zip(&ln_p) {
                if n > 0 {
                    ln_weight += n as f64 * lp;
                }
            }
            let phase: f64 = occ[1..].iter().zip(phases).map(|(&n, &th)| n as f64 * th).sum();
            Complex64::from_polar((0.5 * ln_weight).exp(), phase)
        })
        .collect();
    Ok(TypeClassState::from_parts(levels, copies, amplitudes))
}
