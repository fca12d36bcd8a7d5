//! Total-spin sectors of `K` qubits and the gate-replication bounds built on them.
//!
//! `(C^2)^{⊗K} = ⊕_j R_j ⊗ M_jK` with `dim R_j = 2j + 1` and
//! `dim M_jK = C(K, K/2 - j) - C(K, K/2 - j - 1)`.

use serde::{Deserialize, Serialize};

use crate::bound::Bound;
use crate::error::{require_outputs, Error, Result};
use crate::numerics::{log_binomial, LogReal};

/// Largest qubit count whose multiplicities fit in `u128`.
pub const MAX_EXACT_QUBITS: u64 = 126;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchurSector {
    /// `2j`, so half-integer spins stay exact.
    pub two_j: u64,
    pub rep_dim: u64,
    pub multiplicity: u128,
    pub qubits: u64,
}

impl SchurSector {
    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }
}

fn exact_binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    // Each prefix product is itself a binomial, so the division is exact.
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// Sectors of `K` qubits from `j = K/2` down to `j = (K mod 2)/2`.
pub fn qubit_sectors(qubits: u64) -> Result<Vec<SchurSector>> {
    if qubits == 0 {
        return Err(Error::invalid("K", "at least one qubit is required"));
    }
    if qubits > MAX_EXACT_QUBITS {
        return Err(Error::invalid("K", format!("multiplicities overflow beyond {MAX_EXACT_QUBITS} qubits")));
    }
    Ok((0..=qubits / 2)
        .map(|k| {
            let below = if k == 0 { 0 } else { exact_binomial(qubits, k - 1) };
            SchurSector {
                two_j: qubits - 2 * k,
                rep_dim: qubits - 2 * k + 1,
                multiplicity: exact_binomial(qubits, k) - below,
                qubits,
            }
        })
        .collect())
}

/// `ln(d_j m_jM)` for `k = M/2 - j`, using `m_jM = C(M, k)(M - 2k + 1)/(M - k + 1)`.
fn ln_sector_weight(m: u64, k: u64) -> f64 {
    let dim = (m - 2 * k + 1) as f64;
    log_binomial(m, k as i64).ln() + 2.0 * dim.ln() - ((m - k + 1) as f64).ln()
}

/// Terms this far below the running maximum end the outward scan.
const SCAN_CUTOFF: f64 = 60.0;

/// `Tr[P_N] / 2^M`, the weight of the sectors `j <= N/2` of `M` qubits.
pub fn projector_trace_fraction(n: u64, m: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("N", "at least one input copy is required"));
    }
    require_outputs(n, m)?;
    // Sectors with j <= N/2 are those with k = M/2 - j >= (M - N)/2.
    let k_min = (m - n).div_ceil(2);
    let total = LogReal::pow2(m as f64);

    let inside: Vec<LogReal> = (k_min..=m / 2).map(|k| LogReal::from_ln(ln_sector_weight(m, k))).collect();
    let inside = crate::numerics::log_sum_exp(&inside);

    // The excluded weight, scanned from the boundary down; once terms fall
    // they fall monotonically.
    let mut outside = Vec::new();
    let mut peak = f64::NEG_INFINITY;
    let mut previous = f64::NEG_INFINITY;
    for k in (0..k_min).rev() {
        let w = ln_sector_weight(m, k);
        peak = peak.max(w);
        if w < previous && w < peak - SCAN_CUTOFF {
            break;
        }
        previous = w;
        outside.push(LogReal::from_ln(w));
    }
    let outside = (crate::numerics::log_sum_exp(&outside) / total).value();
    if outside < 0.5 {
        Ok(1.0 - outside)
    } else {
        Ok((inside / total).value())
    }
}

/// `1 - 2 (M+1)^{d(d-1)/2} exp(-N^2 / 2M)`, clamped.
pub fn gate_fidelity_bound(d: u64, n: u64, m: u64) -> Result<Bound> {
    if d < 2 {
        return Err(Error::invalid("d", "dimension must be at least 2"));
    }
    if n == 0 {
        return Err(Error::invalid("N", "at least one gate use is required"));
    }
    // M < N is allowed: the bound stays valid when outputs are discarded.
    if m == 0 {
        return Err(Error::invalid("M", "at least one output use is required"));
    }
    let exponent = (d * (d - 1)) as f64 / 2.0 * ((m + 1) as f64).ln() - (n as f64).powi(2) / (2.0 * m as f64);
    Ok(Bound::new(1.0 - 2.0 * exponent.exp()))
}

/// `floor(N^2 / (2(d^2 - d + k) ln N))` outputs keep the error at order `N^-k`.
#[allow(non_snake_case)]
pub fn choose_M_for_error(d: u64, k: f64, n: u64) -> Result<u64> {
    if d < 2 {
        return Err(Error::invalid("d", "dimension must be at least 2"));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid("k", "error exponent must be positive"));
    }
    if n < 3 {
        return Err(Error::invalid("N", "needs N >= 3 so that ln N > 1"));
    }
    let nf = n as f64;
    Ok((nf * nf / (2.0 * ((d * d - d) as f64 + k) * nf.ln())).floor() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn table(k: u64) -> Vec<(u64, u64, u128)> {
        qubit_sectors(k).unwrap().iter().map(|s| (s.two_j, s.rep_dim, s.multiplicity)).collect()
    }

    #[test]
    fn two_and_four_qubits() {
        assert_eq!(table(2), vec![(2, 3, 1), (0, 1, 1)]);
        assert_eq!(table(4), vec![(4, 5, 1), (2, 3, 3), (0, 1, 2)]);
        assert_eq!(table(1), vec![(1, 2, 1)]);
        assert_eq!(qubit_sectors(3).unwrap()[1].j(), 0.5);
    }

    #[test]
    fn dimensions_add_up() {
        for k in 1..=30u64 {
            let sum: u128 = qubit_sectors(k).unwrap().iter().map(|s| s.rep_dim as u128 * s.multiplicity).sum();
            assert_eq!(sum, 1u128 << k);
        }
    }

    // Coupling one more spin-1/2: m_{j, K+1} = m_{j-1/2, K} + m_{j+1/2, K}.
    #[test]
    fn multiplicities_follow_spin_coupling() {
        let mut current: BTreeMap<u64, u128> = BTreeMap::from([(1, 1)]);
        for k in 1..=100u64 {
            let got: BTreeMap<u64, u128> = qubit_sectors(k).unwrap().iter().map(|s| (s.two_j, s.multiplicity)).collect();
            assert_eq!(got, current, "K={k}");
            let mut next = BTreeMap::new();
            for (&two_j, &mult) in &current {
                *next.entry(two_j + 1).or_insert(0) += mult;
                if two_j > 0 {
                    *next.entry(two_j - 1).or_insert(0) += mult;
                }
            }
            current = next;
        }
    }

    #[test]
    fn trace_fraction_examples() {
        assert!((projector_trace_fraction(2, 4).unwrap() - 11.0 / 16.0).abs() < 1e-15);
        for m in [1u64, 7, 40, 1000] {
            assert!((projector_trace_fraction(m, m).unwrap() - 1.0).abs() < 1e-13);
        }
        let f = projector_trace_fraction(20, 100).unwrap();
        assert!(f >= 1.0 - 101.0 * (-2.0f64).exp());
        assert!(f > 0.0 && f < 1.0);
    }

    #[test]
    fn trace_fraction_matches_sector_sum() {
        for m in 1..=40u64 {
            for n in 1..=m {
                let exact: u128 = qubit_sectors(m)
                    .unwrap()
                    .iter()
                    .filter(|s| s.two_j <= n)
                    .map(|s| s.rep_dim as u128 * s.multiplicity)
                    .sum();
                let want = exact as f64 / 2f64.powi(m as i32);
                assert!((projector_trace_fraction(n, m).unwrap() - want).abs() < 1e-13, "N={n} M={m}");
            }
        }
    }

    #[test]
    fn trace_fraction_grows_with_n() {
        for m in [10u64, 101, 4000] {
            let values: Vec<f64> = (1..=m.min(300)).map(|n| projector_trace_fraction(n, m).unwrap()).collect();
            assert!(values.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn trace_fraction_dominates_its_bound() {
        for n in (10..=200u64).step_by(10) {
            for m in (n..=5 * n).step_by(7) {
                let f = projector_trace_fraction(n, m).unwrap();
                let lower = 1.0 - ((m + 1) as f64) * (-((n * n) as f64) / (2.0 * m as f64)).exp();
                assert!(f >= lower - 1e-12, "N={n} M={m}");
            }
        }
    }

    #[test]
    fn gate_bound_values() {
        let b = gate_fidelity_bound(2, 20, 100).unwrap();
        assert!((b.raw - (1.0 - 2.0 * 101.0 * (-2.0f64).exp())).abs() < 1e-12);
        assert!(b.clamped && b.value == 0.0);
        let b = gate_fidelity_bound(2, 200, 100).unwrap();
        assert!(b.value >= 1.0 - 2.0 * 101.0 * (-200.0f64).exp());
        assert_eq!(gate_fidelity_bound(3, 10, 1_000_000).unwrap().value, 0.0);
        assert!(gate_fidelity_bound(3, 10, 0).is_err());
    }

    #[test]
    fn chosen_output_counts() {
        assert_eq!(choose_M_for_error(2, 2.0, 100).unwrap(), 271);
        let grow: Vec<u64> = (3..500).map(|n| choose_M_for_error(2, 2.0, n).unwrap()).collect();
        assert!(grow.windows(2).all(|w| w[1] >= w[0]));
        assert!(choose_M_for_error(2, 1.0, 300).unwrap() >= choose_M_for_error(2, 3.0, 300).unwrap());
        assert!(choose_M_for_error(2, 2.0, 2).is_err());
    }

    // With M chosen for exponent k, N^k (1 - bound) stays bounded by a constant.
    #[test]
    fn chosen_outputs_reach_target_error() {
        for (d, k) in [(2u64, 1.0), (2, 2.0), (3, 2.0), (2, 3.0)] {
            let mut worst: f64 = 0.0;
            for n in (50..=500u64).step_by(10) {
                let m = choose_M_for_error(d, k, n).unwrap().max(n);
                let gap = 1.0 - gate_fidelity_bound(d, n, m).unwrap().value;
                worst = worst.max(gap * (n as f64).powf(k));
            }
            assert!(worst <= 2.0, "d={d} k={k}: c = {worst}");
        }
    }
}
