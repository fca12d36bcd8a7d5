//! Sequential `N -> KN` cloning network and the divide-and-clone strategy.
//!
//! The network feeds the `N` input qubits and one fresh block of `N` qubits
//! at a time through the optimal `N -> 2N` probabilistic cloner. Its fidelity
//! with `KN` perfect copies is a sum over label paths
//! `x = (x_1, ..., x_{K-1})`, `x_j in [-N/2, N/2]`, whose partial sums stay in
//! `[n - N, n]` for the final first-block label `n`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloners::fidelity_prob_equatorial;
use crate::error::{require_even, Error, Result};
use crate::numerics::{log_binomial, LogReal};

/// Exponents of a divide-and-clone schedule with `M = Θ(N^{1+δ})` outputs
/// and groups of `N' = Θ(N^β)` inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSpec {
    pub alpha: f64,
    pub delta: f64,
    pub beta: f64,
    pub epsilon: f64,
    feasible: bool,
}

impl RateSpec {
    pub fn new(alpha: f64, delta: f64, beta: f64, epsilon: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(0.0..=2.0).contains(&v) {
                return Err(Error::invalid(name, format!("{v} is outside [0, 2]")));
            }
        }
        for (name, v) in [("delta", delta), ("epsilon", epsilon)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(name, format!("{v} must be finite and nonnegative")));
            }
        }
        Ok(RateSpec { alpha, delta, beta, epsilon, feasible: beta > delta })
    }

    /// Groups of size `N^{δ+ε}`, the smallest that still converge.
    pub fn minimal(alpha: f64, delta: f64, epsilon: f64) -> Result<Self> {
        Self::new(alpha, delta, delta + epsilon, epsilon)
    }

    /// The per-group fidelity product tends to 1 exactly when `β > δ`.
    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    /// Exponent of the number of particles one cloner touches, `M' = N^{β+δ}`.
    pub fn interaction_exponent(&self) -> f64 {
        self.beta + self.delta
    }
}

fn check_sequential(n: u64, k: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("N", "at least one input copy is required"));
    }
    require_even("N", n)?;
    if k < 2 {
        return Err(Error::invalid("K", format!("the network needs K >= 2 blocks, got {k}")));
    }
    Ok(())
}

/// Fidelity of the sequential network `N -> KN`.
///
/// One dynamic program per final label `n` over the partial sum `s`, with
/// weights `C(N, N/2+x) / 2^N` so every intermediate stays at most 1.
pub fn sequential_fidelity(n: u64, k: u64) -> Result<f64> {
    check_sequential(n, k)?;
    let h = (n / 2) as i64;
    let width = n as usize + 1;
    let weights: Vec<f64> = (0..=n as i64).map(|i| (log_binomial(n, i) / LogReal::pow2(n as f64)).value()).collect();

    let per_label: Vec<f64> = (0..=n as i64)
        .into_par_iter()
        .map(|label| {
            // dist[i] holds partial sum s = label - N + i, i.e. s in [label - N, label].
            let offset = label - n as i64;
            let mut dist = vec![0.0; width];
            dist[(0 - offset) as usize] = 1.0;
            let mut next = vec![0.0; width];
            for _ in 0..k - 1 {
                next.iter_mut().for_each(|v| *v = 0.0);
                for (i, &mass) in dist.iter().enumerate() {
                    if mass == 0.0 {
                        continue;
                    }
                    let s = offset + i as i64;
                    for x in -h..=h {
                        let t = s + x;
                        if (offset..=label).contains(&t) {
                            next[(t - offset) as usize] += mass * weights[(x + h) as usize];
                        }
                    }
                }
                std::mem::swap(&mut dist, &mut next);
            }
            dist.iter().enumerate().map(|(i, &mass)| mass * weights[n as usize - i]).sum()
        })
        .collect();
    Ok(per_label.iter().sum())
}

/// `F_prob[N' -> M']^{N/N'}`: independent probabilistic cloners on `N/N'` groups.
pub fn divide_and_clone_fidelity(n: u64, group_size: u64, outputs_per_group: u64) -> Result<f64> {
    if group_size == 0 || n % group_size != 0 {
        return Err(Error::invalid("group_size", format!("{group_size} does not divide N = {n}")));
    }
    let per_group = fidelity_prob_equatorial(group_size, outputs_per_group)?;
    Ok(((n / group_size) as f64 * per_group.ln()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub group_size: u64,
    pub outputs_per_group: u64,
    pub group_count: u64,
    pub predicted_fidelity: f64,
}

/// Smallest even divisor `N'` of `N` whose divide-and-clone fidelity reaches
/// `1 - target_infidelity`, with `M' = M N'/N` rounded up to even.
pub fn plan_interaction_size(n: u64, m: u64, target_infidelity: f64) -> Result<Plan> {
    if !(target_infidelity > 0.0 && target_infidelity < 1.0) {
        return Err(Error::invalid("target_infidelity", "must lie strictly between 0 and 1"));
    }
    if n == 0 {
        return Err(Error::invalid("N", "at least one input copy is required"));
    }
    require_even("N", n)?;
    require_even("M", m)?;
    crate::error::require_outputs(n, m)?;

    for group_size in (2..=n).step_by(2).filter(|g| n % g == 0) {
        let scaled = (m * group_size).div_ceil(n);
        let outputs_per_group = scaled + scaled % 2;
        let fidelity = divide_and_clone_fidelity(n, group_size, outputs_per_group)?;
        if fidelity >= 1.0 - target_infidelity {
            return Ok(Plan {
                group_size,
                outputs_per_group,
                group_count: n / group_size,
                predicted_fidelity: fidelity,
            });
        }
    }
    Err(Error::Infeasible(format!(
        "no group size dividing N = {n} reaches fidelity {} for M = {m}",
        1.0 - target_infidelity
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloners::fidelity_det_equatorial;

    fn binom(n: u64, k: i64) -> u128 {
        if k < 0 || k as u64 > n {
            return 0;
        }
        (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
    }

    // Direct enumeration of every label tuple in [-N/2, N/2]^{K-1}, filtered
    // by the partial-sum constraint, in exact integer arithmetic.
    fn brute_force(n: u64, k: u64) -> f64 {
        let h = (n / 2) as i64;
        let span = n + 1;
        let mut total: u128 = 0;
        for label in 0..=n as i64 {
            for code in 0..span.pow((k - 1) as u32) {
                let mut rest = code;
                let mut partial = 0i64;
                let mut product: u128 = 1;
                let mut admissible = true;
                for _ in 0..k - 1 {
                    let x = (rest % span) as i64 - h;
                    rest /= span;
                    partial += x;
                    if partial < label - n as i64 || partial > label {
                        admissible = false;
                        break;
                    }
                    product *= binom(n, h + x);
                }
                if admissible {
                    total += product * binom(n, label - partial);
                }
            }
        }
        total as f64 / 2f64.powi((n * k) as i32)
    }

    #[test]
    fn matches_enumeration_on_small_networks() {
        for n in [2u64, 4] {
            for k in 2..=4 {
                let dp = sequential_fidelity(n, k).unwrap();
                assert!((dp - brute_force(n, k)).abs() < 1e-10, "N={n} K={k}");
            }
        }
        assert!((sequential_fidelity(2, 3).unwrap() - brute_force(2, 3)).abs() < 1e-14);
    }

    #[test]
    fn first_step_is_the_probabilistic_cloner() {
        for n in (2..=20).step_by(2) {
            let seq = sequential_fidelity(n, 2).unwrap();
            let prob = fidelity_prob_equatorial(n, 2 * n).unwrap();
            assert!((seq - prob).abs() < 1e-10, "N={n}: {seq} vs {prob}");
        }
    }

    #[test]
    fn strictly_decreasing_in_steps() {
        for n in (2..=12).step_by(2) {
            let values: Vec<f64> = (2..=8).map(|k| sequential_fidelity(n, k).unwrap()).collect();
            assert!(values.windows(2).all(|w| w[1] < w[0]), "N={n}: {values:?}");
        }
    }

    #[test]
    fn eight_input_comparison() {
        for k in 3..=8u64 {
            assert!(sequential_fidelity(8, k).unwrap() < fidelity_prob_equatorial(8, 8 * k).unwrap());
        }
        let gap = sequential_fidelity(8, 8).unwrap() - fidelity_det_equatorial(8, 64).unwrap();
        assert!(gap.abs() < 0.05, "{gap}");
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(sequential_fidelity(3, 2).is_err());
        assert!(sequential_fidelity(4, 1).is_err());
        assert!(divide_and_clone_fidelity(8, 3, 6).is_err());
    }

    #[test]
    fn divide_and_clone_compositions() {
        assert_eq!(divide_and_clone_fidelity(10, 10, 40).unwrap(), fidelity_prob_equatorial(10, 40).unwrap());
        let f = fidelity_prob_equatorial(4, 8).unwrap();
        assert!((divide_and_clone_fidelity(8, 4, 8).unwrap() - f * f).abs() < 1e-15);
    }

    // N = 2^k with beta k and (beta + delta) k integral, so N' = N^beta divides N.
    fn sweep(beta: f64, delta: f64, k: i32) -> f64 {
        let n = 1u64 << k;
        let group = 1u64 << (beta * k as f64).round() as u32;
        let outputs = 1u64 << ((beta + delta) * k as f64).round() as u32;
        divide_and_clone_fidelity(n, group, outputs).unwrap()
    }

    #[test]
    fn converges_exactly_when_groups_outgrow_extra_copies() {
        let grid = [0.2, 0.4, 0.6, 0.8, 1.0];
        for &delta in &grid {
            for &beta in &grid {
                let coarse = sweep(beta, delta, 15);
                let fine = sweep(beta, delta, 20);
                if beta > delta {
                    assert!(fine > 0.75, "beta={beta} delta={delta}: {fine}");
                    assert!(1.0 - fine <= (1.0 - coarse) + 1e-12 || fine > 0.999, "beta={beta} delta={delta}");
                } else {
                    assert!(fine < 0.7, "beta={beta} delta={delta}: {fine}");
                    assert!(fine <= coarse + 1e-3, "beta={beta} delta={delta}");
                }
            }
        }
    }

    #[test]
    fn plan_without_cloning_uses_pairs() {
        let plan = plan_interaction_size(12, 12, 0.01).unwrap();
        assert_eq!((plan.group_size, plan.outputs_per_group, plan.group_count), (2, 2, 6));
        assert_eq!(plan.predicted_fidelity, 1.0);
    }

    #[test]
    fn plan_is_self_consistent() {
        let plan = plan_interaction_size(16, 64, 0.3).unwrap();
        assert!(plan.predicted_fidelity >= 0.7);
        let again = divide_and_clone_fidelity(16, plan.group_size, plan.outputs_per_group).unwrap();
        assert_eq!(again, plan.predicted_fidelity);
        assert!(plan.outputs_per_group * plan.group_count >= 64);
    }

    #[test]
    fn plans_never_enlarge_the_interaction() {
        for n in (2..=64u64).step_by(2) {
            for m in (n..=8 * n).step_by(2) {
                if let Ok(plan) = plan_interaction_size(n, m, 0.2) {
                    assert!(plan.outputs_per_group <= m);
                    assert!(plan.predicted_fidelity >= 0.8);
                }
            }
        }
    }

    #[test]
    fn unreachable_target_is_infeasible() {
        assert!(matches!(plan_interaction_size(4, 400, 0.01), Err(Error::Infeasible(_))));
    }

    #[test]
    fn rate_spec_feasibility() {
        assert!(RateSpec::minimal(1.5, 0.5, 0.1).unwrap().is_feasible());
        assert!(!RateSpec::new(1.5, 0.5, 0.5, 0.0).unwrap().is_feasible());
        assert!(RateSpec::new(2.5, 0.5, 0.5, 0.0).is_err());
        let r = RateSpec::minimal(1.5, 0.5, 0.1).unwrap();
        assert!((r.interaction_exponent() - 1.1).abs() < 1e-15);
    }
}
