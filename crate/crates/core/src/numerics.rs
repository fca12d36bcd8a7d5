//! Log-domain arithmetic for the binomial-heavy sums behind every fidelity
//! formula in this crate.
//!
//! All quantities here are nonnegative reals that routinely over- or underflow
//! an `f64` (binomial coefficients at `M ~ 10^4`, products of thousands of
//! them), so they are carried as natural logarithms in [`LogReal`].

use std::cmp::Ordering;
use std::f64::consts::{LN_2, PI};
use std::iter::Sum;
use std::ops::{Add, Div, Mul};

use serde::{Deserialize, Serialize};

/// A nonnegative real stored as its natural logarithm; `-inf` is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogReal(f64);

impl LogReal {
    pub const ZERO: LogReal = LogReal(f64::NEG_INFINITY);
    pub const ONE: LogReal = LogReal(0.0);

    /// Wraps an already-logarithmic value.
    pub const fn from_ln(ln: f64) -> Self {
        LogReal(ln)
    }

    /// Converts a plain nonnegative value. Negative input is a logic error.
    pub fn from_value(value: f64) -> Self {
        debug_assert!(value >= 0.0, "LogReal cannot hold negative value {value}");
        LogReal(value.ln())
    }

    pub const fn ln(self) -> f64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn sqrt(self) -> Self {
        LogReal(0.5 * self.0)
    }

    pub fn powf(self, exponent: f64) -> Self {
        if self.is_zero() {
            return if exponent == 0.0 { Self::ONE } else { Self::ZERO };
        }
        LogReal(self.0 * exponent)
    }

    /// `2^k` without overflow.
    pub fn pow2(k: f64) -> Self {
        LogReal(k * LN_2)
    }
}

impl Add for LogReal {
    type Output = LogReal;

    fn add(self, rhs: LogReal) -> LogReal {
        let (hi, lo) = if self.0 >= rhs.0 { (self.0, rhs.0) } else { (rhs.0, self.0) };
        if lo == f64::NEG_INFINITY {
            return LogReal(hi);
        }
        LogReal(hi + (lo - hi).exp().ln_1p())
    }
}

impl Mul for LogReal {
    type Output = LogReal;

    fn mul(self, rhs: LogReal) -> LogReal {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        LogReal(self.0 + rhs.0)
    }
}

impl Div for LogReal {
    type Output = LogReal;

    fn div(self, rhs: LogReal) -> LogReal {
        if self.is_zero() {
            return Self::ZERO;
        }
        LogReal(self.0 - rhs.0)
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl Sum for LogReal {
    fn sum<I: Iterator<Item = LogReal>>(iter: I) -> LogReal {
        let terms: Vec<LogReal> = iter.collect();
        log_sum_exp(&terms)
    }
}

/// `ln n! - [(n + 1/2) ln n - n + ln(2 pi)/2]`, the Stirling remainder.
fn stirling_remainder(n: u64) -> f64 {
    if n <= 15 {
        // 15! < 2^53, so the product is exact.
        let factorial: f64 = (1..=n).map(|k| k as f64).product();
        let nf = n as f64;
        return factorial.ln() - ((nf + 0.5) * nf.ln() - nf + 0.5 * (2.0 * PI).ln());
    }
    let x = n as f64;
    let x2 = x * x;
    // Asymptotic series; at n > 15 the first omitted term is below 1e-17.
    (1.0 / 12.0
        - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0 - 1.0 / (1188.0 * x2)) / x2) / x2) / x2)
        / x
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let x = n as f64;
    (x + 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + stirling_remainder(n)
}

/// `ln C(n, k)`; zero (`-inf`) outside `0 <= k <= n`.
///
/// Evaluated through the Stirling form of the log-gamma function, with the
/// leading `n ln n` terms regrouped into an entropy so that nothing cancels
/// catastrophically even for `n ~ 10^12`.
pub fn log_binomial(n: u64, k: i64) -> LogReal {
    if k < 0 || k as u64 > n {
        return LogReal::ZERO;
    }
    let k = k as u64;
    if k == 0 || k == n {
        return LogReal::ONE;
    }
    let (nf, kf, rf) = (n as f64, k as f64, (n - k) as f64);
    let entropy = kf * (nf / kf).ln() - rf * (-kf / nf).ln_1p();
    let prefactor = 0.5 * (nf / (2.0 * PI * kf * rf)).ln();
    let correction = stirling_remainder(n) - stirling_remainder(k) - stirling_remainder(n - k);
    LogReal(entropy + prefactor + correction)
}

/// `ln multinomial(n; parts)` where `n = sum(parts)`.
pub fn log_multinomial(parts: &[u64]) -> LogReal {
    let n: u64 = parts.iter().sum();
    LogReal(ln_factorial(n) - parts.iter().map(|&p| ln_factorial(p)).sum::<f64>())
}

/// Compensated (Neumaier) running sum.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    carry: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let s = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - s) + x;
        } else {
            self.carry += (x - s) + self.sum;
        }
        self.sum = s;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `ln sum_i exp(terms_i)`; an empty list sums to zero.
pub fn log_sum_exp(terms: &[LogReal]) -> LogReal {
    let max = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return LogReal::ZERO;
    }
    if max == f64::INFINITY {
        return LogReal(f64::INFINITY);
    }
    let mut acc = Neumaier::default();
    for t in terms {
        acc.add((t.0 - max).exp());
    }
    LogReal(max + acc.total().ln())
}

/// Terms this far (in log) below the largest one are dropped. Away from the
/// mode binomial ratios shrink monotonically, so the dropped mass is below
/// `e^-60 * sqrt(m)` relative to the sum.
const WINDOW_CUTOFF: f64 = 60.0;

/// `ln sum_{k=lo}^{hi} C(m, k)`; indices outside `[0, m]` contribute nothing, an empty window gives zero.
///
/// Work is proportional to `min(hi - lo, sqrt(m))`: summation walks outward
/// from the largest term and stops once terms are negligible.
pub fn binomial_window_sum(m: u64, lo: i64, hi: i64) -> LogReal {
    let lo = lo.max(0);
    let hi = hi.min(m as i64);
    if lo > hi {
        return LogReal::ZERO;
    }
    let peak_index = ((m / 2) as i64).clamp(lo, hi);
    let peak = log_binomial(m, peak_index).0;
    let mut acc = Neumaier::default();
    acc.add(1.0);
    for k in (lo..peak_index).rev() {
        let rel = log_binomial(m, k).0 - peak;
        if rel < -WINDOW_CUTOFF {
            break;
        }
        acc.add(rel.exp());
    }
    for k in peak_index + 1..=hi {
        let rel = log_binomial(m, k).0 - peak;
        if rel < -WINDOW_CUTOFF {
            break;
        }
        acc.add(rel.exp());
    }
    LogReal(peak + acc.total().ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::{One, ToPrimitive};
    use proptest::prelude::*;

    // Exact oracle: C(n, k) via big-integer products, independent of the
    // Stirling path above.
    fn exact_binomial(n: u64, k: u64) -> BigUint {
        let mut acc = BigUint::one();
        for i in 0..k {
            acc *= n - i;
            acc /= i + 1;
        }
        acc
    }

    fn exact_ln(x: &BigUint) -> f64 {
        // Keep 60 significant bits, then shift back in log space.
        let bits = x.bits();
        if bits <= 60 {
            return x.to_f64().unwrap().ln();
        }
        let shift = bits - 60;
        let top = (x >> shift).to_f64().unwrap();
        top.ln() + shift as f64 * LN_2
    }

    #[test]
    fn small_binomials() {
        assert!((log_binomial(4, 2).ln() - 6f64.ln()).abs() < 1e-14);
        assert!(log_binomial(4, -1).is_zero());
        assert!(log_binomial(4, 5).is_zero());
        assert_eq!(log_binomial(7, 0), LogReal::ONE);
        assert_eq!(log_binomial(0, 0), LogReal::ONE);
    }

    #[test]
    fn c_120_60_matches_big_integer() {
        let exact = exact_ln(&exact_binomial(120, 60));
        let got = log_binomial(120, 60).ln();
        // 12 significant digits of the value C(120, 60) itself.
        assert!((got - exact).abs() < 1e-12, "{got} vs {exact}");
    }

    #[test]
    fn all_rows_up_to_60_are_exact() {
        for n in 0..=60u64 {
            for k in 0..=n {
                let exact = exact_binomial(n, k).to_f64().unwrap();
                let got = log_binomial(n, k as i64).value();
                assert!(((got - exact) / exact).abs() < 1e-12, "C({n},{k}) = {got} vs {exact}");
            }
        }
    }

    #[test]
    fn rows_up_to_200_track_oracle() {
        for n in (61..=200u64).step_by(7) {
            for k in 0..=n {
                let exact = exact_ln(&exact_binomial(n, k));
                let got = log_binomial(n, k as i64).ln();
                assert!((got - exact).abs() < 1e-12 * exact.max(1.0), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn log_sum_exp_examples() {
        let two = log_sum_exp(&[LogReal::ONE, LogReal::ONE]);
        assert!((two.ln() - LN_2).abs() < 1e-15);
        assert!(log_sum_exp(&[LogReal::ZERO]).is_zero());
        assert!(log_sum_exp(&[]).is_zero());
        let fourteen = log_sum_exp(&[log_binomial(4, 1), log_binomial(4, 2), log_binomial(4, 3)]);
        assert!((fourteen.ln() - 14f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn window_sum_examples() {
        assert!((binomial_window_sum(4, 1, 3).ln() - 14f64.ln()).abs() < 1e-14);
        assert!((binomial_window_sum(4, 0, 4).ln() - 4.0 * LN_2).abs() < 1e-14);
        // Clamped indices contribute nothing.
        assert!((binomial_window_sum(4, -3, 9).ln() - 4.0 * LN_2).abs() < 1e-14);
        assert!(binomial_window_sum(4, 5, 9).is_zero());

        let mut exact = BigUint::from(0u32);
        for k in 50..=70 {
            exact += exact_binomial(120, k);
        }
        let got = binomial_window_sum(120, 50, 70).ln();
        assert!((got - exact_ln(&exact)).abs() < 1e-12);
    }

    #[test]
    fn full_rows_sum_to_power_of_two() {
        for m in (0..=2000u64).step_by(37).chain([2000]) {
            let got = binomial_window_sum(m, 0, m as i64).ln();
            let want = m as f64 * LN_2;
            assert!((got - want).abs() <= 1e-12 * want.max(1.0), "M={m}: {got} vs {want}");
        }
    }

    #[test]
    fn addition_survives_huge_logs() {
        let a = LogReal::from_ln(1e6);
        let b = LogReal::from_ln(1e6 - 1.0);
        let sum = a + b;
        assert!((sum.ln() - (1e6 + (-1f64).exp().ln_1p())).abs() < 1e-9);
        let tiny = LogReal::from_ln(-1e6) + LogReal::from_ln(-1e6);
        assert!((tiny.ln() - (-1e6 + LN_2)).abs() < 1e-9);
        assert_eq!((a * LogReal::ZERO), LogReal::ZERO);
    }

    #[test]
    fn huge_binomials_stay_accurate() {
        // ln C(n, 1) = ln n; exercised far outside any factorial table.
        for n in [1_000u64, 1_000_000, 1_000_000_000_000] {
            let got = log_binomial(n, 1).ln();
            assert!((got - (n as f64).ln()).abs() < 1e-12 * (n as f64).ln());
            let pair = log_binomial(n, 2).ln();
            let want = (n as f64).ln() + ((n - 1) as f64).ln() - LN_2;
            assert!((pair - want).abs() < 1e-10);
        }
    }

    #[test]
    fn multinomial_reduces_to_binomial() {
        assert!((log_multinomial(&[3, 4]).ln() - log_binomial(7, 3).ln()).abs() < 1e-13);
        assert!((log_multinomial(&[1, 1, 1]).ln() - 6f64.ln()).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn log_sum_exp_is_permutation_invariant(mut xs in prop::collection::vec(-50.0f64..50.0, 1..20), seed in any::<u64>()) {
            let terms: Vec<LogReal> = xs.iter().map(|&x| LogReal::from_ln(x)).collect();
            let a = log_sum_exp(&terms);
            let n = xs.len();
            xs.rotate_left((seed as usize) % n);
            xs.reverse();
            let b = log_sum_exp(&xs.iter().map(|&x| LogReal::from_ln(x)).collect::<Vec<_>>());
            prop_assert!((a.ln() - b.ln()).abs() < 1e-12);
            let max = terms.iter().map(|t| t.ln()).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(a.ln() >= max);
        }

        #[test]
        fn log_sum_exp_is_monotone(xs in prop::collection::vec(-50.0f64..50.0, 1..20), idx in any::<usize>(), bump in 0.0f64..5.0) {
            let terms: Vec<LogReal> = xs.iter().map(|&x| LogReal::from_ln(x)).collect();
            let mut raised = terms.clone();
            let i = idx % raised.len();
            raised[i] = LogReal::from_ln(raised[i].ln() + bump);
            prop_assert!(log_sum_exp(&raised).ln() >= log_sum_exp(&terms).ln() - 1e-12);
        }

        #[test]
        fn pascal_rule_holds(n in 1u64..5000, k in 1i64..5000) {
            prop_assume!(k < n as i64);
            let lhs = log_binomial(n, k).ln();
            let rhs = (log_binomial(n - 1, k - 1) + log_binomial(n - 1, k)).ln();
            prop_assert!((lhs - rhs).abs() < 1e-11 * lhs.abs().max(1.0));
        }
    }
}
