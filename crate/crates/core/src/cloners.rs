//! Optimal cloners for equatorial qubit states and their relatives.
//!
//! The equatorial cloners act diagonally on the Dicke basis: the input label
//! `|N, N/2 + m>` is sent to `|M, M/2 + m>` for `m` in `[-N/2, N/2]`, scaled
//! by a coefficient. The deterministic cloner uses coefficient 1 (an
//! isometry); the optimal probabilistic cloner uses
//! `sqrt(C(M, M/2+m) / (C(M, (M+N)/2) C(N, N/2+m)))`, which is largest
//! (exactly 1) at the window edges.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bound::Bound;
use crate::dicke::{ClockSpec, SymmetricState, TypeClassState};
use crate::error::{require_even, require_outputs, Error, Result};
use crate::numerics::{binomial_window_sum, log_binomial, log_multinomial, log_sum_exp, LogReal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClonerKind {
    Deterministic,
    Probabilistic,
}

fn check_equatorial(n: u64, m: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("N", "at least one input copy is required"));
    }
    require_even("N", n)?;
    require_even("M", m)?;
    require_outputs(n, m)
}

/// Diagonal Dicke-basis map `|N, N/2+m> -> c_m |M, M/2+m>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClonerMap {
    n_in: u64,
    m_out: u64,
    /// `c_m` for `m = -N/2..=N/2`; zero outside the active window.
    coefficients: Vec<LogReal>,
    kind: ClonerKind,
}

impl ClonerMap {
    /// The optimal deterministic isometry `V`.
    pub fn deterministic(n: u64, m: u64) -> Result<Self> {
        check_equatorial(n, m)?;
        Ok(ClonerMap {
            n_in: n,
            m_out: m,
            coefficients: vec![LogReal::ONE; n as usize + 1],
            kind: ClonerKind::Deterministic,
        })
    }

    /// The optimal probabilistic filter `Q`.
    pub fn probabilistic(n: u64, m: u64) -> Result<Self> {
        Self::windowed(n, m, n / 2)
    }

    /// The probabilistic filter restricted to labels `|m| <= half_width`,
    /// rescaled so that its largest coefficient is 1.
    ///
    /// `half_width = N/2` is the optimal filter `Q`. Narrower windows trade
    /// fidelity for success probability.
    pub fn windowed(n: u64, m: u64, half_width: u64) -> Result<Self> {
        check_equatorial(n, m)?;
        let h = (n / 2) as i64;
        if half_width as i64 > h {
            return Err(Error::invalid("half_width", format!("{half_width} exceeds N/2 = {h}")));
        }
        let r = half_width as i64;
        let mh = (m / 2) as i64;
        let raw: Vec<LogReal> = (-h..=h)
            .map(|x| {
                if x.abs() > r {
                    LogReal::ZERO
                } else {
                    (log_binomial(m, mh + x) / log_binomial(n, h + x)).sqrt()
                }
            })
            .collect();
        let peak = raw.iter().copied().fold(LogReal::ZERO, |a, b| if b > a { b } else { a });
        let coefficients = raw
            .into_iter()
            .map(|c| if c.is_zero() { c } else { LogReal::from_ln((c.ln() - peak.ln()).min(0.0)) })
            .collect();
        Ok(ClonerMap { n_in: n, m_out: m, coefficients, kind: ClonerKind::Probabilistic })
    }

    pub fn input_copies(&self) -> u64 {
        self.n_in
    }

    pub fn output_copies(&self) -> u64 {
        self.m_out
    }

    pub fn kind(&self) -> ClonerKind {
        self.kind
    }

    /// Coefficient of the label `m` (`-N/2 <= m <= N/2`).
    pub fn coefficient(&self, m: i64) -> LogReal {
        let idx = m + (self.n_in / 2) as i64;
        usize::try_from(idx).ok().and_then(|i| self.coefficients.get(i).copied()).unwrap_or(LogReal::ZERO)
    }

    pub fn coefficients(&self) -> &[LogReal] {
        &self.coefficients
    }

    /// Diagonal of the failure operation `W = sqrt(I - Q^dag Q)`, indexed by input label.
    pub fn failure_weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| (1.0 - c.value().powi(2)).max(0.0).sqrt()).collect()
    }

    /// Runs the success branch on an `N`-copy state.
    ///
    /// Returns the renormalized `M`-copy output and its probability
    /// `||Q psi||^2`.
    pub fn apply(&self, state: &SymmetricState) -> Result<(SymmetricState, f64)> {
        if state.copies() != self.n_in {
            return Err(Error::invalid(
                "state",
                format!("cloner expects {} copies, state has {}", self.n_in, state.copies()),
            ));
        }
        let shift = ((self.m_out - self.n_in) / 2) as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); self.m_out as usize + 1];
        for (n, (a, c)) in state.amplitudes().iter().zip(&self.coefficients).enumerate() {
            out[n + shift] = a * c.value();
        }
        let probability: f64 = out.iter().map(|a| a.norm_sqr()).sum();
        if probability == 0.0 {
            return Err(Error::invalid("state", "no support on the cloner's active window"));
        }
        Ok((SymmetricState::normalized(self.m_out, out)?, probability))
    }
}

/// Optimal deterministic fidelity `2^-(N+M) [sum_m sqrt(C(N,N/2+m) C(M,M/2+m))]^2`.
pub fn fidelity_det_equatorial(n: u64, m: u64) -> Result<f64> {
    check_equatorial(n, m)?;
    let (h, mh) = ((n / 2) as i64, (m / 2) as i64);
    let terms: Vec<LogReal> = (-h..=h).map(|x| (log_binomial(n, h + x) * log_binomial(m, mh + x)).sqrt()).collect();
    let amplitude = log_sum_exp(&terms);
    Ok((amplitude * amplitude / LogReal::pow2((n + m) as f64)).value())
}

/// Optimal probabilistic fidelity `2^-M sum_{|m| <= N/2} C(M, M/2+m)`.
pub fn fidelity_prob_equatorial(n: u64, m: u64) -> Result<f64> {
    check_equatorial(n, m)?;
    let (h, mh) = ((n / 2) as i64, (m / 2) as i64);
    // Near 1 the two tails outside the window are summed instead, to keep digits.
    let tails = (binomial_window_sum(m, mh + h + 1, m as i64) / LogReal::pow2(m as f64 - 1.0)).value();
    if tails < 0.5 {
        Ok(1.0 - tails)
    } else {
        Ok((binomial_window_sum(m, mh - h, mh + h) / LogReal::pow2(m as f64)).value())
    }
}

/// Success probability of the optimal probabilistic cloner, in log form.
pub fn log_success_prob_equatorial(n: u64, m: u64) -> Result<LogReal> {
    check_equatorial(n, m)?;
    let (h, mh) = ((n / 2) as i64, (m / 2) as i64);
    let window = binomial_window_sum(m, mh - h, mh + h);
    Ok(window / (LogReal::pow2(n as f64) * log_binomial(m, ((n + m) / 2) as i64)))
}

/// Success probability `[2^N C(M, (N+M)/2)]^-1 sum_{|m| <= N/2} C(M, M/2+m)`.
pub fn success_prob_equatorial(n: u64, m: u64) -> Result<f64> {
    Ok(log_success_prob_equatorial(n, m)?.value())
}

/// Large-`N`, `N << M` approximation `exp[-N (ln 2 - N/M)]` of the success probability, in log form.
pub fn success_prob_asymptotic_ln(n: u64, m: u64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    -n * (std::f64::consts::LN_2 - n / m)
}

/// Runs the optimal probabilistic cloner on an arbitrary `N`-copy state.
pub fn apply_prob_cloner(state: &SymmetricState, m: u64) -> Result<(SymmetricState, f64)> {
    ClonerMap::probabilistic(state.copies(), m)?.apply(state)
}

/// Fidelity of the failed-branch state `W psi / ||W psi||` with the original input.
pub fn post_failure_fidelity(n: u64, m: u64) -> Result<f64> {
    let w = ClonerMap::probabilistic(n, m)?.failure_weights();
    let psi = crate::dicke::equatorial_expand(n, 0.0);
    let (mut overlap, mut norm) = (0.0, 0.0);
    for (a, wk) in psi.amplitudes().iter().zip(&w) {
        overlap += a.norm_sqr() * wk;
        norm += a.norm_sqr() * wk * wk;
    }
    if norm == 0.0 {
        return Err(Error::invalid("M", "the failure branch never occurs when M = N"));
    }
    Ok(overlap * overlap / norm)
}

/// How successive attempts choose their success operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetryPolicy {
    /// Every attempt applies the optimal filter `Q` again.
    SameFilter,
    /// Attempt `k` applies the filter restricted to `|m| <= N/2 - (k - 1)`:
    /// the first attempt is optimal, later ones accept more often at lower fidelity.
    #[default]
    NarrowingWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttemptPoint {
    pub attempt: u32,
    pub window_half_width: u64,
    /// Probability that this attempt succeeds given all earlier ones failed.
    pub attempt_success_probability: f64,
    pub cumulative_success_probability: f64,
    /// Fidelity of the clones produced when this attempt is the first to succeed.
    pub conditional_fidelity: f64,
}

/// Repeated probabilistic cloning of equatorial states.
///
/// Each attempt is an instrument `{Q_k, W_k = sqrt(I - Q_k^dag Q_k)}`. On
/// failure the renormalized `W_k psi` is fed to the next attempt. The curve
/// stops early once the failed state vanishes or the window cannot shrink further.
pub fn repeated_attempt_curve(n: u64, m: u64, max_attempts: u32, policy: RetryPolicy) -> Result<Vec<AttemptPoint>> {
    check_equatorial(n, m)?;
    if max_attempts == 0 {
        return Err(Error::invalid("max_attempts", "at least one attempt is required"));
    }
    let h = n / 2;
    let shift = ((m - n) / 2) as usize;
    let target = crate::dicke::equatorial_expand(m, 0.0);
    let target: Vec<f64> = target.amplitudes()[shift..=shift + n as usize].iter().map(|a| a.re).collect();
    let mut state: Vec<f64> = crate::dicke::equatorial_expand(n, 0.0).amplitudes().iter().map(|a| a.re).collect();

    let mut points = Vec::new();
    let mut remaining = 1.0;
    let mut cumulative = 0.0;
    for attempt in 1..=max_attempts {
        let half_width = match policy {
            RetryPolicy::SameFilter => h,
            RetryPolicy::NarrowingWindow => match h.checked_sub(u64::from(attempt) - 1) {
                Some(r) => r,
                None => break,
            },
        };
        let cloner = ClonerMap::windowed(n, m, half_width)?;
        let coeff: Vec<f64> = cloner.coefficients().iter().map(|c| c.value()).collect();

        let mut probability = 0.0;
        let mut overlap = 0.0;
        for ((a, c), b) in state.iter().zip(&coeff).zip(&target) {
            probability += (a * c).powi(2);
            overlap += a * c * b;
        }
        if probability <= 0.0 {
            break;
        }
        cumulative += remaining * probability;
        points.push(AttemptPoint {
            attempt,
            window_half_width: half_width,
            attempt_success_probability: probability,
            cumulative_success_probability: cumulative,
            conditional_fidelity: overlap * overlap / probability,
        });
        remaining *= 1.0 - probability;

        for (a, w) in state.iter_mut().zip(cloner.failure_weights()) {
            *a *= w;
        }
        let norm = state.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(norm > 1e-150) || remaining <= 0.0 {
            break;
        }
        state.iter_mut().for_each(|a| *a /= norm);
    }
    Ok(points)
}

fn concentration_bound(levels: f64, p_min: f64, n: u64, m: u64) -> Bound {
    let (n, m) = (n as f64, m as f64);
    let exponent = -2.0 * p_min * p_min * n * n / m + 4.0 * n / (m * levels);
    Bound::new(1.0 - 2.0 * levels * exponent.exp())
}

/// Fidelity guarantee `1 - 2K exp(-2 p_min^2 N^2 / M + 4N/(MK))` for clock states.
pub fn clock_bound(spec: &ClockSpec, n: u64, m: u64) -> Result<Bound> {
    if n == 0 {
        return Err(Error::invalid("N", "at least one input copy is required"));
    }
    require_outputs(n, m)?;
    Ok(concentration_bound(spec.level_count() as f64, spec.p_min(), n, m))
}

/// Fidelity guarantee `1 - 2d exp(-2 p_min^2 N^2 / M + 4N/(Md))` for multiphase covariant states.
pub fn multiphase_bound(spec: &ClockSpec, n: u64, m: u64) -> Result<Bound> {
    if n == 0 {
        return Err(Error::invalid("N", "at least one input copy is required"));
    }
    require_outputs(n, m)?;
    let levels = spec.probabilities().len() as f64;
    let p_min = spec.probabilities().iter().copied().fold(f64::INFINITY, f64::min);
    Ok(concentration_bound(levels, p_min, n, m))
}

/// Probabilistic cloner for multiphase states: shifts every occupation by
/// `(M - N)/d` on each level.
///
/// The coefficient of type `n` is `sqrt(multinomial(M; n') / (c multinomial(N; n)))`
/// with `c` chosen so that the largest coefficient is 1. Phases carry over.
pub fn multiphase_clone(state: &TypeClassState, m: u64) -> Result<(TypeClassState, f64)> {
    let (d, n) = (state.levels() as u64, state.copies());
    require_outputs(n, m)?;
    if (m - n) % d != 0 {
        return Err(Error::invalid("M", format!("M - N = {} is not divisible by d = {d}", m - n)));
    }
    let shift = (m - n) / d;
    let ratios: Vec<LogReal> = state
        .occupations()
        .iter()
        .map(|occ| {
            let shifted: Vec<u64> = occ.iter().map(|&k| k + shift).collect();
            (log_multinomial(&shifted) / log_multinomial(occ)).sqrt()
        })
        .collect();
    let peak = ratios.iter().map(|r| r.ln()).fold(f64::NEG_INFINITY, f64::max);

    let outputs = crate::dicke::compositions(m, d as usize);
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); outputs.len()];
    for ((occ, a), ratio) in state.occupations().iter().zip(state.amplitudes()).zip(&ratios) {
        let shifted: Vec<u64> = occ.iter().map(|&k| k + shift).collect();
        let idx = outputs.binary_search(&shifted).expect("shifted occupation is a valid type");
        amplitudes[idx] = a * (ratio.ln() - peak).exp();
    }
    let probability: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if probability == 0.0 {
        return Err(Error::invalid("state", "zero success probability"));
    }
    let norm = probability.sqrt();
    amplitudes.iter_mut().for_each(|a| *a /= norm);
    Ok((TypeClassState::from_parts(d as usize, m, amplitudes), probability))
}

/// Optimal universal cloning fidelity `C(d+N-1, N) / C(d+M-1, M)`.
pub fn universal_fidelity(d: u64, n: u64, m: u64) -> Result<f64> {
    if d < 2 {
        return Err(Error::invalid("d", "dimension must be at least 2"));
    }
    if n == 0 {
        return Err(Error::invalid("N", "at least one input copy is required"));
    }
    require_outputs(n, m)?;
    Ok((log_binomial(d + n - 1, n as i64) / log_binomial(d + m - 1, m as i64)).value())
}

/// Optimal probabilistic fidelity for coherent states with Gaussian prior of width `lambda`.
pub fn coherent_prob_fidelity(lambda: f64, n: u64, m: u64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::invalid("lambda", "must be nonnegative"));
    }
    if n == 0 {
        return Err(Error::invalid("N", "at least one input copy is required"));
    }
    require_outputs(n, m)?;
    // lambda < M/N - 1, cleared of the division.
    let (n, m) = (n as f64, m as f64);
    Ok(if (1.0 + lambda) * n < m { (1.0 + lambda) * n / m } else { 1.0 })
}

/// Upper bound `exp[-(alpha - 1) r^2 N^alpha ln N]` on the success probability
/// of rate-`alpha` replication of coherent states with amplitude `r`.
pub fn pandey_bound(alpha: f64, r: f64, n: u64) -> Result<LogReal> {
    if n < 2 {
        return Err(Error::invalid("N", "bound needs N >= 2"));
    }
    if !(alpha >= 1.0) {
        return Err(Error::invalid("alpha", "rate must be at least 1"));
    }
    let nf = n as f64;
    Ok(LogReal::from_ln(-(alpha - 1.0) * r * r * nf.powf(alpha) * nf.ln()))
}

/// Measure-and-prepare guarantee from a single-copy fidelity:
/// `(F^M, 1 - M(1 - F))`; the second is the Bernoulli relaxation of the first.
pub fn measure_prepare_bound(single_copy_fidelity: f64, m: u64) -> Result<(f64, Bound)> {
    if !(0.0..=1.0).contains(&single_copy_fidelity) {
        return Err(Error::invalid("F_single", "must lie in [0, 1]"));
    }
    if m == 0 {
        return Err(Error::invalid("M", "at least one output copy is required"));
    }
    let power = single_copy_fidelity.powf(m as f64);
    let bernoulli = Bound::new(1.0 - m as f64 * (1.0 - single_copy_fidelity));
    Ok((power, bernoulli))
}

/// Fidelity, success probability and reference bound of one `N -> M` cloner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationReport {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "M")]
    pub m: u64,
    pub kind: ClonerKind,
    pub fidelity: f64,
    pub success_probability: f64,
    pub lower_bound: f64,
    pub lower_bound_clamped: bool,
    /// `ln(M - N) / ln N`; absent when `M = N` or `N = 1`.
    pub rate_alpha: Option<f64>,
}

fn rate_alpha(n: u64, m: u64) -> Option<f64> {
    (m > n && n > 1).then(|| ((m - n) as f64).ln() / (n as f64).ln())
}

impl ReplicationReport {
    /// Optimal probabilistic cloner, checked against the Hoeffding bound `1 - 2 exp(-N^2/2M)`.
    pub fn probabilistic(n: u64, m: u64) -> Result<Self> {
        let fidelity = fidelity_prob_equatorial(n, m)?;
        let bound = hoeffding_bound(n, m);
        Ok(ReplicationReport {
            n,
            m,
            kind: ClonerKind::Probabilistic,
            fidelity,
            success_probability: success_prob_equatorial(n, m)?,
            lower_bound: bound.value,
            lower_bound_clamped: bound.clamped,
            rate_alpha: rate_alpha(n, m),
        })
    }

    /// Optimal deterministic cloner, checked against the universal qubit
    /// cloner (a valid but suboptimal equatorial cloner).
    pub fn deterministic(n: u64, m: u64) -> Result<Self> {
        let fidelity = fidelity_det_equatorial(n, m)?;
        let bound = Bound::new(universal_fidelity(2, n, m)?);
        Ok(ReplicationReport {
            n,
            m,
            kind: ClonerKind::Deterministic,
            fidelity,
            success_probability: 1.0,
            lower_bound: bound.value,
            lower_bound_clamped: bound.clamped,
            rate_alpha: rate_alpha(n, m),
        })
    }
}

/// `1 - 2 exp(-N^2 / 2M)`.
pub fn hoeffding_bound(n: u64, m: u64) -> Bound {
    let (n, m) = (n as f64, m as f64);
    Bound::new(1.0 - 2.0 * (-n * n / (2.0 * m)).exp())
}
