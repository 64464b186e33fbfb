// SPDX-License-Identifier: MIT OR Apache-2.0

//! Statistically controlled Monte Carlo estimation of run-length moments:
//! ARL to false alarm, conditional detection delays `ADD_k`, their
//! steady-state limit, and the worst-case delay `SADD`.
//!
//! Sample sizes follow the prescribed-proportional-closeness rule: for a
//! zero-headstart procedure the stopping time satisfies `sigma_T <= E[T]`, so
//! `N >= ceil((z_{eps/2} / w)^2)` replications keep the relative error of the
//! sample mean below `w` with confidence `1 - eps` (asymptotically).
//!
//! Replication `i` always draws from the counter-based stream
//! `(master_seed, i)` and results are reduced in replication order, so every
//! estimate is bit-identical regardless of how many workers run it.

use std::ops::Range;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::detectors::{run_from_state, run_until_stop, DetectorSpec, StopOutcome};
use crate::error::{Error, Result};
use crate::kernel::{
    normal_quantile, sample_first_step_restricted, transition_cdf, FirstStep, KernelQuery, Regime,
};
use crate::model::{Ar1Params, ChangePoint, ChangeSpec};
use crate::rng::replication_rng;

/// First batch size used to probe the acceptance rate of a conditional
/// estimate before committing to full-scale rejection sampling; an empty
/// probe means the rate is below 1e-4 and the estimate aborts.
const PROBE_BATCH: u64 = 10_000;
/// Largest single batch of replications scheduled at once.
const MAX_BATCH: u64 = 1 << 20;
/// The steady-state sweep errors out if no plateau is reached by this
/// change-point.
const STEADY_STATE_MAX_K: u64 = 4096;

/// What to do when replications hit the censoring cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CensoringPolicy {
    /// Abort the estimate: silent truncation biases run lengths downward.
    #[default]
    FailClosed,
    /// Keep censored run lengths at the cap and report the estimate as a
    /// lower bound, with the censored count surfaced.
    LowerBound,
}

/// Replication budget and confidence parameters of one Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub replications: u64,
    pub master_seed: u64,
    /// Confidence complement: intervals are at level `1 - epsilon`.
    pub epsilon: f64,
    /// Prescribed proportional closeness (relative half-width target).
    pub closeness_w: f64,
    /// Censoring cap on each simulated run.
    pub max_steps: u64,
    pub censoring: CensoringPolicy,
}

impl McConfig {
    pub fn new(
        replications: u64,
        master_seed: u64,
        epsilon: f64,
        closeness_w: f64,
        max_steps: u64,
    ) -> Result<Self> {
        if replications < 2 {
            return Err(Error::InvalidParameter {
                what: "at least 2 replications required",
                value: replications as f64,
            });
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter {
                what: "epsilon must lie in (0, 1)",
                value: epsilon,
            });
        }
        if !(closeness_w > 0.0 && closeness_w < 1.0) {
            return Err(Error::InvalidParameter {
                what: "closeness_w must lie in (0, 1)",
                value: closeness_w,
            });
        }
        if max_steps == 0 {
            return Err(Error::InvalidParameter {
                what: "max_steps must be at least 1",
                value: 0.0,
            });
        }
        Ok(Self {
            replications,
            master_seed,
            epsilon,
            closeness_w,
            max_steps,
            censoring: CensoringPolicy::FailClosed,
        })
    }

    /// Sizes the replication count from the proportional-closeness rule.
    pub fn by_closeness(
        epsilon: f64,
        closeness_w: f64,
        master_seed: u64,
        max_steps: u64,
    ) -> Result<Self> {
        let n = required_sample_size(epsilon, closeness_w)?;
        Self::new(n, master_seed, epsilon, closeness_w, max_steps)
    }

    pub fn with_replications(mut self, replications: u64) -> Self {
        self.replications = replications.max(2);
        self
    }

    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn with_censoring(mut self, censoring: CensoringPolicy) -> Self {
        self.censoring = censoring;
        self
    }
}

/// Sample mean with dispersion and confidence metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_dev: f64,
    /// `std_dev / sqrt(n)`.
    pub std_err: f64,
    /// Accepted replications behind the mean.
    pub n: u64,
    /// Replications that hit the censoring cap (nonzero only in lower-bound
    /// mode; fail-closed estimates abort instead).
    pub censored: u64,
    /// Conditional replications discarded by rejection sampling.
    pub rejected: u64,
    /// `z_{eps/2} * std_err` at the configured confidence level.
    pub ci_half_width: f64,
}

/// Minimum replication count for the relative error of the sample mean to
/// stay below `closeness_w` with confidence `1 - epsilon`:
/// `ceil((z_{eps/2} / w)^2)`, floored at 2.
///
/// The guarantee leans on `sigma_T <= E[T]`, valid for zero headstart.
pub fn required_sample_size(epsilon: f64, closeness_w: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter {
            what: "epsilon must lie in (0, 1)",
            value: epsilon,
        });
    }
    if !(closeness_w > 0.0 && closeness_w < 1.0) {
        return Err(Error::InvalidParameter {
            what: "closeness_w must lie in (0, 1)",
            value: closeness_w,
        });
    }
    let z = normal_quantile(1.0 - epsilon / 2.0);
    Ok(((z / closeness_w).powi(2).ceil() as u64).max(2))
}

/// Runs one closure per replication index on the worker pool and returns the
/// outcomes in replication order. The first error in replication order wins,
/// so failures are as deterministic as successes.
fn run_replications<T, F>(range: Range<u64>, master_seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    range
        .into_par_iter()
        .map(|i| f(&mut replication_rng(master_seed, i)))
        .collect::<Vec<Result<T>>>()
        .into_iter()
        .collect()
}

/// Exact integer reduction of run lengths: sums in u128 never lose mass, so
/// the estimate does not depend on summation order.
fn summarize(values: &[(u64, bool)], mc: &McConfig) -> Result<McEstimate> {
    let censored = values.iter().filter(|(_, c)| *c).count() as u64;
    if censored > 0 && mc.censoring == CensoringPolicy::FailClosed {
        return Err(Error::Censored {
            censored,
            replications: values.len() as u64,
            max_steps: mc.max_steps,
        });
    }
    let n = values.len() as u64;
    if n < 2 {
        return Err(Error::InvalidParameter {
            what: "estimate requires at least 2 accepted replications",
            value: n as f64,
        });
    }
    let sum: u128 = values.iter().map(|&(v, _)| v as u128).sum();
    let sum_sq: u128 = values.iter().map(|&(v, _)| (v as u128) * (v as u128)).sum();
    let nf = n as f64;
    let s = sum as f64;
    let s2 = sum_sq as f64;
    let mean = s / nf;
    let var = ((s2 - s * s / nf) / (nf - 1.0)).max(0.0);
    let std_dev = var.sqrt();
    let std_err = std_dev / nf.sqrt();
    let z = normal_quantile(1.0 - mc.epsilon / 2.0);
    Ok(McEstimate {
        mean,
        std_dev,
        std_err,
        n,
        censored,
        rejected: 0,
        ci_half_width: z * std_err,
    })
}

/// Average run length to false alarm: the mean stopping time under the
/// pre-change measure. Requires `change_point = Never`.
pub fn estimate_arl(
    detector: &DetectorSpec,
    change: &ChangeSpec,
    mc: &McConfig,
) -> Result<McEstimate> {
    if change.change_point != ChangePoint::Never {
        return Err(Error::InvalidParameter {
            what: "ARL requires change_point = infinity",
            value: f64::NAN,
        });
    }
    let outcomes = run_replications(0..mc.replications, mc.master_seed, |rng| {
        run_until_stop(detector, change, rng, mc.max_steps)
    })?;
    let values: Vec<(u64, bool)> = outcomes
        .iter()
        .map(|o| (o.steps(), o.is_censored()))
        .collect();
    summarize(&values, mc)
}

enum Conditional {
    Accepted { delay: u64, censored: bool },
    Rejected,
}

/// Conditional average detection delay `ADD_k = E_k[T - k | T > k]`.
///
/// Runs with the change at `nu = k` and keeps only replications whose run
/// survives past `k`; rejected runs are replaced by drawing further
/// replication indices until the accepted count reaches the configured
/// budget. Aborts with an infeasible-conditioning error if the probe batch
/// accepts nothing (acceptance rate below 1e-4).
pub fn estimate_add_k(
    detector: &DetectorSpec,
    pre: Ar1Params,
    post: Ar1Params,
    x0: f64,
    k: u64,
    mc: &McConfig,
) -> Result<McEstimate> {
    if mc.max_steps <= k {
        return Err(Error::InvalidParameter {
            what: "max_steps must exceed the change-point k",
            value: mc.max_steps as f64,
        });
    }
    let change = ChangeSpec::new(pre, post, ChangePoint::At(k)).with_x0(x0);
    let simulate = |rng: &mut ChaCha8Rng| -> Result<Conditional> {
        Ok(
            match run_until_stop(detector, &change, rng, mc.max_steps)? {
                StopOutcome::Stopped { at } if at > k => Conditional::Accepted {
                    delay: at - k,
                    censored: false,
                },
                StopOutcome::Stopped { .. } => Conditional::Rejected,
                // a censored run never crossed, so it certainly survived past k
                StopOutcome::Censored { at } => Conditional::Accepted {
                    delay: at - k,
                    censored: true,
                },
            },
        )
    };

    if k == 0 {
        // conditioning is vacuous: T >= 1 always
        let outcomes = run_replications(0..mc.replications, mc.master_seed, simulate)?;
        let values: Vec<(u64, bool)> = outcomes
            .iter()
            .map(|o| match o {
                Conditional::Accepted { delay, censored } => (*delay, *censored),
                Conditional::Rejected => unreachable!("T >= 1 cannot be rejected at k = 0"),
            })
            .collect();
        return summarize(&values, mc);
    }

    let target = mc.replications;
    let mut accepted: Vec<(u64, bool)> = Vec::with_capacity(target as usize);
    let mut next_index = 0u64;
    let mut draws = 0u64;
    let mut rejected = 0u64;
    // the first batch doubles as the acceptance-rate probe: an empty probe
    // means the rate is below 1 / PROBE_BATCH
    let mut batch = PROBE_BATCH;
    while (accepted.len() as u64) < target {
        let outcomes = run_replications(next_index..next_index + batch, mc.master_seed, simulate)?;
        next_index += batch;
        for o in outcomes {
            if (accepted.len() as u64) >= target {
                break;
            }
            draws += 1;
            match o {
                Conditional::Accepted { delay, censored } => accepted.push((delay, censored)),
                Conditional::Rejected => rejected += 1,
            }
        }
        if accepted.is_empty() {
            return Err(Error::InfeasibleConditioning {
                k,
                draws,
                accepted: 0,
            });
        }
        // schedule the next batch from the observed acceptance rate
        let rate = accepted.len() as f64 / draws as f64;
        let remaining = target - accepted.len() as u64;
        batch = ((remaining as f64 / rate * 1.1).ceil() as u64).clamp(1024, MAX_BATCH);
    }
    let mut est = summarize(&accepted, mc)?;
    est.rejected = rejected;
    Ok(est)
}

/// Steady-state delay `ADD_k` as `k` grows, tagged with the `k` at which the
/// doubling schedule plateaued.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateAdd {
    pub estimate: McEstimate,
    pub k: u64,
}

/// Evaluates `ADD_k` on the doubling schedule `k = 8, 16, 32, ...` until two
/// consecutive values differ by less than
/// `max(2 * combined std_err, 0.5% relative)`; errors if no plateau is
/// reached by `k = 4096`.
pub fn estimate_add_inf(
    detector: &DetectorSpec,
    pre: Ar1Params,
    post: Ar1Params,
    x0: f64,
    mc: &McConfig,
) -> Result<SteadyStateAdd> {
    let mut prev: Option<McEstimate> = None;
    let mut k = 8u64;
    while k <= STEADY_STATE_MAX_K {
        let est = estimate_add_k(detector, pre, post, x0, k, mc)?;
        if let Some(p) = prev {
            let diff = (est.mean - p.mean).abs();
            let tol = (2.0 * (est.std_err + p.std_err)).max(0.005 * est.mean.abs());
            if diff < tol {
                return Ok(SteadyStateAdd { estimate: est, k });
            }
        }
        prev = Some(est);
        k *= 2;
    }
    Err(Error::NonConvergence {
        what: "steady-state detection delay plateau",
        budget: STEADY_STATE_MAX_K,
    })
}

/// One entry of a SADD verification sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub k: u64,
    pub estimate: McEstimate,
    /// Whether `ADD_k` exceeded `ADD_0` by more than three combined standard
    /// errors, contradicting the worst-case-at-zero property.
    pub exceeds_sadd: bool,
}

/// Worst-case delay estimate with optional verification sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddReport {
    pub estimate: McEstimate,
    pub sweep: Vec<SweepPoint>,
}

impl SaddReport {
    pub fn violations(&self) -> usize {
        self.sweep.iter().filter(|p| p.exceeds_sadd).count()
    }
}

/// Supremum conditional average detection delay. For a zero-headstart
/// procedure the supremum over change-points is attained at `k = 0`, so this
/// evaluates `ADD_0`; a nonzero headstart voids that identity and is refused.
///
/// When `verify_sweep` is given, `ADD_k` is additionally estimated for each
/// listed `k` and checked against `ADD_0 + 3 * (se_k + se_0)`.
pub fn sadd(
    detector: &DetectorSpec,
    pre: Ar1Params,
    post: Ar1Params,
    x0: f64,
    mc: &McConfig,
    verify_sweep: Option<&[u64]>,
) -> Result<SaddReport> {
    if detector.headstart() != 0.0 {
        return Err(Error::UnsupportedConfiguration {
            what: "SADD = ADD_0 holds only for zero headstart",
        });
    }
    let add0 = estimate_add_k(detector, pre, post, x0, 0, mc)?;
    let mut sweep = Vec::new();
    if let Some(ks) = verify_sweep {
        for &k in ks {
            let est = estimate_add_k(detector, pre, post, x0, k, mc)?;
            let exceeds = est.mean > add0.mean + 3.0 * (est.std_err + add0.std_err);
            sweep.push(SweepPoint {
                k,
                estimate: est,
                exceeds_sadd: exceeds,
            });
        }
    }
    Ok(SaddReport {
        estimate: add0,
        sweep,
    })
}

/// Result of the `sigma_T <= E[T]` sanity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceBound {
    pub pass: bool,
    /// `mean * (1 + 5 / sqrt(n))`: the bound with slack for the sampling
    /// error of the standard-deviation estimate.
    pub bound: f64,
    /// `bound - std_dev`; negative margins fail.
    pub margin: f64,
}

/// Checks the zero-headstart inequality `sigma_T <= E[T]` on an estimate,
/// with statistical slack `mean * 5 / sqrt(n)`.
pub fn variance_bound_check(estimate: &McEstimate) -> VarianceBound {
    let bound = estimate.mean * (1.0 + 5.0 / (estimate.n as f64).sqrt());
    let margin = bound - estimate.std_dev;
    VarianceBound {
        pass: estimate.std_dev <= bound,
        bound,
        margin,
    }
}

/// Run-length estimate from the first-step decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstStepEstimate {
    pub estimate: McEstimate,
    /// Exact probability that the first transition lands inside `[0, A)`.
    pub p_continue: f64,
    /// Per-replication variance of this estimator relative to the plain
    /// sample mean (at most 1 up to degenerate cases).
    pub variance_ratio: f64,
}

/// Estimates `E[T]` as `1 + p_continue * E[T' | first step lands in [0, A)]`.
///
/// The first term of the expansion is deterministic and the continuation
/// probability comes from the transition CDF in closed form, so only the
/// conditional remainder `T'` is simulated: trajectories start from a first
/// step sampled restricted to `[0, A)`, removing the first-step Bernoulli
/// noise from the estimator.
pub fn first_step_variance_reduction(
    detector: &DetectorSpec,
    pre: Ar1Params,
    post: Ar1Params,
    x0: f64,
    regime: Regime,
    mc: &McConfig,
) -> Result<FirstStepEstimate> {
    let z = normal_quantile(1.0 - mc.epsilon / 2.0);
    let query = KernelQuery {
        regime,
        psi: *detector.psi(),
        y1: detector.headstart(),
        x1: x0,
        y2: detector.threshold(),
        x2: f64::INFINITY,
    };
    let p_continue = transition_cdf(&query, pre, post)?;
    if p_continue < 1e-12 {
        // every first step crosses: T = 1 deterministically (any neglected
        // continuation mass is below 1e-12 per run)
        return Ok(FirstStepEstimate {
            estimate: McEstimate {
                mean: 1.0,
                std_dev: 0.0,
                std_err: 0.0,
                n: mc.replications,
                censored: 0,
                rejected: 0,
                ci_half_width: 0.0,
            },
            p_continue,
            variance_ratio: 1.0,
        });
    }

    let params = regime.params(pre, post);
    let remainder_budget = mc.max_steps - 1;
    let outcomes = run_replications(0..mc.replications, mc.master_seed, |rng| {
        let mut attempts = 0u64;
        loop {
            match sample_first_step_restricted(
                x0,
                detector.headstart(),
                detector.threshold(),
                regime,
                detector.psi(),
                pre,
                post,
                rng,
            )? {
                FirstStep::Interior { y, x } => {
                    let rem =
                        run_from_state(detector, y, x, params, pre, post, rng, remainder_budget)?;
                    return Ok((rem.steps(), rem.is_censored()));
                }
                FirstStep::AboveBand | FirstStep::BelowBand => {
                    attempts += 1;
                    if attempts > 1_000_000 {
                        return Err(Error::InfeasibleConditioning {
                            k: 0,
                            draws: attempts,
                            accepted: 0,
                        });
                    }
                }
            }
        }
    })?;
    let conditional = summarize(&outcomes, mc)?;

    let m1 = conditional.mean;
    let cond_var = conditional.std_dev * conditional.std_dev;
    let mean = 1.0 + p_continue * m1;
    let std_dev = p_continue * conditional.std_dev;
    let std_err = std_dev / (conditional.n as f64).sqrt();

    // per-replication variances: the plain estimator draws T = 1 + B * T'
    // with B Bernoulli(p_continue), this one draws T' alone
    let vr_var = p_continue * p_continue * cond_var;
    let plain_var = p_continue * (cond_var + m1 * m1) - (p_continue * m1).powi(2);
    let variance_ratio = if plain_var > 0.0 {
        vr_var / plain_var
    } else {
        1.0
    };

    Ok(FirstStepEstimate {
        estimate: McEstimate {
            mean,
            std_dev,
            std_err,
            n: conditional.n,
            censored: conditional.censored,
            rejected: 0,
            ci_half_width: z * std_err,
        },
        p_continue,
        variance_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::PsiKind;

    fn p(mu: f64, lambda: f64) -> Ar1Params {
        Ar1Params::new(mu, lambda).unwrap()
    }

    fn no_change() -> ChangeSpec {
        let common = p(0.0, 0.0);
        ChangeSpec::new(common, common, ChangePoint::Never)
    }

    #[test]
    fn sample_size_rule() {
        // oracle: (z_{0.025} / w)^2 with z = 1.959964, rounded up
        assert_eq!(required_sample_size(0.05, 0.01).unwrap(), 38_415);
        assert_eq!(required_sample_size(0.05, 0.10).unwrap(), 385);
        // degenerate floor
        assert_eq!(required_sample_size(0.3174, 0.9999).unwrap(), 2);
        assert!(required_sample_size(0.0, 0.5).is_err());
        assert!(required_sample_size(0.05, 1.0).is_err());
    }

    #[test]
    fn degenerate_sr_arl_is_exact() {
        // pre = post: R_n = n deterministically, so ARL at A = 10.5 is 11
        let det = DetectorSpec::sr(10.5).unwrap();
        let mc = McConfig::new(500, 7, 0.05, 0.05, 10_000).unwrap();
        let est = estimate_arl(&det, &no_change(), &mc).unwrap();
        assert_eq!(est.mean, 11.0);
        assert_eq!(est.std_dev, 0.0);
        assert_eq!(est.censored, 0);
        assert_eq!(est.n, 500);
    }

    #[test]
    fn arl_requires_no_change() {
        let det = DetectorSpec::sr(10.5).unwrap();
        let mc = McConfig::new(10, 7, 0.05, 0.05, 1_000).unwrap();
        let spec = ChangeSpec::new(p(0.0, 0.0), p(1.0, 0.0), ChangePoint::At(3));
        assert!(estimate_arl(&det, &spec, &mc).is_err());
    }

    #[test]
    fn censoring_fails_closed_and_lower_bounds_opt_in() {
        // CUSUM with unit LR plateaus at 1 and never reaches 2
        let det = DetectorSpec::cusum(2.0).unwrap();
        let mc = McConfig::new(50, 7, 0.05, 0.05, 100).unwrap();
        match estimate_arl(&det, &no_change(), &mc) {
            Err(Error::Censored {
                censored,
                replications,
                max_steps,
            }) => {
                assert_eq!(censored, 50);
                assert_eq!(replications, 50);
                assert_eq!(max_steps, 100);
            }
            other => panic!("expected censoring failure, got {other:?}"),
        }
        let mc = mc.with_censoring(CensoringPolicy::LowerBound);
        let est = estimate_arl(&det, &no_change(), &mc).unwrap();
        assert_eq!(est.mean, 100.0);
        assert_eq!(est.censored, 50);
    }

    #[test]
    fn estimates_are_reproducible() {
        let det = DetectorSpec::cusum(8.0).unwrap();
        let spec = ChangeSpec::new(p(0.0, 0.0), p(1.0, 0.5), ChangePoint::Never);
        let mc = McConfig::new(2_000, 99, 0.05, 0.05, 1_000_000).unwrap();
        let a = estimate_arl(&det, &spec, &mc).unwrap();
        let b = estimate_arl(&det, &spec, &mc).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn add_k_conditioning_vacuous_at_zero() {
        let det = DetectorSpec::sr(5.5).unwrap();
        let mc = McConfig::new(400, 3, 0.05, 0.05, 100_000).unwrap();
        let est = estimate_add_k(&det, p(0.0, 0.0), p(0.0, 0.0), 0.0, 0, &mc).unwrap();
        // degenerate pre = post: delay is exactly 6
        assert_eq!(est.mean, 6.0);
        assert_eq!(est.rejected, 0);
    }

    #[test]
    fn add_k_rejects_runs_stopping_before_k() {
        let pre = p(0.0, 0.0);
        let post = p(1.0, 0.0);
        let det = DetectorSpec::cusum(15.0).unwrap();
        let mc = McConfig::new(2_000, 11, 0.05, 0.05, 1_000_000).unwrap();
        let est = estimate_add_k(&det, pre, post, 0.0, 10, &mc).unwrap();
        assert_eq!(est.n, 2_000);
        assert!(
            est.rejected > 0,
            "ARL ~ 40 should reject some runs at k = 10"
        );
        assert!(est.mean >= 1.0);
    }

    #[test]
    fn add_k_infeasible_conditioning_detected() {
        // degenerate SR stops at exactly 11; conditioning on T > 11 is impossible
        let det = DetectorSpec::sr(10.5).unwrap();
        let mc = McConfig::new(100, 5, 0.05, 0.05, 10_000).unwrap();
        match estimate_add_k(&det, p(0.0, 0.0), p(0.0, 0.0), 0.0, 11, &mc) {
            Err(Error::InfeasibleConditioning { k, accepted, .. }) => {
                assert_eq!(k, 11);
                assert_eq!(accepted, 0);
            }
            other => panic!("expected infeasible conditioning, got {other:?}"),
        }
    }

    #[test]
    fn add_inf_errors_on_degenerate_conditioning() {
        let det = DetectorSpec::sr(10.5).unwrap();
        let mc = McConfig::new(100, 5, 0.05, 0.05, 10_000).unwrap();
        assert!(matches!(
            estimate_add_inf(&det, p(0.0, 0.0), p(0.0, 0.0), 0.0, &mc),
            Err(Error::InfeasibleConditioning { .. })
        ));
    }

    #[test]
    fn sadd_requires_zero_headstart() {
        let det = DetectorSpec::new(PsiKind::Sr, 1.0, 10.0).unwrap();
        let mc = McConfig::new(100, 5, 0.05, 0.05, 10_000).unwrap();
        assert!(matches!(
            sadd(&det, p(0.0, 0.0), p(1.0, 0.0), 0.0, &mc, None),
            Err(Error::UnsupportedConfiguration { .. })
        ));
    }

    #[test]
    fn variance_bound_checks() {
        let base = McEstimate {
            mean: 50.0,
            std_dev: 49.0,
            std_err: 0.5,
            n: 10_000,
            censored: 0,
            rejected: 0,
            ci_half_width: 1.0,
        };
        assert!(variance_bound_check(&base).pass);
        let degenerate = McEstimate {
            std_dev: 0.0,
            ..base
        };
        assert!(variance_bound_check(&degenerate).pass);
        // negative control: standard deviation twice the mean must fail
        let broken = McEstimate {
            std_dev: 100.0,
            ..base
        };
        let check = variance_bound_check(&broken);
        assert!(!check.pass);
        assert!(check.margin < 0.0);
    }

    #[test]
    fn first_step_estimator_degenerate_cases() {
        let mc = McConfig::new(300, 21, 0.05, 0.05, 10_000).unwrap();
        // pre = post SR with A = 2: first step lands at exactly 1, the second
        // crosses, so E[T] = 1 + 1 * 1 = 2 with zero variance
        let det = DetectorSpec::sr(2.0).unwrap();
        let fs =
            first_step_variance_reduction(&det, p(0.0, 0.0), p(0.0, 0.0), 0.0, Regime::Pre, &mc)
                .unwrap();
        assert_eq!(fs.p_continue, 1.0);
        assert_eq!(fs.estimate.mean, 2.0);
        assert_eq!(fs.estimate.std_dev, 0.0);
        // A = 0.5: the first step always crosses, E[T] = 1 exactly
        let det = DetectorSpec::sr(0.5).unwrap();
        let fs =
            first_step_variance_reduction(&det, p(0.0, 0.0), p(0.0, 0.0), 0.0, Regime::Pre, &mc)
                .unwrap();
        assert_eq!(fs.p_continue, 0.0);
        assert_eq!(fs.estimate.mean, 1.0);
        assert_eq!(fs.variance_ratio, 1.0);
    }
}
