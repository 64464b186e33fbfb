// SPDX-License-Identifier: MIT OR Apache-2.0

//! Generic likelihood-ratio detection statistics and their stopping times.
//!
//! The statistic evolves as `Y_n = psi(Y_{n-1}) * LR_n` from `Y_0 = y0 >= 0`;
//! `psi(z) = 1 + z` gives the Shiryaev-Roberts statistic and
//! `psi(z) = max(1, z)` the CUSUM statistic. The associated stopping time is
//! the first `n >= 1` with `Y_n >= A`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{log_likelihood_ratio, step, Ar1Params, ChangeSpec};
use crate::rng::standard_normal;

/// Linear-domain statistics above this are reported as numeric-range errors
/// before they reach infinity. Thresholds of practical interest sit many
/// orders of magnitude below.
const LINEAR_GUARD: f64 = 1e300;

/// The recursion map `psi`.
#[derive(Clone, Copy)]
pub enum PsiKind {
    /// Shiryaev-Roberts: `z -> 1 + z`.
    Sr,
    /// CUSUM: `z -> max(1, z)`.
    Cusum,
    /// Any non-negative map on `[0, inf)`; only SR and CUSUM are exercised by
    /// the experiment harness.
    Custom {
        name: &'static str,
        psi: fn(f64) -> f64,
    },
}

impl PsiKind {
    pub fn apply(&self, z: f64) -> f64 {
        match self {
            Self::Sr => 1.0 + z,
            Self::Cusum => z.max(1.0),
            Self::Custom { psi, .. } => psi(z),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Sr => "sr",
            Self::Cusum => "cusum",
            Self::Custom { name, .. } => name,
        }
    }
}

impl std::fmt::Debug for PsiKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl PartialEq for PsiKind {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Sr, Self::Sr) | (Self::Cusum, Self::Cusum) => true,
            (Self::Custom { name: a, psi: pa }, Self::Custom { name: b, psi: pb }) => {
                a == b && std::ptr::fn_addr_eq(*pa, *pb)
            }
            _ => false,
        }
    }
}

/// A detection procedure: recursion map, headstart `y0`, and threshold `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSpec {
    psi: PsiKind,
    headstart: f64,
    threshold: f64,
}

impl DetectorSpec {
    pub fn new(psi: PsiKind, headstart: f64, threshold: f64) -> Result<Self> {
        if !headstart.is_finite() || headstart < 0.0 {
            return Err(Error::InvalidParameter {
                what: "headstart must be finite and non-negative",
                value: headstart,
            });
        }
        if !threshold.is_finite() || threshold <= 0.0 {
            return Err(Error::InvalidParameter {
                what: "threshold must be finite and positive",
                value: threshold,
            });
        }
        Ok(Self {
            psi,
            headstart,
            threshold,
        })
    }

    /// Zero-headstart Shiryaev-Roberts procedure with threshold `a`.
    pub fn sr(a: f64) -> Result<Self> {
        Self::new(PsiKind::Sr, 0.0, a)
    }

    /// Zero-headstart CUSUM chart with threshold `a`.
    pub fn cusum(a: f64) -> Result<Self> {
        Self::new(PsiKind::Cusum, 0.0, a)
    }

    pub fn psi(&self) -> &PsiKind {
        &self.psi
    }

    pub fn headstart(&self) -> f64 {
        self.headstart
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

/// Current statistic value, the last observation, and observations consumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorState {
    y: f64,
    x_prev: f64,
    n: u64,
}

impl DetectorState {
    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn x_prev(&self) -> f64 {
        self.x_prev
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

/// Initial state: `Y_0 = y0`, conditioned on `X_0 = x0`.
pub fn init(spec: &DetectorSpec, x0: f64) -> DetectorState {
    DetectorState {
        y: spec.headstart,
        x_prev: x0,
        n: 0,
    }
}

/// One statistic update on the observation `x_new`.
pub fn update(
    spec: &DetectorSpec,
    state: &DetectorState,
    x_new: f64,
    pre: Ar1Params,
    post: Ar1Params,
) -> Result<DetectorState> {
    let psi_y = spec.psi.apply(state.y);
    debug_assert!(psi_y >= 0.0, "psi must be non-negative on [0, inf)");
    let y = psi_y * log_likelihood_ratio(pre, post, state.x_prev, x_new).exp();
    if !y.is_finite() || y > LINEAR_GUARD {
        return Err(Error::NumericRange {
            step: state.n + 1,
            value: y,
        });
    }
    Ok(DetectorState {
        y,
        x_prev: x_new,
        n: state.n + 1,
    })
}

/// Result of driving a detector over simulated data: either the first
/// threshold crossing, or censoring at the step cap. Censoring is surfaced,
/// never silently truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopOutcome {
    Stopped { at: u64 },
    Censored { at: u64 },
}

impl StopOutcome {
    pub fn steps(&self) -> u64 {
        match *self {
            Self::Stopped { at } | Self::Censored { at } => at,
        }
    }

    pub fn is_censored(&self) -> bool {
        matches!(self, Self::Censored { .. })
    }
}

/// Runs the detector on freshly simulated observations until the statistic
/// first reaches the threshold, or until `max_steps` observations have been
/// consumed without a crossing.
///
/// CUSUM runs natively in the log domain; SR and custom maps run in the
/// linear domain behind the numeric-range guard (SR's additive recursion has
/// no exact log-domain form).
pub fn run_until_stop<R: Rng + ?Sized>(
    spec: &DetectorSpec,
    change: &ChangeSpec,
    rng: &mut R,
    max_steps: u64,
) -> Result<StopOutcome> {
    if max_steps == 0 {
        return Err(Error::InvalidParameter {
            what: "max_steps must be at least 1",
            value: 0.0,
        });
    }
    let mut x_prev = change.x0;
    match spec.psi {
        PsiKind::Cusum => {
            let log_a = spec.threshold.ln();
            let mut log_v = spec.headstart.ln();
            for n in 1..=max_steps {
                let x = step(change.params_at(n), x_prev, standard_normal(rng));
                log_v = log_v.max(0.0) + log_likelihood_ratio(change.pre, change.post, x_prev, x);
                x_prev = x;
                if log_v >= log_a {
                    return Ok(StopOutcome::Stopped { at: n });
                }
            }
        }
        _ => {
            let mut state = init(spec, x_prev);
            for n in 1..=max_steps {
                let x = step(change.params_at(n), state.x_prev, standard_normal(rng));
                state = update(spec, &state, x, change.pre, change.post)?;
                if state.y >= spec.threshold {
                    return Ok(StopOutcome::Stopped { at: n });
                }
            }
        }
    }
    Ok(StopOutcome::Censored { at: max_steps })
}

/// Continues a partially advanced detector from `(y, x_prev)` under a single
/// regime until crossing or censoring; returns the number of *additional*
/// steps taken. Used by the first-step variance-reduction estimator.
#[allow(clippy::too_many_arguments)]
pub(crate) fn run_from_state<R: Rng + ?Sized>(
    spec: &DetectorSpec,
    y_init: f64,
    x_init: f64,
    params: Ar1Params,
    pre: Ar1Params,
    post: Ar1Params,
    rng: &mut R,
    max_steps: u64,
) -> Result<StopOutcome> {
    let mut x_prev = x_init;
    match spec.psi {
        PsiKind::Cusum => {
            let log_a = spec.threshold.ln();
            let mut log_v = y_init.ln();
            for n in 1..=max_steps {
                let x = step(params, x_prev, standard_normal(rng));
                log_v = log_v.max(0.0) + log_likelihood_ratio(pre, post, x_prev, x);
                x_prev = x;
                if log_v >= log_a {
                    return Ok(StopOutcome::Stopped { at: n });
                }
            }
        }
        _ => {
            let mut state = DetectorState {
                y: y_init,
                x_prev: x_init,
                n: 0,
            };
            for n in 1..=max_steps {
                let x = step(params, state.x_prev, standard_normal(rng));
                state = update(spec, &state, x, pre, post)?;
                if state.y >= spec.threshold {
                    return Ok(StopOutcome::Stopped { at: n });
                }
            }
        }
    }
    Ok(StopOutcome::Censored { at: max_steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ChangePoint;
    use crate::rng::replication_rng;

    fn p(mu: f64, lambda: f64) -> Ar1Params {
        Ar1Params::new(mu, lambda).unwrap()
    }

    fn no_change() -> ChangeSpec {
        let common = p(0.0, 0.0);
        ChangeSpec::new(common, common, ChangePoint::Never)
    }

    #[test]
    fn init_sets_headstart() {
        let sr = DetectorSpec::sr(2.0).unwrap();
        let s = init(&sr, 0.0);
        assert_eq!((s.y(), s.x_prev(), s.n()), (0.0, 0.0, 0));
        let cusum = DetectorSpec::cusum(2.0).unwrap();
        assert_eq!(init(&cusum, 1.5).y(), 0.0);
        let boosted = DetectorSpec::new(PsiKind::Sr, 3.5, 2.0).unwrap();
        assert_eq!(init(&boosted, 0.0).y(), 3.5);
    }

    #[test]
    fn spec_validation() {
        assert!(DetectorSpec::new(PsiKind::Sr, -0.1, 1.0).is_err());
        assert!(DetectorSpec::new(PsiKind::Sr, 0.0, 0.0).is_err());
        assert!(DetectorSpec::new(PsiKind::Sr, 0.0, -2.0).is_err());
    }

    #[test]
    fn unit_lr_recursions() {
        // pre = post makes every likelihood ratio one: R_n = n, V_n = 1
        let ch = no_change();
        let sr = DetectorSpec::sr(100.0).unwrap();
        let mut s = init(&sr, 0.0);
        for n in 1..=5u64 {
            s = update(&sr, &s, 0.7, ch.pre, ch.post).unwrap();
            assert!((s.y() - n as f64).abs() < 1e-12);
        }
        let cusum = DetectorSpec::cusum(100.0).unwrap();
        let mut s = init(&cusum, 0.0);
        for _ in 0..5 {
            s = update(&cusum, &s, -0.3, ch.pre, ch.post).unwrap();
            assert!((s.y() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stopping_on_deterministic_statistics() {
        let ch = no_change();
        let mut rng = replication_rng(1, 0);
        let sr = DetectorSpec::sr(0.5).unwrap();
        assert_eq!(
            run_until_stop(&sr, &ch, &mut rng, 100).unwrap(),
            StopOutcome::Stopped { at: 1 }
        );
        let sr = DetectorSpec::sr(10.5).unwrap();
        assert_eq!(
            run_until_stop(&sr, &ch, &mut rng, 100).unwrap(),
            StopOutcome::Stopped { at: 11 }
        );
        // CUSUM plateaus at one and never reaches 2
        let cusum = DetectorSpec::cusum(2.0).unwrap();
        assert_eq!(
            run_until_stop(&cusum, &ch, &mut rng, 64).unwrap(),
            StopOutcome::Censored { at: 64 }
        );
    }

    #[test]
    fn sr_recursion_matches_double_sum_definition() {
        // brute force: R_n = sum over m of prod_{j=m..n} LR_j
        let pre = p(0.0, 0.0);
        let post = p(1.0, 0.5);
        let ch = ChangeSpec::new(pre, post, ChangePoint::Never);
        let sr = DetectorSpec::sr(1e12).unwrap();
        for rep in 0..50 {
            let mut rng = replication_rng(0xD0_5E44, rep);
            let path = crate::model::generate_path(&ch, 10, &mut rng);
            let lrs: Vec<f64> = path
                .iter()
                .scan(ch.x0, |xp, &x| {
                    let lr = log_likelihood_ratio(pre, post, *xp, x).exp();
                    *xp = x;
                    Some(lr)
                })
                .collect();
            let mut state = init(&sr, ch.x0);
            for (n, &x) in path.iter().enumerate() {
                state = update(&sr, &state, x, pre, post).unwrap();
                let brute: f64 = (0..=n).map(|m| lrs[m..=n].iter().product::<f64>()).sum();
                assert!(
                    (state.y() - brute).abs() <= 1e-10 * brute.abs().max(1.0),
                    "n={n} recursion {} vs double sum {brute}",
                    state.y()
                );
            }
        }
    }

    #[test]
    fn cusum_log_and_linear_domains_agree() {
        let pre = p(0.0, 0.2);
        let post = p(1.0, 0.7);
        let ch = ChangeSpec::new(pre, post, ChangePoint::Never);
        let cusum = DetectorSpec::cusum(1e12).unwrap();
        for rep in 0..20 {
            let mut rng = replication_rng(0xC0_5131, rep);
            let path = crate::model::generate_path(&ch, 50, &mut rng);
            let mut state = init(&cusum, ch.x0);
            let mut log_v = f64::NEG_INFINITY;
            let mut x_prev = ch.x0;
            for &x in &path {
                state = update(&cusum, &state, x, pre, post).unwrap();
                log_v = log_v.max(0.0) + log_likelihood_ratio(pre, post, x_prev, x);
                x_prev = x;
                let linear = state.y();
                assert!(
                    (log_v.exp() - linear).abs() <= 1e-10 * linear.abs(),
                    "log-domain {} vs linear {linear}",
                    log_v.exp()
                );
            }
        }
    }

    #[test]
    fn overflow_reports_step_index() {
        // huge drift change makes the LR overflow immediately
        let pre = p(0.0, 0.0);
        let post = p(500.0, 0.0);
        let sr = DetectorSpec::sr(1e200).unwrap();
        let state = init(&sr, 0.0);
        let err = update(&sr, &state, 1000.0, pre, post).unwrap_err();
        match err {
            Error::NumericRange { step, .. } => assert_eq!(step, 1),
            other => panic!("expected numeric-range error, got {other:?}"),
        }
    }

    #[test]
    fn stopping_time_monotone_in_threshold_and_headstart() {
        let pre = p(0.0, 0.0);
        let post = p(1.0, 0.5);
        let ch = ChangeSpec::new(pre, post, ChangePoint::At(0));
        let mut prev_steps = 0u64;
        for (i, a) in [1.5, 3.0, 6.0, 12.0, 24.0].into_iter().enumerate() {
            let det = DetectorSpec::sr(a).unwrap();
            let mut rng = replication_rng(314, 0);
            let t = run_until_stop(&det, &ch, &mut rng, 100_000)
                .unwrap()
                .steps();
            assert!(i == 0 || t >= prev_steps, "A={a} gave t={t} < {prev_steps}");
            prev_steps = t;
        }
        let mut prev_steps = u64::MAX;
        for y0 in [0.0, 1.0, 4.0, 9.0] {
            let det = DetectorSpec::new(PsiKind::Sr, y0, 10.0).unwrap();
            let mut rng = replication_rng(314, 1);
            let t = run_until_stop(&det, &ch, &mut rng, 100_000)
                .unwrap()
                .steps();
            assert!(t <= prev_steps, "y0={y0} gave t={t} > {prev_steps}");
            prev_steps = t;
        }
    }
}
