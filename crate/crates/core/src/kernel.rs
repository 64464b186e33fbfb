// SPDX-License-Identifier: MIT OR Apache-2.0

//! Transition probability function of the bivariate detection process
//! `(Y_n, X_n)` and the restricted first-step sampler built on it.
//!
//! Conditioned on `(y1, x1)`, the next pair is supported on the curve
//! `x2 = xi(x1, y1, y2)`: the joint density is singular, so the useful object
//! is the transition CDF `P_d(Y <= y2, X <= x2 | y1, x1)`, which this module
//! evaluates in closed form and validates against simulation.

use rand::Rng;

use crate::detectors::PsiKind;
use crate::error::{Error, Result};
use crate::model::{log_likelihood_ratio, step, Ar1Params};
use crate::rng::standard_normal;

/// Which measure drives the next observation: pre-change (no change ever) or
/// post-change (change already in effect).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Pre,
    Post,
}

impl Regime {
    pub fn params(&self, pre: Ar1Params, post: Ar1Params) -> Ar1Params {
        match self {
            Self::Pre => pre,
            Self::Post => post,
        }
    }
}

/// Arguments of one transition-CDF evaluation.
#[derive(Debug, Clone, Copy)]
pub struct KernelQuery {
    pub regime: Regime,
    pub psi: PsiKind,
    /// Current statistic value, `y1 >= 0`.
    pub y1: f64,
    /// Current observation.
    pub x1: f64,
    /// Statistic query point, `y2 >= 0`.
    pub y2: f64,
    /// Observation query point; `f64::INFINITY` gives the marginal in `y2`.
    pub x2: f64,
}

/// Standard Gaussian CDF via the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard Gaussian density.
fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard Gaussian quantile: the `p`-th percentile of N(0, 1).
///
/// Acklam's rational approximation polished by two Halley steps against
/// [`normal_cdf`], which brings the result to machine precision.
pub fn normal_quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let mut x = acklam_quantile(p);
    for _ in 0..2 {
        let err = normal_cdf(x) - p;
        let pdf = normal_pdf(x);
        if pdf == 0.0 {
            break;
        }
        let u = err / pdf;
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

fn acklam_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Direction coefficient of the log likelihood ratio at `x1`: the log-LR of
/// the next observation `x` is `(x - b) * c` with `c` returned here. When
/// `c = 0` the ratio does not depend on `x` at all.
fn direction(x1: f64, pre: Ar1Params, post: Ar1Params) -> f64 {
    (post.mu() - pre.mu()) + x1 * (post.lambda() - pre.lambda())
}

/// Boundary curve of the transition kernel's support: the unique observation
/// value `x2` compatible with moving the statistic from `y1` to `y2`,
///
/// `xi = log(y2 / psi(y1)) / c + [m0 + mi + x1 (l0 + li)] / 2`.
///
/// Errors with a degenerate-direction report when `c = 0`.
pub fn xi(
    x1: f64,
    y1: f64,
    y2: f64,
    psi: &PsiKind,
    pre: Ar1Params,
    post: Ar1Params,
) -> Result<f64> {
    let psi_y1 = psi.apply(y1);
    if psi_y1.is_nan() || psi_y1 <= 0.0 {
        return Err(Error::InvalidParameter {
            what: "xi requires psi(y1) > 0",
            value: psi_y1,
        });
    }
    let c = direction(x1, pre, post);
    if c == 0.0 {
        return Err(Error::DegenerateDirection { x1 });
    }
    let midpoint = 0.5 * (post.mu() + pre.mu() + x1 * (post.lambda() + pre.lambda()));
    Ok((y2 / psi_y1).ln() / c + midpoint)
}

/// Transition CDF `P_d(Y_n <= y2, X_n <= x2 | Y_{n-1} = y1, X_{n-1} = x1)`.
///
/// With `c` the direction coefficient at `x1`:
/// for `c > 0` the value is `Phi(min(x2, xi) - m_d - l_d x1)`;
/// for `c < 0` it is `Phi(x2 - m_d - l_d x1) - Phi(xi - m_d - l_d x1)`,
/// floored at zero.
///
/// At `c = 0` the statistic moves deterministically to the atom `psi(y1)`;
/// the CDF steps from 0 to the `X` marginal there, and a query placed exactly
/// on the atom is reported as a degenerate-direction error.
pub fn transition_cdf(q: &KernelQuery, pre: Ar1Params, post: Ar1Params) -> Result<f64> {
    if q.y1.is_nan() || q.y1 < 0.0 {
        return Err(Error::InvalidParameter {
            what: "kernel query requires y1 >= 0",
            value: q.y1,
        });
    }
    if q.y2.is_nan() || q.y2 < 0.0 {
        return Err(Error::InvalidParameter {
            what: "kernel query requires y2 >= 0",
            value: q.y2,
        });
    }
    let d = q.regime.params(pre, post);
    let shift = d.mu() + d.lambda() * q.x1;
    let psi_y1 = q.psi.apply(q.y1);
    if psi_y1 == 0.0 {
        // the statistic collapses to zero regardless of the observation
        return Ok(normal_cdf(q.x2 - shift));
    }
    let c = direction(q.x1, pre, post);
    if c == 0.0 {
        if q.y2 == psi_y1 {
            return Err(Error::DegenerateDirection { x1: q.x1 });
        }
        return Ok(if q.y2 > psi_y1 {
            normal_cdf(q.x2 - shift)
        } else {
            0.0
        });
    }
    let xi = (q.y2 / psi_y1).ln() / c
        + 0.5 * (post.mu() + pre.mu() + q.x1 * (post.lambda() + pre.lambda()));
    if c > 0.0 {
        Ok(normal_cdf(q.x2.min(xi) - shift))
    } else {
        Ok((normal_cdf(q.x2 - shift) - normal_cdf(xi - shift)).max(0.0))
    }
}

/// One restricted first step of the detection process: the innovation is
/// drawn, the pair `(y2, x2)` computed, and the step classified against the
/// interval `[0, A)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FirstStep {
    /// The statistic landed strictly below the threshold.
    Interior { y: f64, x: f64 },
    /// The statistic reached the threshold: an immediate stop.
    AboveBand,
    /// Unreachable for non-negative `psi` (the statistic cannot go negative);
    /// kept so the classification is total.
    BelowBand,
}

/// Draws one detector transition from `(y1, x1)` under the given regime and
/// classifies it against `[0, A)`.
#[allow(clippy::too_many_arguments)]
pub fn sample_first_step_restricted<R: Rng + ?Sized>(
    x1: f64,
    y1: f64,
    threshold: f64,
    regime: Regime,
    psi: &PsiKind,
    pre: Ar1Params,
    post: Ar1Params,
    rng: &mut R,
) -> Result<FirstStep> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::InvalidParameter {
            what: "threshold must be positive",
            value: threshold,
        });
    }
    let d = regime.params(pre, post);
    let x2 = step(d, x1, standard_normal(rng));
    let y2 = psi.apply(y1) * log_likelihood_ratio(pre, post, x1, x2).exp();
    if !y2.is_finite() {
        return Err(Error::NumericRange { step: 1, value: y2 });
    }
    Ok(if y2 >= threshold {
        FirstStep::AboveBand
    } else if y2 >= 0.0 {
        FirstStep::Interior { y: y2, x: x2 }
    } else {
        FirstStep::BelowBand
    })
}
