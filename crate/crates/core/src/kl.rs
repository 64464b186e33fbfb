// SPDX-License-Identifier: MIT OR Apache-2.0

//! Kullback-Leibler information number of the AR(1) change.
//!
//! For pre-change parameters `(mi, li)` and post-change parameters
//! `(m0, l0)` the per-observation KL number is
//!
//! ```text
//! KL = (l0 - li)^2 / (2 (1 - l0^2))
//!    + (1 - li)^2 / 2 * [ m0/(1 - l0) - mi/(1 - li) ]^2
//! ```
//!
//! It governs first-order detection delay via `log(ARL) / KL`. This module
//! provides the closed form, its special cases, the worst-case (detectability
//! minimizing) post-change correlation, and the cutoffs where the correlated
//! problem becomes harder than the i.i.d. mean-shift baseline.

use crate::error::{Error, Result};
use crate::model::Ar1Params;

/// Numeric search domain for the post-change correlation; the KL number
/// diverges at the boundary.
const LAMBDA_EDGE: f64 = 1.0 - 1e-9;
/// Grid size used to bracket the minimizer before golden-section refinement.
const BRACKET_GRID: usize = 512;
/// Termination tolerance (in lambda) for minimization and root finding.
const LAMBDA_TOL: f64 = 1e-8;

/// Worst-case detectability summary over the post-change correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlReport {
    /// KL number at the worst-case post-change correlation `lambda_crit`.
    pub kl: f64,
    /// Post-change correlation minimizing the KL number.
    pub lambda_crit: f64,
    /// Lower cutoff of the interval where KL drops below the i.i.d. baseline;
    /// clamped to -1 when no crossing exists in the open domain.
    pub lambda_lower: f64,
    /// Upper cutoff of that interval.
    pub lambda_upper: f64,
    /// The i.i.d. mean-shift baseline `(m0 - mi)^2 / 2`.
    pub reference_kl: f64,
}

/// KL number of the AR(1) change, post- versus pre-change.
pub fn kl_number(pre: Ar1Params, post: Ar1Params) -> f64 {
    let (mi, li) = (pre.mu(), pre.lambda());
    let (m0, l0) = (post.mu(), post.lambda());
    let correlation_term = 0.5 * (l0 - li).powi(2) / (1.0 - l0 * l0);
    let drift_gap = m0 / (1.0 - l0) - mi / (1.0 - li);
    let drift_term = 0.5 * (1.0 - li).powi(2) * drift_gap * drift_gap;
    correlation_term + drift_term
}

/// KL number when only the drift changes: `(m0 - mi)^2 / 2`, independent of
/// the (common) correlation coefficient. Coincides with the i.i.d. Gaussian
/// mean-shift problem.
pub fn kl_mean_shift_only(mu_pre: f64, mu_post: f64) -> f64 {
    0.5 * (mu_post - mu_pre).powi(2)
}

/// KL number when only the correlation changes (`mu` common to both regimes).
pub fn kl_correlation_only(mu: f64, lambda_pre: f64, lambda_post: f64) -> f64 {
    let base = 0.5 * (lambda_post - lambda_pre).powi(2) / (1.0 - lambda_post * lambda_post);
    base * (1.0 + mu * mu * (1.0 + lambda_post) / (1.0 - lambda_post))
}

/// KL number for i.i.d. standard-normal pre-change data (`mi = 0`, `li = 0`):
///
/// `KL = [ l0^2/(1 + l0) + m0^2/(1 - l0) ] / (2 (1 - l0))`
///
/// Diverges as `l0 -> +-1`.
pub fn kl_iid_prechange(mu0: f64, lambda0: f64) -> f64 {
    (lambda0 * lambda0 / (1.0 + lambda0) + mu0 * mu0 / (1.0 - lambda0)) / (2.0 * (1.0 - lambda0))
}

/// Post-change correlation that globally minimizes `kl_iid_prechange` in the
/// i.i.d. pre-change setting. The closed form has a removable singularity at
/// `mu0^2 = 1`, where the analytic limit is -1/3.
pub fn lambda_crit_iid(mu0: f64) -> f64 {
    let m = mu0 * mu0;
    if (m - 1.0).abs() < 1e-8 {
        return -1.0 / 3.0;
    }
    ((8.0 * m + 1.0).sqrt() - (2.0 * m + 1.0)) / (2.0 * (m - 1.0))
}

/// Lower cutoff below which the correlated problem is again easier than the
/// i.i.d. baseline (`li = 0`, `mi = 0` setting); the upper cutoff is 0.
pub fn lambda_lower_iid(mu0: f64) -> f64 {
    let m = mu0 * mu0;
    (-1.0f64).max(0.5 * (1.0 - ((9.0 * m + 1.0) / (m + 1.0)).sqrt()))
}

/// Stationary mean, second moment, and lag-1 cross moment of one AR(1) regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryMoments {
    pub mean: f64,
    pub second_moment: f64,
    pub lag1_cross: f64,
}

pub fn stationary_moments(params: Ar1Params) -> StationaryMoments {
    let (mu, lambda) = (params.mu(), params.lambda());
    let mean = mu / (1.0 - lambda);
    let mean_sq = mean * mean;
    StationaryMoments {
        mean,
        second_moment: mean_sq + 1.0 / (1.0 - lambda * lambda),
        lag1_cross: mean_sq + lambda / (1.0 - lambda * lambda),
    }
}

/// First-order approximation of the worst-case detection delay,
/// `log(arl) / kl`.
pub fn first_order_sadd(arl: f64, kl: f64) -> Result<f64> {
    if arl.is_nan() || arl <= 1.0 {
        return Err(Error::InvalidParameter {
            what: "first-order delay requires arl > 1",
            value: arl,
        });
    }
    if kl == 0.0 {
        return Err(Error::UndefinedDetectability);
    }
    if kl.is_nan() || kl < 0.0 {
        return Err(Error::InvalidParameter {
            what: "kl number must be positive",
            value: kl,
        });
    }
    Ok(arl.ln() / kl)
}

/// Worst-case post-change correlation and detectability cutoffs for a fixed
/// pre-change regime and post-change drift `mu0`.
///
/// `lambda_crit` is found by golden-section refinement of a bracketing grid;
/// the cutoff pair solves `KL(lambda0) = (m0 - mi)^2 / 2` by bisection. One
/// cutoff always equals the pre-change correlation, since substituting
/// `l0 = li` into the KL formula yields exactly the baseline.
pub fn worst_case_report(pre: Ar1Params, mu0: f64) -> Result<KlReport> {
    if !mu0.is_finite() {
        return Err(Error::InvalidParameter {
            what: "post-change drift must be finite",
            value: mu0,
        });
    }
    let kl_at = |l0: f64| kl_number(pre, Ar1Params::new_unchecked(mu0, l0));
    let reference_kl = kl_mean_shift_only(pre.mu(), mu0);

    let lambda_crit = minimize_on_grid(&kl_at, -LAMBDA_EDGE, LAMBDA_EDGE);
    let kl_min = kl_at(lambda_crit);

    let tol = 1e-12 * reference_kl.max(1.0);
    let (lambda_lower, lambda_upper) = if reference_kl - kl_min <= tol {
        // the minimum sits on the baseline: the sub-baseline interval collapses
        (lambda_crit, lambda_crit)
    } else {
        let lower = if kl_at(-LAMBDA_EDGE) > reference_kl {
            bisect_crossing(&kl_at, reference_kl, -LAMBDA_EDGE, lambda_crit)
        } else {
            -1.0
        };
        let upper = if kl_at(LAMBDA_EDGE) > reference_kl {
            bisect_crossing(&kl_at, reference_kl, LAMBDA_EDGE, lambda_crit)
        } else {
            1.0 - f64::EPSILON
        };
        (lower, upper)
    };

    Ok(KlReport {
        kl: kl_min,
        lambda_crit,
        lambda_lower,
        lambda_upper,
        reference_kl,
    })
}

/// Coarse grid scan followed by golden-section refinement of the best cell.
fn minimize_on_grid(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let step = (hi - lo) / (BRACKET_GRID - 1) as f64;
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..BRACKET_GRID {
        let v = f(lo + step * i as f64);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    golden_section_min(f, a, b)
}

fn golden_section_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > LAMBDA_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Bisection for `f(l) = level` between an endpoint where `f > level` and the
/// minimizer where `f < level`.
fn bisect_crossing(f: &dyn Fn(f64) -> f64, level: f64, mut outside: f64, mut inside: f64) -> f64 {
    for _ in 0..200 {
        if (outside - inside).abs() <= LAMBDA_TOL {
            break;
        }
        let mid = 0.5 * (outside + inside);
        if f(mid) > level {
            outside = mid;
        } else {
            inside = mid;
        }
    }
    0.5 * (outside + inside)
}
