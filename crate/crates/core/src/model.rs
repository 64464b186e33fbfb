// SPDX-License-Identifier: MIT OR Apache-2.0

//! Piecewise AR(1) observation model and exact conditional likelihood ratios.
//!
//! Observations follow `X_n = mu + lambda * X_{n-1} + eps_n` with standard
//! Gaussian innovations, where `(mu, lambda)` switches from the pre-change
//! regime to the post-change regime after an unknown change-point. Noise is
//! injected by the caller so the same stepping code serves simulation, kernel
//! validation, and deterministic tests.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::standard_normal;

/// Drift and correlation coefficient of one AR(1) regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Params {
    mu: f64,
    lambda: f64,
}

impl Ar1Params {
    /// Requires finite drift and `|lambda| < 1` (strict).
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParameter {
                what: "drift must be finite",
                value: mu,
            });
        }
        if lambda.is_nan() || lambda.abs() >= 1.0 {
            return Err(Error::InvalidParameter {
                what: "correlation coefficient must satisfy |lambda| < 1",
                value: lambda,
            });
        }
        Ok(Self { mu, lambda })
    }

    /// Crate-internal constructor for values already known to be in range.
    pub(crate) fn new_unchecked(mu: f64, lambda: f64) -> Self {
        debug_assert!(mu.is_finite() && lambda.abs() < 1.0);
        Self { mu, lambda }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Index of the last pre-change observation.
///
/// `At(0)` means the change is in effect ab initio (every observation uses
/// post-change parameters), `Never` means pre-change parameters apply forever.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChangePoint {
    At(u64),
    Never,
}

/// Pre/post regime pair, the change-point, and the deterministic initial
/// observation `X_0 = x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangeSpec {
    pub pre: Ar1Params,
    pub post: Ar1Params,
    pub change_point: ChangePoint,
    pub x0: f64,
}

impl ChangeSpec {
    /// Builds a spec with the default initial observation `x0 = 0`.
    pub fn new(pre: Ar1Params, post: Ar1Params, change_point: ChangePoint) -> Self {
        Self {
            pre,
            post,
            change_point,
            x0: 0.0,
        }
    }

    pub fn with_x0(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    /// Regime generating observation `n` (1-based): pre-change for `n <= nu`,
    /// post-change for `n >= nu + 1`.
    pub fn params_at(&self, n: u64) -> Ar1Params {
        match self.change_point {
            ChangePoint::Never => self.pre,
            ChangePoint::At(nu) if n <= nu => self.pre,
            ChangePoint::At(_) => self.post,
        }
    }
}

/// One AR(1) transition: `mu + lambda * x_prev + noise`.
///
/// `noise` is a standard-normal draw supplied by the caller.
pub fn step(params: Ar1Params, x_prev: f64, noise: f64) -> f64 {
    params.mu + params.lambda * x_prev + noise
}

/// Generates `X_1, ..., X_n`, switching regimes at the change-point.
pub fn generate_path<R: Rng + ?Sized>(spec: &ChangeSpec, n: usize, rng: &mut R) -> Vec<f64> {
    let mut path = Vec::with_capacity(n);
    let mut x_prev = spec.x0;
    for i in 1..=n as u64 {
        let x = step(spec.params_at(i), x_prev, standard_normal(rng));
        path.push(x);
        x_prev = x;
    }
    path
}

/// Exponent of the instantaneous likelihood ratio of `x_curr` conditioned on
/// `x_prev`, post- versus pre-change:
///
/// `(x_curr - [x_prev(l0 + li) + (m0 + mi)]/2) * [x_prev(l0 - li) + (m0 - mi)]`
///
/// where `(mi, li)` are the pre-change and `(m0, l0)` the post-change
/// parameters. The likelihood ratio itself is the exponential of this value;
/// the log form is the canonical representation to avoid overflow on large
/// excursions.
pub fn log_likelihood_ratio(pre: Ar1Params, post: Ar1Params, x_prev: f64, x_curr: f64) -> f64 {
    let centered = x_curr - 0.5 * (x_prev * (post.lambda + pre.lambda) + (post.mu + pre.mu));
    let direction = x_prev * (post.lambda - pre.lambda) + (post.mu - pre.mu);
    centered * direction
}
