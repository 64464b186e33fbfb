// SPDX-License-Identifier: MIT OR Apache-2.0

//! Sequential change-point detection for first-order autoregressive data.
//!
//! The observation model is a piecewise AR(1) process driven by standard
//! Gaussian noise whose drift and correlation coefficient switch at an
//! unknown change-point. On top of it this crate provides:
//!
//! - exact conditional likelihood ratios and path simulation ([`model`]),
//! - the generic `Y_n = psi(Y_{n-1}) * LR_n` detection statistic with its
//!   CUSUM and Shiryaev-Roberts specializations ([`detectors`]),
//! - the closed-form Kullback-Leibler information number of the change,
//!   worst-case post-change correlation, and detectability cutoffs ([`kl`]),
//! - the transition probability function of the bivariate detection process
//!   ([`kernel`]),
//! - statistically controlled Monte Carlo estimation of ARL, detection
//!   delays, and the worst-case delay, reproducible bit for bit at any
//!   worker count ([`mc`]),
//! - threshold calibration against a target ARL ([`calibrate`]).

#![forbid(unsafe_code)]

pub mod calibrate;
pub mod detectors;
pub mod error;
pub mod kernel;
pub mod kl;
pub mod mc;
pub mod model;
pub mod rng;

pub use calibrate::{find_threshold, fit_arl_line, ArlLine, CalibrationResult};
pub use detectors::{
    init, run_until_stop, update, DetectorSpec, DetectorState, PsiKind, StopOutcome,
};
pub use error::{Error, Result};
pub use kernel::{
    normal_cdf, normal_quantile, sample_first_step_restricted, transition_cdf, xi, FirstStep,
    KernelQuery, Regime,
};
pub use kl::{
    first_order_sadd, kl_correlation_only, kl_iid_prechange, kl_mean_shift_only, kl_number,
    lambda_crit_iid, lambda_lower_iid, stationary_moments, worst_case_report, KlReport,
    StationaryMoments,
};
pub use mc::{
    estimate_add_inf, estimate_add_k, estimate_arl, first_step_variance_reduction,
    required_sample_size, sadd, variance_bound_check, CensoringPolicy, FirstStepEstimate, McConfig,
    McEstimate, SaddReport, SteadyStateAdd, SweepPoint, VarianceBound,
};
pub use model::{generate_path, log_likelihood_ratio, step, Ar1Params, ChangePoint, ChangeSpec};
pub use rng::{derive_seed, replication_rng, standard_normal};
