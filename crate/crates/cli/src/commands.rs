// SPDX-License-Identifier: MIT OR Apache-2.0

//! Subcommand implementations. Each command validates its configuration,
//! runs the underlying estimators, and renders a deterministic CSV payload
//! plus a short human summary.

use arcpd_core::{
    estimate_add_inf, estimate_add_k, estimate_arl, find_threshold, first_order_sadd,
    generate_path, kl_mean_shift_only, kl_number, log_likelihood_ratio, replication_rng, sadd,
    standard_normal, step, transition_cdf, variance_bound_check, worst_case_report, Ar1Params,
    ChangePoint, ChangeSpec, DetectorSpec, KernelQuery, McEstimate,
};

use crate::config::Config;
use crate::error::CliError;
use crate::output::{sig10, CsvBuilder};
use crate::reference::{self, DetectorKind};

/// What a finished command hands back to `main`.
pub struct CommandOutput {
    pub summary: String,
    pub csv: Option<String>,
    /// Statistical check violations (kernel-check); nonzero exits with the
    /// check-failed status after outputs are written.
    pub check_failures: u64,
}

impl CommandOutput {
    fn new(summary: String, csv: Option<String>) -> Self {
        Self {
            summary,
            csv,
            check_failures: 0,
        }
    }
}

fn estimate_fields(e: &McEstimate) -> Vec<String> {
    vec![
        sig10(e.mean),
        sig10(e.std_dev),
        sig10(e.std_err),
        e.n.to_string(),
        e.censored.to_string(),
        e.rejected.to_string(),
        sig10(e.ci_half_width),
    ]
}

const ESTIMATE_COLUMNS: [&str; 7] = [
    "mean",
    "std_dev",
    "std_err",
    "n",
    "censored",
    "rejected",
    "ci_half_width",
];

/// KL detectability report with an optional sweep over the post-change
/// correlation. Sweep rows fill the first three columns; the final summary
/// row carries the worst-case correlation and cutoffs.
pub fn cmd_kl(cfg: &Config) -> Result<CommandOutput, CliError> {
    let pre = cfg.pre_params()?;
    let post = cfg.post_params()?;
    let mu0 = post.mu();
    let report = worst_case_report(pre, mu0)?;

    let lambdas = match cfg.lambda0_grid()? {
        Some(grid) => grid,
        None => vec![post.lambda()],
    };
    let mut csv = CsvBuilder::new(&[
        "lambda0",
        "kl",
        "reference_kl",
        "lambda_crit",
        "lambda_lower",
        "lambda_upper",
    ]);
    for &l0 in &lambdas {
        let p0 = Ar1Params::new(mu0, l0)?;
        csv.row(&[
            sig10(l0),
            sig10(kl_number(pre, p0)),
            sig10(kl_mean_shift_only(pre.mu(), mu0)),
            String::new(),
            String::new(),
            String::new(),
        ]);
    }
    csv.row(&[
        String::new(),
        sig10(report.kl),
        sig10(report.reference_kl),
        sig10(report.lambda_crit),
        sig10(report.lambda_lower),
        sig10(report.lambda_upper),
    ]);

    let summary = format!(
        "KL report: pre = ({}, {}), post drift = {}\n\
         worst-case post correlation: {}  (KL there: {})\n\
         baseline (drift-only) KL:    {}\n\
         sub-baseline interval:       [{}, {}]\n",
        sig10(pre.mu()),
        sig10(pre.lambda()),
        sig10(mu0),
        sig10(report.lambda_crit),
        sig10(report.kl),
        sig10(report.reference_kl),
        sig10(report.lambda_lower),
        sig10(report.lambda_upper),
    );
    Ok(CommandOutput::new(summary, Some(csv.finish())))
}

/// Simulates one observation path and emits it as `(n, x)` rows.
pub fn cmd_simulate(cfg: &Config) -> Result<CommandOutput, CliError> {
    let spec = ChangeSpec::new(cfg.pre_params()?, cfg.post_params()?, cfg.change_point()?)
        .with_x0(cfg.x0()?);
    let n = cfg.path_length()?;
    if n == 0 {
        return Err(CliError::Validation(
            "`path_length` must be at least 1".into(),
        ));
    }
    let mut rng = replication_rng(cfg.master_seed()?, 0);
    let path = generate_path(&spec, n as usize, &mut rng);
    let mut csv = CsvBuilder::new(&["n", "x"]);
    for (i, x) in path.iter().enumerate() {
        csv.row(&[(i + 1).to_string(), sig10(*x)]);
    }
    let summary = format!("simulated {n} observations\n");
    Ok(CommandOutput::new(summary, Some(csv.finish())))
}

/// ARL to false alarm at a fixed threshold.
pub fn cmd_arl(cfg: &Config) -> Result<CommandOutput, CliError> {
    let det = cfg.detector_spec()?;
    let change = ChangeSpec::new(cfg.pre_params()?, cfg.post_params()?, ChangePoint::Never)
        .with_x0(cfg.x0()?);
    let mc = cfg.mc(det.threshold())?;
    let est = estimate_arl(&det, &change, &mc)?;
    let bound = variance_bound_check(&est);

    let mut header: Vec<&str> = ESTIMATE_COLUMNS.to_vec();
    header.push("variance_bound_pass");
    let mut csv = CsvBuilder::new(&header);
    let mut fields = estimate_fields(&est);
    fields.push(bound.pass.to_string());
    csv.row(&fields);

    let summary = format!(
        "ARL estimate at threshold {}: {} (std err {}, n = {})\n",
        sig10(det.threshold()),
        sig10(est.mean),
        sig10(est.std_err),
        est.n
    );
    Ok(CommandOutput::new(summary, Some(csv.finish())))
}

/// Worst-case detection delay (delay at change-point zero), with an optional
/// verification sweep over later change-points.
pub fn cmd_sadd(cfg: &Config) -> Result<CommandOutput, CliError> {
    let det = cfg.detector_spec()?;
    let (pre, post, x0) = (cfg.pre_params()?, cfg.post_params()?, cfg.x0()?);
    let mc = cfg.mc(det.threshold())?;
    let sweep = cfg.k_values()?;
    let report = sadd(&det, pre, post, x0, &mc, sweep.as_deref())?;

    let mut header: Vec<&str> = vec!["k"];
    header.extend(ESTIMATE_COLUMNS);
    header.push("exceeds_sadd");
    let mut csv = CsvBuilder::new(&header);
    let mut row = vec!["0".to_string()];
    row.extend(estimate_fields(&report.estimate));
    row.push("false".to_string());
    csv.row(&row);
    for point in &report.sweep {
        let mut row = vec![point.k.to_string()];
        row.extend(estimate_fields(&point.estimate));
        row.push(point.exceeds_sadd.to_string());
        csv.row(&row);
    }

    let summary = format!(
        "SADD estimate at threshold {}: {} (std err {}){}\n",
        sig10(det.threshold()),
        sig10(report.estimate.mean),
        sig10(report.estimate.std_err),
        if report.sweep.is_empty() {
            String::new()
        } else {
            format!(
                "\nverification sweep over {} change-points: {} violation(s)",
                report.sweep.len(),
                report.violations()
            )
        }
    );
    Ok(CommandOutput::new(summary, Some(csv.finish())))
}

/// Conditional detection delay at each requested change-point.
pub fn cmd_addk(cfg: &Config) -> Result<CommandOutput, CliError> {
    let det = cfg.detector_spec()?;
    let (pre, post, x0) = (cfg.pre_params()?, cfg.post_params()?, cfg.x0()?);
    let mc = cfg.mc(det.threshold())?;
    let ks = cfg
        .k_values()?
        .ok_or_else(|| CliError::Validation("missing required key `k_values`".into()))?;

    let mut header: Vec<&str> = vec!["k"];
    header.extend(ESTIMATE_COLUMNS);
    let mut csv = CsvBuilder::new(&header);
    let mut summary = String::new();
    for &k in &ks {
        let est = estimate_add_k(&det, pre, post, x0, k, &mc)?;
        let mut row = vec![k.to_string()];
        row.extend(estimate_fields(&est));
        csv.row(&row);
        summary.push_str(&format!(
            "ADD_{k} = {} (std err {})\n",
            sig10(est.mean),
            sig10(est.std_err)
        ));
    }
    Ok(CommandOutput::new(summary, Some(csv.finish())))
}

/// Threshold calibration against a target ARL.
pub fn cmd_calibrate(cfg: &Config) -> Result<CommandOutput, CliError> {
    let kind = cfg.detector_kind()?;
    let gamma = cfg.target_gamma()?;
    let rel_tol = effective_rel_tol(cfg)?;
    let change = ChangeSpec::new(cfg.pre_params()?, cfg.post_params()?, ChangePoint::Never)
        .with_x0(cfg.x0()?);
    let mc = cfg.mc(gamma)?;
    let result = find_threshold(&kind.psi(), &change, gamma, rel_tol, &mc)?;

    let mut csv = CsvBuilder::new(&[
        "threshold",
        "achieved_arl",
        "arl_std_err",
        "arl_ci_half_width",
        "target_gamma",
        "iterations",
        "monotonicity_violations",
    ]);
    csv.row(&[
        sig10(result.threshold),
        sig10(result.achieved_arl.mean),
        sig10(result.achieved_arl.std_err),
        sig10(result.achieved_arl.ci_half_width),
        sig10(result.target_gamma),
        result.iterations.to_string(),
        result.monotonicity_violations.to_string(),
    ]);
    let summary = format!(
        "calibrated {} threshold for target ARL {}: A = {} (achieved {} +- {})\n",
        kind.label(),
        sig10(gamma),
        sig10(result.threshold),
        sig10(result.achieved_arl.mean),
        sig10(result.achieved_arl.ci_half_width),
    );
    Ok(CommandOutput::new(summary, Some(csv.finish())))
}

fn effective_rel_tol(cfg: &Config) -> Result<f64, CliError> {
    let rel_tol = cfg.rel_tol()?;
    // smoke runs trade precision for speed
    Ok(if cfg.smoke {
        rel_tol.max(0.05)
    } else {
        rel_tol
    })
}

/// CSV replica of the bundled reference tables at the configured replication
/// budget.
pub fn cmd_table(cfg: &Config) -> Result<CommandOutput, CliError> {
    match cfg.table_id()? {
        "operating-characteristics" => table_operating_characteristics(cfg),
        "add0-addinf" => table_add0_addinf(cfg),
        _ => unreachable!("validated by table_id"),
    }
}

fn table_operating_characteristics(cfg: &Config) -> Result<CommandOutput, CliError> {
    let gammas = cfg.gammas(&[50.0, 100.0])?;
    let mode = cfg.table_mode()?;
    let rel_tol = effective_rel_tol(cfg)?;
    let mut csv = CsvBuilder::new(&[
        "lambda0",
        "detector",
        "gamma",
        "threshold",
        "arl",
        "arl_std_err",
        "sadd",
        "sadd_std_err",
    ]);
    let pre = Ar1Params::new(0.0, 0.0).expect("valid");
    let mut rows = 0u64;
    for &lambda0 in &[0.90, 0.50, 0.01, 0.0] {
        let post = Ar1Params::new(1.0, lambda0)?;
        let change = ChangeSpec::new(pre, post, ChangePoint::Never);
        for detector in [DetectorKind::Cusum, DetectorKind::Sr] {
            for &gamma in &gammas {
                let threshold = match mode {
                    "replication" => reference::operating_point(lambda0, detector, gamma)
                        .ok_or_else(|| {
                            CliError::Validation(format!(
                                "no reference threshold for lambda0={lambda0} {} gamma={gamma}; \
                                     use mode = calibrate",
                                detector.label()
                            ))
                        })?
                        .threshold,
                    _ => {
                        let mc = cfg.mc(gamma)?;
                        find_threshold(&detector.psi(), &change, gamma, rel_tol, &mc)?.threshold
                    }
                };
                let det = DetectorSpec::new(detector.psi(), 0.0, threshold)?;
                let mc = cfg.mc(threshold)?;
                let arl = estimate_arl(&det, &change, &mc)?;
                let delay = sadd(&det, pre, post, 0.0, &mc, None)?;
                csv.row(&[
                    sig10(lambda0),
                    detector.label().to_string(),
                    sig10(gamma),
                    sig10(threshold),
                    sig10(arl.mean),
                    sig10(arl.std_err),
                    sig10(delay.estimate.mean),
                    sig10(delay.estimate.std_err),
                ]);
                rows += 1;
            }
        }
    }
    let summary = format!("operating characteristics: {rows} rows ({mode} mode)\n");
    Ok(CommandOutput::new(summary, Some(csv.finish())))
}

fn table_add0_addinf(cfg: &Config) -> Result<CommandOutput, CliError> {
    let thresholds = cfg.thresholds(&[100.0, 400.0])?;
    let mut csv = CsvBuilder::new(&[
        "lambda_inf",
        "lambda0",
        "detector",
        "threshold",
        "add0",
        "add0_std_err",
        "add_inf",
        "add_inf_std_err",
        "add_inf_k",
    ]);
    let mut rows = 0u64;
    for &lambda_inf in &[0.0, -0.50, 0.50] {
        let pre = Ar1Params::new(0.0, lambda_inf)?;
        for &lambda0 in &[0.01, 0.50, 0.90] {
            let post = Ar1Params::new(1.0, lambda0)?;
            for &threshold in &thresholds {
                for detector in [DetectorKind::Cusum, DetectorKind::Sr] {
                    let det = DetectorSpec::new(detector.psi(), 0.0, threshold)?;
                    let mc = cfg.mc(threshold)?;
                    let add0 = estimate_add_k(&det, pre, post, 0.0, 0, &mc)?;
                    let inf = estimate_add_inf(&det, pre, post, 0.0, &mc)?;
                    csv.row(&[
                        sig10(lambda_inf),
                        sig10(lambda0),
                        detector.label().to_string(),
                        sig10(threshold),
                        sig10(add0.mean),
                        sig10(add0.std_err),
                        sig10(inf.estimate.mean),
                        sig10(inf.estimate.std_err),
                        inf.k.to_string(),
                    ]);
                    rows += 1;
                }
            }
        }
    }
    let summary = format!("detection-delay table: {rows} rows\n");
    Ok(CommandOutput::new(summary, Some(csv.finish())))
}

/// Worst-case delay against log ARL for both procedures, with the
/// first-order `log(gamma) / KL` overlay.
pub fn cmd_curves(cfg: &Config) -> Result<CommandOutput, CliError> {
    let gammas = cfg.gammas(&[50.0, 100.0, 500.0, 1000.0])?;
    let rel_tol = effective_rel_tol(cfg)?;
    let (pre, post, x0) = (cfg.pre_params()?, cfg.post_params()?, cfg.x0()?);
    let change = ChangeSpec::new(pre, post, ChangePoint::Never).with_x0(x0);
    let kl = kl_number(pre, post);

    let mut csv = CsvBuilder::new(&["gamma", "log_arl", "sadd_cusum", "sadd_sr", "first_order"]);
    for &gamma in &gammas {
        let mut delays = Vec::new();
        for kind in [DetectorKind::Cusum, DetectorKind::Sr] {
            let mc = cfg.mc(gamma)?;
            let cal = find_threshold(&kind.psi(), &change, gamma, rel_tol, &mc)?;
            let det = DetectorSpec::new(kind.psi(), 0.0, cal.threshold)?;
            let mc = cfg.mc(cal.threshold)?;
            delays.push(sadd(&det, pre, post, x0, &mc, None)?.estimate.mean);
        }
        csv.row(&[
            sig10(gamma),
            sig10(gamma.ln()),
            sig10(delays[0]),
            sig10(delays[1]),
            sig10(first_order_sadd(gamma, kl)?),
        ]);
    }
    let summary = format!(
        "delay curves over {} target ARL values (KL = {})\n",
        gammas.len(),
        sig10(kl)
    );
    Ok(CommandOutput::new(summary, Some(csv.finish())))
}

/// Validates the closed-form transition CDF against empirical one-step
/// frequencies on a quantile grid; any cell further than four binomial
/// standard errors from its analytic value counts as a failure.
pub fn cmd_kernel_check(cfg: &Config) -> Result<CommandOutput, CliError> {
    let (pre, post) = (cfg.pre_params()?, cfg.post_params()?);
    let regime = cfg.regime()?;
    let psi = cfg.detector_kind()?.psi();
    let y1 = cfg.query_y1()?;
    let x1 = cfg.query_x1()?;
    let samples = cfg.samples(1_000_000)?;
    let grid_points = cfg.grid_points()? as usize;
    let seed = cfg.master_seed()?;

    if y1 < 0.0 {
        return Err(CliError::Validation(
            "`query_y1` must be non-negative".into(),
        ));
    }
    let d = regime.params(pre, post);
    let shift = d.mu() + d.lambda() * x1;
    let mut rng = replication_rng(seed, 0);
    let mut pairs = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        let x2 = step(d, x1, standard_normal(&mut rng));
        let y2 = psi.apply(y1) * log_likelihood_ratio(pre, post, x1, x2).exp();
        pairs.push((y2, x2));
    }
    let quantiles: Vec<f64> = (1..=grid_points)
        .map(|i| i as f64 / (grid_points + 1) as f64)
        .collect();
    let x_grid: Vec<f64> = quantiles
        .iter()
        .map(|&q| shift + arcpd_core::normal_quantile(q))
        .collect();
    let mut sorted_y: Vec<f64> = pairs.iter().map(|&(y, _)| y).collect();
    sorted_y.sort_by(|a, b| a.total_cmp(b));
    let y_grid: Vec<f64> = quantiles
        .iter()
        .map(|&q| sorted_y[((samples as f64 * q) as usize).min(sorted_y.len() - 1)])
        .collect();

    let mut csv = CsvBuilder::new(&[
        "y2",
        "x2",
        "analytic",
        "empirical",
        "abs_diff",
        "binom_se",
        "within_4se",
    ]);
    let mut failures = 0u64;
    for &y2 in &y_grid {
        for &x2 in &x_grid {
            let q = KernelQuery {
                regime,
                psi,
                y1,
                x1,
                y2,
                x2,
            };
            let analytic = transition_cdf(&q, pre, post)?;
            let hits = pairs.iter().filter(|&&(y, x)| y <= y2 && x <= x2).count();
            let empirical = hits as f64 / samples as f64;
            let se = (analytic * (1.0 - analytic) / samples as f64).sqrt();
            let ok = (empirical - analytic).abs() <= 4.0 * se + 1e-9;
            if !ok {
                failures += 1;
            }
            csv.row(&[
                sig10(y2),
                sig10(x2),
                sig10(analytic),
                sig10(empirical),
                sig10((empirical - analytic).abs()),
                sig10(se),
                ok.to_string(),
            ]);
        }
    }
    let cells = (grid_points * grid_points) as u64;
    let summary = format!(
        "kernel check: {failures} of {cells} grid cells outside 4 binomial standard errors\n"
    );
    let mut out = CommandOutput::new(summary, Some(csv.finish()));
    out.check_failures = failures;
    Ok(out)
}
