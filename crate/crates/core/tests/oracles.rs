// SPDX-License-Identifier: MIT OR Apache-2.0

//! Simulation oracles: every closed-form quantity in the crate is checked
//! here against an independent Monte Carlo estimate of the same thing.

use arcpd_core::*;

fn p(mu: f64, lambda: f64) -> Ar1Params {
    Ar1Params::new(mu, lambda).unwrap()
}

/// Batch-means check of the stationary moment formulas: long simulated paths
/// must reproduce mean, second moment, and lag-1 cross moment within three
/// standard errors estimated across independent batches.
#[test]
fn stationary_moments_match_long_simulation() {
    for (seed, params) in [(11u64, p(1.0, 0.5)), (12, p(-0.7, -0.6)), (13, p(0.0, 0.9))] {
        let want = stationary_moments(params);
        let spec = ChangeSpec::new(params, params, ChangePoint::Never);
        let batches = 40;
        let burn_in = 2_000;
        let len = 20_000;
        let mut means = Vec::new();
        let mut seconds = Vec::new();
        let mut lags = Vec::new();
        for b in 0..batches {
            let mut rng = replication_rng(seed, b);
            let path = generate_path(&spec, burn_in + len, &mut rng);
            let tail = &path[burn_in..];
            let n = tail.len() as f64;
            means.push(tail.iter().sum::<f64>() / n);
            seconds.push(tail.iter().map(|x| x * x).sum::<f64>() / n);
            lags.push(tail.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (n - 1.0));
        }
        for (label, sample, target) in [
            ("mean", &means, want.mean),
            ("second moment", &seconds, want.second_moment),
            ("lag-1 cross", &lags, want.lag1_cross),
        ] {
            let m = sample.iter().sum::<f64>() / batches as f64;
            let var = sample.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (batches - 1) as f64;
            let se = (var / batches as f64).sqrt();
            assert!(
                (m - target).abs() <= 3.0 * se,
                "{label} for {params:?}: simulated {m} vs formula {target} (se {se})"
            );
        }
    }
}

/// The closed-form transition CDF must match empirical one-step frequencies
/// of simulated (Y, X) pairs, on grids placed over both branch signs of the
/// direction coefficient and under both measures.
#[test]
fn transition_cdf_matches_empirical_frequencies() {
    let pre = p(0.0, 0.0);
    let post = p(1.0, 0.5);
    // x1 = 0.7 gives c > 0, x1 = -4 gives c < 0
    for &(regime, y1, x1, seed) in &[
        (Regime::Pre, 0.5, 0.7, 21u64),
        (Regime::Post, 0.5, 0.7, 22),
        (Regime::Pre, 1.5, -4.0, 23),
        (Regime::Post, 1.5, -4.0, 24),
    ] {
        let d = match regime {
            Regime::Pre => pre,
            Regime::Post => post,
        };
        let shift = d.mu() + d.lambda() * x1;
        let samples = 200_000u32;
        let mut rng = replication_rng(seed, 0);
        let mut pairs = Vec::with_capacity(samples as usize);
        for _ in 0..samples {
            let x2 = step(d, x1, standard_normal(&mut rng));
            let y2 = PsiKind::Sr.apply(y1) * log_likelihood_ratio(pre, post, x1, x2).exp();
            pairs.push((y2, x2));
        }
        // grid the query points over central quantiles of each marginal
        let zs: Vec<f64> = (1..=10).map(|i| normal_quantile(i as f64 / 11.0)).collect();
        let x_grid: Vec<f64> = zs.iter().map(|z| shift + z).collect();
        let mut y_samples: Vec<f64> = pairs.iter().map(|&(y, _)| y).collect();
        y_samples.sort_by(|a, b| a.total_cmp(b));
        let y_grid: Vec<f64> = (1..=10)
            .map(|i| y_samples[(samples as usize * i) / 11])
            .collect();
        for &y2 in &y_grid {
            for &x2 in &x_grid {
                let q = KernelQuery {
                    regime,
                    psi: PsiKind::Sr,
                    y1,
                    x1,
                    y2,
                    x2,
                };
                let analytic = transition_cdf(&q, pre, post).unwrap();
                let hits = pairs.iter().filter(|&&(y, x)| y <= y2 && x <= x2).count();
                let freq = hits as f64 / samples as f64;
                let se = (analytic * (1.0 - analytic) / samples as f64).sqrt();
                assert!(
                    (freq - analytic).abs() <= 4.0 * se + 1e-9,
                    "{regime:?} y2={y2} x2={x2}: empirical {freq} vs analytic {analytic} (se {se})"
                );
            }
        }
    }
}

/// The detector's one-step output always lands on the kernel's support curve.
#[test]
fn detector_step_lands_on_support_curve() {
    let pre = p(0.3, -0.2);
    let post = p(1.0, 0.55);
    let spec = DetectorSpec::new(PsiKind::Sr, 0.8, 1e12).unwrap();
    let change = ChangeSpec::new(pre, post, ChangePoint::Never).with_x0(0.4);
    let mut rng = replication_rng(31, 0);
    let mut state = init(&spec, change.x0);
    for n in 1..200u64 {
        let x_new = step(
            change.params_at(n),
            state.x_prev(),
            standard_normal(&mut rng),
        );
        let next = update(&spec, &state, x_new, pre, post).unwrap();
        let back = xi(state.x_prev(), state.y(), next.y(), spec.psi(), pre, post).unwrap();
        assert!(
            (back - x_new).abs() <= 1e-10 * x_new.abs().max(1.0),
            "step {n}: xi gives {back}, observation was {x_new}"
        );
        state = next;
    }
}

/// Monte Carlo estimates must be bit-identical no matter how many workers
/// execute the replications.
#[test]
fn estimates_identical_across_worker_counts() {
    let det = DetectorSpec::cusum(9.2412).unwrap();
    let change = ChangeSpec::new(p(0.0, 0.0), p(1.0, 0.0), ChangePoint::Never);
    let mc = McConfig::new(4_000, 77, 0.05, 0.05, 1_000_000).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let arl = estimate_arl(&det, &change, &mc).unwrap();
            let add = estimate_add_k(&det, change.pre, change.post, 0.0, 7, &mc).unwrap();
            (arl, add)
        })
    };
    let single = run(1);
    let multi = run(4);
    assert_eq!(single, multi);
}

/// Estimated ARL must increase across an increasing threshold grid beyond
/// three combined standard errors.
#[test]
fn arl_monotone_in_threshold() {
    let change = ChangeSpec::new(p(0.0, 0.0), p(1.0, 0.5), ChangePoint::Never);
    for psi in [PsiKind::Cusum, PsiKind::Sr] {
        let mc = McConfig::new(20_000, 55, 0.05, 0.05, 1_000_000).unwrap();
        let mut prev: Option<McEstimate> = None;
        for a in [3.0, 6.0, 12.0, 24.0, 48.0] {
            let det = DetectorSpec::new(psi, 0.0, a).unwrap();
            let est = estimate_arl(&det, &change, &mc).unwrap();
            if let Some(p) = prev {
                assert!(
                    est.mean > p.mean + 3.0 * (est.std_err + p.std_err),
                    "{psi:?}: ARL at A={a} is {} vs previous {}",
                    est.mean,
                    p.mean
                );
            }
            prev = Some(est);
        }
    }
}

/// The first-step estimator must agree with the plain sample mean (they
/// target the same expectation) and never be materially noisier.
#[test]
fn first_step_estimator_agrees_with_plain_mean() {
    let configs: [(PsiKind, f64, Ar1Params, Ar1Params, Regime); 10] = [
        (PsiKind::Sr, 5.0, p(0.0, 0.0), p(1.0, 0.0), Regime::Pre),
        (PsiKind::Cusum, 5.65, p(0.0, 0.0), p(1.0, 0.9), Regime::Pre),
        (PsiKind::Sr, 14.15, p(0.0, 0.0), p(1.0, 0.9), Regime::Pre),
        (
            PsiKind::Cusum,
            9.2412,
            p(0.0, 0.0),
            p(1.0, 0.0),
            Regime::Pre,
        ),
        (PsiKind::Sr, 27.55, p(0.0, 0.0), p(1.0, 0.0), Regime::Post),
        (PsiKind::Cusum, 10.0, p(0.0, 0.5), p(1.0, 0.01), Regime::Pre),
        (PsiKind::Sr, 10.0, p(0.0, -0.5), p(1.0, 0.5), Regime::Pre),
        (PsiKind::Cusum, 20.0, p(0.0, 0.0), p(1.0, 0.5), Regime::Post),
        (PsiKind::Sr, 20.0, p(0.0, 0.5), p(1.0, 0.9), Regime::Post),
        (PsiKind::Cusum, 6.575, p(0.0, 0.0), p(1.0, 0.5), Regime::Pre),
    ];
    for (i, &(psi, a, pre, post, regime)) in configs.iter().enumerate() {
        let det = DetectorSpec::new(psi, 0.0, a).unwrap();
        let mc = McConfig::new(6_000, 400 + i as u64, 0.05, 0.05, 10_000_000).unwrap();
        let vr = first_step_variance_reduction(&det, pre, post, 0.0, regime, &mc).unwrap();
        let plain_mc = mc.with_seed(derive_seed(900, i as u64));
        let plain = match regime {
            Regime::Pre => {
                let change = ChangeSpec::new(pre, post, ChangePoint::Never);
                estimate_arl(&det, &change, &plain_mc).unwrap()
            }
            Regime::Post => estimate_add_k(&det, pre, post, 0.0, 0, &plain_mc).unwrap(),
        };
        let gap = (vr.estimate.mean - plain.mean).abs();
        let tol = 3.0 * (vr.estimate.std_err + plain.std_err);
        assert!(
            gap <= tol,
            "config {i}: first-step {} vs plain {} (gap {gap}, tol {tol})",
            vr.estimate.mean,
            plain.mean
        );
        assert!(
            vr.variance_ratio <= 1.05,
            "config {i}: variance ratio {}",
            vr.variance_ratio
        );
    }
}

/// Steady-state delay: the doubling schedule must plateau on an ordinary
/// configuration and come out below the delay at change-point zero.
#[test]
fn steady_state_delay_plateaus_below_add0() {
    let det = DetectorSpec::sr(35.0).unwrap();
    let (pre, post) = (p(0.0, 0.0), p(1.0, 0.5));
    let mc = McConfig::new(20_000, 91, 0.05, 0.05, 1_000_000).unwrap();
    let add0 = estimate_add_k(&det, pre, post, 0.0, 0, &mc).unwrap();
    let inf = estimate_add_inf(&det, pre, post, 0.0, &mc).unwrap();
    assert!(inf.k >= 16, "plateau tagged at k = {}", inf.k);
    assert!(inf.k <= 4096);
    assert!(
        inf.estimate.mean < add0.mean,
        "steady state {} not below ADD_0 {}",
        inf.estimate.mean,
        add0.mean
    );
}

/// Threshold search must hit the target band and respond monotonically to
/// the target ARL.
#[test]
fn find_threshold_hits_target_and_is_monotone_in_gamma() {
    let change = ChangeSpec::new(p(0.0, 0.0), p(1.0, 0.9), ChangePoint::Never);
    let mc = McConfig::new(2, 2_024, 0.05, 0.05, 10_000_000).unwrap();
    let mut prev_a = 0.0;
    for (gamma, expect_a) in [(50.0, 5.65), (100.0, 9.875), (500.0, 39.5)] {
        let res = find_threshold(&PsiKind::Cusum, &change, gamma, 0.02, &mc).unwrap();
        let rel = (res.achieved_arl.mean - gamma).abs() / gamma;
        assert!(
            rel <= 0.02,
            "gamma {gamma}: achieved {}",
            res.achieved_arl.mean
        );
        assert!(
            (res.threshold - expect_a).abs() / expect_a < 0.08,
            "gamma {gamma}: threshold {} vs published {expect_a}",
            res.threshold
        );
        assert!(res.threshold > prev_a, "threshold not increasing in gamma");
        prev_a = res.threshold;
    }
}
