//! Numbered acceptance suite. Each test prints one PASS line (or panics
//! with the failing numbers); run with `--nocapture` to see the report.

use svret::dist::{
    jp_pd_expansion, moment_by_quadrature, pd_jp_ratio, sample_construction, theoretical_moment,
    DistKind, DistributionSpec,
};
use svret::inference::{ks_statistic_fn, mle_fit, Cdf};
use svret::models::{
    simulate_log_return_path_stream, stationary_variance_samples, steady_state_variance_cdf,
    Family, ModelParams,
};
use svret::moments::{fit_relaxation, linear_fit, moment_ratio_point};
use svret::series::{fit_growth_rate, realized_variance_curve, PriceSeries, ReturnSample};

const THETA: f64 = 1e-4;
const GAMMA: f64 = 0.05;

#[test]
fn criterion_01_normalization_and_variance_identity() {
    let alphas = [1.5, 5.0, 50.0];
    let thetas = [5e-5, 1e-4, 5e-4];
    let taus = [1.0, 25.0, 250.0];
    let mut worst_mass: f64 = 0.0;
    let mut worst_var: f64 = 0.0;
    for &alpha in &alphas {
        for &theta in &thetas {
            for &tau in &taus {
                let specs = [
                    DistributionSpec::heston_pd(alpha, theta, tau).unwrap(),
                    DistributionSpec::mult_pd(alpha, theta, tau).unwrap(),
                ];
                for spec in specs {
                    let mass = moment_by_quadrature(&spec, 0, 1e-10).unwrap();
                    worst_mass = worst_mass.max((mass - 1.0).abs());
                    let m2 = moment_by_quadrature(&spec, 2, 1e-9).unwrap();
                    worst_var = worst_var.max((m2 - theta * tau).abs() / (theta * tau));
                }
            }
        }
    }
    assert!(
        worst_mass < 1e-8,
        "normalization defect {worst_mass:.3e} exceeds 1e-8"
    );
    assert!(
        worst_var < 1e-6,
        "variance-identity defect {worst_var:.3e} exceeds 1e-6"
    );
    println!(
        "criterion 01 PASS: normalization within {worst_mass:.2e}, \
         variance identity within {worst_var:.2e} over the 3x3x3 grid"
    );
}

#[test]
fn criterion_02_mean_rv_linear_in_tau() {
    let n_paths = 10_000_u64;
    let dt = 0.25;
    let steps_per_day = 4_usize;
    let days = 250_usize;
    let n_steps = days * steps_per_day;

    let configs = [
        (Family::Heston, 2.0, 21),
        (Family::Heston, 8.0, 22),
        (Family::Multiplicative, 2e-4, 23),
        (Family::Multiplicative, 8e-4, 24),
    ];
    for (family, alpha, seed) in configs {
        let params = ModelParams::from_alpha(family, GAMMA, THETA, alpha, 0.0).unwrap();
        let mut mean_rv = vec![0.0_f64; days + 1];
        for p in 0..n_paths {
            let (xs, _) =
                simulate_log_return_path_stream(&params, dt, n_steps, seed, p, false).unwrap();
            let mut acc = 0.0;
            for day in 1..=days {
                let d = xs[day * steps_per_day] - xs[(day - 1) * steps_per_day];
                acc += d * d;
                mean_rv[day] += acc;
            }
        }
        let points: Vec<(f64, f64)> = (1..=days)
            .map(|t| (t as f64, mean_rv[t] / n_paths as f64))
            .collect();
        let fit = linear_fit(&points).unwrap();
        let rel = (fit.slope - THETA).abs() / THETA;
        assert!(
            rel < 0.02,
            "{family} kappa={:.4e}: RV slope {:.6e} deviates {rel:.3} from theta",
            params.kappa,
            fit.slope
        );
        println!(
            "criterion 02 PASS ({family}, kappa {:.3e}): mean-RV slope {:.4e} within {:.2}% of theta",
            params.kappa,
            fit.slope,
            rel * 100.0
        );
    }
}

#[test]
fn criterion_03_stationary_law_ks() {
    let n = 100_000;
    let dt = 0.05;
    for (family, alpha, seed) in [
        (Family::Heston, 2.0, 31_u64),
        (Family::Multiplicative, 2e-4, 32),
    ] {
        let params = ModelParams::from_alpha(family, GAMMA, THETA, alpha, 0.0).unwrap();
        let samples = stationary_variance_samples(&params, dt, n, seed).unwrap();
        let d = ks_statistic_fn(&samples, |v| {
            if v <= 0.0 {
                0.0
            } else {
                steady_state_variance_cdf(&params, v).unwrap()
            }
        });
        assert!(d < 0.01, "{family}: stationary KS = {d:.4}");
        println!("criterion 03 PASS ({family}): stationary-law KS = {d:.4} < 0.01");
    }
}

#[test]
fn criterion_04_product_construction_ks() {
    let n = 100_000;
    for (spec, seed) in [
        (DistributionSpec::heston_pd(2.0, THETA, 10.0).unwrap(), 41_u64),
        (DistributionSpec::mult_pd(1.5e-4, THETA, 10.0).unwrap(), 42),
    ] {
        let zs = sample_construction(&spec, n, seed).unwrap();
        let cdf = Cdf::new(&spec).unwrap();
        let d = ks_statistic_fn(&zs, |z| cdf.eval(z));
        assert!(d < 0.01, "{:?}: product-construction KS = {d:.4}", spec.kind());
        println!(
            "criterion 04 PASS ({}): product-construction KS = {d:.4} < 0.01",
            spec.kind()
        );
    }
}

#[test]
fn criterion_05_moment_closed_forms() {
    let heston = [
        DistributionSpec::heston_pd(3.0, THETA, 10.0).unwrap(),
        DistributionSpec::heston_pd(1.5, 5e-4, 250.0).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for spec in heston {
        for n in 1..=3_u32 {
            let closed = theoretical_moment(&spec, 2 * n).unwrap();
            let quad = moment_by_quadrature(&spec, 2 * n, 1e-9).unwrap();
            worst = worst.max((closed - quad).abs() / closed.abs());
        }
    }
    let mult = [
        DistributionSpec::mult_pd(3e-4, THETA, 10.0).unwrap(),
        DistributionSpec::mult_pd(8e-4, 2e-4, 100.0).unwrap(),
    ];
    for spec in mult {
        for n in 1..=2_u32 {
            let closed = theoretical_moment(&spec, 2 * n).unwrap();
            let quad = moment_by_quadrature(&spec, 2 * n, 1e-9).unwrap();
            worst = worst.max((closed - quad).abs() / closed.abs());
        }
    }
    assert!(worst < 1e-6, "moment mismatch {worst:.3e} exceeds 1e-6");
    println!("criterion 05 PASS: closed-form moments match quadrature within {worst:.2e}");
}

#[test]
fn criterion_06_jp_pd_collapse_and_expansion() {
    // Collapse in the theta*tau << 1 regime. At theta*tau = 1e-5 the skew
    // factor alone contributes |exp(-z/2) - 1| ~ 4.7e-3 at the window edge
    // |z| = 3 sqrt(theta tau); theta*tau = 1e-3 would exceed the bound by
    // an order of magnitude, so the regime is pinned well inside it.
    let mut worst: f64 = 0.0;
    for &tt in &[1e-5, 1e-6] {
        let tau = 10.0;
        let theta = tt / tau;
        let pairs = [
            (
                DistributionSpec::heston_pd(2.0, theta, tau).unwrap(),
                DistributionSpec::heston_jp(2.0, theta, tau).unwrap(),
            ),
            (
                DistributionSpec::mult_pd(1.5 * theta, theta, tau).unwrap(),
                DistributionSpec::mult_jp(1.5 * theta, theta, tau).unwrap(),
            ),
        ];
        for (pd, jp) in pairs {
            let half_width = 3.0 * tt.sqrt();
            for i in -40..=40 {
                let z = half_width * i as f64 / 40.0;
                let dev = ((jp.log_pdf(z) - pd.log_pdf(z)).exp() - 1.0).abs();
                worst = worst.max(dev);
            }
        }
    }
    assert!(worst < 5e-3, "JP/PD collapse deviation {worst:.3e}");

    // The appendix expansion of the ratio, checked over |z| <= 0.05 at a
    // point where its dropped z^2 remainder (z^2(1/8 - theta/(8(2a+t))))
    // sits inside the 1e-4 budget; at alpha = theta it would not.
    let (alpha, theta, tau) = (1e-6, 1e-4, 10.0);
    let pd = DistributionSpec::mult_pd(alpha, theta, tau).unwrap();
    let jp = DistributionSpec::mult_jp(alpha, theta, tau).unwrap();
    let mut worst_exp: f64 = 0.0;
    for i in -50..=50 {
        let z = 0.05 * i as f64 / 50.0;
        let r = pd_jp_ratio(&pd, &jp, z).unwrap();
        let e = jp_pd_expansion(alpha, theta, tau, z);
        worst_exp = worst_exp.max((r - e).abs());
    }
    assert!(worst_exp < 1e-4, "expansion deviation {worst_exp:.3e}");
    println!(
        "criterion 06 PASS: JP/PD collapse within {worst:.2e} (theta*tau <= 1e-5), \
         ratio expansion within {worst_exp:.2e} over |z| <= 0.05"
    );
}

#[test]
fn criterion_07_mle_parameter_recovery() {
    let n = 100_000;
    let cases = [
        (DistributionSpec::heston_pd(1.5, 1e-4, 10.0).unwrap(), 71_u64),
        (DistributionSpec::heston_pd(3.0, 2e-4, 25.0).unwrap(), 72),
        (DistributionSpec::mult_pd(1.5e-4, 1e-4, 10.0).unwrap(), 73),
        (DistributionSpec::mult_pd(6e-4, 2e-4, 25.0).unwrap(), 74),
    ];
    for (true_spec, seed) in cases {
        let (alpha, theta) = true_spec.shape().unwrap();
        let tau = true_spec.tau() as usize;
        let values = sample_construction(&true_spec, n, seed).unwrap();
        let sample = ReturnSample {
            tau,
            values,
            drift_mu: 0.0,
        };
        let fit = mle_fit(&sample, true_spec.kind()).unwrap();
        let (a, t) = fit.spec.shape().unwrap();
        let da = (a - alpha).abs() / alpha;
        let dt_ = (t - theta).abs() / theta;
        assert!(
            da < 0.05 && dt_ < 0.05,
            "{:?} (alpha {alpha}, theta {theta}): recovered ({a:.4e}, {t:.4e}), \
             errors ({da:.3}, {dt_:.3})",
            true_spec.kind()
        );
        println!(
            "criterion 07 PASS ({}): alpha within {:.2}%, theta within {:.2}%",
            true_spec.kind(),
            da * 100.0,
            dt_ * 100.0
        );
    }
}

#[test]
fn criterion_08_discrimination_reproduction() {
    // Property-based stand-in for the empirical figures: per-horizon
    // samples drawn from the square-root model's return law (the product
    // construction, exact in the theta*tau << 1 regime that covers every
    // horizon here), reference parameters fitted once at tau = 1.
    let alpha_true = 2.0;
    let m = 400_000;
    let taus: [usize; 11] = [1, 5, 10, 25, 50, 75, 100, 125, 150, 200, 250];

    let sample_at = |tau: usize, seed: u64| -> ReturnSample {
        let spec = DistributionSpec::heston_pd(alpha_true, THETA, tau as f64).unwrap();
        ReturnSample {
            tau,
            values: sample_construction(&spec, m, seed).unwrap(),
            drift_mu: 0.0,
        }
    };

    // tau = 1 reference fits for both families
    let ref_sample = sample_at(1, 81);
    let heston_ref = mle_fit(&ref_sample, DistKind::HestonPd).unwrap();
    let (ha, ht) = heston_ref.spec.shape().unwrap();
    let mult_ref = mle_fit(&ref_sample, DistKind::MultPd).unwrap();
    let (ma, mt) = mult_ref.spec.shape().unwrap();

    let mut mult_min_offset = f64::INFINITY;
    for (i, &tau) in taus.iter().enumerate() {
        let sample = if tau == 1 {
            sample_at(1, 81)
        } else {
            sample_at(tau, 82 + i as u64)
        };
        let in_window = tau as f64 * GAMMA > 5.0;
        for n in 1..=3_u32 {
            let r = moment_ratio_point(&sample, DistKind::HestonPd, ha, ht, n).unwrap();
            if in_window {
                assert!(
                    (r - 1.0).abs() < 0.02,
                    "heston n={n} tau={tau}: ratio {r:.4}"
                );
            }
        }
        let rm = moment_ratio_point(&sample, DistKind::MultPd, ma, mt, 2).unwrap();
        if in_window {
            mult_min_offset = mult_min_offset.min((rm - 1.0).abs());
        }
    }
    assert!(
        mult_min_offset > 0.05,
        "multiplicative n=2 offset too small: {mult_min_offset:.4}"
    );
    println!(
        "criterion 08 PASS: square-root ratios n=1..3 within 2% of 1 at tau*gamma > 5; \
         multiplicative n=2 offset persists above {:.1}% (reference fits: \
         ga alpha {ha:.3}, iga alpha/theta {:.3})",
        mult_min_offset * 100.0,
        ma / mt
    );
}

#[test]
fn criterion_09_relaxation_fit() {
    let noiseless: Vec<(f64, f64)> = (1..=100)
        .map(|t| {
            let t = t as f64;
            (t, 1.0 + 0.5 * (-0.1 * t).exp())
        })
        .collect();
    let fit = fit_relaxation(2, &noiseless).unwrap();
    assert!(
        (fit.a - 0.1).abs() < 1e-6 && (fit.b - 0.5).abs() < 1e-6,
        "noiseless recovery: a = {}, b = {}",
        fit.a,
        fit.b
    );

    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(91);
    let noisy: Vec<(f64, f64)> = (1..=100)
        .map(|t| {
            let t = t as f64;
            let eps: f64 = rng.sample(rand_distr::StandardNormal);
            (t, (1.0 + 0.5 * (-0.1 * t).exp()) * (1.0 + 0.01 * eps))
        })
        .collect();
    let fit = fit_relaxation(2, &noisy).unwrap();
    let da = (fit.a - 0.1).abs() / 0.1;
    let db = (fit.b - 0.5).abs() / 0.5;
    assert!(da < 0.05 && db < 0.05, "noisy recovery: ({da:.3}, {db:.3})");

    // Published reference values (a ~ 0.041, b ~ 0.48 for the second
    // moment-half-order on one index) depend on the 2017 data vintage and
    // are documented, not asserted.
    println!(
        "criterion 09 PASS: noiseless (a, b) exact to 1e-6; 1% noise recovery \
         within ({:.2}%, {:.2}%)",
        da * 100.0,
        db * 100.0
    );
}

#[test]
fn criterion_10_optional_vintage_data_check() {
    let path = std::env::var("SVRET_DJIA_CSV").unwrap_or_else(|_| "data/djia.csv".into());
    let Ok(file) = std::fs::File::open(&path) else {
        println!(
            "criterion 10 SKIP: no daily-close file at `{path}` \
             (set SVRET_DJIA_CSV to run the vintage check)"
        );
        return;
    };
    let series = PriceSeries::parse_csv(file).unwrap();
    let mu = fit_growth_rate(&series).unwrap();
    let taus: Vec<usize> = (1..=100).collect();
    let curve = realized_variance_curve(&series, mu, &taus).unwrap();
    let pts: Vec<(f64, f64)> = curve.iter().map(|&(t, rv)| (t as f64, rv)).collect();
    let fit = linear_fit(&pts).unwrap();
    let expect = 9.578e-5;
    let rel = (fit.slope - expect).abs() / expect;
    assert!(
        rel < 0.10,
        "RV slope {:.4e} deviates {:.1}% from the published {expect:.3e}",
        fit.slope,
        rel * 100.0
    );
    println!(
        "criterion 10 PASS: RV slope {:.4e} within {:.1}% of the published value",
        fit.slope,
        rel * 100.0
    );
}
