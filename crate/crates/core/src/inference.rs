//! Maximum-likelihood fitting of the return laws, model CDFs, and the
//! Kolmogorov-Smirnov statistic.

use thiserror::Error;

use crate::dist::{DistError, DistKind, DistributionSpec};
use crate::optim::{nelder_mead_2d, NmResult};
use crate::quad;
use crate::series::ReturnSample;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("sample too small: {n} values, need at least {min}")]
    InsufficientSample { n: usize, min: usize },
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("log-likelihood ratio undefined: baseline log-likelihood is zero")]
    UndefinedRatio,
    #[error("fits compare different sample sizes ({0} vs {1})")]
    SampleMismatch(usize, usize),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// A fitted distribution with its log-likelihood.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub spec: DistributionSpec,
    pub log_likelihood: f64,
    pub n_samples: usize,
    pub converged: bool,
    pub n_evals: usize,
}

/// Moment-based starting point for the shape families: `theta_0` from the
/// sample variance, `alpha_0` from kurtosis inversion of the fourth-moment
/// law, clipped into the family's admissible range.
pub fn moment_init(kind: DistKind, sample: &ReturnSample) -> Result<(f64, f64), FitError> {
    let n = sample.values.len();
    let tau = sample.tau as f64;
    let m2 = sample.values.iter().map(|z| z * z).sum::<f64>() / n as f64;
    if m2 <= 0.0 {
        return Err(FitError::DegenerateSample("zero variance".into()));
    }
    let m4 = sample.values.iter().map(|z| z.powi(4)).sum::<f64>() / n as f64;
    let kurt = m4 / (m2 * m2);
    let theta0 = m2 / tau;
    let alpha0 = match kind {
        DistKind::HestonPd | DistKind::HestonJp => {
            // kurtosis 3 (1 + alpha) / alpha
            let a = if kurt > 3.0 { 3.0 / (kurt - 3.0) } else { 1e4 };
            a.clamp(1.01, 1e4)
        }
        DistKind::MultPd | DistKind::MultJp => {
            // kurtosis 3 alpha / (alpha - theta)
            let r = if kurt > 3.0 { kurt / (kurt - 3.0) } else { 1e4 };
            r.clamp(0.05, 1e4) * theta0
        }
        DistKind::Normal => 0.0,
    };
    Ok((alpha0, theta0))
}

fn log_likelihood(spec: &DistributionSpec, values: &[f64]) -> f64 {
    values.iter().map(|&z| spec.log_pdf(z)).sum()
}

/// Fit `(alpha, theta)` of the given family by maximum likelihood at the
/// sample's fixed horizon. Parameters are searched in log space; the JP
/// kinds start from their PD fit. A failed search is reported through
/// `converged`, not an error.
pub fn mle_fit(sample: &ReturnSample, kind: DistKind) -> Result<FitResult, FitError> {
    if kind == DistKind::Normal {
        return fit_normal(sample);
    }
    let n = sample.values.len();
    if n < 50 {
        return Err(FitError::InsufficientSample { n, min: 50 });
    }
    let (alpha0, theta0) = moment_init(kind, sample)?;
    let tau = sample.tau as f64;
    let heston = matches!(kind, DistKind::HestonPd | DistKind::HestonJp);

    // Heston keeps alpha > 1 through alpha = 1 + e^p; the multiplicative
    // family only needs positivity.
    let to_alpha = |p: f64| if heston { 1.0 + p.exp() } else { p.exp() };
    let from_alpha = |a: f64| {
        if heston {
            (a - 1.0).max(1e-12).ln()
        } else {
            a.ln()
        }
    };

    let start = if matches!(kind, DistKind::HestonJp | DistKind::MultJp) {
        let pd_kind = if heston {
            DistKind::HestonPd
        } else {
            DistKind::MultPd
        };
        let pd_fit = mle_fit(sample, pd_kind)?;
        let (a, t) = pd_fit.spec.shape().expect("shape kind");
        [from_alpha(a), t.ln()]
    } else {
        [from_alpha(alpha0), theta0.ln()]
    };

    let nll = |p: &[f64; 2]| -> f64 {
        let alpha = to_alpha(p[0]);
        let theta = p[1].exp();
        match DistributionSpec::from_shape(kind, alpha, theta, tau) {
            Ok(spec) => -log_likelihood(&spec, &sample.values),
            Err(_) => f64::INFINITY,
        }
    };

    let mut result = nelder_mead_2d(nll, start, [0.4, 0.4], 1e-11, 400);
    let mut total_evals = result.evals;
    if !result.converged {
        let restart = [result.x[0] + 0.2, result.x[1] - 0.2];
        let second: NmResult = nelder_mead_2d(nll, restart, [0.2, 0.2], 1e-11, 400);
        total_evals += second.evals;
        if second.fx < result.fx {
            result = second;
        }
    }

    let alpha = to_alpha(result.x[0]);
    let theta = result.x[1].exp();
    let spec = DistributionSpec::from_shape(kind, alpha, theta, tau)?;
    Ok(FitResult {
        spec,
        log_likelihood: -result.fx,
        n_samples: n,
        converged: result.converged,
        n_evals: total_evals,
    })
}

/// Zero-mean normal fit: `sigma^2` is the mean squared return (returns
/// are detrended), with the log-likelihood in closed form.
pub fn fit_normal(sample: &ReturnSample) -> Result<FitResult, FitError> {
    let n = sample.values.len();
    if n < 2 {
        return Err(FitError::InsufficientSample { n, min: 2 });
    }
    let s2 = sample.values.iter().map(|z| z * z).sum::<f64>() / n as f64;
    if s2 <= 0.0 {
        return Err(FitError::DegenerateSample("zero variance".into()));
    }
    let spec = DistributionSpec::normal(s2.sqrt(), sample.tau as f64)?;
    let ll = -0.5 * n as f64 * ((2.0 * std::f64::consts::PI * s2).ln() + 1.0);
    Ok(FitResult {
        spec,
        log_likelihood: ll,
        n_samples: n,
        converged: true,
        n_evals: 1,
    })
}

/// Ratio of log-likelihoods (the paper reports LL ratios to the normal
/// fit). Defined only when the baseline log-likelihood is nonzero.
pub fn ll_ratio(fit: &FitResult, baseline: &FitResult) -> Result<f64, FitError> {
    if fit.n_samples != baseline.n_samples {
        return Err(FitError::SampleMismatch(fit.n_samples, baseline.n_samples));
    }
    if baseline.log_likelihood == 0.0 {
        return Err(FitError::UndefinedRatio);
    }
    Ok(fit.log_likelihood / baseline.log_likelihood)
}

/// Log-likelihood difference `fit - baseline`, exported alongside the
/// ratio for robustness.
pub fn ll_diff(fit: &FitResult, baseline: &FitResult) -> f64 {
    fit.log_likelihood - baseline.log_likelihood
}

/// Cumulative distribution of a spec, built once by panel-wise adaptive
/// quadrature on a refinement grid and evaluated through monotone cubic
/// Hermite interpolation (knot slopes are exact density values).
#[derive(Debug, Clone)]
pub struct Cdf {
    knots: Vec<f64>,
    cumulative: Vec<f64>,
    slopes: Vec<f64>,
}

impl Cdf {
    pub fn new(spec: &DistributionSpec) -> Result<Self, DistError> {
        let (lo, hi) = crate::dist::support_bounds(spec);
        let scale = spec.variance_scale().sqrt();

        // seed knots: dense center, geometric tails out to the support edge
        let mut seeds: Vec<f64> = Vec::new();
        seeds.push(0.0);
        for k in 1..=24 {
            let z = 0.5 * k as f64 * scale;
            seeds.push(z);
            seeds.push(-z);
        }
        let mut z = 12.0 * scale;
        while z < hi {
            z *= 1.6;
            seeds.push(z.min(hi));
        }
        let mut z = -12.0 * scale;
        while z > lo {
            z *= 1.6;
            seeds.push(z.max(lo));
        }
        seeds.push(lo);
        seeds.push(hi);
        seeds.retain(|&z| (lo..=hi).contains(&z));
        seeds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        seeds.dedup();

        // refine panels until monotone-Hermite interpolation is consistent
        // with the quadrature at panel midpoints
        let mut knots = vec![seeds[0]];
        let mut masses: Vec<f64> = Vec::new();
        for w in seeds.windows(2) {
            refine_panel(spec, w[0], w[1], 0, &mut knots, &mut masses)?;
        }

        let mut cumulative = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for m in &masses {
            acc += m;
            cumulative.push(acc);
        }
        let slopes = knots.iter().map(|&z| spec.pdf(z)).collect();
        Ok(Self {
            knots,
            cumulative,
            slopes,
        })
    }

    /// CDF value at `z`, clamped to [0, 1].
    pub fn eval(&self, z: f64) -> f64 {
        let n = self.knots.len();
        if z <= self.knots[0] {
            return 0.0;
        }
        if z >= self.knots[n - 1] {
            return self.cumulative[n - 1].min(1.0);
        }
        let i = match self
            .knots
            .binary_search_by(|k| k.partial_cmp(&z).unwrap())
        {
            Ok(i) => return self.cumulative[i].clamp(0.0, 1.0),
            Err(i) => i - 1,
        };
        let h = self.knots[i + 1] - self.knots[i];
        let t = (z - self.knots[i]) / h;
        let delta = (self.cumulative[i + 1] - self.cumulative[i]) / h;
        // Fritsch-Carlson clamp keeps the cubic monotone on the panel
        let m0 = self.slopes[i].min(3.0 * delta);
        let m1 = self.slopes[i + 1].min(3.0 * delta);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = self.cumulative[i] * h00
            + h * m0 * h10
            + self.cumulative[i + 1] * h01
            + h * m1 * h11;
        v.clamp(0.0, 1.0)
    }

    /// Inverse CDF by bisection over the knot range.
    pub fn quantile(&self, p: f64) -> f64 {
        let (mut a, mut b) = (self.knots[0], *self.knots.last().unwrap());
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if self.eval(m) < p {
                a = m;
            } else {
                b = m;
            }
            if (b - a).abs() < 1e-15 * (1.0 + m.abs()) {
                break;
            }
        }
        0.5 * (a + b)
    }

    /// Total integrated mass (should be 1 within the build tolerance).
    pub fn total_mass(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }
}

fn refine_panel(
    spec: &DistributionSpec,
    a: f64,
    b: f64,
    depth: usize,
    knots: &mut Vec<f64>,
    masses: &mut Vec<f64>,
) -> Result<(), DistError> {
    let mid = 0.5 * (a + b);
    let left = quad::integrate(|z| spec.pdf(z), a, mid, 1e-14, 1e-10)
        .map_err(|e| DistError::Numerical(e.to_string()))?
        .value;
    let right = quad::integrate(|z| spec.pdf(z), mid, b, 1e-14, 1e-10)
        .map_err(|e| DistError::Numerical(e.to_string()))?
        .value;

    // would a single Hermite panel reproduce the midpoint mass?
    let h = b - a;
    let total = left + right;
    let delta = total / h;
    let m0 = spec.pdf(a).min(3.0 * delta);
    let m1 = spec.pdf(b).min(3.0 * delta);
    let hermite_mid = total * 0.5 + h * (m0 - m1) / 8.0;
    let err = (hermite_mid - left).abs();

    if err > 2.5e-10 && depth < 28 {
        refine_panel(spec, a, mid, depth + 1, knots, masses)?;
        refine_panel(spec, mid, b, depth + 1, knots, masses)?;
    } else {
        knots.push(mid);
        masses.push(left);
        knots.push(b);
        masses.push(right);
    }
    Ok(())
}

/// KS distance of a sorted-or-not sample against an arbitrary CDF:
/// `sup_i max(|i/n - F(z_i)|, |(i-1)/n - F(z_i)|)`.
pub fn ks_statistic_fn<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &z) in sorted.iter().enumerate() {
        let f = cdf(z);
        let upper = ((i + 1) as f64 / n - f).abs();
        let lower = (i as f64 / n - f).abs();
        d = d.max(upper.max(lower));
    }
    d
}

/// KS statistic of a return sample against a model spec.
pub fn ks_statistic(sample: &ReturnSample, spec: &DistributionSpec) -> Result<f64, FitError> {
    if sample.values.is_empty() {
        return Err(FitError::InsufficientSample { n: 0, min: 1 });
    }
    let cdf = Cdf::new(spec)?;
    Ok(ks_statistic_fn(&sample.values, |z| cdf.eval(z)))
}
