//! Empirical moments, moment-ratio curves against the closed-form theory,
//! and exponential-relaxation fits: the model-discrimination pipeline.

use thiserror::Error;

use crate::dist::{DistError, DistKind, DistributionSpec};
use crate::optim::golden_section;
use crate::series::{tau_returns, PriceSeries, ReturnSample, SeriesError};

#[derive(Debug, Error)]
pub enum MomentError {
    #[error("empty sample")]
    EmptySample,
    #[error("unsupported empirical moment order {0} (even orders 2..=12)")]
    UnsupportedOrder(u32),
    #[error("relaxation fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("degenerate relaxation fit: all ratios equal 1 (b = 0, rate undefined)")]
    DegenerateFit,
    #[error("linear fit needs at least 2 distinct x values")]
    DegenerateAbscissa,
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Parameters of the relaxation `1 + b exp(-a tau)` fitted to a
/// moment-ratio curve of half-order `n`.
#[derive(Debug, Clone, Copy)]
pub struct MomentFitResult {
    pub n: u32,
    pub a: f64,
    pub b: f64,
    pub residual_rms: f64,
}

/// Ordinary least-squares line.
#[derive(Debug, Clone, Copy)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Arithmetic mean of `z^order` over the sample.
pub fn empirical_moment(sample: &ReturnSample, order: u32) -> Result<f64, MomentError> {
    if sample.values.is_empty() {
        return Err(MomentError::EmptySample);
    }
    if order == 0 || order % 2 != 0 || order > 12 {
        return Err(MomentError::UnsupportedOrder(order));
    }
    let p = order as i32;
    Ok(sample.values.iter().map(|z| z.powi(p)).sum::<f64>() / sample.values.len() as f64)
}

/// One point of the ratio curve:
/// `(mean z^{2n} / E[z^{2n}; alpha, theta, tau])^{1/(2n)}`.
pub fn moment_ratio_point(
    sample: &ReturnSample,
    kind: DistKind,
    alpha: f64,
    theta: f64,
    n: u32,
) -> Result<f64, MomentError> {
    let order = 2 * n;
    let emp = empirical_moment(sample, order)?;
    let spec = DistributionSpec::from_shape(kind, alpha, theta, sample.tau as f64)?;
    let theo = crate::dist::theoretical_moment(&spec, order)?;
    Ok((emp / theo).powf(1.0 / order as f64))
}

/// Ratio curve over horizons for one family and a fixed reference
/// `(alpha, theta)`.
pub fn moment_ratio_curve(
    series: &PriceSeries,
    mu: f64,
    kind: DistKind,
    alpha: f64,
    theta: f64,
    n: u32,
    taus: &[usize],
) -> Result<Vec<(usize, f64)>, MomentError> {
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        let sample = tau_returns(series, tau, mu)?;
        let ratio = moment_ratio_point(&sample, kind, alpha, theta, n)?;
        out.push((tau, ratio));
    }
    Ok(out)
}

/// Least-squares fit of `1 + b exp(-a tau)` to a ratio curve. The decay
/// rate comes from a log-linear regression start refined by a bracketed
/// 1-D search with the amplitude profiled out; `a` is kept positive by
/// searching in log space.
pub fn fit_relaxation(n: u32, curve: &[(f64, f64)]) -> Result<MomentFitResult, MomentError> {
    if curve.len() < 3 {
        return Err(MomentError::TooFewPoints(curve.len()));
    }
    let resid: Vec<(f64, f64)> = curve.iter().map(|&(t, r)| (t, r - 1.0)).collect();
    if resid.iter().all(|&(_, y)| y.abs() < 1e-12) {
        return Err(MomentError::DegenerateFit);
    }

    // profile the amplitude: for fixed a, the optimal b is linear
    let profiled = |a: f64| -> (f64, f64) {
        let mut num = 0.0;
        let mut den = 0.0;
        for &(t, y) in &resid {
            let e = (-a * t).exp();
            num += e * y;
            den += e * e;
        }
        let b = if den > 0.0 { num / den } else { 0.0 };
        let ss: f64 = resid
            .iter()
            .map(|&(t, y)| {
                let d = y - b * (-a * t).exp();
                d * d
            })
            .sum();
        (b, ss)
    };

    // initial decay rate from ln|ratio - 1| against tau
    let pts: Vec<(f64, f64)> = resid
        .iter()
        .filter(|&&(_, y)| y.abs() > 1e-300)
        .map(|&(t, y)| (t, y.abs().ln()))
        .collect();
    let a0 = if pts.len() >= 2 {
        linear_fit(&pts).map(|f| (-f.slope).clamp(1e-6, 1e3)).unwrap_or(0.05)
    } else {
        0.05
    };

    let (ln_a, _) = golden_section(
        |ln_a| profiled(ln_a.exp()).1,
        (a0 / 30.0).ln(),
        (a0 * 30.0).ln(),
        1e-12,
    );
    let a = ln_a.exp();
    let (b, ss) = profiled(a);
    Ok(MomentFitResult {
        n,
        a,
        b,
        residual_rms: (ss / curve.len() as f64).sqrt(),
    })
}

/// Ordinary least squares of y against x.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<LinearFit, MomentError> {
    if points.len() < 2 {
        return Err(MomentError::DegenerateAbscissa);
    }
    let n = points.len() as f64;
    let xm = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in points {
        sxx += (x - xm) * (x - xm);
        sxy += (x - xm) * (y - ym);
        syy += (y - ym) * (y - ym);
    }
    if sxx == 0.0 {
        return Err(MomentError::DegenerateAbscissa);
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ss_res = syy - slope * sxy;
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}
