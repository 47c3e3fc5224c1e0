//! Mean-reverting stochastic volatility models: parameters, steady-state
//! variance laws, and Euler-Maruyama path simulators.
//!
//! Two variance SDEs share the drift `-gamma (v - theta) dt` and differ in
//! the noise term: `kappa sqrt(v) dW` (square-root diffusion, Gamma
//! steady state) versus `kappa v dW` (multiplicative noise, Inverse-Gamma
//! steady state). The shape parameter `alpha = 2 gamma theta / kappa^2`
//! is shared by both.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("correlation rho must lie in [-1, 1], got {0}")]
    RhoOutOfRange(f64),
    #[error("square-root model requires alpha = 2*gamma*theta/kappa^2 > 1, got {0}")]
    AlphaTooSmall(f64),
    #[error("unstable discretization: dt*gamma = {0} >= 0.1")]
    UnstableStep(f64),
    #[error("variance must be positive, got {0}")]
    DomainVariance(f64),
}

/// Which variance SDE drives the volatility.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `dv = -gamma (v - theta) dt + kappa sqrt(v) dW` (Gamma steady state)
    Heston,
    /// `dv = -gamma (v - theta) dt + kappa v dW` (Inverse-Gamma steady state)
    Multiplicative,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Heston => write!(f, "heston"),
            Family::Multiplicative => write!(f, "multiplicative"),
        }
    }
}

/// Validated SDE parameters. Units are per trading day: `gamma`, `theta`
/// in 1/day; `kappa` in 1/day (Heston) or 1/sqrt(day) (multiplicative).
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    pub family: Family,
    pub gamma: f64,
    pub theta: f64,
    pub kappa: f64,
    pub rho: f64,
}

impl ModelParams {
    pub fn new(
        family: Family,
        gamma: f64,
        theta: f64,
        kappa: f64,
        rho: f64,
    ) -> Result<Self, ModelError> {
        for (name, value) in [("gamma", gamma), ("theta", theta), ("kappa", kappa)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ModelError::NonPositive { name, value });
            }
        }
        if !(-1.0..=1.0).contains(&rho) {
            return Err(ModelError::RhoOutOfRange(rho));
        }
        let params = Self {
            family,
            gamma,
            theta,
            kappa,
            rho,
        };
        if family == Family::Heston && params.alpha() <= 1.0 {
            return Err(ModelError::AlphaTooSmall(params.alpha()));
        }
        Ok(params)
    }

    /// Build with a target shape `alpha`, solving for `kappa`.
    pub fn from_alpha(
        family: Family,
        gamma: f64,
        theta: f64,
        alpha: f64,
        rho: f64,
    ) -> Result<Self, ModelError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(ModelError::NonPositive {
                name: "alpha",
                value: alpha,
            });
        }
        let kappa = (2.0 * gamma * theta / alpha).sqrt();
        Self::new(family, gamma, theta, kappa, rho)
    }

    /// Dimensionless shape parameter `2 gamma theta / kappa^2`.
    pub fn alpha(&self) -> f64 {
        2.0 * self.gamma * self.theta / (self.kappa * self.kappa)
    }
}

/// Simulated variance path on a uniform grid, values held >= 0.
#[derive(Debug, Clone)]
pub struct VariancePath {
    pub dt: f64,
    pub values: Vec<f64>,
    pub seed: u64,
}

/// Steady-state variance density. Heston: Gamma with shape `alpha` and
/// scale `theta/alpha` (mean theta, variance theta^2/alpha).
/// Multiplicative: Inverse-Gamma with shape `alpha/theta + 1` and scale
/// `alpha` (mean theta).
pub fn steady_state_variance_pdf(params: &ModelParams, v: f64) -> Result<f64, ModelError> {
    if !(v > 0.0) {
        return Err(ModelError::DomainVariance(v));
    }
    let alpha = params.alpha();
    let theta = params.theta;
    let ln_pdf = match params.family {
        Family::Heston => {
            // shape a = alpha, scale s = theta/alpha
            let a = alpha;
            let s = theta / alpha;
            -ln_gamma(a) - a * s.ln() + (a - 1.0) * v.ln() - v / s
        }
        Family::Multiplicative => {
            // shape a = alpha/theta + 1, scale b = alpha
            let a = alpha / theta + 1.0;
            let b = alpha;
            a * b.ln() - ln_gamma(a) - (a + 1.0) * v.ln() - b / v
        }
    };
    Ok(ln_pdf.exp())
}

/// CDF of the steady-state variance law (regularized incomplete gamma).
pub fn steady_state_variance_cdf(params: &ModelParams, v: f64) -> Result<f64, ModelError> {
    if !(v > 0.0) {
        return Err(ModelError::DomainVariance(v));
    }
    let alpha = params.alpha();
    let theta = params.theta;
    Ok(match params.family {
        Family::Heston => gamma_lr(alpha, alpha * v / theta),
        Family::Multiplicative => gamma_ur(alpha / theta + 1.0, alpha / v),
    })
}

fn check_step(params: &ModelParams, dt: f64, n_steps: usize) -> Result<(), ModelError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(ModelError::NonPositive {
            name: "dt",
            value: dt,
        });
    }
    if dt * params.gamma >= 0.1 {
        return Err(ModelError::UnstableStep(dt * params.gamma));
    }
    if n_steps == 0 {
        return Err(ModelError::NonPositive {
            name: "n_steps",
            value: 0.0,
        });
    }
    Ok(())
}

fn diffusion(family: Family, v_plus: f64) -> f64 {
    match family {
        Family::Heston => v_plus.sqrt(),
        Family::Multiplicative => v_plus,
    }
}

fn path_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Full-truncation Euler-Maruyama path of the variance SDE, started at the
/// stationary mean `v0 = theta`. Deterministic for a given seed.
pub fn simulate_variance_path(
    params: &ModelParams,
    dt: f64,
    n_steps: usize,
    seed: u64,
) -> Result<VariancePath, ModelError> {
    simulate_variance_path_stream(params, dt, n_steps, seed, 0)
}

/// Same as [`simulate_variance_path`] with an explicit substream index, so
/// path batches can derive independent streams from (seed, path index).
pub fn simulate_variance_path_stream(
    params: &ModelParams,
    dt: f64,
    n_steps: usize,
    seed: u64,
    stream: u64,
) -> Result<VariancePath, ModelError> {
    check_step(params, dt, n_steps)?;
    let mut rng = path_rng(seed, stream);
    let sqrt_dt = dt.sqrt();
    let mut shadow = params.theta;
    let mut values = Vec::with_capacity(n_steps + 1);
    values.push(shadow.max(0.0));
    for _ in 0..n_steps {
        let v_plus = shadow.max(0.0);
        let xi: f64 = rng.sample(StandardNormal);
        shadow += -params.gamma * (v_plus - params.theta) * dt
            + params.kappa * diffusion(params.family, v_plus) * sqrt_dt * xi;
        values.push(shadow.max(0.0));
    }
    Ok(VariancePath {
        dt,
        values,
        seed,
    })
}

/// Coupled Euler step of the log-return and variance SDEs. With the Ito
/// drift off, the return increment is `sqrt(v) dW1`; with it on, the
/// `-v/2 dt` term is included. The variance Wiener increment is the
/// rho-mixture of the return increment and an independent one.
pub fn simulate_log_return_path(
    params: &ModelParams,
    dt: f64,
    n_steps: usize,
    seed: u64,
    include_ito_drift: bool,
) -> Result<(Vec<f64>, VariancePath), ModelError> {
    simulate_log_return_path_stream(params, dt, n_steps, seed, 0, include_ito_drift)
}

/// Substream variant of [`simulate_log_return_path`].
pub fn simulate_log_return_path_stream(
    params: &ModelParams,
    dt: f64,
    n_steps: usize,
    seed: u64,
    stream: u64,
    include_ito_drift: bool,
) -> Result<(Vec<f64>, VariancePath), ModelError> {
    check_step(params, dt, n_steps)?;
    let mut rng = path_rng(seed, stream);
    let sqrt_dt = dt.sqrt();
    let rho = params.rho;
    let rho_c = (1.0 - rho * rho).sqrt();

    let mut shadow = params.theta;
    let mut x = 0.0;
    let mut xs = Vec::with_capacity(n_steps + 1);
    let mut vs = Vec::with_capacity(n_steps + 1);
    xs.push(x);
    vs.push(shadow.max(0.0));
    for _ in 0..n_steps {
        let v_plus = shadow.max(0.0);
        let xi1: f64 = rng.sample(StandardNormal);
        let xi2: f64 = rng.sample(StandardNormal);
        let dw1 = sqrt_dt * xi1;
        let dw2 = rho * dw1 + rho_c * sqrt_dt * xi2;

        let sigma = v_plus.sqrt();
        x += sigma * dw1;
        if include_ito_drift {
            x -= 0.5 * v_plus * dt;
        }
        shadow += -params.gamma * (v_plus - params.theta) * dt
            + params.kappa * diffusion(params.family, v_plus) * dw2;

        xs.push(x);
        vs.push(shadow.max(0.0));
    }
    Ok((
        xs,
        VariancePath {
            dt,
            values: vs,
            seed,
        },
    ))
}

/// Draw approximately independent samples from the stationary variance
/// law by running the SDE with burn-in `10/gamma` and thinning `1/gamma`
/// (one relaxation time between retained samples). The variance noise is
/// built as the rho-mixture of a return increment and an independent
/// increment, so the marginal can be checked across rho values.
pub fn stationary_variance_samples(
    params: &ModelParams,
    dt: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<f64>, ModelError> {
    check_step(params, dt, n_samples.max(1))?;
    let burn_in = (10.0 / params.gamma / dt).ceil() as usize;
    let thin = (1.0 / params.gamma / dt).ceil() as usize;

    let mut rng = path_rng(seed, 0);
    let sqrt_dt = dt.sqrt();
    let rho = params.rho;
    let rho_c = (1.0 - rho * rho).sqrt();
    let mut shadow = params.theta;
    let step = |shadow: &mut f64, rng: &mut ChaCha8Rng| {
        let v_plus = shadow.max(0.0);
        let xi1: f64 = rng.sample(StandardNormal);
        let xi2: f64 = rng.sample(StandardNormal);
        let dw2 = (rho * xi1 + rho_c * xi2) * sqrt_dt;
        *shadow += -params.gamma * (v_plus - params.theta) * dt
            + params.kappa * diffusion(params.family, v_plus) * dw2;
    };
    for _ in 0..burn_in {
        step(&mut shadow, &mut rng);
    }
    let mut out = Vec::with_capacity(n_samples);
    while out.len() < n_samples {
        for _ in 0..thin {
            step(&mut shadow, &mut rng);
        }
        out.push(shadow.max(0.0));
    }
    Ok(out)
}
