//! Price-series ingestion, detrended log returns, and realized variance.

use std::io::Read;

use chrono::NaiveDate;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error("line {line}: non-positive close {value}")]
    NonPositivePrice { line: u64, value: f64 },
    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Daily closing prices with the derived log-price path. Dates are
/// strictly increasing and prices strictly positive by construction.
#[derive(Debug, Clone)]
pub struct PriceSeries {
    dates: Vec<NaiveDate>,
    prices: Vec<f64>,
    log_prices: Vec<f64>,
}

impl PriceSeries {
    /// Build from (date, close) rows. Rows may arrive in any order;
    /// they are sorted by date. Duplicate dates are rejected.
    pub fn from_rows(mut rows: Vec<(NaiveDate, f64)>) -> Result<Self, SeriesError> {
        if rows.len() < 2 {
            return Err(SeriesError::InsufficientData(format!(
                "need at least 2 rows, got {}",
                rows.len()
            )));
        }
        for (_, close) in &rows {
            if !(*close > 0.0) || !close.is_finite() {
                return Err(SeriesError::Validation(format!(
                    "non-positive or non-finite close {close}"
                )));
            }
        }
        rows.sort_by_key(|(d, _)| *d);
        for w in rows.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(SeriesError::DuplicateDate(w[0].0));
            }
        }
        let (dates, prices): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        let log_prices = prices.iter().map(|p| p.ln()).collect();
        Ok(Self {
            dates,
            prices,
            log_prices,
        })
    }

    /// Parse a `date,close` CSV stream (ISO-8601 dates, `.`-decimal closes).
    pub fn parse_csv<R: Read>(reader: R) -> Result<Self, SeriesError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);

        {
            let headers = rdr.headers().map_err(|e| SeriesError::Parse {
                line: 1,
                msg: e.to_string(),
            })?;
            if headers.len() < 2 || headers[0] != *"date" || headers[1] != *"close" {
                return Err(SeriesError::Parse {
                    line: 1,
                    msg: format!("expected header `date,close`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
                });
            }
        }

        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                SeriesError::Parse {
                    line,
                    msg: e.to_string(),
                }
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() < 2 {
                return Err(SeriesError::Parse {
                    line,
                    msg: "expected two fields `date,close`".into(),
                });
            }
            let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|e| {
                SeriesError::Parse {
                    line,
                    msg: format!("bad date `{}`: {e}", &record[0]),
                }
            })?;
            let close: f64 = record[1].parse().map_err(|e| SeriesError::Parse {
                line,
                msg: format!("bad close `{}`: {e}", &record[1]),
            })?;
            if !(close > 0.0) || !close.is_finite() {
                return Err(SeriesError::NonPositivePrice { line, value: close });
            }
            rows.push((date, close));
        }
        Self::from_rows(rows)
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn log_prices(&self) -> &[f64] {
        &self.log_prices
    }
}

/// Detrended tau-day log returns over overlapping windows.
#[derive(Debug, Clone)]
pub struct ReturnSample {
    pub tau: usize,
    pub values: Vec<f64>,
    pub drift_mu: f64,
}

/// Per-day growth rate: OLS slope of log price against trading-day index.
pub fn fit_growth_rate(series: &PriceSeries) -> Result<f64, SeriesError> {
    let n = series.len();
    if n < 2 {
        return Err(SeriesError::InsufficientData(
            "growth-rate fit needs at least 2 points".into(),
        ));
    }
    let nf = n as f64;
    let x_mean = (nf - 1.0) / 2.0;
    let y_mean = series.log_prices.iter().sum::<f64>() / nf;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, y) in series.log_prices.iter().enumerate() {
        let dx = i as f64 - x_mean;
        sxy += dx * (y - y_mean);
        sxx += dx * dx;
    }
    Ok(sxy / sxx)
}

/// Overlapping-window detrended returns:
/// `values[k] = ln S_{k+tau} - ln S_k - mu * tau`, k = 0..n-tau-1.
pub fn tau_returns(series: &PriceSeries, tau: usize, mu: f64) -> Result<ReturnSample, SeriesError> {
    let n = series.len();
    if tau == 0 {
        return Err(SeriesError::Validation("tau must be positive".into()));
    }
    if tau >= n {
        return Err(SeriesError::InsufficientData(format!(
            "tau = {tau} must be smaller than series length {n}"
        )));
    }
    let lp = &series.log_prices;
    let drift = mu * tau as f64;
    let values = (0..n - tau).map(|k| lp[k + tau] - lp[k] - drift).collect();
    Ok(ReturnSample {
        tau,
        values,
        drift_mu: mu,
    })
}

/// Mean realized variance per horizon: for each tau, the average over all
/// overlapping tau-day windows of the summed squared one-day detrended
/// returns inside the window.
pub fn realized_variance_curve(
    series: &PriceSeries,
    mu: f64,
    taus: &[usize],
) -> Result<Vec<(usize, f64)>, SeriesError> {
    if taus.is_empty() {
        return Err(SeriesError::Validation("empty tau list".into()));
    }
    let n = series.len();
    let max_tau = *taus.iter().max().unwrap();
    if taus.iter().any(|&t| t == 0) {
        return Err(SeriesError::Validation("tau must be positive".into()));
    }
    if max_tau >= n {
        return Err(SeriesError::InsufficientData(format!(
            "max tau = {max_tau} must be smaller than series length {n}"
        )));
    }

    // prefix sums of squared daily detrended increments
    let lp = &series.log_prices;
    let mut prefix = Vec::with_capacity(n);
    prefix.push(0.0);
    let mut acc = 0.0;
    for i in 0..n - 1 {
        let d = lp[i + 1] - lp[i] - mu;
        acc += d * d;
        prefix.push(acc);
    }

    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        let windows = n - tau;
        let mut sum = 0.0;
        for k in 0..windows {
            sum += prefix[k + tau] - prefix[k];
        }
        out.push((tau, sum / windows as f64));
    }
    Ok(out)
}
