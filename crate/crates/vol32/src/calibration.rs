//! Parameter estimation from an index price series: linear fit of the
//! log-index for (eta, alpha_tilde), gamma fit of the normalized index for
//! the dimension delta, and the Section-4 identifications b = eta, a1 = b.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::process::ModelParams;
use crate::specfun::digamma;

/// Timestamped index closes; times in years since the series start.
#[derive(Clone, Debug)]
pub struct PriceSeries {
    times: Vec<f64>,
    closes: Vec<f64>,
}

impl PriceSeries {
    pub fn new(times: Vec<f64>, closes: Vec<f64>) -> Result<Self> {
        if times.len() != closes.len() {
            return Err(Error::InvalidData(format!(
                "times ({}) and closes ({}) differ in length",
                times.len(),
                closes.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidData("series needs at least 2 observations".into()));
        }
        if !times.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidData("times must be strictly increasing".into()));
        }
        if let Some(i) = closes.iter().position(|&c| !(c > 0.0)) {
            return Err(Error::InvalidData(format!(
                "close at index {i} is not positive: {}",
                closes[i]
            )));
        }
        Ok(PriceSeries { times, closes })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn closes(&self) -> &[f64] {
        &self.closes
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires >= 2 points
    }
}

/// Output of the log-linear fit.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LogLinearFit {
    pub eta: f64,
    /// Scaling fixed so the normalized series has unit mean (the a1/b rule).
    pub alpha_tilde: f64,
    /// Scaling from exponentiating the regression intercept, kept for
    /// comparison; differs from the mean rule because E[ln Y] != 0.
    pub alpha_tilde_intercept: f64,
}

/// OLS of ln(close) on time. The slope is eta; alpha_tilde is then chosen so
/// that the normalized series Y_t = F_t/(alpha_tilde e^{eta t}) has sample
/// mean exactly 1 (the long-run mean a1/b under the Section-4 normalization).
pub fn fit_log_linear(series: &PriceSeries) -> Result<LogLinearFit> {
    let n = series.len();
    if n < 3 {
        return Err(Error::InvalidData("log-linear fit needs at least 3 observations".into()));
    }
    let nf = n as f64;
    let t_bar = series.times.iter().sum::<f64>() / nf;
    let l_bar = series.closes.iter().map(|c| c.ln()).sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&t, &c) in series.times.iter().zip(&series.closes) {
        let dt = t - t_bar;
        sxx += dt * dt;
        sxy += dt * (c.ln() - l_bar);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidData("degenerate series: constant time".into()));
    }
    let eta = sxy / sxx;
    let intercept = l_bar - eta * t_bar;
    let mean_detrended = series
        .times
        .iter()
        .zip(&series.closes)
        .map(|(&t, &c)| c * (-eta * t).exp())
        .sum::<f64>()
        / nf;
    Ok(LogLinearFit { eta, alpha_tilde: mean_detrended, alpha_tilde_intercept: intercept.exp() })
}

/// Normalized index `Y_t = F_t / (alpha_tilde e^{eta t})`; with the
/// mean-rule alpha_tilde the sample mean is 1 by construction.
pub fn normalize_index(series: &PriceSeries, eta: f64, alpha_tilde: f64) -> Vec<f64> {
    series
        .times
        .iter()
        .zip(&series.closes)
        .map(|(&t, &c)| c / (alpha_tilde * (eta * t).exp()))
        .collect()
}

/// Gamma-dimension fit of the normalized index.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GammaFit {
    /// Maximum-likelihood dimension from the unit-mean gamma family.
    pub delta_mle: f64,
    /// Method-of-moments comparison value, 2/var(Y).
    pub delta_mm: f64,
    /// Set when the likelihood is monotone over the search interval
    /// (near-degenerate residuals); delta_mle then sits at a bound.
    pub degenerate: bool,
}

const DELTA_SEARCH_MAX: f64 = 200.0;

/// Maximum likelihood for the shape c = delta/2 of the unit-mean gamma
/// density `c^c y^{c-1} e^{-c y} / Gamma(c)`: the score equation is
/// `ln c - psi(c) + 1 + mean(ln y) - mean(y) = 0`, with a unique root since
/// `ln c - psi(c)` decreases from +inf to 0. Searched on delta in (2, 200].
pub fn fit_gamma_dimension(residuals: &[f64]) -> Result<GammaFit> {
    if residuals.len() < 100 {
        return Err(Error::InvalidData(format!(
            "gamma fit needs at least 100 residuals, got {}",
            residuals.len()
        )));
    }
    if let Some(&bad) = residuals.iter().find(|&&y| !(y > 0.0)) {
        return Err(Error::InvalidData(format!("non-positive residual {bad}")));
    }
    let nf = residuals.len() as f64;
    let mean_y = residuals.iter().sum::<f64>() / nf;
    let mean_ln = residuals.iter().map(|y| y.ln()).sum::<f64>() / nf;
    let var_y = residuals.iter().map(|y| (y - mean_y) * (y - mean_y)).sum::<f64>() / (nf - 1.0);
    let delta_mm = if var_y > 0.0 { 2.0 / var_y } else { f64::INFINITY };

    let score = |c: f64| -> Result<f64> { Ok(c.ln() - digamma(c)? + 1.0 + mean_ln - mean_y) };
    let (mut lo, mut hi) = (1.0 + 1e-9, DELTA_SEARCH_MAX / 2.0);
    let f_lo = score(lo)?;
    let f_hi = score(hi)?;
    if f_hi > 0.0 {
        // score still positive at the cap: residuals too concentrated
        return Ok(GammaFit { delta_mle: DELTA_SEARCH_MAX, delta_mm, degenerate: true });
    }
    if f_lo < 0.0 {
        // root below delta = 2: residuals too dispersed for the model
        return Ok(GammaFit { delta_mle: 2.0, delta_mm, degenerate: true });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if score(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * hi {
            return Ok(GammaFit { delta_mle: lo + hi, delta_mm, degenerate: false });
        }
    }
    Err(Error::NonConvergence { context: "fit_gamma_dimension", max_terms: 200 })
}

/// Full calibration output.
#[derive(Clone, Debug, Serialize)]
pub struct CalibrationResult {
    pub alpha_tilde: f64,
    pub alpha_tilde_intercept: f64,
    pub eta: f64,
    pub b: f64,
    pub a1: f64,
    pub gamma: f64,
    pub delta_hat: f64,
    pub delta_mm: f64,
    pub residual_series: Vec<f64>,
}

/// Apply the Section-4 identifications b = eta, a1 = b, gamma = 2 a1/delta
/// and validate the full parameter set (a1 >= 2 gamma requires delta >= 4).
pub fn assemble_params(eta: f64, alpha_tilde: f64, delta_hat: f64) -> Result<ModelParams> {
    if !(delta_hat > 2.0) {
        return Err(Error::ConstraintViolation {
            constraint: "delta > 2",
            detail: format!("delta_hat = {delta_hat}"),
        });
    }
    let b = eta;
    let a1 = b;
    let gamma = 2.0 * a1 / delta_hat;
    ModelParams::new(alpha_tilde, eta, a1, b, gamma)
}

/// End-to-end calibration: log-linear fit, normalization, gamma fit,
/// parameter assembly. Returns the full result or the named constraint that
/// failed.
pub fn calibrate(series: &PriceSeries) -> Result<CalibrationResult> {
    let fit = fit_log_linear(series)?;
    let residuals = normalize_index(series, fit.eta, fit.alpha_tilde);
    let gfit = fit_gamma_dimension(&residuals)?;
    let params = assemble_params(fit.eta, fit.alpha_tilde, gfit.delta_mle)?;
    Ok(CalibrationResult {
        alpha_tilde: fit.alpha_tilde,
        alpha_tilde_intercept: fit.alpha_tilde_intercept,
        eta: fit.eta,
        b: params.b(),
        a1: params.a1(),
        gamma: params.gamma(),
        delta_hat: gfit.delta_mle,
        delta_mm: gfit.delta_mm,
        residual_series: residuals,
    })
}
