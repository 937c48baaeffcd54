//! Overflow-safe special functions: gamma family, modified Bessel I,
//! confluent (`1F1`) and generalized (`2F2`) hypergeometric series, and the
//! parameter derivatives of `1F1` needed by the pricing expansion.
//!
//! Everything that can reach `e^z` magnitudes returns [`LogScaled`]; plain
//! `f64` is used only where values are O(1) by construction.

mod bessel;
mod hyp;
mod series;

pub use bessel::bessel_i_log;
pub use hyp::{hyp1f1_da, hyp1f1_db, hyp1f1_dz, hyp1f1_log, hyp2f2_log, HypEval};
pub(crate) use hyp::{ag_derivs, asym_log_bracket};

use crate::error::{Error, Result};
use crate::logscaled::LogScaled;

/// Direct-series cutoff for `1F1`: above this `z` the (flagged) asymptotic
/// expansion is used instead of summing O(z) terms.
pub const ASYMPTOTIC_Z: f64 = 500.0;

/// Stopping controls for hypergeometric series.
///
/// A positive-term series stops once `consecutive_small` successive terms
/// each fall below `rel_tol` times the running partial sum; two-plus
/// consecutive terms guard against a single accidentally small term.
#[derive(Clone, Debug)]
pub struct HypSeriesCtrl {
    pub max_terms: usize,
    pub rel_tol: f64,
    pub consecutive_small: usize,
}

impl Default for HypSeriesCtrl {
    fn default() -> Self {
        HypSeriesCtrl { max_terms: 10_000, rel_tol: 1e-14, consecutive_small: 3 }
    }
}

impl HypSeriesCtrl {
    /// A budget large enough for direct series at extreme arguments
    /// (z in the thousands), used by tests and the T->0 limits.
    pub fn large_budget() -> Self {
        HypSeriesCtrl { max_terms: 500_000, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 1 {
            return Err(Error::InvalidConfig("max_terms must be >= 1".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "rel_tol must be in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if self.consecutive_small < 2 {
            return Err(Error::InvalidConfig("consecutive_small must be >= 2".into()));
        }
        Ok(())
    }
}

/// ln Gamma(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("ln_gamma", format!("requires x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// Digamma psi(x) = Gamma'(x)/Gamma(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("digamma", format!("requires x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::digamma(x))
}

/// Rising factorial (a)_n = a (a+1) ... (a+n-1) as a log-scaled value.
pub fn pochhammer_log(a: f64, n: u32) -> Result<LogScaled> {
    let mut sign = 1i8;
    let mut log_mag = 0.0;
    for k in 0..n {
        let f = a + k as f64;
        if f == 0.0 {
            return Err(Error::domain(
                "pochhammer_log",
                format!("factor a + {k} vanishes for a = {a}"),
            ));
        }
        if f < 0.0 {
            sign = -sign;
        }
        log_mag += f.abs().ln();
    }
    Ok(LogScaled::new(sign, log_mag))
}

/// Whittaker function of the first kind, log-scaled:
/// `M_{k,mu}(z) = exp(-z/2) z^{1/2+mu} 1F1(1/2 + mu - k, 1 + 2 mu, z)`.
pub fn whittaker_m_log(k: f64, mu: f64, z: f64, ctrl: &HypSeriesCtrl) -> Result<LogScaled> {
    if z <= 0.0 {
        return Err(Error::domain("whittaker_m_log", format!("requires z > 0, got {z}")));
    }
    let f = hyp1f1_log(0.5 + mu - k, 1.0 + 2.0 * mu, z, ctrl)?;
    Ok(LogScaled::from_ln(-0.5 * z + (0.5 + mu) * z.ln()) * f.value)
}
