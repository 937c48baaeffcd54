//! Modified Bessel function of the first kind, log-scaled.

use super::series::{PosLogSum, StopRule};
use super::ln_gamma;
use crate::error::{Error, Result};
use crate::logscaled::LogScaled;

const MAX_TERMS: usize = 400_000;

/// Log-scaled `I_nu(x)` for `nu >= 0`, `x >= 0` (orders down to `nu > -1`
/// are accepted so three-term recurrence checks can reach below 1/2).
///
/// Single code path: the ascending series
/// `I_nu(x) = sum_k (x/2)^{2k+nu} / (k! Gamma(nu+k+1))`
/// summed in the log domain. Every term is positive, so there is no
/// cancellation; the term count grows like x/2 + O(sqrt(x)), which stays
/// cheap through x = 1e4.
pub fn bessel_i_log(nu: f64, x: f64) -> Result<LogScaled> {
    if !(nu > -1.0) {
        return Err(Error::domain("bessel_i_log", format!("requires nu > -1, got {nu}")));
    }
    if !(x >= 0.0) {
        return Err(Error::domain("bessel_i_log", format!("requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        if nu < 0.0 {
            return Err(Error::domain("bessel_i_log", "I_nu(0) diverges for nu < 0".to_string()));
        }
        return Ok(if nu == 0.0 { LogScaled::ONE } else { LogScaled::ZERO });
    }

    let lh = (x / 2.0).ln();
    let mut log_term = nu * lh - ln_gamma(nu + 1.0)?;
    let mut comp = 0.0; // Kahan carry: the log-term recurrence runs for
                        // O(x) steps and uncompensated drift would be
                        // amplified by downstream ratio identities
    let mut sum = PosLogSum::new();
    let mut stop = StopRule::new(1e-16, 3);
    for k in 0..MAX_TERMS {
        sum.push(log_term);
        if stop.advance(log_term, sum.ln_sum()) {
            return Ok(LogScaled::from_ln(sum.ln_sum()));
        }
        let kf = k as f64;
        let incr = 2.0 * lh - (kf + 1.0).ln() - (nu + kf + 1.0).ln();
        let y = incr - comp;
        let t = log_term + y;
        comp = (t - log_term) - y;
        log_term = t;
    }
    Err(Error::NonConvergence { context: "bessel_i_log", max_terms: MAX_TERMS })
}
