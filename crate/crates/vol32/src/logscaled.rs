//! Sign/log-magnitude representation for quantities that overflow f64.
//!
//! The pricing formulas multiply factors like `1F1(a, b, z) ~ e^z` (z reaches
//! 86 at quarterly maturity and thousands at short maturities) against
//! `exp(-z)` prefactors; only the product is representable natively. All
//! special-function kernels therefore work on [`LogScaled`] values and
//! collapse to `f64` at the very end.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// A real number stored as `sign * exp(log_mag)`.
///
/// `sign` is -1, 0 or +1; `log_mag` is ignored when `sign == 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogScaled {
    pub sign: i8,
    pub log_mag: f64,
}

impl LogScaled {
    pub const ZERO: LogScaled = LogScaled { sign: 0, log_mag: f64::NEG_INFINITY };
    pub const ONE: LogScaled = LogScaled { sign: 1, log_mag: 0.0 };

    pub fn new(sign: i8, log_mag: f64) -> Self {
        debug_assert!(sign == -1 || sign == 0 || sign == 1);
        if sign == 0 {
            Self::ZERO
        } else {
            LogScaled { sign, log_mag }
        }
    }

    /// Positive value from its natural log.
    pub fn from_ln(log_mag: f64) -> Self {
        LogScaled { sign: 1, log_mag }
    }

    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            LogScaled { sign: 1, log_mag: x.ln() }
        } else {
            LogScaled { sign: -1, log_mag: (-x).ln() }
        }
    }

    /// Back to a native float; overflows to +-inf and underflows to 0
    /// when `log_mag` is outside the representable range.
    pub fn to_real(self) -> f64 {
        self.sign as f64 * self.log_mag.exp()
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    /// Natural log of the absolute value (-inf for zero).
    pub fn ln_abs(self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.log_mag
        }
    }

    pub fn abs(self) -> Self {
        LogScaled { sign: self.sign.abs(), log_mag: self.log_mag }
    }

    pub fn recip(self) -> Self {
        debug_assert!(self.sign != 0, "reciprocal of zero");
        LogScaled { sign: self.sign, log_mag: -self.log_mag }
    }

    /// `self^p` for positive `self`.
    pub fn powf(self, p: f64) -> Self {
        debug_assert!(self.sign > 0, "powf requires a positive value");
        LogScaled { sign: 1, log_mag: self.log_mag * p }
    }

    /// Multiply by a plain float.
    pub fn scale(self, c: f64) -> Self {
        self * LogScaled::from_real(c)
    }
}

impl Mul for LogScaled {
    type Output = LogScaled;
    fn mul(self, rhs: LogScaled) -> LogScaled {
        let sign = self.sign * rhs.sign;
        if sign == 0 {
            LogScaled::ZERO
        } else {
            LogScaled { sign, log_mag: self.log_mag + rhs.log_mag }
        }
    }
}

impl Div for LogScaled {
    type Output = LogScaled;
    fn div(self, rhs: LogScaled) -> LogScaled {
        debug_assert!(rhs.sign != 0, "division by zero");
        let sign = self.sign * rhs.sign;
        if sign == 0 {
            LogScaled::ZERO
        } else {
            LogScaled { sign, log_mag: self.log_mag - rhs.log_mag }
        }
    }
}

impl Neg for LogScaled {
    type Output = LogScaled;
    fn neg(self) -> LogScaled {
        LogScaled { sign: -self.sign, log_mag: self.log_mag }
    }
}

impl Add for LogScaled {
    type Output = LogScaled;
    fn add(self, rhs: LogScaled) -> LogScaled {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        // Factor out the larger magnitude so the exp argument is <= 0.
        let (big, small) = if self.log_mag >= rhs.log_mag { (self, rhs) } else { (rhs, self) };
        let d = small.log_mag - big.log_mag;
        if self.sign == rhs.sign {
            LogScaled { sign: big.sign, log_mag: big.log_mag + d.exp().ln_1p() }
        } else {
            let r = d.exp(); // in [0, 1]
            if r == 1.0 {
                LogScaled::ZERO
            } else {
                LogScaled { sign: big.sign, log_mag: big.log_mag + (-r).ln_1p() }
            }
        }
    }
}

impl Sub for LogScaled {
    type Output = LogScaled;
    fn sub(self, rhs: LogScaled) -> LogScaled {
        self + (-rhs)
    }
}

/// Signed log-sum-exp over a slice: positives and negatives are accumulated
/// separately (each with its maximum factored out) and subtracted once.
pub fn signed_log_sum(terms: &[LogScaled]) -> LogScaled {
    let acc = |want: i8| -> LogScaled {
        let lmax = terms
            .iter()
            .filter(|t| t.sign == want)
            .map(|t| t.log_mag)
            .fold(f64::NEG_INFINITY, f64::max);
        if lmax == f64::NEG_INFINITY {
            return LogScaled::ZERO;
        }
        let s: f64 = terms
            .iter()
            .filter(|t| t.sign == want)
            .map(|t| (t.log_mag - lmax).exp())
            .sum();
        LogScaled { sign: want, log_mag: lmax + s.ln() }
    };
    let pos = acc(1);
    let neg = acc(-1);
    pos + neg
}
