//! Log-domain series accumulation primitives.

/// Running sum of positive terms given by their natural logs.
///
/// Stores `sum = exp(lmax) * acc` with `lmax` the largest log-term seen, so
/// the accumulator never overflows even when terms reach `e^{thousands}`.
pub(crate) struct PosLogSum {
    lmax: f64,
    acc: f64,
}

impl PosLogSum {
    pub fn new() -> Self {
        PosLogSum { lmax: f64::NEG_INFINITY, acc: 0.0 }
    }

    pub fn push(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term > self.lmax {
            self.acc = if self.lmax == f64::NEG_INFINITY {
                1.0
            } else {
                self.acc * (self.lmax - log_term).exp() + 1.0
            };
            self.lmax = log_term;
        } else {
            self.acc += (log_term - self.lmax).exp();
        }
    }

    pub fn ln_sum(&self) -> f64 {
        if self.lmax == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.lmax + self.acc.ln()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lmax == f64::NEG_INFINITY
    }
}

/// The stopping rule shared by all hypergeometric series: fire after
/// `needed` consecutive terms below `rel_tol * partial_sum`.
pub(crate) struct StopRule {
    ln_rel_tol: f64,
    needed: usize,
    run: usize,
}

impl StopRule {
    pub fn new(rel_tol: f64, needed: usize) -> Self {
        StopRule { ln_rel_tol: rel_tol.ln(), needed, run: 0 }
    }

    /// Record one term; returns true once the rule fires.
    pub fn advance(&mut self, log_term: f64, ln_partial: f64) -> bool {
        if log_term < self.ln_rel_tol + ln_partial {
            self.run += 1;
        } else {
            self.run = 0;
        }
        self.run >= self.needed
    }
}
