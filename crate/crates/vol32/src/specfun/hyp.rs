//! Confluent and generalized hypergeometric series in the log domain,
//! their parameter derivatives, and large-argument asymptotics.

use super::series::{PosLogSum, StopRule};
use super::{digamma, ln_gamma, HypSeriesCtrl, ASYMPTOTIC_Z};
use crate::error::{Error, Result};
use crate::logscaled::LogScaled;

/// Result of a hypergeometric evaluation.
#[derive(Clone, Copy, Debug)]
pub struct HypEval {
    pub value: LogScaled,
    pub terms_used: usize,
    /// Set when the value came from the large-z asymptotic fallback, outside
    /// the direct-series operating range.
    pub reduced_accuracy: bool,
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// Kummer's function `1F1(a, b, z)`, log-scaled.
///
/// For `a, b, z > 0` (the pricing path) the series has positive terms and is
/// summed with a stabilized log-domain accumulator. Above
/// [`ASYMPTOTIC_Z`](super::ASYMPTOTIC_Z) the optimally truncated asymptotic
/// expansion is used and the result is flagged `reduced_accuracy`. Other
/// argument signs fall back to a signed two-accumulator sum, which loses
/// digits to cancellation once |z| is large (production code never goes
/// there; the Kummer transformation is validated against an exact
/// big-integer oracle in the test suite instead).
pub fn hyp1f1_log(a: f64, b: f64, z: f64, ctrl: &HypSeriesCtrl) -> Result<HypEval> {
    ctrl.validate()?;
    if is_nonpositive_integer(b) {
        return Err(Error::domain("hyp1f1_log", format!("b = {b} is a non-positive integer")));
    }
    if z == 0.0 {
        return Ok(HypEval { value: LogScaled::ONE, terms_used: 1, reduced_accuracy: false });
    }
    if a > 0.0 && b > 0.0 && z > 0.0 {
        if z > ASYMPTOTIC_Z {
            let (value, tail) = hyp1f1_asym(a, b, z)?;
            return Ok(HypEval { value, terms_used: tail.terms, reduced_accuracy: true });
        }
        let lnz = z.ln();
        let mut log_term = 0.0;
        let mut sum = PosLogSum::new();
        let mut stop = StopRule::new(ctrl.rel_tol, ctrl.consecutive_small);
        for k in 0..ctrl.max_terms {
            sum.push(log_term);
            if stop.advance(log_term, sum.ln_sum()) {
                return Ok(HypEval {
                    value: LogScaled::from_ln(sum.ln_sum()),
                    terms_used: k + 1,
                    reduced_accuracy: false,
                });
            }
            let kf = k as f64;
            log_term += (a + kf).ln() - (b + kf).ln() + lnz - (kf + 1.0).ln();
        }
        return Err(Error::NonConvergence { context: "hyp1f1_log", max_terms: ctrl.max_terms });
    }
    signed_series(&[a], &[b], z, ctrl, "hyp1f1_log")
}

/// Derivative in z: `d/dz 1F1(a,b,z) = (a/b) 1F1(a+1, b+1, z)`.
pub fn hyp1f1_dz(a: f64, b: f64, z: f64, ctrl: &HypSeriesCtrl) -> Result<LogScaled> {
    Ok(hyp1f1_log(a + 1.0, b + 1.0, z, ctrl)?.value.scale(a / b))
}

/// `2F2(a1, a2; b1, b2; z)`, log-scaled, by direct series with the
/// Pochhammer ratios maintained incrementally.
pub fn hyp2f2_log(
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    z: f64,
    ctrl: &HypSeriesCtrl,
) -> Result<HypEval> {
    ctrl.validate()?;
    for b in [b1, b2] {
        if is_nonpositive_integer(b) {
            return Err(Error::domain("hyp2f2_log", format!("b = {b} is a non-positive integer")));
        }
    }
    if z == 0.0 {
        return Ok(HypEval { value: LogScaled::ONE, terms_used: 1, reduced_accuracy: false });
    }
    if a1 > 0.0 && a2 > 0.0 && b1 > 0.0 && b2 > 0.0 && z > 0.0 {
        let lnz = z.ln();
        let mut log_term = 0.0;
        let mut sum = PosLogSum::new();
        let mut stop = StopRule::new(ctrl.rel_tol, ctrl.consecutive_small);
        for k in 0..ctrl.max_terms {
            sum.push(log_term);
            if stop.advance(log_term, sum.ln_sum()) {
                return Ok(HypEval {
                    value: LogScaled::from_ln(sum.ln_sum()),
                    terms_used: k + 1,
                    reduced_accuracy: false,
                });
            }
            let kf = k as f64;
            log_term += (a1 + kf).ln() + (a2 + kf).ln() - (b1 + kf).ln() - (b2 + kf).ln() + lnz
                - (kf + 1.0).ln();
        }
        return Err(Error::NonConvergence { context: "hyp2f2_log", max_terms: ctrl.max_terms });
    }
    signed_series(&[a1, a2], &[b1, b2], z, ctrl, "hyp2f2_log")
}

/// General signed pFq series (p = q here) for arguments outside the
/// positive-term fast path. Accurate only while cancellation is mild
/// (|z| up to ~10 for alternating cases).
fn signed_series(
    upper: &[f64],
    lower: &[f64],
    z: f64,
    ctrl: &HypSeriesCtrl,
    context: &'static str,
) -> Result<HypEval> {
    let ln_abs_z = z.abs().ln();
    let z_sign: i8 = if z > 0.0 { 1 } else { -1 };
    let mut log_term = 0.0;
    let mut term_sign: i8 = 1;
    let mut pos = PosLogSum::new();
    let mut neg = PosLogSum::new();
    let mut stop = StopRule::new(ctrl.rel_tol, ctrl.consecutive_small);
    for k in 0..ctrl.max_terms {
        if term_sign > 0 {
            pos.push(log_term);
        } else {
            neg.push(log_term);
        }
        let ln_ref = pos.ln_sum().max(neg.ln_sum());
        if stop.advance(log_term, ln_ref) {
            let value = LogScaled::new(1, pos.ln_sum())
                + LogScaled::new(if neg.is_empty() { 0 } else { -1 }, neg.ln_sum());
            return Ok(HypEval { value, terms_used: k + 1, reduced_accuracy: false });
        }
        let kf = k as f64;
        let mut ratio_ln = ln_abs_z - (kf + 1.0).ln();
        let mut ratio_sign = z_sign;
        let mut terminated = false;
        for &a in upper {
            let f = a + kf;
            if f == 0.0 {
                terminated = true;
                break;
            }
            ratio_ln += f.abs().ln();
            if f < 0.0 {
                ratio_sign = -ratio_sign;
            }
        }
        if terminated {
            // polynomial case: all remaining terms vanish
            let value = LogScaled::new(1, pos.ln_sum())
                + LogScaled::new(if neg.is_empty() { 0 } else { -1 }, neg.ln_sum());
            return Ok(HypEval { value, terms_used: k + 1, reduced_accuracy: false });
        }
        for &b in lower {
            let f = b + kf;
            ratio_ln -= f.abs().ln();
            if f < 0.0 {
                ratio_sign = -ratio_sign;
            }
        }
        log_term += ratio_ln;
        term_sign *= ratio_sign;
    }
    Err(Error::NonConvergence { context, max_terms: ctrl.max_terms })
}

// ---------------------------------------------------------------------------
// Large-z asymptotics
// ---------------------------------------------------------------------------

/// Accumulated sums of the asymptotic tail
/// `S(z) = sum_k (b-a)_k (1-a)_k / (k! z^k)`
/// together with the pieces needed for parameter and z derivatives.
pub(crate) struct AsymTail {
    /// S
    pub s: f64,
    /// sum of dc_k/da = c_k (-P_k - Q_k)
    pub s_da: f64,
    /// sum of dc_k/db = c_k P_k
    pub s_db: f64,
    /// sum of -k c_k  (equals z dS/dz)
    pub s_kz: f64,
    /// sum of -k dc_k/da
    pub s_da_kz: f64,
    /// sum of -k dc_k/db
    pub s_db_kz: f64,
    pub terms: usize,
}

/// Optimally truncated tail sums; valid for large z (terms fall fast and the
/// first omitted term bounds the error).
fn asym_tail(a: f64, b: f64, z: f64) -> AsymTail {
    let mut c = 1.0_f64;
    let mut p = 0.0_f64; // sum_{j<k} 1/(b-a+j)
    let mut q = 0.0_f64; // sum_{j<k} 1/(1-a+j)
    let mut t = AsymTail { s: 0.0, s_da: 0.0, s_db: 0.0, s_kz: 0.0, s_da_kz: 0.0, s_db_kz: 0.0, terms: 0 };
    let mut prev_abs = f64::INFINITY;
    for k in 0..80usize {
        let kf = k as f64;
        let da = c * (-p - q);
        let db = c * p;
        t.s += c;
        t.s_da += da;
        t.s_db += db;
        t.s_kz += -kf * c;
        t.s_da_kz += -kf * da;
        t.s_db_kz += -kf * db;
        t.terms = k + 1;
        let fa = b - a + kf;
        let fb = 1.0 - a + kf;
        let next = c * fa * fb / ((kf + 1.0) * z);
        if next == 0.0 || next.abs() < 1e-18 * t.s.abs() {
            break;
        }
        if next.abs() >= prev_abs {
            // divergent tail started growing: stop at the optimal truncation
            break;
        }
        prev_abs = next.abs();
        p += 1.0 / fa;
        q += 1.0 / fb;
        c = next;
    }
    t
}

/// `1F1(a,b,z) ~ Gamma(b)/Gamma(a) e^z z^{a-b} S(z)` for large z > 0.
fn hyp1f1_asym(a: f64, b: f64, z: f64) -> Result<(LogScaled, AsymTail)> {
    let tail = asym_tail(a, b, z);
    if !(tail.s > 0.0) {
        return Err(Error::Numerical {
            context: "hyp1f1_asym",
            message: format!("tail sum {} not positive at a={a}, b={b}, z={z}", tail.s),
        });
    }
    let ln_f = z + (a - b) * z.ln() + ln_gamma(b)? - ln_gamma(a)? + tail.s.ln();
    Ok((LogScaled::from_ln(ln_f), tail))
}

/// The nu-direction log derivative of the asymptotic tail, used by the
/// pricing expansion at large z where its six terms cancel to O(1/z):
/// with a(nu) moving at rate 1/2 and b(nu) at rate 1,
/// returns `(-d/dnu ln S, d/dz of that)`.
pub(crate) fn asym_log_bracket(a: f64, b: f64, z: f64) -> (f64, f64) {
    let t = asym_tail(a, b, z);
    let s_dnu = 0.5 * t.s_da + t.s_db;
    let s_dnu_kz = 0.5 * t.s_da_kz + t.s_db_kz;
    let bracket = -s_dnu / t.s;
    // d/dz [ -S_nu/S ] = -(S_nu' S - S_nu S') / S^2, with X' = X_kz / z
    let bracket_dz = -(s_dnu_kz * t.s - s_dnu * t.s_kz) / (z * t.s * t.s);
    (bracket, bracket_dz)
}

// ---------------------------------------------------------------------------
// Parameter derivatives of 1F1 (Ancarani-Gasaneo double series)
// ---------------------------------------------------------------------------

/// G1 = d 1F1/da, H1 = d 1F1/db and their z-derivatives.
#[derive(Clone, Copy, Debug)]
pub(crate) struct AgDerivs {
    pub g1: LogScaled,
    pub h1: LogScaled,
    pub g1_dz: LogScaled,
    pub h1_dz: LogScaled,
}

/// Evaluate the parameter derivatives of `1F1(a,b,z)` for `a, b > 0`,
/// `z >= 0`:
///
/// `G1 = (z/b) sum_m (a)_m z^m / ((b+1)_m (m+1)!) 2F2(1, a+1+m, 2+m, b+1+m; z)`
/// `H1 = -(z a/b^2) sum_m (a+1)_m (b)_m z^m / ((b+1)_m^2 (m+1)!) 2F2(...)`
///
/// Both outer sums share the same inner `2F2`, so they are accumulated in a
/// single pass. With `want_dz` the term-by-term z-derivatives are also
/// formed, which brings in the shifted `2F2(2, a+2+m, 3+m, b+2+m; z)`.
/// Above `ASYMPTOTIC_Z` everything switches to the asymptotic expansion.
pub(crate) fn ag_derivs(
    a: f64,
    b: f64,
    z: f64,
    ctrl: &HypSeriesCtrl,
    want_dz: bool,
) -> Result<AgDerivs> {
    ctrl.validate()?;
    if !(a > 0.0 && b > 0.0 && z >= 0.0) {
        return Err(Error::domain(
            "ag_derivs",
            format!("requires a, b > 0 and z >= 0; got a={a}, b={b}, z={z}"),
        ));
    }
    if z == 0.0 {
        // the z/b and -za/b^2 prefactors kill the value; the z-derivative of
        // G1 at 0 is 1F1'(..)-like but never needed there
        return Ok(AgDerivs {
            g1: LogScaled::ZERO,
            h1: LogScaled::ZERO,
            g1_dz: LogScaled::ZERO,
            h1_dz: LogScaled::ZERO,
        });
    }
    if z > ASYMPTOTIC_Z {
        return ag_derivs_asym(a, b, z);
    }

    let lnz = z.ln();
    let mut lcz = 0.0_f64; // ln( (a)_m z^m / ((b+1)_m (m+1)!) )
    let mut ldz = 0.0_f64; // ln( (a+1)_m (b)_m z^m / ((b+1)_m^2 (m+1)!) )
    let mut sum_g = PosLogSum::new();
    let mut sum_h = PosLogSum::new();
    let mut sum_g_dz1 = PosLogSum::new();
    let mut sum_g_dz2 = PosLogSum::new();
    let mut sum_h_dz1 = PosLogSum::new();
    let mut sum_h_dz2 = PosLogSum::new();
    let mut stop = StopRule::new(ctrl.rel_tol, ctrl.consecutive_small);

    for m in 0..ctrl.max_terms {
        let mf = m as f64;
        let f22 = hyp2f2_log(1.0, a + 1.0 + mf, 2.0 + mf, b + 1.0 + mf, z, ctrl)?;
        let ln_f22 = f22.value.ln_abs();
        let tg = lcz + ln_f22;
        let th = ldz + ln_f22;
        sum_g.push(tg);
        sum_h.push(th);

        let mut worst = (tg - sum_g.ln_sum()).max(th - sum_h.ln_sum());
        if want_dz {
            let f22b = hyp2f2_log(2.0, a + 2.0 + mf, 3.0 + mf, b + 2.0 + mf, z, ctrl)?;
            // ln of 2F2'(1, a+1+m, 2+m, b+1+m; z)
            let ln_f22p = (a + 1.0 + mf).ln() - (2.0 + mf).ln() - (b + 1.0 + mf).ln()
                + f22b.value.ln_abs();
            let tg1 = (mf + 1.0).ln() + lcz + ln_f22;
            let tg2 = lcz + lnz + ln_f22p;
            let th1 = (mf + 1.0).ln() + ldz + ln_f22;
            let th2 = ldz + lnz + ln_f22p;
            sum_g_dz1.push(tg1);
            sum_g_dz2.push(tg2);
            sum_h_dz1.push(th1);
            sum_h_dz2.push(th2);
            worst = worst
                .max(tg1 - sum_g_dz1.ln_sum())
                .max(tg2 - sum_g_dz2.ln_sum())
                .max(th1 - sum_h_dz1.ln_sum())
                .max(th2 - sum_h_dz2.ln_sum());
        }
        if stop.advance(worst, 0.0) {
            let g1 = LogScaled::from_ln(lnz - b.ln() + sum_g.ln_sum());
            let h1 = LogScaled::new(-1, (z * a).ln() - 2.0 * b.ln() + sum_h.ln_sum());
            let (g1_dz, h1_dz) = if want_dz {
                let gdz = LogScaled::from_ln(-b.ln() + sum_g_dz1.ln_sum())
                    + LogScaled::from_ln(-b.ln() + sum_g_dz2.ln_sum());
                let hdz = LogScaled::new(-1, (a).ln() - 2.0 * b.ln() + sum_h_dz1.ln_sum())
                    + LogScaled::new(-1, (a).ln() - 2.0 * b.ln() + sum_h_dz2.ln_sum());
                (gdz, hdz)
            } else {
                (LogScaled::ZERO, LogScaled::ZERO)
            };
            return Ok(AgDerivs { g1, h1, g1_dz, h1_dz });
        }
        lcz += (a + mf).ln() + lnz - (b + 1.0 + mf).ln() - (mf + 2.0).ln();
        ldz += (a + 1.0 + mf).ln() + (b + mf).ln() + lnz - 2.0 * (b + 1.0 + mf).ln()
            - (mf + 2.0).ln();
    }
    Err(Error::NonConvergence { context: "ag_derivs", max_terms: ctrl.max_terms })
}

fn ag_derivs_asym(a: f64, b: f64, z: f64) -> Result<AgDerivs> {
    let (f, tail) = hyp1f1_asym(a, b, z)?;
    let lnz = z.ln();
    let psi_a = digamma(a)?;
    let psi_b = digamma(b)?;
    let s = tail.s;
    let sp = tail.s_kz / z; // dS/dz
    let g = lnz - psi_a + tail.s_da / s;
    let h = psi_b - lnz + tail.s_db / s;
    let dlnf_dz = 1.0 + (a - b) / z + sp / s;
    let g_dz = 1.0 / z + (tail.s_da_kz / z * s - tail.s_da * sp) / (s * s);
    let h_dz = -1.0 / z + (tail.s_db_kz / z * s - tail.s_db * sp) / (s * s);
    Ok(AgDerivs {
        g1: f.scale(g),
        h1: f.scale(h),
        g1_dz: f.scale(dlnf_dz * g + g_dz),
        h1_dz: f.scale(dlnf_dz * h + h_dz),
    })
}

/// `d 1F1/da` (the Ancarani-Gasaneo G1 series).
pub fn hyp1f1_da(a: f64, b: f64, z: f64, ctrl: &HypSeriesCtrl) -> Result<LogScaled> {
    Ok(ag_derivs(a, b, z, ctrl, false)?.g1)
}

/// `d 1F1/db` (the Ancarani-Gasaneo H1 series).
pub fn hyp1f1_db(a: f64, b: f64, z: f64, ctrl: &HypSeriesCtrl) -> Result<LogScaled> {
    Ok(ag_derivs(a, b, z, ctrl, false)?.h1)
}
