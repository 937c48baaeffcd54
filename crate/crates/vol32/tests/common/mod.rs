//! Shared test oracles: exact big-integer hypergeometric summation,
//! shifted Stirling/Bernoulli gamma-family references, quadrature, and a
//! Kolmogorov-Smirnov statistic.
//!
//! The big-integer oracle evaluates pFq series in fixed-point arithmetic
//! with a 768-bit mantissa. f64 inputs convert exactly (they are binary
//! rationals), every term is formed by exact multiplication with one
//! truncating division per factor, and alternating-series cancellation
//! costs nothing because the accumulation is exact integer addition. That
//! makes it a valid reference for the Kummer transformation at z = 100,
//! where the -z side cancels through ~87 decimal digits.

#![allow(dead_code)]

use num_bigint::{BigInt, Sign};

/// Fixed-point scale in bits.
const P: i64 = 768;

const LN_2: f64 = std::f64::consts::LN_2;

fn to_fix(x: f64) -> BigInt {
    // exact: x = sign * m * 2^e with integer m
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let exp_raw = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) =
        if exp_raw == 0 { (frac, -1074i64) } else { (frac | (1u64 << 52), exp_raw - 1075) };
    let m = BigInt::from(sign) * BigInt::from(m);
    let shift = P + e;
    if shift >= 0 {
        m << shift
    } else {
        m >> (-shift)
    }
}

fn fix_mul(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> P
}

fn fix_div(a: &BigInt, b: &BigInt) -> BigInt {
    (a << P) / b
}

/// (sign, ln|scaled / 2^P|).
fn fix_ln_abs(v: &BigInt) -> (i8, f64) {
    let (sign, mag) = match v.sign() {
        Sign::NoSign => return (0, f64::NEG_INFINITY),
        Sign::Plus => (1i8, v.clone()),
        Sign::Minus => (-1i8, -v.clone()),
    };
    let bits = mag.bits() as i64;
    let (top, dropped) = if bits > 53 { (mag >> (bits - 53), bits - 53) } else { (mag, 0) };
    let top_f: f64 = top.to_string().parse().expect("<= 53-bit integer");
    (sign, top_f.ln() + dropped as f64 * LN_2 - P as f64 * LN_2)
}

/// Exact pFq partial summation: returns (sign, ln|sum|) of
/// `sum_k prod(upper + k) / prod(lower + k) z^k / k!`.
///
/// Stops once past the term hump with terms 560 bits below the largest
/// magnitude seen, i.e. a relative residual around 1e-160.
pub fn hyp_series_ln(upper: &[f64], lower: &[f64], z: f64) -> (i8, f64) {
    let zf = to_fix(z);
    let one = BigInt::from(1) << P;
    // factors a + k are formed by exact fixed-point addition: rounding them
    // in f64 first would poison alternating sums after cancellation
    let upper_fix: Vec<BigInt> = upper.iter().map(|&a| to_fix(a)).collect();
    let lower_fix: Vec<BigInt> = lower.iter().map(|&b| to_fix(b)).collect();
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut kfix = BigInt::from(0);
    let mut max_bits = P as u64;
    let max_terms = 60_000usize;
    for k in 0..max_terms {
        let mut t = fix_mul(&term, &zf);
        for a in &upper_fix {
            t = fix_mul(&t, &(a + &kfix));
        }
        for b in &lower_fix {
            t = fix_div(&t, &(b + &kfix));
        }
        t /= BigInt::from(k as u64 + 1);
        term = t;
        if term.sign() == Sign::NoSign {
            break; // terminated (polynomial case) or fully below the scale
        }
        sum += &term;
        kfix += &one;
        max_bits = max_bits.max(term.magnitude().bits());
        if k as f64 > z.abs() && term.magnitude().bits() + 560 < max_bits {
            break;
        }
    }
    fix_ln_abs(&sum)
}

/// ln Gamma by shift to x >= 30 plus the Stirling series through B14;
/// algorithmically independent of the Lanczos evaluation under test.
pub fn ln_gamma_oracle(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut shift = 0.0;
    let mut xx = x;
    while xx < 30.0 {
        shift += xx.ln();
        xx += 1.0;
    }
    let b = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        7.0 / 1092.0,
    ];
    let inv = 1.0 / xx;
    let inv2 = inv * inv;
    let mut tail = 0.0;
    let mut p = inv;
    for c in b {
        tail += c * p;
        p *= inv2;
    }
    (xx - 0.5) * xx.ln() - xx + 0.5 * (2.0 * std::f64::consts::PI).ln() + tail - shift
}

/// Digamma by shift to x >= 30 plus the asymptotic series through 1/x^14.
pub fn digamma_oracle(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut shift = 0.0;
    let mut xx = x;
    while xx < 30.0 {
        shift += 1.0 / xx;
        xx += 1.0;
    }
    let b = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
        1.0 / 12.0,
    ];
    let inv2 = 1.0 / (xx * xx);
    let mut tail = 0.0;
    let mut p = inv2;
    for c in b {
        tail += c * p;
        p *= inv2;
    }
    xx.ln() - 0.5 / xx - tail - shift
}

/// Composite Simpson on [a, b] with n (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n % 2 == 0 && n >= 2);
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// One-sample Kolmogorov-Smirnov statistic against a CDF.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let c = cdf(x);
        d = d.max((c - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - c).abs());
    }
    d
}

/// Central finite difference with Richardson extrapolation (steps h, h/2).
pub fn richardson_fd(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    let d2 = (f(x + h / 2.0) - f(x - h / 2.0)) / h;
    (4.0 * d2 - d1) / 3.0
}
