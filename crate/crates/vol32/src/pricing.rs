//! Closed-form real-world (benchmark) prices: zero-coupon bond, Laplace
//! functional of the integrated inverse factor, the benchmarked variance
//! moment, variance-swap value and fair strike.
//!
//! Everything reduces to moments of the square-root factor `Y`:
//! the bond is `E[1/Y_T]` and the variance leg is
//! `E[(int_0^T ds/Y_s) / Y_T^alpha]`, obtained as the negative mu1-derivative
//! at 0 of
//!
//! `L(mu1) = E[e^{-mu1 int ds/Y} Y_T^{-alpha}]
//!         = 2^{-nu} y^{-m} h3 h2^{alpha-m-nu/2} h1^{nu/2}
//!           Gamma(beta)/Gamma(1+nu) 1F1(beta, 1+nu, z)`
//!
//! with `nu(mu1) = sqrt((a1-gamma)^2 + 4 mu1 gamma)/gamma`,
//! `m = (a1/gamma - 1)/2`, `beta = 1 + m - alpha + nu/2`,
//! `z = b y / (gamma (e^{bT}-1))`, `h1 = b^2 y/(gamma sinh(bT/2))^2`,
//! `h2 = b e^{bT}/((e^{bT}-1) gamma)`, `h3 = e^{-z + b m T}`.
//!
//! mu1 enters only through nu, with `dnu/dmu1|_0 = 2/(gamma nu_hat) = h4`, so
//! the moment is `h4` times the nu-derivative of `L`. The resulting six
//! additive terms are individually ~50x the total; they are assembled as
//! signed log-scaled values and combined with one signed log-sum-exp.
//!
//! Note: differentiating `1/Gamma(1+nu)` carries full weight
//! `psi(1+nu_hat)`; the half-weight variant fails the finite-difference gate
//! by a factor ~25 and is rejected by the oracle tests.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logscaled::{signed_log_sum, LogScaled};
use crate::process::{avg_growth, inv_y_expectation, ModelParams, ProcState};
use crate::specfun::{
    ag_derivs, asym_log_bracket, digamma, hyp1f1_log, ln_gamma, HypSeriesCtrl, ASYMPTOTIC_Z,
};

/// A variance swap: notional per variance point, strike in annualized
/// variance points, maturity in years, trading-day annualization.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SwapContract {
    pub notional_l: f64,
    pub strike_kv: f64,
    pub maturity_t: f64,
    pub trading_days_n: u32,
}

impl SwapContract {
    pub fn new(notional_l: f64, strike_kv: f64, maturity_t: f64) -> Result<Self> {
        if !(notional_l > 0.0) {
            return Err(Error::domain("SwapContract", format!("notional must be > 0, got {notional_l}")));
        }
        if !(strike_kv >= 0.0) {
            return Err(Error::domain("SwapContract", format!("strike must be >= 0, got {strike_kv}")));
        }
        if !(maturity_t > 0.0) {
            return Err(Error::domain("SwapContract", format!("maturity must be > 0, got {maturity_t}")));
        }
        Ok(SwapContract { notional_l, strike_kv, maturity_t, trading_days_n: 252 })
    }
}

/// Model, state and the moment exponent `alpha` (1 for the variance swap).
#[derive(Clone, Copy, Debug)]
pub struct PricingInputs {
    pub params: ModelParams,
    pub state: ProcState,
    pub alpha: f64,
}

impl PricingInputs {
    /// Validates the Proposition domain condition
    /// `beta_hat = 1 + nu_hat - alpha > 0`.
    pub fn new(params: ModelParams, state: ProcState, alpha: f64) -> Result<Self> {
        let beta_hat = 1.0 + params.nu_hat() - alpha;
        if !(beta_hat > 0.0) {
            return Err(Error::DomainCondition { beta: beta_hat, alpha, nu: params.nu_hat() });
        }
        Ok(PricingInputs { params, state, alpha })
    }
}

/// Zero-coupon bond: fair price `P_T(t, F_t) = F_t E_t[1/F_T]` and the
/// benchmarked ratio `P/F_t`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BondPrice {
    pub price: f64,
    pub ratio: f64,
}

/// Fair zero-coupon bond price at `state` for maturity `t_mat`.
///
/// `P = (F_t / A_T) E_t[1/Y_T]`, the expectation via the squared-Bessel
/// -1st moment. Under the standing parameter constraints `P` lies in (0, 1].
pub fn zcb_price(params: &ModelParams, state: &ProcState, t_mat: f64) -> Result<BondPrice> {
    if !(t_mat > state.t) {
        return Err(Error::domain(
            "zcb_price",
            format!("maturity {t_mat} must exceed state time {}", state.t),
        ));
    }
    let f_t = avg_growth(params, state.t) * state.y;
    let e_inv = inv_y_expectation(params, state, t_mat)?;
    let price = f_t / avg_growth(params, t_mat) * e_inv;
    Ok(BondPrice { price, ratio: price / f_t })
}

/// Shared geometry of the Laplace functional at horizon tau from state y.
pub(crate) struct Pieces {
    pub z: f64,
    pub ln_h1: f64,
    pub ln_h2: f64,
    pub h4: f64,
    pub nu_hat: f64,
    pub beta_hat: f64,
}

pub(crate) fn pieces(params: &ModelParams, alpha: f64, tau: f64, y: f64) -> Result<Pieces> {
    if !(tau > 0.0) {
        return Err(Error::domain("pricing", format!("horizon must be > 0, got {tau}")));
    }
    if !(y > 0.0) {
        return Err(Error::domain("pricing", format!("y must be > 0, got {y}")));
    }
    let (b, g) = (params.b(), params.gamma());
    let nu_hat = params.nu_hat();
    let beta_hat = 1.0 + nu_hat - alpha;
    if !(beta_hat > 0.0) {
        return Err(Error::DomainCondition { beta: beta_hat, alpha, nu: nu_hat });
    }
    let em1 = (b * tau).exp_m1();
    let sh = (b * tau / 2.0).sinh();
    Ok(Pieces {
        z: b * y / (g * em1),
        ln_h1: (b * b * y).ln() - 2.0 * (g * sh).ln(),
        ln_h2: (b * (b * tau).exp() / (em1 * g)).ln(),
        h4: 2.0 / (g * nu_hat),
        nu_hat,
        beta_hat,
    })
}

pub(crate) fn laplace_log_at(params: &ModelParams, alpha: f64, tau: f64, y: f64, mu1: f64) -> Result<LogScaled> {
    if !(mu1 >= 0.0) {
        return Err(Error::domain("laplace_functional", format!("mu1 must be >= 0, got {mu1}")));
    }
    let (a1, b, g) = (params.a1(), params.b(), params.gamma());
    let nu = ((a1 - g) * (a1 - g) + 4.0 * mu1 * g).sqrt() / g;
    let m = params.m_exponent();
    let beta = 1.0 + m - alpha + nu / 2.0;
    if !(beta > 0.0) {
        return Err(Error::DomainCondition { beta, alpha, nu });
    }
    let p = pieces(params, alpha, tau, y)?;
    let f = hyp1f1_log(beta, 1.0 + nu, p.z, &HypSeriesCtrl::default())?;
    let ln_l = -nu * std::f64::consts::LN_2 - m * y.ln() + (-p.z + b * m * tau)
        + (-m + alpha - nu / 2.0) * p.ln_h2
        + (nu / 2.0) * p.ln_h1
        + ln_gamma(beta)?
        - ln_gamma(1.0 + nu)?
        + f.value.ln_abs();
    Ok(LogScaled::from_ln(ln_l))
}

/// `E[e^{-mu1 int_t^T ds/Y_s} Y_T^{-alpha} | state]`, log-scaled.
///
/// At `mu1 = 0`, `alpha = 1` this is `E[1/Y_T]`, the benchmarked-bond
/// building block; at `alpha = 0` it is 1 identically.
pub fn laplace_functional(inputs: &PricingInputs, t_mat: f64, mu1: f64) -> Result<LogScaled> {
    laplace_log_at(&inputs.params, inputs.alpha, t_mat - inputs.state.t, inputs.state.y, mu1)
}

/// `E[(int_t^T ds/Y_s) / Y_T^alpha | state]`: the negative mu1-derivative of
/// the Laplace functional at 0, evaluated term by term.
pub fn benchmarked_integral_moment(inputs: &PricingInputs, t_mat: f64) -> Result<f64> {
    let params = &inputs.params;
    let (tau, y, alpha) = (t_mat - inputs.state.t, inputs.state.y, inputs.alpha);
    let p = pieces(params, alpha, tau, y)?;
    let l = laplace_log_at(params, alpha, tau, y, 0.0)?;

    let value = if p.z > ASYMPTOTIC_Z {
        // The six terms cancel to O(1/z) at large z; the surviving part is
        // the nu-direction derivative of the asymptotic tail.
        let (bracket, _) = asym_log_bracket(p.beta_hat, 1.0 + p.nu_hat, p.z);
        l.scale(p.h4 * bracket)
    } else {
        let f = hyp1f1_log(p.beta_hat, 1.0 + p.nu_hat, p.z, &HypSeriesCtrl::default())?;
        let ag = ag_derivs(p.beta_hat, 1.0 + p.nu_hat, p.z, &HypSeriesCtrl::default(), false)?;
        let base = l.scale(p.h4);
        let prefactor = (l / f.value).scale(p.h4);
        let d = ag.g1.scale(0.5) + ag.h1;
        let terms = [
            base.scale(std::f64::consts::LN_2),
            base.scale(0.5 * p.ln_h2),
            base.scale(-0.5 * p.ln_h1),
            base.scale(-0.5 * digamma(p.beta_hat)?),
            base.scale(digamma(1.0 + p.nu_hat)?),
            -(prefactor * d),
        ];
        signed_log_sum(&terms)
    };
    let e = value.to_real();
    if !(e.is_finite() && e > 0.0) {
        return Err(Error::Numerical {
            context: "benchmarked_integral_moment",
            message: format!("expected a positive finite moment, got {e}"),
        });
    }
    Ok(e)
}

/// One-sided second-order finite difference `-dL/dmu1 |_{mu1=0}` on the
/// stencil {0, h, 2h}; an independent check of the term-by-term expansion.
pub fn central_fd_mu1(inputs: &PricingInputs, t_mat: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain("central_fd_mu1", format!("h must be > 0, got {h}")));
    }
    let f0 = laplace_functional(inputs, t_mat, 0.0)?.to_real();
    let f1 = laplace_functional(inputs, t_mat, h)?.to_real();
    let f2 = laplace_functional(inputs, t_mat, 2.0 * h)?.to_real();
    Ok((3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h))
}

/// Richardson extrapolation of [`central_fd_mu1`] over steps h and h/2.
pub fn central_fd_mu1_richardson(inputs: &PricingInputs, t_mat: f64, h: f64) -> Result<f64> {
    let d_h = central_fd_mu1(inputs, t_mat, h)?;
    let d_h2 = central_fd_mu1(inputs, t_mat, h / 2.0)?;
    Ok((4.0 * d_h2 - d_h) / 3.0)
}

/// Benchmarked variance expectation at inception:
/// `E[sigma2_{0,T}/F_T] = (2 gamma e^{-eta T} / (alpha_tilde T)) E[(int ds/Y)/Y_T]`.
pub fn benchmarked_variance_expectation(
    params: &ModelParams,
    state: &ProcState,
    t_mat: f64,
) -> Result<f64> {
    require_inception(state, "benchmarked_variance_expectation")?;
    let inputs = PricingInputs::new(*params, *state, 1.0)?;
    let moment = benchmarked_integral_moment(&inputs, t_mat)?;
    Ok(2.0 * params.gamma() * (-params.eta() * t_mat).exp() / (params.alpha_tilde() * t_mat) * moment)
}

/// Fair variance-swap strike
/// `K_v = E[sigma2/F_T] / E[1/F_T] = (2 gamma / T) E[(int ds/Y)/Y_T] / E[1/Y_T]`.
///
/// alpha_tilde and eta cancel: the strike depends only on (a1, b, gamma, y, T).
pub fn fair_strike(params: &ModelParams, state: &ProcState, t_mat: f64) -> Result<f64> {
    require_inception(state, "fair_strike")?;
    let inputs = PricingInputs::new(*params, *state, 1.0)?;
    let moment = benchmarked_integral_moment(&inputs, t_mat)?;
    let e_inv = inv_y_expectation(params, state, t_mat)?;
    Ok(2.0 * params.gamma() / t_mat * moment / e_inv)
}

/// Inception value of the swap:
/// `V = L F_0 E[sigma2/F_T] - L K P_T(0, F_0)`; zero at the fair strike.
pub fn swap_value(params: &ModelParams, state: &ProcState, contract: &SwapContract) -> Result<f64> {
    require_inception(state, "swap_value")?;
    let f0 = avg_growth(params, 0.0) * state.y;
    let ev = benchmarked_variance_expectation(params, state, contract.maturity_t)?;
    let bond = zcb_price(params, state, contract.maturity_t)?;
    Ok(contract.notional_l * (f0 * ev - contract.strike_kv * bond.price))
}

fn require_inception(state: &ProcState, context: &'static str) -> Result<()> {
    if state.t != 0.0 {
        return Err(Error::domain(context, format!("defined at contract inception (t = 0), got t = {}", state.t)));
    }
    Ok(())
}

/// The paper's Section-10 maturities with the benchmark-approach strikes it
/// prints. The closed form (confirmed by the Monte Carlo oracle and the
/// finite-difference gate) does not reproduce this column; `table1`
/// reporting shows both side by side. See the acceptance suite.
pub const TABLE1_MATURITIES: [f64; 5] = [0.25, 0.5, 1.0, 1.5, 2.0];
pub const TABLE1_PAPER_STRIKES: [f64; 5] = [0.137767, 0.18197, 0.257293, 0.31596, 0.360989];
