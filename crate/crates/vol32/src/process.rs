//! Analytic layer for the square-root factor `Y`, the squared Bessel process
//! it time-changes into, their densities and moments, and the deterministic
//! scaffolding of the model (average growth `A_t`, time change `phi`).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{bessel_i_log, hyp1f1_log, ln_gamma, HypSeriesCtrl};

/// The five real-world model parameters.
///
/// `F_t = alpha_tilde e^{eta t} Y_t` with
/// `dY = (a1 - b Y) dt + sqrt(2 gamma Y) dW`. Construction enforces the
/// standing assumptions: dimension `delta = 2 a1/gamma > 2` (Y never hits
/// zero), `eta >= b` and `a1 >= 2 gamma` (benchmarked savings account is a
/// supermartingale).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ModelParams {
    alpha_tilde: f64,
    eta: f64,
    a1: f64,
    b: f64,
    gamma: f64,
}

impl ModelParams {
    pub fn new(alpha_tilde: f64, eta: f64, a1: f64, b: f64, gamma: f64) -> Result<Self> {
        let positive = [
            ("alpha_tilde > 0", alpha_tilde),
            ("a1 > 0", a1),
            ("b > 0", b),
            ("gamma > 0", gamma),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::ConstraintViolation { constraint: name, detail: format!("{v}") });
            }
        }
        if !eta.is_finite() {
            return Err(Error::ConstraintViolation {
                constraint: "eta finite",
                detail: format!("{eta}"),
            });
        }
        let delta = 2.0 * a1 / gamma;
        if !(delta > 2.0) {
            return Err(Error::ConstraintViolation {
                constraint: "delta = 2*a1/gamma > 2",
                detail: format!("delta = {delta}"),
            });
        }
        if !(eta >= b) {
            return Err(Error::ConstraintViolation {
                constraint: "eta >= b",
                detail: format!("eta = {eta}, b = {b}"),
            });
        }
        if !(a1 >= 2.0 * gamma) {
            return Err(Error::ConstraintViolation {
                constraint: "a1 >= 2*gamma",
                detail: format!("a1 = {a1}, 2*gamma = {}", 2.0 * gamma),
            });
        }
        Ok(ModelParams { alpha_tilde, eta, a1, b, gamma })
    }

    /// The Section-4 estimates: b = a1 = eta = 0.1028, gamma = 0.0137,
    /// alpha_tilde = 0.248.
    pub fn section4() -> Self {
        ModelParams::new(0.248, 0.1028, 0.1028, 0.1028, 0.0137).expect("valid by construction")
    }

    pub fn alpha_tilde(&self) -> f64 {
        self.alpha_tilde
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn a1(&self) -> f64 {
        self.a1
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Squared-Bessel dimension `delta = 2 a1/gamma`.
    pub fn delta(&self) -> f64 {
        2.0 * self.a1 / self.gamma
    }

    /// Bessel index `nu_hat = a1/gamma - 1 = delta/2 - 1`.
    pub fn nu_hat(&self) -> f64 {
        self.a1 / self.gamma - 1.0
    }

    /// The exponent `m = (a1/gamma - 1)/2` of the Laplace-functional formula.
    pub fn m_exponent(&self) -> f64 {
        0.5 * self.nu_hat()
    }

    /// Long-run mean of Y, `a1/b`.
    pub fn long_run_mean(&self) -> f64 {
        self.a1 / self.b
    }
}

/// Calendar time and the current value of the square-root factor.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProcState {
    pub t: f64,
    pub y: f64,
}

impl ProcState {
    pub fn new(t: f64, y: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::domain("ProcState", format!("t must be >= 0, got {t}")));
        }
        if !(y > 0.0) {
            return Err(Error::domain("ProcState", format!("y must be > 0, got {y}")));
        }
        Ok(ProcState { t, y })
    }

    pub fn at_inception(y: f64) -> Result<Self> {
        Self::new(0.0, y)
    }
}

/// Average index growth `A_t = alpha_tilde e^{eta t}`.
pub fn avg_growth(params: &ModelParams, t: f64) -> f64 {
    params.alpha_tilde * (params.eta * t).exp()
}

/// The CIR-to-squared-Bessel time change `phi(t) = gamma (e^{bt} - 1)/(2b)`,
/// under which `X_{phi(t)} = e^{bt} Y_t` is a squared Bessel process of
/// dimension `delta`.
pub fn time_change(params: &ModelParams, t: f64) -> f64 {
    params.gamma * (params.b * t).exp_m1() / (2.0 * params.b)
}

/// Instantaneous volatility `sigma = sqrt(2 gamma / y)`.
pub fn volatility_from_y(params: &ModelParams, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::domain("volatility_from_y", format!("y must be > 0, got {y}")));
    }
    Ok((2.0 * params.gamma / y).sqrt())
}

/// Squared volatility `v = 2 gamma / y`.
pub fn squared_volatility_from_y(params: &ModelParams, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::domain("squared_volatility_from_y", format!("y must be > 0, got {y}")));
    }
    Ok(2.0 * params.gamma / y)
}

/// Market price of risk `theta = ((eta - b) sqrt(y) + a1/sqrt(y)) / sqrt(2 gamma)`.
///
/// Diverges as y -> 0: risk compensation grows when the index is depressed.
pub fn market_price_of_risk(params: &ModelParams, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::domain("market_price_of_risk", format!("y must be > 0, got {y}")));
    }
    let sy = y.sqrt();
    Ok(((params.eta - params.b) * sy + params.a1 / sy) / (2.0 * params.gamma).sqrt())
}

/// Transition density of a squared Bessel process of dimension `delta > 2`
/// from `x_s` at transformed time `phi_s` to `x_t` at `phi_t`.
pub fn sqb_transition_density(
    delta: f64,
    phi_s: f64,
    x_s: f64,
    phi_t: f64,
    x_t: f64,
) -> Result<f64> {
    if !(delta > 2.0) {
        return Err(Error::domain("sqb_transition_density", format!("delta must be > 2, got {delta}")));
    }
    if !(phi_s >= 0.0 && phi_t > phi_s) {
        return Err(Error::domain(
            "sqb_transition_density",
            format!("need phi_t > phi_s >= 0, got phi_s = {phi_s}, phi_t = {phi_t}"),
        ));
    }
    if !(x_s > 0.0) {
        return Err(Error::domain("sqb_transition_density", format!("x_s must be > 0, got {x_s}")));
    }
    if !(x_t >= 0.0) {
        return Err(Error::domain("sqb_transition_density", format!("x_t must be >= 0, got {x_t}")));
    }
    if x_t == 0.0 {
        return Ok(0.0); // density vanishes at the origin for delta > 2
    }
    let nu_bar = delta / 2.0 - 1.0;
    let dphi = phi_t - phi_s;
    let bess = bessel_i_log(nu_bar, (x_s * x_t).sqrt() / dphi)?;
    let ln_p = -(2.0 * dphi).ln() + 0.5 * nu_bar * (x_t / x_s).ln() - (x_s + x_t) / (2.0 * dphi)
        + bess.ln_abs();
    Ok(ln_p.exp())
}

/// `E[X_phi^beta_tilde | X_0 = x0]` for a squared Bessel process of dimension
/// `delta > 2`, via
/// `(2 phi)^bt e^{-w} Gamma(bt + delta/2)/Gamma(delta/2) 1F1(bt + delta/2, delta/2, w)`
/// with `w = x0/(2 phi)`. Infinite for `beta_tilde <= -delta/2`.
pub fn sqb_moment(delta: f64, x0: f64, phi: f64, beta_tilde: f64) -> Result<f64> {
    if !(delta > 2.0) {
        return Err(Error::domain("sqb_moment", format!("delta must be > 2, got {delta}")));
    }
    if !(x0 > 0.0 && phi > 0.0) {
        return Err(Error::domain("sqb_moment", format!("need x0, phi > 0; got x0 = {x0}, phi = {phi}")));
    }
    if beta_tilde <= -delta / 2.0 {
        return Err(Error::InfiniteMoment { beta_tilde, delta });
    }
    let w = x0 / (2.0 * phi);
    let ctrl = HypSeriesCtrl::large_budget();
    let f = hyp1f1_log(beta_tilde + delta / 2.0, delta / 2.0, w, &ctrl)?;
    let ln_m = beta_tilde * (2.0 * phi).ln() - w + ln_gamma(beta_tilde + delta / 2.0)?
        - ln_gamma(delta / 2.0)?
        + f.value.ln_abs();
    Ok(ln_m.exp())
}

/// CIR transition density `p(T, y, z)` of `Y_T` given `Y_0 = y`.
pub fn cir_transition_density(params: &ModelParams, t_horizon: f64, y: f64, z: f64) -> Result<f64> {
    if !(t_horizon > 0.0 && y > 0.0 && z > 0.0) {
        return Err(Error::domain(
            "cir_transition_density",
            format!("need T, y, z > 0; got T = {t_horizon}, y = {y}, z = {z}"),
        ));
    }
    let (a1, b, g) = (params.a1, params.b, params.gamma);
    let nu = a1 / g - 1.0;
    let sh = (b * t_horizon / 2.0).sinh();
    let th = (b * t_horizon / 2.0).tanh();
    let bess = bessel_i_log(nu, b * (y * z).sqrt() / (g * sh))?;
    let ln_p = b.ln() - (2.0 * g * sh).ln() + (a1 / (2.0 * g) - 0.5) * (z / y).ln()
        + b / (2.0 * g) * (a1 * t_horizon + (y - z) - (y + z) / th)
        + bess.ln_abs();
    Ok(ln_p.exp())
}

/// Stationary density of Y: a gamma law with shape `a1/gamma` and rate
/// `b/gamma`. Under the Section-4 normalization `a1 = b` this is the
/// unit-mean form `(delta/2)^{delta/2} y^{delta/2-1} e^{-(delta/2) y} / Gamma(delta/2)`.
pub fn stationary_density(params: &ModelParams, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::domain("stationary_density", format!("y must be > 0, got {y}")));
    }
    let shape = params.a1 / params.gamma;
    let rate = params.b / params.gamma;
    gamma_pdf(shape, rate, y)
}

/// Unit-mean gamma density with `shape = rate = delta/2`, the stationary law
/// of the normalized index when `a1 = b`.
pub fn stationary_density_unit_mean(delta: f64, y: f64) -> Result<f64> {
    if !(delta > 2.0) {
        return Err(Error::domain("stationary_density_unit_mean", format!("delta must be > 2, got {delta}")));
    }
    if !(y > 0.0) {
        return Err(Error::domain("stationary_density_unit_mean", format!("y must be > 0, got {y}")));
    }
    gamma_pdf(delta / 2.0, delta / 2.0, y)
}

fn gamma_pdf(shape: f64, rate: f64, y: f64) -> Result<f64> {
    let ln_p = shape * rate.ln() + (shape - 1.0) * y.ln() - rate * y - ln_gamma(shape)?;
    Ok(ln_p.exp())
}

/// Mean of `Y_T` given `Y_0 = y`: `y e^{-bT} + (a1/b)(1 - e^{-bT})`.
pub fn cir_mean(params: &ModelParams, y: f64, t_horizon: f64) -> f64 {
    let e = (-params.b * t_horizon).exp();
    y * e + params.long_run_mean() * (1.0 - e)
}

/// Variance of `Y_T` given `Y_0 = y`.
pub fn cir_variance(params: &ModelParams, y: f64, t_horizon: f64) -> f64 {
    let e = (-params.b * t_horizon).exp();
    let s2 = 2.0 * params.gamma;
    y * (s2 / params.b) * e * (1.0 - e) + params.long_run_mean() * (s2 / (2.0 * params.b)) * (1.0 - e) * (1.0 - e)
}

/// `E[1/Y_T | Y_t = y]` through the squared-Bessel route: transport to
/// `X_{phi(t)} = e^{bt} y`, take the -1st moment over `phi(T) - phi(t)`,
/// undo the damping with `e^{bT}`.
pub fn inv_y_expectation(params: &ModelParams, state: &ProcState, t_mat: f64) -> Result<f64> {
    if !(t_mat > state.t) {
        return Err(Error::domain(
            "inv_y_expectation",
            format!("maturity {t_mat} must exceed state time {}", state.t),
        ));
    }
    let dphi = time_change(params, t_mat) - time_change(params, state.t);
    let x = (params.b * state.t).exp() * state.y;
    let m = sqb_moment(params.delta(), x, dphi, -1.0)?;
    Ok((params.b * t_mat).exp() * m)
}

/// Same expectation assembled directly from the printed bond formula
/// (explicit `1F1` form); used as an independent route in the cross-checks.
pub fn inv_y_expectation_direct(
    params: &ModelParams,
    state: &ProcState,
    t_mat: f64,
) -> Result<f64> {
    let c = params.a1 / params.gamma;
    if !(c > 1.0) {
        return Err(Error::domain("inv_y_expectation_direct", format!("requires a1/gamma > 1, got {c}")));
    }
    let dphi = time_change(params, t_mat) - time_change(params, state.t);
    let x = (params.b * state.t).exp() * state.y;
    let w = x / (2.0 * dphi);
    let ctrl = HypSeriesCtrl::large_budget();
    let f = hyp1f1_log(c - 1.0, c, w, &ctrl)?;
    let ln_e = params.b * t_mat - (2.0 * dphi).ln() - w + ln_gamma(c - 1.0)? - ln_gamma(c)?
        + f.value.ln_abs();
    Ok(ln_e.exp())
}
