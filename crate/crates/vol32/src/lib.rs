//! Pricing and hedging of variance swaps on a diversified equity index under
//! the real-world 3/2 volatility model.
//!
//! The index is modeled as `F_t = A_t * Y_t` with deterministic growth
//! `A_t = alpha_tilde * exp(eta t)` and a square-root (CIR) factor
//! `dY = (a1 - b Y) dt + sqrt(2 gamma Y) dW` of dimension `delta = 2 a1/gamma > 2`.
//! Squared volatility is `v_t = 2 gamma / Y_t`, which follows 3/2 dynamics.
//! Payoffs are priced under the real-world measure with the index itself as
//! numeraire, so everything reduces to benchmarked moments of `Y`:
//! the zero-coupon bond is `E[1/Y_T]` and the variance leg is
//! `E[(int_0^T ds/Y_s) / Y_T]`, both available in closed form through
//! confluent hypergeometric functions evaluated in the log domain.
//!
//! Module map:
//! - [`specfun`]: overflow-safe gamma/Bessel/hypergeometric kernels and their
//!   parameter derivatives ([`logscaled::LogScaled`] arithmetic).
//! - [`process`]: CIR/squared-Bessel densities, moments, and the time change.
//! - [`pricing`]: bond, Laplace functional, benchmarked integral moment,
//!   fair strike and swap value.
//! - [`greeks`]: exact delta/vega with finite-difference validators.
//! - [`montecarlo`]: exact-transition simulation oracle and the
//!   risk-neutral explosion demonstrations.
//! - [`calibration`]: parameter estimation from an index price series.
//! - [`diagnostics`]: discrete realized variance and the log-contract
//!   expansion decomposition.

pub mod calibration;
pub mod diagnostics;
pub mod error;
pub mod greeks;
pub mod logscaled;
pub mod montecarlo;
pub mod pricing;
pub mod process;
pub mod specfun;

pub use error::{Error, Result};
pub use logscaled::LogScaled;
pub use process::{ModelParams, ProcState};
