//! Independent simulation oracle: exact CIR transition sampling, pathwise
//! integrated-inverse functionals, benchmarked payoff estimators, and the
//! dim-0 squared-Bessel explosion demonstrations.
//!
//! Exactness: over a step of size `dt` the factor satisfies
//! `Y_{t+dt} = e^{-b dt} X'` where `X'` follows the squared-Bessel
//! transition from `Y_t` over `phi(dt) = gamma (e^{b dt}-1)/(2b)`, i.e.
//! `X' = phi * chi'^2_delta(Y_t/phi)`. The noncentral chi-square splits as
//! `chi'^2_delta(lambda) = chi^2_{delta-1} + (Z + sqrt(lambda))^2` for
//! `delta >= 1` (squared-Bessel additivity), so each step costs one
//! fixed-shape gamma draw and one normal. The gamma-Poisson mixture is kept
//! for `delta < 1` (the dim-0 demo, where the Poisson atom at zero is the
//! absorption event) and as a cross-checked alternative sampler.
//!
//! Reproducibility: each path's generator is derived from (seed, path index)
//! only, so results are bit-identical for any worker count.

use rand::distributions::Distribution;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::process::ModelParams;

/// Simulation scheme: exact transition law (the oracle default) or Milstein
/// discretization (kept to measure discretization bias, never as oracle).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scheme {
    ExactTransition,
    Milstein,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MCConfig {
    pub n_paths: usize,
    pub steps_per_year: u32,
    pub seed: u64,
    pub n_workers: usize,
    pub scheme: Scheme,
}

impl MCConfig {
    pub fn new(n_paths: usize, steps_per_year: u32, seed: u64) -> Self {
        MCConfig { n_paths, steps_per_year, seed, n_workers: 1, scheme: Scheme::ExactTransition }
    }

    pub fn with_workers(mut self, n: usize) -> Self {
        self.n_workers = n;
        self
    }

    pub fn with_scheme(mut self, s: Scheme) -> Self {
        self.scheme = s;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 1 {
            return Err(Error::InvalidConfig("n_paths must be >= 1".into()));
        }
        if self.steps_per_year < 1 {
            return Err(Error::InvalidConfig("steps_per_year must be >= 1".into()));
        }
        if self.n_workers < 1 {
            return Err(Error::InvalidConfig("n_workers must be >= 1".into()));
        }
        Ok(())
    }
}

/// Mean/standard-error summary of a Monte Carlo estimator.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_effective: usize,
    /// Fraction of paths absorbed at zero; 0 for the delta > 2 real-world runs.
    pub absorbed_fraction: f64,
}

impl MCEstimate {
    /// |mean - reference| in units of the standard error.
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.mean - reference).abs() / self.std_error
    }
}

/// Per-path outputs of the factor simulation: the trapezoid integral of
/// `1/Y` over the step grid and the terminal value.
#[derive(Clone, Copy, Debug)]
pub struct PathFunctionals {
    pub inv_integral: f64,
    pub terminal: f64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream per (seed, path index).
fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut st = seed ^ path.wrapping_mul(0xA076_1D64_78BD_642F);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut st).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

fn in_pool<T: Send>(n_workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n_workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Noncentral chi-square with `df >= 1` via the chi-square + shifted-normal
/// decomposition. `chi2_part` must be `Gamma((df-1)/2, 2)` (or None for df = 1).
#[cfg(test)]
fn sample_ncx2_decomposition<R: Rng>(
    rng: &mut R,
    chi2_part: Option<&Gamma<f64>>,
    lambda: f64,
) -> f64 {
    let g = chi2_part.map_or(0.0, |d| d.sample(rng));
    let z: f64 = StandardNormal.sample(rng);
    let w = z + lambda.sqrt();
    g + w * w
}

/// Noncentral chi-square for any `df >= 0` via the gamma-Poisson mixture:
/// `K ~ Poisson(lambda/2)`, then `Gamma(df/2 + K, 2)`. For `df = 0` the
/// `K = 0` atom is an exact zero (absorption).
pub(crate) fn sample_ncx2_gamma_poisson<R: Rng>(rng: &mut R, df: f64, lambda: f64) -> f64 {
    let k = if lambda > 0.0 {
        Poisson::new(lambda / 2.0).expect("positive lambda").sample(rng)
    } else {
        0.0
    };
    let shape = df / 2.0 + k;
    if shape == 0.0 {
        return 0.0;
    }
    Gamma::new(shape, 2.0).expect("positive shape").sample(rng)
}

/// Simulate `n_paths` exact-transition (or Milstein) paths of Y on the step
/// grid, returning the trapezoid integral of 1/Y and the terminal value for
/// each path. Exact transitions are positivity-preserving by construction.
pub fn simulate_cir_exact(
    params: &ModelParams,
    y0: f64,
    t_horizon: f64,
    cfg: &MCConfig,
) -> Result<Vec<PathFunctionals>> {
    cfg.validate()?;
    if !(y0 > 0.0) {
        return Err(Error::domain("simulate_cir_exact", format!("y0 must be > 0, got {y0}")));
    }
    if !(t_horizon > 0.0) {
        return Err(Error::domain("simulate_cir_exact", format!("T must be > 0, got {t_horizon}")));
    }
    let n_steps = ((cfg.steps_per_year as f64 * t_horizon).ceil() as usize).max(1);
    let dt = t_horizon / n_steps as f64;
    let p = *params;
    let scheme = cfg.scheme;
    let (seed, n_paths) = (cfg.seed, cfg.n_paths);
    in_pool(cfg.n_workers, move || {
        (0..n_paths as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = path_rng(seed, i);
                match scheme {
                    Scheme::ExactTransition => exact_path(&p, y0, dt, n_steps, &mut rng),
                    Scheme::Milstein => milstein_path(&p, y0, dt, n_steps, &mut rng),
                }
            })
            .collect()
    })
}

fn exact_path<R: Rng>(
    params: &ModelParams,
    y0: f64,
    dt: f64,
    n_steps: usize,
    rng: &mut R,
) -> PathFunctionals {
    let (b, g) = (params.b(), params.gamma());
    let delta = params.delta();
    let phi = g * (b * dt).exp_m1() / (2.0 * b);
    let decay = (-b * dt).exp();
    let sqrt_phi = phi.sqrt();
    // X' = phi * chi'^2_delta(y/phi) = chi2_{delta-1}-part + (sqrt(y) + sqrt(phi) Z)^2
    let chi2_part = Gamma::new((delta - 1.0) / 2.0, 2.0 * phi).expect("delta > 2");
    let mut y = y0;
    let mut inv_prev = 1.0 / y0;
    let mut integral = 0.0;
    for _ in 0..n_steps {
        let gpart = chi2_part.sample(rng);
        let z: f64 = StandardNormal.sample(rng);
        let w = y.sqrt() + sqrt_phi * z;
        y = decay * (gpart + w * w);
        let inv = 1.0 / y;
        integral += 0.5 * dt * (inv_prev + inv);
        inv_prev = inv;
    }
    PathFunctionals { inv_integral: integral, terminal: y }
}

fn milstein_path<R: Rng>(
    params: &ModelParams,
    y0: f64,
    dt: f64,
    n_steps: usize,
    rng: &mut R,
) -> PathFunctionals {
    let (a1, b, g) = (params.a1(), params.b(), params.gamma());
    let sqrt_dt = dt.sqrt();
    let mut y = y0;
    let mut inv_prev = 1.0 / y0;
    let mut integral = 0.0;
    for _ in 0..n_steps {
        let z: f64 = StandardNormal.sample(rng);
        let dw = sqrt_dt * z;
        y += (a1 - b * y) * dt + (2.0 * g * y).sqrt() * dw + 0.5 * g * (dw * dw - dt);
        if y < 1e-12 {
            y = 1e-12; // truncation floor; Milstein is bias-measurement only
        }
        let inv = 1.0 / y;
        integral += 0.5 * dt * (inv_prev + inv);
        inv_prev = inv;
    }
    PathFunctionals { inv_integral: integral, terminal: y }
}

/// Reduce a payoff over an existing path set into mean / standard error.
pub fn reduce_payoff(paths: &[PathFunctionals], payoff: impl Fn(&PathFunctionals) -> f64) -> MCEstimate {
    let n = paths.len();
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for p in paths {
        let v = payoff(p);
        sum += v;
        sumsq += v * v;
    }
    let mean = sum / n as f64;
    let var = ((sumsq - sum * sum / n as f64) / (n as f64 - 1.0)).max(0.0);
    MCEstimate {
        mean,
        std_error: (var / n as f64).sqrt(),
        n_effective: n,
        absorbed_fraction: 0.0,
    }
}

/// `E[e^{-mu1 int ds/Y} Y_T^{-alpha}]` by simulation.
pub fn estimate_benchmarked_moment(
    params: &ModelParams,
    y0: f64,
    t_horizon: f64,
    alpha: f64,
    mu1: f64,
    cfg: &MCConfig,
) -> Result<MCEstimate> {
    let paths = simulate_cir_exact(params, y0, t_horizon, cfg)?;
    Ok(reduce_payoff(&paths, |p| (-mu1 * p.inv_integral).exp() * p.terminal.powf(-alpha)))
}

/// `E[(int ds/Y) Y_T^{-alpha}]` by simulation: the primary oracle for the
/// benchmarked integral moment.
pub fn estimate_integral_over_terminal(
    params: &ModelParams,
    y0: f64,
    t_horizon: f64,
    alpha: f64,
    cfg: &MCConfig,
) -> Result<MCEstimate> {
    let paths = simulate_cir_exact(params, y0, t_horizon, cfg)?;
    Ok(reduce_payoff(&paths, |p| p.inv_integral * p.terminal.powf(-alpha)))
}

/// `E[F_0/F_T] = y0 e^{-eta T} E[1/Y_T]`-pathwise; `1 - mean` is the
/// supermartingale gap of the benchmarked savings account, which the
/// closed-form bond reproduces.
pub fn supermartingale_gap(
    params: &ModelParams,
    y0: f64,
    t_horizon: f64,
    cfg: &MCConfig,
) -> Result<MCEstimate> {
    let paths = simulate_cir_exact(params, y0, t_horizon, cfg)?;
    let damp = y0 * (-params.eta() * t_horizon).exp();
    Ok(reduce_payoff(&paths, |p| damp / p.terminal))
}

/// Coarse/fine pair for trapezoid-bias control (same seed, n and 2n steps).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StepRefinement {
    pub coarse: MCEstimate,
    pub fine: MCEstimate,
}

pub fn step_refinement(
    params: &ModelParams,
    y0: f64,
    t_horizon: f64,
    alpha: f64,
    cfg: &MCConfig,
) -> Result<StepRefinement> {
    let fine_cfg = MCConfig { steps_per_year: cfg.steps_per_year * 2, ..*cfg };
    Ok(StepRefinement {
        coarse: estimate_integral_over_terminal(params, y0, t_horizon, alpha, cfg)?,
        fine: estimate_integral_over_terminal(params, y0, t_horizon, alpha, &fine_cfg)?,
    })
}

/// Terminal samples from a stationary start: y0 drawn per path from the
/// gamma law (shape a1/gamma, rate b/gamma).
pub fn simulate_stationary_terminals(
    params: &ModelParams,
    t_horizon: f64,
    cfg: &MCConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let n_steps = ((cfg.steps_per_year as f64 * t_horizon).ceil() as usize).max(1);
    let dt = t_horizon / n_steps as f64;
    let p = *params;
    let (seed, n_paths) = (cfg.seed, cfg.n_paths);
    let start = Gamma::new(p.a1() / p.gamma(), p.gamma() / p.b())
        .map_err(|e| Error::InvalidConfig(format!("stationary law: {e}")))?;
    in_pool(cfg.n_workers, move || {
        (0..n_paths as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = path_rng(seed, i);
                let y0 = start.sample(&mut rng);
                exact_path(&p, y0, dt, n_steps, &mut rng).terminal
            })
            .collect()
    })
}

/// Single daily-sampled index path `F_t = alpha_tilde e^{eta t} Y_t`, used to
/// generate calibration fixtures.
pub fn simulate_index_series(
    params: &ModelParams,
    y0: f64,
    years: f64,
    steps_per_year: u32,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if !(y0 > 0.0 && years > 0.0 && steps_per_year >= 1) {
        return Err(Error::InvalidConfig(format!(
            "need y0 > 0, years > 0, steps_per_year >= 1; got ({y0}, {years}, {steps_per_year})"
        )));
    }
    let n_steps = (steps_per_year as f64 * years).ceil() as usize;
    let dt = years / n_steps as f64;
    let (b, g) = (params.b(), params.gamma());
    let delta = params.delta();
    let phi = g * (b * dt).exp_m1() / (2.0 * b);
    let decay = (-b * dt).exp();
    let sqrt_phi = phi.sqrt();
    let chi2_part = Gamma::new((delta - 1.0) / 2.0, 2.0 * phi).expect("delta > 2");
    let mut rng = path_rng(seed, 0);
    let mut y = y0;
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push((0.0, params.alpha_tilde() * y0));
    for k in 1..=n_steps {
        let gpart = chi2_part.sample(&mut rng);
        let z: f64 = StandardNormal.sample(&mut rng);
        let w = y.sqrt() + sqrt_phi * z;
        y = decay * (gpart + w * w);
        let t = k as f64 * dt;
        out.push((t, params.alpha_tilde() * (params.eta() * t).exp() * y));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Risk-neutral dim-0 demonstrations
// ---------------------------------------------------------------------------

/// The time change of the risk-neutral index dynamics
/// `dF = sqrt(2 gamma alpha_tilde e^{eta t} F) dZ`:
/// `phi_q(t) = gamma alpha_tilde (e^{eta t} - 1) / (2 eta)`.
pub fn q_time_change(params: &ModelParams, t: f64) -> f64 {
    params.gamma() * params.alpha_tilde() * (params.eta() * t).exp_m1() / (2.0 * params.eta())
}

/// Analytic probability that a dim-0 squared Bessel process started at `x0`
/// is absorbed by transformed time `phi`: `exp(-x0/(2 phi))`.
pub fn dim0_absorption_probability(x0: f64, phi: f64) -> f64 {
    (-x0 / (2.0 * phi)).exp()
}

#[derive(Clone, Debug, Serialize)]
pub struct AbsorptionDemo {
    /// mean = absorbed fraction (binomial standard error).
    pub estimate: MCEstimate,
    pub analytic_absorption: f64,
}

/// Simulate the dim-0 squared Bessel index under the risk-neutral dynamics
/// with an absorbing boundary at zero and report the absorbed fraction.
///
/// Each step uses the exact dim-0 transition (gamma-Poisson with its zero
/// atom), so absorption is an exact event, not a numerical threshold.
pub fn rn_absorption_demo(
    x0: f64,
    t_horizon: f64,
    params: &ModelParams,
    cfg: &MCConfig,
) -> Result<AbsorptionDemo> {
    cfg.validate()?;
    if !(x0 > 0.0 && t_horizon > 0.0) {
        return Err(Error::domain("rn_absorption_demo", format!("need x0, T > 0; got ({x0}, {t_horizon})")));
    }
    let n_steps = ((cfg.steps_per_year as f64 * t_horizon).ceil() as usize).max(1);
    let p = *params;
    let (seed, n_paths) = (cfg.seed, cfg.n_paths);
    let dphis: Vec<f64> = (0..n_steps)
        .map(|k| {
            let t0 = t_horizon * k as f64 / n_steps as f64;
            let t1 = t_horizon * (k + 1) as f64 / n_steps as f64;
            q_time_change(&p, t1) - q_time_change(&p, t0)
        })
        .collect();
    let absorbed: u64 = in_pool(cfg.n_workers, {
        let dphis = &dphis;
        move || {
            (0..n_paths as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = path_rng(seed, i);
                    let mut x = x0;
                    for &dphi in dphis {
                        let lambda = x / dphi;
                        x = dphi * sample_ncx2_gamma_poisson(&mut rng, 0.0, lambda);
                        if x == 0.0 {
                            return 1u64; // absorbed; dim-0 stays at zero
                        }
                    }
                    0u64
                })
                .sum()
        }
    })?;
    let n = cfg.n_paths as f64;
    let frac = absorbed as f64 / n;
    let analytic = dim0_absorption_probability(x0, q_time_change(&p, t_horizon));
    Ok(AbsorptionDemo {
        estimate: MCEstimate {
            mean: frac,
            std_error: (frac * (1.0 - frac) / n).sqrt(),
            n_effective: cfg.n_paths,
            absorbed_fraction: frac,
        },
        analytic_absorption: analytic,
    })
}

/// Running-mean checkpoints of the terminal squared volatility
/// `v_T = 2 gamma alpha_tilde e^{eta T} / X_T` over surviving paths.
#[derive(Clone, Debug, Serialize)]
pub struct DivergenceDiag {
    pub checkpoints: Vec<(usize, f64)>,
    pub survivor_fraction: f64,
    /// True when the running mean is still drifting upward at the last
    /// checkpoint: the empirical signature of an infinite expectation.
    pub diverging: bool,
}

/// Sample `X_T` in a single exact dim-0 transition per path (the transition
/// law composes exactly, so no step grid is needed for a terminal quantity)
/// and track the running mean of `v_T` over survivors.
pub fn rn_volatility_divergence(
    x0: f64,
    t_horizon: f64,
    params: &ModelParams,
    n_paths: usize,
    seed: u64,
) -> Result<DivergenceDiag> {
    if !(x0 > 0.0 && t_horizon > 0.0 && n_paths >= 100) {
        return Err(Error::InvalidConfig(format!(
            "need x0 > 0, T > 0, n_paths >= 100; got ({x0}, {t_horizon}, {n_paths})"
        )));
    }
    let phi = q_time_change(params, t_horizon);
    let scale = 2.0 * params.gamma() * params.alpha_tilde() * (params.eta() * t_horizon).exp();
    let mut rng = path_rng(seed, u64::MAX); // sequential: running means are order-sensitive
    let mut checkpoints = Vec::new();
    let marks = [n_paths / 100, n_paths / 10, n_paths / 2, n_paths];
    let mut sum = 0.0;
    let mut survivors = 0usize;
    for i in 1..=n_paths {
        let x = phi * sample_ncx2_gamma_poisson(&mut rng, 0.0, x0 / phi);
        if x > 0.0 {
            survivors += 1;
            sum += scale / x;
        }
        if marks.contains(&i) && survivors > 0 {
            checkpoints.push((i, sum / survivors as f64));
        }
    }
    let diverging = checkpoints.len() >= 3 && {
        let last = checkpoints[checkpoints.len() - 1].1;
        last > checkpoints[0].1 && last > checkpoints[checkpoints.len() / 2].1
    };
    Ok(DivergenceDiag {
        checkpoints,
        survivor_fraction: survivors as f64 / n_paths as f64,
        diverging,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{cir_mean, cir_variance};

    fn cfg(n: usize, spy: u32, seed: u64) -> MCConfig {
        MCConfig::new(n, spy, seed)
    }

    #[test]
    fn config_validation() {
        assert!(cfg(0, 1, 1).validate().is_err());
        assert!(cfg(1, 0, 1).validate().is_err());
        assert!(cfg(1, 1, 1).with_workers(0).validate().is_err());
        assert!(cfg(10, 10, 1).validate().is_ok());
    }

    #[test]
    fn one_step_marginal_mean_and_variance() {
        let p = ModelParams::section4();
        let paths = simulate_cir_exact(&p, 0.3, 0.5, &cfg(200_000, 2, 42)).unwrap();
        let est = reduce_payoff(&paths, |pf| pf.terminal);
        let expect = cir_mean(&p, 0.3, 0.5);
        assert!(
            est.z_score(expect) < 3.0,
            "mean {} vs {} (z = {})",
            est.mean,
            expect,
            est.z_score(expect)
        );
        let var_est = reduce_payoff(&paths, |pf| (pf.terminal - est.mean).powi(2));
        let expect_var = cir_variance(&p, 0.3, 0.5);
        assert!(var_est.z_score(expect_var) < 4.0, "var {} vs {}", var_est.mean, expect_var);
    }

    #[test]
    fn paths_stay_positive() {
        let p = ModelParams::section4();
        let paths = simulate_cir_exact(&p, 0.05, 2.0, &cfg(20_000, 50, 7)).unwrap();
        assert!(paths.iter().all(|pf| pf.terminal > 0.0));
    }

    #[test]
    fn bit_reproducible_across_worker_counts() {
        let p = ModelParams::section4();
        let a = simulate_cir_exact(&p, 0.3, 0.3, &cfg(2_000, 100, 99).with_workers(1)).unwrap();
        let b = simulate_cir_exact(&p, 0.3, 0.3, &cfg(2_000, 100, 99).with_workers(4)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.terminal.to_bits(), y.terminal.to_bits());
            assert_eq!(x.inv_integral.to_bits(), y.inv_integral.to_bits());
        }
        // and different seeds differ
        let c = simulate_cir_exact(&p, 0.3, 0.3, &cfg(2_000, 100, 100)).unwrap();
        assert!(a[0].terminal != c[0].terminal);
    }

    #[test]
    fn constant_payoff_has_zero_error() {
        let p = ModelParams::section4();
        let est = estimate_benchmarked_moment(&p, 0.3, 0.5, 0.0, 0.0, &cfg(1_000, 10, 3)).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn fast_mean_reversion_concentrates_at_long_run_mean() {
        let p = ModelParams::new(1.0, 6.0, 6.0, 6.0, 0.0137).unwrap();
        let paths = simulate_cir_exact(&p, 0.3, 2.0, &cfg(5_000, 200, 11)).unwrap();
        let est = reduce_payoff(&paths, |pf| pf.terminal);
        assert!((est.mean - p.long_run_mean()).abs() < 0.05);
    }

    #[test]
    fn gamma_poisson_and_decomposition_agree_in_law() {
        // two-sample Kolmogorov-Smirnov at the operating dimension
        let delta = 15.007299270072993;
        let lambda = 3.7;
        let n = 100_000;
        let mut rng = path_rng(5, 1);
        let chi2 = Gamma::new((delta - 1.0) / 2.0, 2.0).unwrap();
        let mut a: Vec<f64> =
            (0..n).map(|_| sample_ncx2_decomposition(&mut rng, Some(&chi2), lambda)).collect();
        let mut b: Vec<f64> =
            (0..n).map(|_| sample_ncx2_gamma_poisson(&mut rng, delta, lambda)).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut d: f64 = 0.0;
        let (mut i, mut j) = (0usize, 0usize);
        while i < n && j < n {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 - j as f64).abs() / n as f64);
        }
        // 1% two-sample critical value: 1.63 sqrt(2/n)
        let crit = 1.63 * (2.0 / n as f64).sqrt();
        assert!(d < crit, "KS statistic {d} exceeds {crit}");
    }

    #[test]
    fn dim0_absorption_matches_analytic() {
        let p = ModelParams::section4();
        let t = 1.0;
        let phi = q_time_change(&p, t);
        let x0 = 1.4 * phi; // absorption probability e^{-0.7} ~ 0.497
        let demo = rn_absorption_demo(x0, t, &p, &cfg(20_000, 252, 17)).unwrap();
        assert!(
            demo.estimate.z_score(demo.analytic_absorption) < 3.0,
            "absorbed {} vs analytic {} (z = {})",
            demo.estimate.mean,
            demo.analytic_absorption,
            demo.estimate.z_score(demo.analytic_absorption)
        );
        // large x0: absorption vanishes
        let far = rn_absorption_demo(100.0 * phi, t, &p, &cfg(2_000, 52, 17)).unwrap();
        assert!(far.estimate.mean < 0.01);
    }

    #[test]
    fn milstein_close_to_exact_at_fine_steps() {
        let p = ModelParams::section4();
        let exact = estimate_integral_over_terminal(&p, 0.3, 0.5, 1.0, &cfg(50_000, 500, 23)).unwrap();
        let mil = estimate_integral_over_terminal(
            &p,
            0.3,
            0.5,
            1.0,
            &cfg(50_000, 500, 23).with_scheme(Scheme::Milstein),
        )
        .unwrap();
        let tol = 4.0 * (exact.std_error + mil.std_error);
        assert!(
            (exact.mean - mil.mean).abs() < tol.max(0.01 * exact.mean),
            "exact {} vs milstein {}",
            exact.mean,
            mil.mean
        );
    }
}
