//! Cross-route identities between independent closed forms, the
//! finite-difference gate on the mu1-derivative, the density consistency of
//! the CIR / squared-Bessel time change, and quadrature checks.

mod common;

use common::simpson;
use vol32::pricing::{
    benchmarked_integral_moment, central_fd_mu1, central_fd_mu1_richardson, fair_strike,
    laplace_functional, zcb_price, PricingInputs,
};
use vol32::process::{
    cir_mean, cir_transition_density, inv_y_expectation, inv_y_expectation_direct, sqb_moment,
    sqb_transition_density, stationary_density, time_change, ModelParams, ProcState,
};

fn section4() -> ModelParams {
    ModelParams::section4()
}

fn inputs(y: f64, alpha: f64) -> PricingInputs {
    PricingInputs::new(section4(), ProcState::at_inception(y).unwrap(), alpha).unwrap()
}

const GRID_T: [f64; 6] = [0.1, 0.25, 0.5, 1.0, 2.0, 5.0];
const GRID_Y: [f64; 4] = [0.1, 0.3, 1.0, 3.0];

#[test]
fn bond_three_routes_agree_on_24_point_grid() {
    // E[1/Y_T] three ways: Laplace functional at mu1 = 0 (sinh form), the
    // squared-Bessel -1st moment, and the explicit printed 1F1 bond form
    let p = section4();
    for &t in &GRID_T {
        for &y in &GRID_Y {
            let state = ProcState::at_inception(y).unwrap();
            let r1 = laplace_functional(&inputs(y, 1.0), t, 0.0).unwrap().to_real();
            let r2 = inv_y_expectation(&p, &state, t).unwrap();
            let r3 = inv_y_expectation_direct(&p, &state, t).unwrap();
            let worst = ((r1 - r2) / r2).abs().max(((r1 - r3) / r3).abs()).max(((r2 - r3) / r3).abs());
            assert!(worst <= 1e-9, "routes at (T={t}, y={y}): {r1} / {r2} / {r3}");
        }
    }
    // frozen 60-digit pins at the grid corners
    for (t, y, expect) in [
        (0.1, 0.1, 9.3828848180487928),
        (0.1, 3.0, 0.33592862941486481),
        (5.0, 0.1, 2.4936822432650324),
        (5.0, 3.0, 0.47687471496248945),
    ] {
        let state = ProcState::at_inception(y).unwrap();
        let v = inv_y_expectation(&p, &state, t).unwrap();
        assert!(((v - expect) / expect).abs() < 1e-10, "corner ({t},{y}): {v} vs {expect}");
    }
}

#[test]
fn moment_equals_negative_mu1_derivative() {
    // Richardson one-sided FD of the Laplace functional, rel 1e-5
    for &t in &[0.25, 1.0, 2.0] {
        for &y in &[0.3, 1.0] {
            let i = inputs(y, 1.0);
            let analytic = benchmarked_integral_moment(&i, t).unwrap();
            let fd = central_fd_mu1_richardson(&i, t, 1e-4).unwrap();
            assert!(
                ((analytic - fd) / fd).abs() <= 1e-5,
                "FD gate at (T={t}, y={y}): analytic {analytic}, fd {fd}"
            );
        }
    }
}

#[test]
fn fd_stencil_order_and_positivity() {
    let i = inputs(0.3, 1.0);
    let d3 = central_fd_mu1(&i, 1.0, 1e-3).unwrap();
    let d4 = central_fd_mu1(&i, 1.0, 1e-4).unwrap();
    let exact = benchmarked_integral_moment(&i, 1.0).unwrap();
    // monotone decreasing Laplace transform: -dL/dmu1 > 0
    assert!(d3 > 0.0 && d4 > 0.0);
    // second-order stencil: error drops ~100x for a 10x smaller h
    let (e3, e4) = ((d3 - exact).abs(), (d4 - exact).abs());
    assert!(e4 < e3 / 20.0, "stencil order: errors {e3:.3e} vs {e4:.3e}");
}

#[test]
fn degenerate_alpha_zero_matches_quadrature() {
    // alpha = 0: E[int_0^T ds/Y_s] = int_0^T E[1/Y_s] ds
    let p = section4();
    let t_mat = 1.0;
    let moment = benchmarked_integral_moment(&inputs(0.3, 0.0), t_mat).unwrap();
    assert!(((moment - 3.1054279497814171_f64) / moment).abs() < 1e-9, "frozen: {moment}");
    let state = ProcState::at_inception(0.3).unwrap();
    let integrand = |s: f64| {
        if s <= 0.0 {
            1.0 / 0.3
        } else {
            inv_y_expectation(&p, &state, s).unwrap()
        }
    };
    let quad = simpson(integrand, 0.0, t_mat, 512);
    assert!(((moment - quad) / quad).abs() < 1e-6, "quadrature: {moment} vs {quad}");
}

#[test]
fn time_change_density_consistency() {
    // CIR density == transported squared-Bessel density, rel 1e-9
    let p = section4();
    let delta = p.delta();
    for &t in &[0.25, 1.0, 2.0] {
        let phi_t = time_change(&p, t);
        let ebt = (p.b() * t).exp();
        for &z in &[0.1, 0.3, 0.5, 1.0, 2.0] {
            let direct = cir_transition_density(&p, t, 0.3, z).unwrap();
            let transported = sqb_transition_density(delta, 0.0, 0.3, phi_t, ebt * z).unwrap() * ebt;
            assert!(
                ((direct - transported) / direct).abs() <= 1e-9,
                "density at (T={t}, z={z}): {direct} vs {transported}"
            );
        }
    }
}

#[test]
fn cir_density_normalization_and_mean_by_quadrature() {
    let p = section4();
    let t = 1.0;
    let f = |z: f64| cir_transition_density(&p, t, 0.3, z).unwrap();
    let mass = simpson(f, 1e-9, 12.0, 4096);
    assert!((mass - 1.0).abs() <= 1e-8, "normalization: {mass}");
    let mean = simpson(|z| z * f(z), 1e-9, 12.0, 4096);
    let expect = cir_mean(&p, 0.3, t);
    assert!((mean - expect).abs() <= 1e-8, "mean {mean} vs {expect}");
}

#[test]
fn sqb_density_normalization_and_mean() {
    let p = section4();
    let (delta, phi) = (15.0, time_change(&p, 0.25));
    let f = |x: f64| sqb_transition_density(delta, 0.0, 0.3, phi, x).unwrap();
    let mass = simpson(f, 0.0, 1.2, 4096);
    assert!((mass - 1.0).abs() <= 1e-8, "normalization: {mass}");
    let mean = simpson(|x| x * f(x), 0.0, 1.2, 4096);
    let expect = 0.3 + delta * phi;
    assert!((mean - expect).abs() <= 1e-8, "mean {mean} vs {expect}");
}

#[test]
fn sqb_inverse_moment_matches_transported_density_quadrature() {
    // E[X_phi^{-1}] against quadrature of z^{-1} x the CIR density moved to
    // squared-Bessel coordinates
    let p = section4();
    let t = 0.25;
    let phi = time_change(&p, t);
    let ebt = (p.b() * t).exp();
    let moment = sqb_moment(p.delta(), 0.3, phi, -1.0).unwrap();
    // X_phi = e^{bT} Y_T: E[1/X] = e^{-bT} E[1/Y] via the CIR density
    let quad = simpson(
        |y: f64| cir_transition_density(&p, t, 0.3, y).unwrap() / (ebt * y),
        1e-6,
        2.0,
        8192,
    );
    assert!(((moment - quad) / moment).abs() <= 1e-8, "{moment} vs {quad}");
}

#[test]
fn stationary_density_is_long_horizon_limit() {
    // a1 = b: the T -> infinity transition density converges to the
    // unit-mean gamma law; checked pointwise at T = 200 years
    let p = section4();
    for &y in &[0.5, 1.0, 1.5] {
        let lim = cir_transition_density(&p, 200.0, 0.3, y).unwrap();
        let stat = stationary_density(&p, y).unwrap();
        assert!(((lim - stat) / stat).abs() <= 1e-6, "at y={y}: {lim} vs {stat}");
    }
}

#[test]
fn fair_strike_continuous_in_maturity_and_monotone_in_y() {
    let p = section4();
    let s = ProcState::at_inception(0.3).unwrap();
    let mut prev = fair_strike(&p, &s, 0.05).unwrap();
    let mut t = 0.05;
    while t < 3.0 {
        let next = fair_strike(&p, &s, t + 0.05).unwrap();
        assert!(
            (next - prev).abs() < 0.01 * prev,
            "jump in K_v near T={t}: {prev} -> {next}"
        );
        prev = next;
        t += 0.05;
    }
    for &t in &[0.25, 1.0, 2.0] {
        let mut last = f64::INFINITY;
        for &y in &[0.1, 0.3, 1.0, 3.0] {
            let k = fair_strike(&p, &ProcState::at_inception(y).unwrap(), t).unwrap();
            assert!(k < last, "K_v not decreasing in y at T={t}");
            assert!(k > 0.0);
            last = k;
        }
    }
}

#[test]
fn bond_ratio_consistent_with_laplace_route() {
    // zcb ratio * A_T = E[1/Y_T] from the Laplace route, any state time
    let p = section4();
    let state = ProcState::new(0.5, 0.42).unwrap();
    let t = 2.0;
    let bond = zcb_price(&p, &state, t).unwrap();
    // horizon tau = T - t with the same y, by time homogeneity
    let tau_inputs =
        PricingInputs::new(p, ProcState::at_inception(0.42).unwrap(), 1.0).unwrap();
    let e_inv = laplace_functional(&tau_inputs, t - 0.5, 0.0).unwrap().to_real();
    let f_t = 0.248 * (0.1028_f64 * 0.5).exp() * 0.42;
    let expect = f_t / (0.248 * (0.1028_f64 * t).exp()) * e_inv;
    assert!(((bond.price - expect) / expect).abs() < 1e-10, "{} vs {expect}", bond.price);
    assert!(bond.price > 0.0 && bond.price <= 1.0);
}
