#![allow(clippy::excessive_precision, clippy::needless_range_loop)]

use std::f64::consts::PI;

use harper_phase::entropy::{
    entropy_profile, entropy_vs_energy, rank_correlation, spectrum_entropy, state_entropies,
    state_iprs, uniform_state_entropy,
};
use harper_phase::fidelity::{
    fidelity_susceptibility, fs_finite_difference, metric_tensor, Direction,
};
use harper_phase::model::{Boundary, FibonacciApproximant, ModelPoint};
use harper_phase::scaling::{find_peak, PeakPath};
use harper_phase::spectrum::{ground_state, solve};
use harper_phase::verify::richardson_ratio;

fn point(lambda: f64, mu: f64, m: u32) -> ModelPoint {
    ModelPoint::new(lambda, mu, FibonacciApproximant::new(m).unwrap()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Two sites, one bond: `H = [[-λ cos k, t], [t*, λ cos k]]` with
/// `t = -(1 + μ e^{i(π/2 - k)})`. The metric of the lower level follows from
/// the Bloch vector `d = (Re t, -Im t, -λ cos k)`.
fn two_site_metric(lambda: f64, mu: f64, k: f64) -> [[f64; 2]; 2] {
    let (s, c) = (PI / 2.0 - k).sin_cos();
    let d = [-(1.0 + mu * c), mu * s, -lambda * k.cos()];
    let dd = [[0.0, 0.0, -k.cos()], [-c, s, 0.0]];
    let dot = |a: &[f64; 3], b: &[f64; 3]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let d2 = dot(&d, &d);
    let mut g = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            g[a][b] = (dot(&dd[a], &dd[b]) - dot(&d, &dd[a]) * dot(&d, &dd[b]) / d2) / (4.0 * d2);
        }
    }
    g
}

#[test]
fn two_site_metric_matches_closed_form() {
    for &(l, m, k) in &[(0.7, 0.3, 0.0), (1.9, 1.4, 0.4), (0.2, 1.7, 2.5), (3.0, 0.05, 5.9)] {
        let p = point(l, m, 2).with_ky(k).unwrap();
        let g = metric_tensor(&p, &solve(&p).unwrap()).unwrap();
        let exact = two_site_metric(l, m, k);
        let scale = exact.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
        for a in 0..2 {
            for b in 0..2 {
                assert!(
                    (g.g[a][b] - exact[a][b]).abs() <= 1e-12 * scale,
                    "({l}, {m}, {k}) g[{a}][{b}] = {} vs {}",
                    g.g[a][b],
                    exact[a][b]
                );
            }
        }
    }
}

#[test]
fn perturbative_and_finite_difference_agree_at_the_mmt_point() {
    let p = point(1.0, 1.0, 9);
    let chi = fidelity_susceptibility(&metric_tensor(&p, &solve(&p).unwrap()).unwrap(), Direction::MU);
    let fd = fs_finite_difference(&p, Direction::MU, 1e-4).unwrap();
    assert!(rel(fd, chi) <= 0.01, "{fd} vs {chi}");
}

#[test]
fn finite_difference_converges_at_second_order() {
    for &(l, m, d) in &[(1.0, 0.5, Direction::MU), (3.0, 0.4, Direction::LAMBDA), (0.6, 1.6, Direction::MU)] {
        let r = richardson_ratio(&point(l, m, 9), d, 1e-3).unwrap();
        assert!((r - 4.0).abs() < 0.5, "({l}, {m}): ratio {r}");
    }
}

#[test]
fn free_ring_states_are_uniform() {
    let ring = point(0.0, 0.0, 12).with_boundary(Boundary::Periodic);
    let es = solve(&ring).unwrap();
    let expected = uniform_state_entropy(233);
    for e in state_entropies(&es).unwrap() {
        assert!((e - expected).abs() < 1e-6);
    }
    assert!((spectrum_entropy(&es).unwrap().value - expected).abs() < 1e-6);
}

#[test]
fn entropy_falls_as_ipr_grows() {
    let es = solve(&point(2.0, 1.0, 12)).unwrap();
    let rho = rank_correlation(&state_entropies(&es).unwrap(), &state_iprs(&es).unwrap()).unwrap();
    assert!(rho < -0.9, "{rho}");
}

#[test]
fn entropy_vs_energy_is_sorted() {
    let es = solve(&point(2.0, 1.0, 10)).unwrap();
    let pairs = entropy_vs_energy(&es).unwrap();
    assert_eq!(pairs.len(), 89);
    assert!(pairs.windows(2).all(|w| w[0].0 <= w[1].0));
}

#[test]
fn ground_state_entropy_separates_metal_and_insulator() {
    let metal = ground_state(&solve(&point(1.0, 0.5, 15)).unwrap()).unwrap();
    assert!(entropy_profile(&metal.amplitudes).unwrap().state_entropy_scaled > 0.8);
    let insulator = solve(&point(3.0, 0.75, 15)).unwrap();
    assert!(spectrum_entropy(&insulator).unwrap().value < 0.5);
}

#[test]
fn mit_peak_sits_near_the_critical_coupling() {
    let path = PeakPath { base: point(2.0, 0.5, 12), direction: Direction::LAMBDA };
    let peak = find_peak(|q| path.sample(q), (-0.3, 0.3), 1e-8).unwrap();
    assert!(peak.q_max.abs() < 0.05, "{peak:?}");
    assert!(peak.refinement_width <= 1e-8);
}

// Frozen outputs of the current implementation; any change here is a behaviour change.
#[test]
fn regression_values() {
    let p = point(1.0, 0.5, 9);
    let es = solve(&p).unwrap();
    let g = metric_tensor(&p, &es).unwrap();
    assert!(rel(g.lambda_lambda(), 7.28815899461449507e-2) < 1e-9);
    assert!(rel(g.lambda_mu(), -1.48671215726165779e-2) < 1e-9);
    assert!(rel(g.mu_mu(), 2.90904305096990556e-1) < 1e-9);
    assert!(rel(es.eigenvalues()[0], -2.19642701910580396) < 1e-12);
    assert!(rel(spectrum_entropy(&es).unwrap().value, 1.11053476892690761) < 1e-10);
    let bicritical = solve(&point(2.0, 1.0, 12)).unwrap();
    assert!(rel(spectrum_entropy(&bicritical).unwrap().value, 8.83080935941658929e-1) < 1e-10);
    let mmt = point(1.0, 1.0, 9);
    let chi = fidelity_susceptibility(&metric_tensor(&mmt, &solve(&mmt).unwrap()).unwrap(), Direction::MU);
    assert!(rel(chi, 8.06631574647097693) < 1e-9);
}
