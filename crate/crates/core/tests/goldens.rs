//! Regression values for Cantor truncations and point-mass perturbations.

use widom_core::asymptotics::{frequency_vector, point_mass_stability};
use widom_core::interval_sets::{make_cantor, sodin_criterion, CantorSpec, IntervalSet};
use widom_core::jacobi::recurrence_auto;
use widom_core::measure::{build_measure, WeightSpec};
use widom_core::potential::equilibrium_auto;

fn cantor(kappas: Vec<f64>) -> CantorSpec {
    CantorSpec::new(4.0, kappas, -2.0).unwrap()
}

#[test]
fn cantor_generation_two_frequencies() {
    let eq = equilibrium_auto(&make_cantor(&cantor(vec![0.25, 0.25]), 2).unwrap()).unwrap();
    let omegas = frequency_vector(&eq).omegas;
    let golden = [0.7020727323349213, 0.5, 0.2979272676650785];
    assert_eq!(omegas.len(), 3);
    for (w, g) in omegas.iter().zip(golden) {
        assert!((w - g).abs() < 1e-10, "{omegas:?}");
    }
    // symmetric set: omega_j + omega_{4-j} = 1
    assert!((omegas[0] + omegas[2] - 1.0).abs() < 1e-12);
    assert!((eq.capacity() - 0.9512579052494451).abs() < 1e-10);
}

#[test]
fn sodin_sums_grow_with_shrinking_increments() {
    let spec = cantor((1..=8).map(|j| 0.25f64.powi(j)).collect());
    let golden = [
        0.6666666666666666,
        1.5375963529895744,
        2.326759442932467,
        3.023606712571408,
        3.6186995394342434,
        4.112869453492149,
        4.51441151310775,
        4.835241554739617,
    ];
    let values: Vec<f64> = (1..=8).map(|g| sodin_criterion(&make_cantor(&spec, g).unwrap())).collect();
    for (v, g) in values.iter().zip(golden) {
        assert!((v - g).abs() < 1e-12, "{values:?}");
    }
    let steps: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(steps.windows(2).all(|s| s[1] < s[0]), "{steps:?}");
}

#[test]
fn cantor_carleson_sums_at_gap_midpoints() {
    let spec = cantor((1..=5).map(|j| 0.25f64.powi(j)).collect());
    let golden = [0.0, 0.04200563502459799, 0.05619081947756906, 0.06045508087268058, 0.06165240386439126];
    for (g, want) in (1..=5).zip(golden) {
        let set = make_cantor(&spec, g).unwrap();
        let eq = equilibrium_auto(&set).unwrap();
        let points: Vec<f64> = set.gaps().iter().map(|&(a, b)| 0.5 * (a + b)).collect();
        let got = eq.carleson_sum(&points).unwrap();
        assert!((got - want).abs() < 1e-9, "generation {g}: {got}");
    }
}

#[test]
fn masses_on_a_two_band_set_move_along_the_isospectral_torus() {
    // {[-2, -0.5], [0.5, 2]} is the preimage of an interval under a quadratic, so
    // its coefficients are 2-periodic with p_n p_{n+1} = cap^2 and q_n + q_{n+1} = 0.
    let set = IntervalSet::new(vec![(-2.0, -0.5), (0.5, 2.0)]).unwrap();
    let cap2 = equilibrium_auto(&set).unwrap().capacity().powi(2);
    let base = build_measure(&set, &WeightSpec::Semicircle {}, &[]).unwrap();
    let c = recurrence_auto(&base, 160).unwrap().coefficients;
    assert!((c.p[150] - 0.75).abs() < 1e-12 && (c.p[151] - 1.25).abs() < 1e-12);

    for (x, golden) in [(0.0, 0.5), (3.0, 0.4960783708)] {
        let s = point_mass_stability(&base, (x, 0.05), 160, 80).unwrap();
        // the mass shifts the phase; the deviation does not decay
        assert!((s.deviation() - golden).abs() < 1e-8, "x = {x}: {}", s.deviation());
        let moved = recurrence_auto(&base.with_mass(x, 0.05).unwrap(), 160).unwrap().coefficients;
        for n in 80..159 {
            assert!((moved.p[n] * moved.p[n + 1] - cap2).abs() < 1e-9, "x = {x}, n = {n}");
            assert!((moved.q[n] + moved.q[n + 1]).abs() < 1e-9, "x = {x}, n = {n}");
        }
    }
}
