//! Independent oracles for the derived reference values: symbolic word
//! counting for the doubling growth rate, the radius recursion for the
//! annulus attractor, and the closed-form return time.

use std::f64::consts::TAU;

use impulsive::entropy::{greedy_separated, SeparationParams};
use impulsive::systems::{annulus, doubling_suspension};

/// Symbolic oracle: two base points of the doubling map stay within angular
/// distance `u` up to time `T` roughly when their binary itineraries agree
/// for `floor(T) + log2(1/u)` digits, so the separated count tracks the
/// number of distinct itinerary words of that length. The greedy counts and
/// the word counts must grow at the same rate (ratio pinned in a constant
/// band across the horizon grid).
#[test]
fn doubling_counts_track_symbolic_word_counts() {
    let ex = doubling_suspension();
    let n: usize = 1 << 10;
    let sample = ex.grid(n);

    // Angular resolution matching epsilon = 0.05 in the embedded metric
    // (the metric is calibrated to base-circle distance at small scales).
    let eps = 0.05_f64;
    let extra_digits = (1.0 / eps).log2().ceil() as u32; // 5

    let word = |theta: f64, len: u32| -> u64 {
        let mut bits = 0u64;
        let mut t = theta;
        for _ in 0..len {
            bits = (bits << 1) | if t >= 0.5 { 1 } else { 0 };
            t = (2.0 * t).fract();
        }
        bits
    };

    let mut ratios = Vec::new();
    for horizon in [2.0, 3.0, 4.0, 5.0] {
        let params = SeparationParams::classical(horizon, eps, 0.02).unwrap();
        let (count, _) = greedy_separated(&ex.dynamics, &sample, &params, None).unwrap();

        let len = horizon as u32 + extra_digits;
        let mut words: Vec<u64> = (0..n).map(|k| word(k as f64 / n as f64, len)).collect();
        words.sort_unstable();
        words.dedup();
        ratios.push(count as f64 / words.len() as f64);
    }
    // Same growth rate: the ratio stays in one constant band.
    for &r in &ratios {
        assert!(
            (0.25..=4.0).contains(&r),
            "greedy/word-count ratio {r} left the band; ratios {ratios:?}"
        );
    }
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
        / ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread <= 2.0, "ratios drift across horizons: {ratios:?}");
}

/// Radius recursion oracle: the reset halves the radial excess, so after
/// the n-th jump the radius is exactly `1 + (r0 - 1) / 2^n`; simulated
/// orbits must reproduce the recursion to near machine precision.
#[test]
fn annulus_radii_follow_the_halving_recursion() {
    let ex = annulus();
    let sys = ex.dynamics.as_impulsive().unwrap();
    for (r0, th0) in [(2.0, 0.4), (1.7, 3.0), (1.2, 5.5)] {
        let x = sys
            .space()
            .point(&[r0 * f64::cos(th0), r0 * f64::sin(th0)])
            .unwrap();
        let orbit = sys.orbit(&x, 40.0).unwrap();
        let mut expected = r0;
        for (k, &tau) in orbit.impulse_times().iter().enumerate() {
            expected = 0.5 * (1.0 + expected);
            let p = orbit.point_at(tau, sys.flow());
            let r = p.coord(0).hypot(p.coord(1));
            assert!(
                (r - expected).abs() < 1e-12,
                "jump {k}: radius {r} vs recursion {expected}"
            );
        }
        assert!(orbit.impulse_times().len() >= 10);
    }
}

/// Closed-form return time: from angle theta the impulse ray is reached
/// after exactly `2*pi - theta`, at every radius.
#[test]
fn return_time_formula_over_an_angle_sweep() {
    let ex = annulus();
    let sys = ex.dynamics.as_impulsive().unwrap();
    let xi = sys.constants().xi;
    for k in 0..100 {
        // Angles in the trimmed domain, away from the tube (0, xi).
        let th = xi + 0.01 + (TAU - xi - 0.02) * k as f64 / 99.0;
        for r in [1.0, 1.5, 2.0] {
            let x = sys.space().point(&[r * th.cos(), r * th.sin()]).unwrap();
            let t = sys.time_to_impulse(&x).unwrap();
            assert!(
                (t - (TAU - th)).abs() <= 1e-9,
                "theta {th}, r {r}: {t} vs {}",
                TAU - th
            );
        }
    }
}
