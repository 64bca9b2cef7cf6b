//! Shared brute-force oracles for the integration and acceptance suites.
//!
//! Everything here deliberately avoids the closed-form paths it is used to
//! check: knowledge excesses are maximized by scanning meter axes on a
//! Fibonacci sphere grid with one local refinement pass.

// Each test binary compiles this module separately and uses a subset of it.
#![allow(dead_code)]

use qduality::linalg::{cross3, norm3, normalize3};
use qduality::measurement::{decompose, outcome_statistics, MeasurementAxis};
use qduality::states::TwoQubitState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Evenly spread directions on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Knowledge excess for one meter axis, computed from a prebuilt conditional
/// decomposition (so a grid sweep decomposes the state only once).
fn excess_for_axis(
    d: &qduality::measurement::ConditionalDecomposition,
    meter: &MeasurementAxis,
) -> f64 {
    let stats = outcome_statistics(d, meter);
    let know: f64 = stats
        .outcomes
        .iter()
        .filter(|o| !o.negligible)
        .map(|o| o.pi * (o.w - o.w_perp).abs())
        .sum();
    know - (d.w - d.w_perp).abs()
}

/// Brute-force maximum knowledge excess over meter axes: a `coarse`-point
/// Fibonacci grid followed by one refinement pass of 100 points inside a
/// 2-degree cone around the best coarse direction.
pub fn grid_max_excess(s: &TwoQubitState, pi_s: &MeasurementAxis, coarse: usize) -> f64 {
    let d = decompose(s, pi_s);
    let mut best_axis = [0.0, 0.0, 1.0];
    let mut best = f64::NEG_INFINITY;
    for v in fibonacci_sphere(coarse) {
        let ax = MeasurementAxis::new(v).unwrap();
        let e = excess_for_axis(&d, &ax);
        if e > best {
            best = e;
            best_axis = v;
        }
    }
    // Local refinement: 10 radii x 10 angles in a small cone.
    let tangent1 = {
        let pick = if best_axis[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        normalize3(&cross3(&best_axis, &pick)).unwrap()
    };
    let tangent2 = cross3(&best_axis, &tangent1);
    let max_tilt = 2.0_f64.to_radians().tan();
    for i in 1..=10 {
        let radius = max_tilt * i as f64 / 10.0;
        for j in 0..10 {
            let psi = std::f64::consts::TAU * j as f64 / 10.0;
            let dir = [
                best_axis[0] + radius * (psi.cos() * tangent1[0] + psi.sin() * tangent2[0]),
                best_axis[1] + radius * (psi.cos() * tangent1[1] + psi.sin() * tangent2[1]),
                best_axis[2] + radius * (psi.cos() * tangent1[2] + psi.sin() * tangent2[2]),
            ];
            let ax = MeasurementAxis::new(dir).unwrap();
            best = best.max(excess_for_axis(&d, &ax));
        }
    }
    best
}

/// Per-trial deterministic generator, matching the harness convention.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn random_axis<R: Rng>(rng: &mut R) -> MeasurementAxis {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        if norm3(&v) > 1e-3 {
            return MeasurementAxis::new(v).unwrap();
        }
    }
}

/// Random orthogonal (complementary) axis pair by Gram-Schmidt.
pub fn random_complementary_pair<R: Rng>(rng: &mut R) -> (MeasurementAxis, MeasurementAxis) {
    let a = random_axis(rng);
    loop {
        let v = random_axis(rng).direction();
        let along = v[0] * a.direction()[0] + v[1] * a.direction()[1] + v[2] * a.direction()[2];
        let ortho = [
            v[0] - along * a.direction()[0],
            v[1] - along * a.direction()[1],
            v[2] - along * a.direction()[2],
        ];
        if norm3(&ortho) > 1e-3 {
            return (a, MeasurementAxis::new(ortho).unwrap());
        }
    }
}

/// Uniform random point on the probability simplex (by normalizing
/// exponential draws), used for Bell-mixture weights.
pub fn random_simplex_point<R: Rng>(rng: &mut R) -> [f64; 4] {
    let mut p = [0.0; 4];
    let mut total = 0.0;
    for q in p.iter_mut() {
        let u: f64 = rng.gen_range(1e-12..1.0);
        *q = -u.ln();
        total += *q;
    }
    for q in p.iter_mut() {
        *q /= total;
    }
    p
}
