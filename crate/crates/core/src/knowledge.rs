//! Knowledge functionals for predicting a system-qubit measurement from a
//! meter-qubit measurement.
//!
//! Knowledge is the fractional excess of right guesses over wrong guesses
//! under maximum-likelihood guessing. The a priori knowledge `P` uses no
//! meter measurement; `K` is the outcome-weighted sub-ensemble knowledge; the
//! knowledge excess is `K - P`; and the distinguishability excess is the
//! maximum excess over all meter axes, a trace-norm functional with the
//! closed form `max(|n.a|, |T^T a|) - |n.a|`.

use crate::linalg::{dot3, norm3, normalize3, trace_norm};
use crate::measurement::{decompose, outcome_statistics, MeasurementAxis};
use crate::states::TwoQubitState;

/// A priori knowledge, knowledge, and their difference for one choice of
/// system and meter axes.
#[derive(Debug, Clone, Copy)]
pub struct KnowledgeResult {
    pub apriori: f64,
    pub knowledge: f64,
    pub excess: f64,
}

/// Knowledge about the outcome of `pi_s` with no meter measurement:
/// `|w - w_perp| = |n . a|`.
pub fn apriori_knowledge(s: &TwoQubitState, pi_s: &MeasurementAxis) -> f64 {
    dot3(&s.bloch().n, &pi_s.direction()).abs()
}

/// Knowledge about the outcome of `pi_s` given a meter measurement along
/// `pi_m`, bundled with the a priori knowledge and the excess.
pub fn knowledge(
    s: &TwoQubitState,
    pi_m: &MeasurementAxis,
    pi_s: &MeasurementAxis,
) -> KnowledgeResult {
    let d = decompose(s, pi_s);
    let stats = outcome_statistics(&d, pi_m);
    let apriori = (d.w - d.w_perp).abs();
    let know: f64 = stats
        .outcomes
        .iter()
        .filter(|o| !o.negligible)
        .map(|o| o.pi * (o.w - o.w_perp).abs())
        .sum();
    KnowledgeResult {
        apriori,
        knowledge: know,
        excess: know - apriori,
    }
}

/// Largest knowledge excess over all meter axes, in closed form from the
/// Bloch data: `max(|n.a|, |T^T a|) - |n.a|`. Zero exactly when the a priori
/// term dominates.
pub fn distinguishability_excess(s: &TwoQubitState, pi_s: &MeasurementAxis) -> f64 {
    let b = s.bloch();
    let a = pi_s.direction();
    let apriori = dot3(&b.n, &a).abs();
    let v = b.t.apply_transpose(&a);
    norm3(&v).max(apriori) - apriori
}

/// The same quantity evaluated literally as a trace norm on the conditional
/// decomposition: `Tr|w rho_m - w_perp rho_m_perp| - |w - w_perp|`. Kept as
/// an independent route for cross-checking the closed form.
pub fn distinguishability_excess_trace_norm(s: &TwoQubitState, pi_s: &MeasurementAxis) -> f64 {
    let d = decompose(s, pi_s);
    let delta = d.rho_m.scale(d.w) - d.rho_m_perp.scale(d.w_perp);
    trace_norm(&delta) - (d.w - d.w_perp).abs()
}

/// The meter axis attaining the distinguishability excess: `T^T a`
/// normalized. When the excess is zero for every axis (the a priori term
/// dominates, or the correlation column vanishes) the canonical z axis is
/// returned.
pub fn optimal_meter_axis(s: &TwoQubitState, pi_s: &MeasurementAxis) -> MeasurementAxis {
    let b = s.bloch();
    let a = pi_s.direction();
    let v = b.t.apply_transpose(&a);
    let nv = norm3(&v);
    if nv <= dot3(&b.n, &a).abs() || nv < 1e-12 {
        return MeasurementAxis::z();
    }
    let unit = normalize3(&v).expect("norm checked above");
    MeasurementAxis::new(unit).expect("unit vector")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix3;
    use crate::states::{bell_mixture, depolarized_state, pure_schmidt, random_state, werner, BlochForm, TwoQubitState};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn singlet() -> TwoQubitState {
        bell_mixture(&[1.0, 0.0, 0.0, 0.0]).unwrap()
    }

    fn random_axis(rng: &mut ChaCha8Rng) -> MeasurementAxis {
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

    #[test]
    fn apriori_cases() {
        // Maximally mixed marginal: no a priori knowledge anywhere.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let ax = random_axis(&mut rng);
            assert_abs_diff_eq!(apriori_knowledge(&singlet(), &ax), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(
                apriori_knowledge(&werner(0.8).unwrap(), &ax),
                0.0,
                epsilon = 1e-12
            );
        }
        // |V><V| ⊗ 1/2 has full a priori knowledge along z.
        let rho = crate::linalg::tensor_product(
            &crate::linalg::Matrix2::diag(crate::linalg::cr(1.0), crate::linalg::cr(0.0)),
            &crate::linalg::Matrix2::identity().scale(0.5),
        );
        let s = TwoQubitState::new(rho).unwrap();
        assert_abs_diff_eq!(
            apriori_knowledge(&s, &MeasurementAxis::z()),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn apriori_matches_decomposition_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for trial in 0..100 {
            let s = random_state(&mut rng, trial % 4 + 1);
            let ax = random_axis(&mut rng);
            let d = crate::measurement::decompose(&s, &ax);
            assert_abs_diff_eq!(
                apriori_knowledge(&s, &ax),
                (d.w - d.w_perp).abs(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn knowledge_singlet_same_axis_is_perfect() {
        let k = knowledge(&singlet(), &MeasurementAxis::z(), &MeasurementAxis::z());
        assert_abs_diff_eq!(k.knowledge, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k.excess, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn knowledge_singlet_crossed_axes_vanishes() {
        let k = knowledge(&singlet(), &MeasurementAxis::x(), &MeasurementAxis::z());
        assert_abs_diff_eq!(k.knowledge, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k.excess, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn knowledge_werner_matches_parameter() {
        let k = knowledge(
            &werner(0.5).unwrap(),
            &MeasurementAxis::z(),
            &MeasurementAxis::z(),
        );
        assert_abs_diff_eq!(k.knowledge, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(k.excess, 0.5, epsilon = 1e-12);
        // Cross-check against the distinguishability excess.
        assert_abs_diff_eq!(
            distinguishability_excess(&werner(0.5).unwrap(), &MeasurementAxis::z()),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn excess_singlet_is_unit_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let ax = random_axis(&mut rng);
            assert_abs_diff_eq!(
                distinguishability_excess(&singlet(), &ax),
                1.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn excess_depolarized_axes() {
        let s = depolarized_state(0.6, 0.3).unwrap();
        assert_abs_diff_eq!(
            distinguishability_excess(&s, &MeasurementAxis::z()),
            0.6,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            distinguishability_excess(&s, &MeasurementAxis::x()),
            0.3,
            epsilon = 1e-12
        );
    }

    #[test]
    fn excess_vanishes_for_product_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            // Random product state from two pure Bloch vectors scaled inward.
            let n = crate::linalg::scale3(&random_axis(&mut rng).direction(), rng.gen_range(0.0..1.0));
            let m = crate::linalg::scale3(&random_axis(&mut rng).direction(), rng.gen_range(0.0..1.0));
            let mut t = Matrix3::zero();
            for k in 0..3 {
                for l in 0..3 {
                    t.0[k][l] = n[k] * m[l];
                }
            }
            let s = BlochForm { n, m, t }.compose().unwrap();
            let ax = random_axis(&mut rng);
            assert!(distinguishability_excess(&s, &ax).abs() < 1e-10);
            assert!(distinguishability_excess_trace_norm(&s, &ax).abs() < 1e-9);
        }
    }

    #[test]
    fn closed_form_matches_trace_norm_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..500 {
            let s = random_state(&mut rng, trial % 4 + 1);
            let ax = random_axis(&mut rng);
            let closed = distinguishability_excess(&s, &ax);
            let literal = distinguishability_excess_trace_norm(&s, &ax);
            assert_abs_diff_eq!(closed, literal, epsilon = 1e-10);
        }
    }

    #[test]
    fn optimal_axis_attains_the_excess() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for trial in 0..300 {
            let s = random_state(&mut rng, trial % 4 + 1);
            let ax = random_axis(&mut rng);
            let best = optimal_meter_axis(&s, &ax);
            let k = knowledge(&s, &best, &ax);
            let dd = distinguishability_excess(&s, &ax);
            assert_abs_diff_eq!(k.excess, dd, epsilon = 1e-10);
        }
    }

    #[test]
    fn optimal_axis_degenerate_cases() {
        // No correlations at all: canonical z and zero excess.
        let ax = optimal_meter_axis(&werner(0.0).unwrap(), &MeasurementAxis::x());
        assert_eq!(ax, MeasurementAxis::z());
        assert_abs_diff_eq!(
            distinguishability_excess(&werner(0.0).unwrap(), &MeasurementAxis::x()),
            0.0,
            epsilon = 1e-15
        );

        // Singlet along z: the optimal axis is ±z.
        let best = optimal_meter_axis(&singlet(), &MeasurementAxis::z());
        assert_abs_diff_eq!(best.direction()[2].abs(), 1.0, epsilon = 1e-12);

        // Pure z correlation block.
        let s = BlochForm {
            n: [0.0; 3],
            m: [0.0; 3],
            t: Matrix3::from_diag(&[0.0, 0.0, 0.8]),
        }
        .compose()
        .unwrap();
        let best = optimal_meter_axis(&s, &MeasurementAxis::z());
        assert_abs_diff_eq!(best.direction()[2].abs(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            distinguishability_excess(&s, &MeasurementAxis::z()),
            0.8,
            epsilon = 1e-12
        );
    }

    #[test]
    fn knowledge_bounds_hold_on_random_ensemble() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for trial in 0..2000 {
            let s = random_state(&mut rng, trial % 4 + 1);
            let pi_s = random_axis(&mut rng);
            let pi_m = random_axis(&mut rng);
            let k = knowledge(&s, &pi_m, &pi_s);
            assert!(k.apriori >= -1e-15 && k.apriori <= 1.0 + 1e-12);
            assert!(k.knowledge <= 1.0 + 1e-12);
            assert!(
                k.knowledge + 1e-12 >= k.apriori,
                "K = {} < P = {}",
                k.knowledge,
                k.apriori
            );
            assert!(k.excess <= distinguishability_excess(&s, &pi_s) + 1e-10);
        }
    }

    #[test]
    fn excess_is_invariant_under_meter_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for trial in 0..100 {
            let s = random_state(&mut rng, trial % 4 + 1);
            let ax = random_axis(&mut rng);
            let u = crate::linalg::su2_from_axis_angle(
                &random_axis(&mut rng).direction(),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            let rotated = s
                .apply_local_unitary(&crate::linalg::Matrix2::identity(), &u)
                .unwrap();
            assert_abs_diff_eq!(
                distinguishability_excess(&s, &ax),
                distinguishability_excess(&rotated, &ax),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn excess_covariant_under_system_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for trial in 0..100 {
            let s = random_state(&mut rng, trial % 4 + 1);
            let ax = random_axis(&mut rng);
            let u = crate::linalg::su2_from_axis_angle(
                &random_axis(&mut rng).direction(),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            let o = crate::linalg::rotation_of_unitary(&u);
            let rotated = s
                .apply_local_unitary(&u, &crate::linalg::Matrix2::identity())
                .unwrap();
            let co_rotated = MeasurementAxis::new(o.apply(&ax.direction())).unwrap();
            assert_abs_diff_eq!(
                distinguishability_excess(&s, &ax),
                distinguishability_excess(&rotated, &co_rotated),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn phase_convention_does_not_affect_knowledge() {
        // Knowledge along equivalent +a and -a system axes agrees even though
        // the basis kets differ.
        let s = pure_schmidt(0.3).unwrap();
        let a = MeasurementAxis::new([0.3, 0.5, -0.8]).unwrap();
        let neg = MeasurementAxis::new(crate::linalg::scale3(&a.direction(), -1.0)).unwrap();
        let m = MeasurementAxis::new([0.9, -0.1, 0.4]).unwrap();
        let k1 = knowledge(&s, &m, &a);
        let k2 = knowledge(&s, &m, &neg);
        assert_abs_diff_eq!(k1.knowledge, k2.knowledge, epsilon = 1e-12);
        assert_abs_diff_eq!(k1.apriori, k2.apriori, epsilon = 1e-12);
    }
}
