use proptest::prelude::*;

use dktwist::algebra::cartan_generators;
use dktwist::linops;
use dktwist::rmatrices::{self, coproduct_cartan};
use dktwist::twist::{compose, crystal_basis, f_interval, natural_basis};
use dktwist::verify;
use dktwist::{QParam, SeriesSpec};

const SPECS: [&str; 9] = ["A1", "A2", "A3", "B1", "B2", "C1", "C2", "D2", "D3"];

fn spec(s: &str) -> SeriesSpec {
    s.parse().unwrap()
}

fn any_q() -> impl Strategy<Value = f64> {
    (-3.0f64..3.0).prop_map(f64::exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn twist_is_orthogonal_and_weight_preserving(s in prop::sample::select(&SPECS[..]), qv in any_q()) {
        let sp = spec(s);
        let f = f_interval(&sp, QParam::new(qv).unwrap(), QParam::ONE).unwrap().matrix;
        prop_assert!(verify::check_orthogonality(&f) <= 1e-10);
        prop_assert!(verify::check_cartan_commute(&f, &sp) <= 1e-12);
    }

    #[test]
    fn twist_relation_holds(s in prop::sample::select(&SPECS[..]), qv in any_q()) {
        let q = QParam::new(qv).unwrap();
        let r = verify::check_twist_r(&spec(s), q).unwrap();
        let scale = linops::max_abs(&rmatrices::r_bar(&spec(s), q).unwrap().matrix).max(1.0);
        prop_assert!(r <= 1e-10 * scale, "{s} q={qv}: {r:e}");
    }

    #[test]
    fn composition_is_path_independent(
        s in prop::sample::select(&SPECS[..]),
        a in any_q(), b in any_q(), c in any_q(),
    ) {
        let [a, b, c] = [a, b, c].map(|x| QParam::new(x).unwrap());
        prop_assert!(verify::check_composition(&spec(s), a, b, c).unwrap() <= 1e-10);
    }

    #[test]
    fn inverse_q_swaps_legs(s in prop::sample::select(&SPECS[..]), qv in any_q()) {
        prop_assert!(verify::check_leg_swap(&spec(s), QParam::new(qv).unwrap()).unwrap() <= 1e-10);
    }

    #[test]
    fn natural_vectors_are_braid_eigenvectors(s in prop::sample::select(&SPECS[..]), qv in any_q()) {
        let sp = spec(s);
        let q = QParam::new(qv).unwrap();
        let qb = rmatrices::qbar(&sp, q).unwrap();
        let basis = natural_basis(&sp, q).unwrap();
        let scale = linops::max_abs(&qb);
        for v in &basis.vectors {
            let w = &qb * v;
            let lambda = v.dot(&w);
            prop_assert!((w - v * lambda).amax() <= 1e-9 * scale);
        }
    }
}

#[test]
fn inverse_is_transpose_and_reverses_chain() {
    let sp = spec("C2");
    let q = QParam::new(0.4).unwrap();
    let f = f_interval(&sp, q, QParam::ZERO).unwrap();
    let back = f_interval(&sp, QParam::ZERO, q).unwrap();
    assert!(linops::residual(&f.inverse().matrix, &back.matrix).unwrap() < 1e-12);
    let round = compose(&back, &f).unwrap();
    assert!(linops::orthogonality_defect(&round.matrix) < 1e-12);
    assert!(linops::residual(&round.matrix, &linops::DenseMatrix::identity(16, 16)).unwrap() < 1e-12);
}

#[test]
fn crystal_twist_is_signed_permutation_times_rotation() {
    // rows of F[01] are the q = 1 vectors, read off in the crystal order
    for s in ["A2", "B2", "D3"] {
        let sp = spec(s);
        let f = f_interval(&sp, QParam::ZERO, QParam::ONE).unwrap().matrix;
        let one = natural_basis(&sp, QParam::ONE).unwrap();
        let crystal = crystal_basis(&sp).unwrap();
        for (label, c) in crystal.labels.iter().zip(&crystal.vectors) {
            let row = f.transpose() * c;
            let v = one.vector(label).unwrap();
            assert!((row - v).amax().min((f.transpose() * c + v).amax()) < 1e-12, "{s} {label}");
        }
    }
}

#[test]
fn deformed_cartan_action_is_undeformed() {
    let sp = spec("B2");
    let q = QParam::new(2.5).unwrap();
    let qb = rmatrices::qbar(&sp, q).unwrap();
    for h in cartan_generators(&sp) {
        assert!(linops::commutator_residual(&qb, &coproduct_cartan(&h, 2)) < 1e-12);
    }
}

#[test]
fn verify_suite_on_orthosymplectic_specs() {
    for (s, grid) in [("B2", vec![0.3, 4.0]), ("C3", vec![0.5]), ("D3", vec![0.5, 2.0])] {
        let report = verify::run_suite(&spec(s), &grid).unwrap();
        let failed: Vec<_> = report.failures().collect();
        assert!(report.overall, "{s}: {failed:?}");
    }
}
