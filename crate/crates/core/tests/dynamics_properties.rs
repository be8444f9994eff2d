use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ricci_dynamo_core::dynamics::{growth_law, lyapunov_exponent, magnetic_energy};
use ricci_dynamo_core::operator::ReducedOperator;
use ricci_dynamo_core::spectrum::quadratic_roots;
use ricci_dynamo_core::{assemble_reduced, MagneticField, Metric2};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn energy_is_quadratic(
        a in -10.0f64..10.0,
        b in prop::array::uniform2(-3.0f64..3.0),
        g in (0.2f64..4.0, 0.2f64..4.0, -0.9f64..0.9),
    ) {
        let off = g.2 * (g.0 * g.1).sqrt();
        let metric = Metric2::new([[g.0, off], [off, g.1]], 0.0).unwrap();
        let field = MagneticField::Reduced(b);
        let e = magnetic_energy(&field, &metric);
        prop_assert!(e >= 0.0);
        prop_assert!((magnetic_energy(&field.scaled(a), &metric) - a * a * e).abs() <= 1e-12 * (1.0 + a * a * e));
    }

    #[test]
    fn growth_law_is_multiplicative(l in -2.0f64..2.0, th in -2.0f64..2.0, t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
        let joint = growth_law(l, th, t1 + t2);
        let split = growth_law(l, th, t1) * growth_law(l, th, t2);
        prop_assert!((joint - split).abs() <= 1e-14 * joint * 4.0);
    }

    #[test]
    fn exponential_path_is_time_reversible(
        r in -3.0f64..3.0, theta in -3.0f64..3.0, eta in 0.0f64..3.0,
        b in prop::array::uniform2(-1.0f64..1.0), t in 0.0f64..2.0,
    ) {
        let op = assemble_reduced(r, theta, eta);
        let red = op.as_reduced().unwrap();
        let back = red.propagate(&red.propagate(&b, t), -t);
        let growth = ricci_dynamo_core::linalg::spectral_norm(&ricci_dynamo_core::linalg::expm(&red.matrix, t))
            * ricci_dynamo_core::linalg::spectral_norm(&ricci_dynamo_core::linalg::expm(&red.matrix, -t));
        let err = (back[0] - b[0]).hypot(back[1] - b[1]);
        prop_assert!(err <= 1e-10 * growth.max(1.0), "err {err:e}, conditioning {growth:e}");
    }
}

#[test]
fn reduced_lyapunov_matches_leading_real_part() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    while checked < 200 {
        let (r, th, eta) = (
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(0.0..2.0),
        );
        let spec = quadratic_roots(r, th, eta);
        let v = spec.values();
        if (v[0] - v[1]).norm() < 0.2 {
            continue;
        }
        let est = lyapunov_exponent(&assemble_reduced(r, th, eta), 50.0, 8, 1).unwrap();
        let want = spec.max_real_part;
        assert!(
            (est.value - want).abs() <= 0.01 * want.abs().max(1e-2),
            "(R, θ, η) = ({r}, {th}, {eta}): {} vs {want}",
            est.value
        );
        checked += 1;
    }
}

#[test]
fn lyapunov_of_rotation_is_zero() {
    let op = ReducedOperator::from_matrix([[0.0, -3.0], [3.0, 0.0]]).into();
    let est = lyapunov_exponent(&op, 50.0, 6, 0).unwrap();
    assert!(est.value.abs() < 1e-12 && est.converged);
}
