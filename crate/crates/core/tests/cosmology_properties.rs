use proptest::prelude::*;
use ricci_dynamo_core::cosmology::{
    classify, corollary_check, curvature_along_flow, curvature_from_matter, desitter_operator, dynamo_bound,
    CosmologicalState, RegimeLabel,
};
use ricci_dynamo_core::dynamics::{energy_rate, integrate};
use ricci_dynamo_core::{MagneticField, Metric2};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn bounded_matter_never_fast(r in 0.0f64..5.0, frac in 0.0f64..1.0, theta in 0.01f64..5.0) {
        let rho = 3.0 * r * frac;
        let state = CosmologicalState::new(rho, None, theta, r).unwrap();
        let regime = classify(&state);
        prop_assert_ne!(regime.label, RegimeLabel::FastDynamo);
    }

    #[test]
    fn corollary_is_homogeneous(rho in 0.0f64..5.0, theta in -5.0f64..5.0, a in 0.1f64..10.0) {
        let base = corollary_check(&curvature_from_matter(rho, theta).unwrap()).unwrap();
        let scaled = corollary_check(&curvature_from_matter(a * rho, a * theta).unwrap()).unwrap();
        // the label can only change when the real part sits inside the threshold band
        let re = 0.5 * (-2.0 * rho - 3.0 * theta);
        prop_assume!(re.abs() > 1e-6);
        prop_assert_eq!(base, scaled);
    }

    #[test]
    fn positive_curvature_survives_einstein_flow(lambda in 0.01f64..3.0) {
        let r = curvature_along_flow(&Metric2::identity(0.0), lambda, 2.0, 200).unwrap();
        prop_assert!(r.iter().all(|v| *v > 0.0));
    }
}

#[test]
fn bound_agrees_with_fitted_energy_rate() {
    for i in 0..5 {
        for j in 0..5 {
            let lambda = -1.0 + 0.5 * i as f64;
            let theta = -1.0 + 0.5 * j as f64 + 0.25;
            let bound = dynamo_bound(lambda, theta);
            let tr = integrate(
                &desitter_operator(lambda, theta),
                &MagneticField::Reduced([1.0, -0.5]),
                5.0,
                0.1,
            )
            .unwrap();
            let hist = energy_rate(&tr, Metric2::identity).unwrap();
            assert_eq!(
                bound.supports_fast_dynamo,
                hist.fitted_rate > 0.0,
                "Λ = {lambda}, θ = {theta}"
            );
            assert!((hist.fitted_rate - 2.0 * bound.growth).abs() <= 0.01 * (2.0 * bound.growth).abs());
        }
    }
}
