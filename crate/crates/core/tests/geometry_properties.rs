use proptest::prelude::*;
use ricci_dynamo_core::geometry::{
    decompose_gradient, evolve_einstein_flow, exact_flow_metric, lyapunov_from_metric, ricci_eigen,
};
use ricci_dynamo_core::linalg::{self, Mat2};
use ricci_dynamo_core::{Metric2, RicciData};

fn metric() -> impl Strategy<Value = Metric2> {
    (0.2f64..5.0, 0.2f64..5.0, -1.0f64..1.0).prop_map(|(a, d, s)| {
        let off = s * (a * d).sqrt() * 0.9;
        Metric2::new([[a, off], [off, d]], 0.0).unwrap()
    })
}

fn symmetric() -> impl Strategy<Value = Mat2> {
    (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, b, d)| [[a, b], [b, d]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn decomposition_reconstructs_gradient(
        g in metric(),
        grad in prop::array::uniform2(prop::array::uniform2(-5.0f64..5.0)),
        v in prop::array::uniform2(-3.0f64..3.0),
        accel in prop::option::of(prop::array::uniform2(-2.0f64..2.0)),
    ) {
        let es = decompose_gradient(&grad, &g, &v, accel).unwrap();
        let back = es.reconstruct(&g, &v);
        for p in 0..2 {
            for l in 0..2 {
                prop_assert!((back[p][l] - grad[p][l]).abs() <= 1e-12 * (1.0 + grad[p][l].abs()));
            }
        }
        prop_assert!(es.shear_trace.abs() < 1e-12);
    }

    #[test]
    fn ricci_eigenpairs_have_small_residual(g in metric(), r in symmetric()) {
        let ric = RicciData::new(r).unwrap();
        for pair in ricci_eigen(&ric, &g) {
            let lhs = linalg::mul_vec(&r, &pair.direction);
            let rhs = linalg::mul_vec(g.components(), &pair.direction);
            let res = (lhs[0] - pair.value * rhs[0]).hypot(lhs[1] - pair.value * rhs[1]);
            prop_assert!(res <= 1e-12 * (1.0 + pair.value.abs()) * 10.0, "residual {res:e}");
            let norm = linalg::bilinear(&pair.direction, g.components(), &pair.direction);
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn einstein_condition_gives_double_eigenvalue(g in metric(), lambda in -4.0f64..4.0) {
        let pairs = ricci_eigen(&RicciData::einstein(lambda, &g), &g);
        for pair in pairs {
            prop_assert!((pair.value - lambda).abs() <= 1e-12 * (1.0 + lambda.abs()));
        }
    }

    #[test]
    fn exact_histories_recover_lambda(lambda in -3.0f64..3.0, t_end in 0.1f64..4.0) {
        let history: Vec<Metric2> = (0..=20).map(|k| exact_flow_metric(lambda, t_end * k as f64 / 20.0)).collect();
        let fit = lyapunov_from_metric(&history).unwrap();
        for rate in fit.ricci_rates {
            prop_assert!((rate - lambda).abs() <= 1e-9);
        }
    }
}

#[test]
fn euler_flow_error_is_first_order() {
    let g0 = Metric2::identity(0.0);
    let (lambda, t) = (0.3, 1.0);
    let exact = exact_flow_metric(lambda, t).components()[0][0];
    let errors: Vec<f64> = [10usize, 100, 1000]
        .iter()
        .map(|&n| {
            let h = evolve_einstein_flow(&g0, lambda, t, n).unwrap();
            (h[n].components()[0][0] - exact).abs()
        })
        .collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log10();
        assert!((order - 1.0).abs() <= 0.1, "observed order {order}");
    }
}
