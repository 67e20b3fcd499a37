//! Property-based invariants: parser round-trips, jet derivatives against
//! finite differences, Möbius isometry, and level-set nesting.

use num_complex::Complex64;
use proptest::prelude::*;

use hypolevel::hyp_core::{hyp_distance, DiskPoint, MoebiusAutomorphism};
use hypolevel::level_set::{potential_u, LevelSpec};
use hypolevel::map_dsl::{parse, MapExpr};

fn small_complex(max: f64) -> impl Strategy<Value = Complex64> {
    (-max..max, -max..max).prop_map(|(re, im)| Complex64::new(re, im))
}

fn disk_complex(max_r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..max_r, 0.0..std::f64::consts::TAU)
        .prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn expr() -> impl Strategy<Value = MapExpr> {
    let leaf = prop_oneof![
        Just(MapExpr::Var),
        small_complex(2.0).prop_map(MapExpr::Const),
        (disk_complex(0.9), 0.0..std::f64::consts::TAU)
            .prop_map(|(a, theta)| MapExpr::Aut { a, theta }),
        (0.0..std::f64::consts::TAU, prop::collection::vec(disk_complex(0.8), 1..3))
            .prop_map(|(theta, zeros)| MapExpr::Blaschke { theta, zeros }),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MapExpr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MapExpr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MapExpr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MapExpr::div(a, b)),
            inner.clone().prop_map(MapExpr::neg),
            (inner.clone(), 2..4i32).prop_map(|(a, n)| MapExpr::pow(a, n)),
            (inner.clone(), inner).prop_map(|(f, g)| MapExpr::Compose(Box::new(f), Box::new(g))),
        ]
    })
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_unparse_round_trip(e in expr(), z in disk_complex(0.95)) {
        let text = e.unparse();
        let back = parse(&text);
        prop_assert!(back.is_ok(), "unparse produced unparseable text: {text}");
        let back = back.unwrap();
        match (e.eval_value(z), back.eval_value(z)) {
            (Ok(a), Ok(b)) => prop_assert!(close(a, b), "{text}: {a} vs {b}"),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{text}: {a:?} vs {b:?}"),
        }
    }

    #[test]
    fn jet_matches_finite_differences(e in expr(), z in disk_complex(0.6)) {
        let h = 1e-5;
        let evals: Option<Vec<Complex64>> = [-2.0, -1.0, 0.0, 1.0, 2.0]
            .iter()
            .map(|k| e.eval_value(z + Complex64::new(k * h, 0.0)).ok())
            .collect();
        let (Some(v), Ok(jet)) = (evals, e.eval_jet(z)) else {
            return Ok(()); // pole nearby: nothing to compare
        };
        // reject configurations where the stencil itself is ill-conditioned
        let scale = v.iter().map(|x| x.norm()).fold(1.0f64, f64::max);
        prop_assume!(scale < 1e3);
        let d1 = (v[3] - v[1]) / (2.0 * h);
        let d2 = (v[3] - 2.0 * v[2] + v[1]) / (h * h);
        prop_assert!((d1 - jet.d1).norm() <= 1e-4 * (1.0 + jet.d1.norm()),
            "d1 {d1} vs {}", jet.d1);
        prop_assert!((d2 - jet.d2).norm() <= 1e-2 * (1.0 + jet.d2.norm()) + 1e-2 * scale,
            "d2 {d2} vs {}", jet.d2);
    }

    #[test]
    fn hyp_distance_is_moebius_invariant(
        a in disk_complex(0.95),
        theta in 0.0..std::f64::consts::TAU,
        z in disk_complex(0.95),
        w in disk_complex(0.95),
    ) {
        let t = MoebiusAutomorphism::new(a, theta).unwrap();
        let (zp, wp) = (DiskPoint::new(z).unwrap(), DiskPoint::new(w).unwrap());
        let d1 = hyp_distance(zp, wp);
        let d2 = hyp_distance(t.apply(zp), t.apply(wp));
        prop_assert!((d1 - d2).abs() < 1e-10, "{d1} vs {d2}");
    }

    #[test]
    fn level_sets_nest(
        theta in 0.0..std::f64::consts::TAU,
        zeros in prop::collection::vec(disk_complex(0.85), 1..4),
        z in disk_complex(0.95),
        mu in -3.0..-0.01f64,
        lambda in 1.0..5.0f64,
    ) {
        let f = MapExpr::Blaschke { theta, zeros };
        let u_dmu = potential_u(&LevelSpec::DMu { mu }, &f, z).unwrap();
        let u_1 = potential_u(&LevelSpec::OmegaLambda { lambda: 1.0 }, &f, z).unwrap();
        let u_l = potential_u(&LevelSpec::OmegaLambda { lambda }, &f, z).unwrap();
        // D_mu (mu < 0) is contained in Omega_1, which is contained in
        // Omega_lambda for lambda >= 1
        if u_dmu > 0.0 {
            prop_assert!(u_1 > -1e-12, "{u_dmu} but {u_1}");
        }
        if u_1 > 0.0 {
            prop_assert!(u_l > -1e-12, "{u_1} but {u_l}");
        }
        prop_assert!(u_l >= u_1 - 1e-12);
    }
}
