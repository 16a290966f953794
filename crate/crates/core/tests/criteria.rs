mod common;

use common::*;
use vacone::coderivatives::{lcp_graph_fixture, BasePair, MultiMap};
use vacone::criteria::{aubin_wrt, lipschitz_wrt, piecewise_screen, relative_aubin, stationarity_check, trend_slope};
use vacone::fixtures;
use vacone::linalg::norm;
use vacone::sets::{ConvexBody, ScalarFn};

fn origin(n: usize, m: usize) -> BasePair {
    BasePair::new(vec![0.0; n], vec![0.0; m])
}

fn map_fixtures() -> Vec<(&'static str, MultiMap, BasePair)> {
    vec![
        ("curve", fixtures::exam1_map(), origin(1, 1)),
        ("indicator", fixtures::indicator_map(), origin(1, 1)),
        ("identity", fixtures::identity_map(), origin(1, 1)),
        ("constant", fixtures::constant_map(), origin(1, 1)),
        ("sqrt", fixtures::sqrt_abs_map(), origin(1, 1)),
    ]
}

#[test]
fn aubin_examples() {
    let c = cfg();
    let v = aubin_wrt(&fixtures::exam1_map(), &origin(1, 1), &fixtures::c1(), &c).unwrap();
    assert!(v.holds);
    assert!(close(v.constant_estimate, 1.0, 0.1), "{}", v.constant_estimate);

    let v = aubin_wrt(&fixtures::indicator_map(), &origin(1, 1), &fixtures::c1(), &c).unwrap();
    assert!(v.holds);
    assert!(v.constant_estimate.abs() < 0.1);
    let v = aubin_wrt(&fixtures::indicator_map(), &origin(1, 1), &fixtures::real_line(), &c).unwrap();
    assert!(!v.holds);
    assert!(v.constant_estimate.is_infinite());
}

#[test]
fn relative_aubin_examples() {
    let c = cfg();
    assert!(relative_aubin(&fixtures::exam1_map(), &origin(1, 1), &c).unwrap().holds);
    let v = relative_aubin(&lcp_graph_fixture(), &origin(2, 2), &c).unwrap();
    assert!(v.holds);
    assert!(v.zero_slice.iter().all(|p| norm(p) <= c.eps_zero));
    assert!(v.witness_pieces.len() >= 5, "{:?}", v.witness_pieces);

    let v = relative_aubin(&fixtures::sqrt_abs_map(), &origin(1, 1), &c).unwrap();
    assert!(!v.holds);
    assert!(v.zero_slice.iter().any(|p| norm(p) > 0.5));
}

#[test]
fn zero_slice_holds_zero_and_is_monotone() {
    for (name, f, base) in map_fixtures() {
        let body = f.dom.clone().unwrap();
        let mut last = false;
        for eps in [1e-4, 1e-3, 1e-2, 1e-1] {
            let c = vacone::ToleranceConfig { eps_zero: eps, ..cfg() };
            let v = aubin_wrt(&f, &base, &body, &c).unwrap();
            assert!(v.zero_slice.iter().any(|p| norm(p) == 0.0), "{name}");
            assert!(!(last && !v.holds), "{name}: loosening eps_zero broke the verdict");
            last = v.holds;
        }
    }
}

#[test]
fn primal_and_dual_constants_agree() {
    let c = cfg();
    for (name, f, base) in map_fixtures() {
        let v = aubin_wrt(&f, &base, f.dom.as_ref().unwrap(), &c).unwrap();
        if v.direct_trend.iter().all(|t| t.1.is_finite()) && trend_slope(&v.direct_trend) >= -0.25 {
            assert!(v.holds, "{name}");
            assert!(v.constant_estimate >= v.direct_estimate - 0.1, "{name}: {} < {}", v.constant_estimate, v.direct_estimate);
        }
        if v.holds {
            let n = v.direct_trend.len();
            for t in &v.direct_trend[n - 2..] {
                assert!(t.1 <= v.constant_estimate + 0.1, "{name}: {t:?}");
            }
        }
    }
}

#[test]
fn lipschitz_examples() {
    let c = cfg();
    let v = lipschitz_wrt(&fixtures::indicator_rplus(), 0.0, &fixtures::c1(), &c).unwrap();
    assert!(v.holds && v.lip_estimate.abs() < 1e-9);

    let v = lipschitz_wrt(&fixtures::sqrt_fn(), 0.0, &fixtures::c1(), &c).unwrap();
    assert!(!v.holds);
    assert!(!v.singular_cone.is_zero());
    assert!(v.lip_estimate.is_infinite());
    assert!(trend_slope(&v.lip_trend) < -0.25);

    let v = lipschitz_wrt(&fixtures::abs_fn(), 0.0, &fixtures::real_line(), &c).unwrap();
    assert!(v.holds);
    assert!(close(v.lip_estimate, 1.0, 0.05));
    assert!(close(v.subdiff_bound, 1.0, 0.05));
}

#[test]
fn lipschitz_characterizations_agree() {
    let c = cfg();
    let cases: Vec<(ScalarFn, f64, ConvexBody)> = vec![
        (fixtures::indicator_rplus(), 0.0, fixtures::c1()),
        (fixtures::indicator_rplus(), 0.0, fixtures::real_line()),
        (fixtures::sqrt_fn(), 0.0, fixtures::c1()),
        (fixtures::abs_fn(), 0.0, fixtures::real_line()),
        (fixtures::f2(), 0.0, fixtures::c1()),
        (fixtures::f2(), 0.0, fixtures::c2()),
        (fixtures::f3(), 0.0, fixtures::c1()),
        (fixtures::square_fn(), 0.5, fixtures::real_line()),
    ];
    for (i, (f, x, body)) in cases.iter().enumerate() {
        let v = lipschitz_wrt(f, *x, body, &c).unwrap();
        assert_eq!(v.holds, v.subdiff_bound.is_finite(), "case {i}");
        assert_eq!(v.holds, v.singular_cone.is_zero(), "case {i}");
    }
}

#[test]
fn stationarity_examples() {
    let c = cfg();
    assert!(stationarity_check(&fixtures::f2(), 0.0, &fixtures::c1(), &c).unwrap().stationary);
    assert!(!stationarity_check(&fixtures::f2(), 0.0, &fixtures::c2(), &c).unwrap().stationary);
    assert!(!stationarity_check(&fixtures::f3(), 0.0, &fixtures::c1(), &c).unwrap().stationary);
    // Local solutions pass.
    assert!(stationarity_check(&fixtures::square_fn(), 0.0, &fixtures::real_line(), &c).unwrap().stationary);
    assert!(stationarity_check(&fixtures::indicator_rplus(), 0.0, &fixtures::c1(), &c).unwrap().stationary);
}

#[test]
fn screening_examples() {
    let c = cfg();
    let pieces = [fixtures::c1(), fixtures::c2()];
    let v = piecewise_screen(&fixtures::f2(), 0.0, &pieces, &c).unwrap();
    assert!(v.pieces[0].stationary && !v.pieces[1].stationary);
    assert!(!v.may_be_minimizer);

    let v = piecewise_screen(&fixtures::square_fn(), 0.0, &pieces, &c).unwrap();
    assert!(v.pieces.iter().all(|p| p.stationary) && v.may_be_minimizer);

    let whole = [fixtures::real_line()];
    let v = piecewise_screen(&fixtures::abs_fn(), 0.0, &whole, &c).unwrap();
    let direct = stationarity_check(&fixtures::abs_fn(), 0.0, &fixtures::real_line(), &c).unwrap();
    assert_eq!(v.may_be_minimizer, direct.stationary);

    assert!(piecewise_screen(&fixtures::f2(), 0.0, &[fixtures::c1()], &c).is_err());
    assert!(piecewise_screen(&fixtures::f2(), 0.0, &[], &c).is_err());
}
