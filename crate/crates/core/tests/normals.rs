mod common;

use common::*;
use vacone::fixtures;
use vacone::normals::{
    frechet_normal_cone, limiting_normal_cone, limiting_normal_cone_with, prox_member_by_projection, prox_normal_cone,
    prox_normal_member, prox_normal_member_with, tangent_cone, Engine, NormalQuery, ProxForm,
};
use vacone::sets::{restrict, SetDesc};

fn exam0_query(with_c: bool) -> NormalQuery {
    let c = with_c.then(fixtures::right_half_plane);
    NormalQuery::new(vec![0.0, 0.0], fixtures::omega0(), c, cfg()).unwrap()
}

#[test]
fn proximal_membership_examples() {
    let q = exam0_query(true);
    assert!(prox_normal_member(&[0.0, -1.0], &q).unwrap());
    assert!(prox_normal_member(&[0.5, -1.0], &q).unwrap());
    assert!(!prox_normal_member(&[-1.0, 1.0], &q).unwrap());
    assert!(prox_normal_member(&[0.0, 0.0], &q).unwrap());
    assert!(prox_normal_member_with(&[0.0, -1.0], &q, ProxForm::FreeDelta).unwrap().accepted);
    assert!(!prox_normal_member_with(&[-1.0, 1.0], &q, ProxForm::FreeDelta).unwrap().accepted);
}

#[test]
fn inequality_and_projection_forms_agree() {
    let q = exam0_query(true);
    for t in (0..24).map(|k| k as f64 * 15f64.to_radians()) {
        let v = [t.cos(), t.sin()];
        assert_eq!(prox_normal_member(&v, &q).unwrap(), prox_member_by_projection(&v, &q).unwrap(), "direction {v:?}");
    }
}

#[test]
fn base_point_must_lie_in_the_set() {
    assert!(NormalQuery::new(vec![0.0, 1.0], fixtures::omega0(), None, cfg()).is_err());
    let left = body(SetDesc::boxed(vec![-INF, -INF], vec![-1.0, INF]).unwrap());
    assert!(NormalQuery::new(vec![0.0, 0.0], fixtures::omega0(), Some(left), cfg()).is_err());
}

#[test]
fn proximal_cone_of_the_curve_is_the_wedge() {
    let c = cfg();
    let k = prox_normal_cone(&exam0_query(true)).unwrap();
    assert!(same_cone(&k, &exact(2, vec![wedge()]), 2.0 * c.tol_dir));
}

#[test]
fn limiting_cone_of_the_curve() {
    let c = cfg();
    for engine in [Engine::A, Engine::B] {
        let rel = limiting_normal_cone_with(&exam0_query(true), engine).unwrap().cone;
        assert!(same_cone(&rel, &exam0_relative(), 2.0 * c.tol_dir), "engine {engine:?}");
        let cla = limiting_normal_cone_with(&exam0_query(false), engine).unwrap().cone;
        assert!(same_cone(&cla, &exam0_classical(), 2.0 * c.tol_dir), "engine {engine:?}");
    }
}

#[test]
fn relative_cone_is_strictly_smaller_than_the_feasible_part_of_the_classical_one() {
    let c = cfg();
    let rel = limiting_normal_cone(&exam0_query(true)).unwrap();
    let classical_feasible = exact(2, vec![vacone::cones::PolyCone::new(vec![vec![1.0, 1.0], vec![-1.0, 0.0]])]);
    assert!(!rel.equal_within(&classical_feasible, 2.0 * c.tol_dir, &c));
    assert!(rel.contains(&[-1.0, 1.0], &c));
    let fr = frechet_normal_cone(&[0.0, 0.0], &fixtures::omega0(), &c).unwrap();
    for r in &rel.rays {
        assert!(fr.contains(r, &c), "{r:?} not in the Frechet cone");
    }
}

#[test]
fn proximal_inside_limiting() {
    let c = cfg();
    let q = exam0_query(true);
    let lim = limiting_normal_cone(&q).unwrap();
    for r in &prox_normal_cone(&q).unwrap().rays {
        assert!(lim.contains(r, &c));
    }
}

#[test]
fn interior_and_polyhedral_boundary_points() {
    let whole = NormalQuery::new(vec![0.3, -0.2], SetDesc::whole(2), Some(body(SetDesc::whole(2))), cfg()).unwrap();
    assert!(limiting_normal_cone(&whole).unwrap().is_zero());
    let half = NormalQuery::new(vec![0.0, 0.0], rplus_times_r(), Some(body(rplus_times_r())), cfg()).unwrap();
    for engine in [Engine::A, Engine::B] {
        assert!(limiting_normal_cone_with(&half, engine).unwrap().cone.is_zero(), "engine {engine:?}");
    }
}

#[test]
fn frechet_examples() {
    let c = cfg();
    let fr = frechet_normal_cone(&[0.0, 0.0], &fixtures::omega0(), &c).unwrap();
    assert!(same_cone(&fr, &exam0_classical(), 2.0 * c.tol_dir));
    assert!(frechet_normal_cone(&[1.0, 1.0], &SetDesc::whole(2), &c).unwrap().is_zero());

    let epi_abs = SetDesc::epigraph(fixtures::abs_fn());
    let fr = frechet_normal_cone(&[0.0, 0.0], &epi_abs, &c).unwrap();
    let expected = exact(2, vec![vacone::cones::PolyCone::new(vec![vec![1.0, 1.0], vec![-1.0, 1.0]])]);
    assert!(same_cone(&fr, &expected, 2.0 * c.tol_dir));

    // The epigraph of f3 on [0, inf) x R: no Frechet normal is feasible.
    let epi = restrict(&SetDesc::epigraph(fixtures::f3()), &fixtures::right_half_plane()).unwrap();
    let fr = frechet_normal_cone(&[0.0, 0.0], &epi, &c).unwrap();
    assert!(!fr.is_zero());
    assert!(fr.rays.iter().all(|r| r[0] < -0.5));
}

#[test]
fn tangent_examples() {
    let c = cfg();
    let t = tangent_cone(&[0.0, 0.0], &fixtures::omega0(), &c).unwrap();
    assert!(same_cone(&t, &ray_cone(2, &[&[1.0, 1.0]]), 2.0 * c.tol_dir));

    let t = tangent_cone(&[0.0, 0.0], &rplus_times_r(), &c).unwrap();
    let right = exact(2, vec![vacone::cones::PolyCone::new(vec![vec![-1.0, 0.0]])]);
    assert!(same_cone(&t, &right, 2.0 * c.tol_dir));

    let t = tangent_cone(&[1.0, 1.0], &rplus_times_r(), &c).unwrap();
    for d in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [-0.6, 0.8]] {
        assert!(t.contains(&d, &c));
    }
}
