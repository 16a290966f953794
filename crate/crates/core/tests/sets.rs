mod common;

use common::*;
use vacone::fixtures;
use vacone::sampling::sample_near;
use vacone::sets::{self, ConvexBody, SetDesc};
use vacone::Error;

fn s(x: f64) -> f64 {
    2.0 / (1.0 + (-2.0 * x).exp()) - 1.0
}

#[test]
fn membership_examples() {
    let c = cfg();
    assert!(sets::membership(&[0.0, 0.0], &rplus_times_r(), &c).unwrap());
    assert!(sets::membership(&[-1e-12, 0.0], &rplus_times_r(), &c).unwrap());
    assert!(!sets::membership(&[-1e-3, 0.0], &rplus_times_r(), &c).unwrap());
    assert!(sets::membership(&[0.0, 0.0], &fixtures::omega0(), &c).unwrap());
    assert!(sets::membership(&[0.7, s(0.7)], &fixtures::omega0(), &c).unwrap());
    assert!(!sets::membership(&[-0.1, s(-0.1)], &fixtures::omega0(), &c).unwrap());
}

#[test]
fn dimension_mismatch_is_reported() {
    let r = sets::membership(&[0.0, 0.0, 0.0], &rplus_times_r(), &cfg());
    assert!(matches!(r, Err(Error::Dimension { expected: 2, got: 3 })));
}

#[test]
fn distance_examples() {
    let c = cfg();
    assert!(close(sets::distance(&[-2.0, 0.0], &rplus_times_r(), &c).unwrap(), 2.0, 1e-12));
    let epi_abs = SetDesc::epigraph(fixtures::abs_fn());
    assert!(close(sets::distance(&[0.0, -1.0], &epi_abs, &c).unwrap(), 1.0, 1e-6));
    assert_eq!(sets::distance(&[0.3, s(0.3)], &fixtures::omega0(), &c).unwrap(), 0.0);
}

#[test]
fn projection_examples() {
    let c = cfg();
    let p = sets::project(&[-1.0, 3.0], &rplus_times_r(), &c).unwrap();
    assert_eq!(p.len(), 1);
    assert!(close(p[0][0], 0.0, 1e-12) && close(p[0][1], 3.0, 1e-12));

    let epi_abs = SetDesc::epigraph(fixtures::abs_fn());
    let p = sets::project(&[0.0, -1.0], &epi_abs, &c).unwrap();
    assert_eq!(p.len(), 1);
    assert!(p[0][0].abs() < 1e-6 && p[0][1].abs() < 1e-6);

    let inside = [2.0, 5.0];
    assert_eq!(sets::project(&inside, &rplus_times_r(), &c).unwrap(), vec![inside.to_vec()]);
}

#[test]
fn inverse_projector_examples() {
    let c = cfg();
    let om = fixtures::omega0();
    assert!(sets::in_inverse_projector(&[0.0, 0.0], &[0.0, 0.0], &om, &c).unwrap());
    assert!(sets::in_inverse_projector(&[0.0, 0.0], &[0.0, -1.0], &om, &c).unwrap());
    assert!(!sets::in_inverse_projector(&[0.0, 0.0], &[1.0, s(1.0) + 0.01], &om, &c).unwrap());
    let off = sets::in_inverse_projector(&[0.0, 1.0], &[0.0, 0.0], &om, &c);
    assert!(matches!(off, Err(Error::Input(_))));
}

#[test]
fn restriction_and_products() {
    let c = cfg();
    let om = fixtures::omega0();
    let restricted = sets::restrict(&om, &fixtures::right_half_plane()).unwrap();
    for x in [0.0, 0.05, 0.5, 2.0] {
        let p = [x, s(x)];
        assert!(sets::membership(&p, &restricted, &c).unwrap());
        let q = [x, s(x) + 0.1];
        assert_eq!(sets::membership(&q, &restricted, &c).unwrap(), sets::membership(&q, &om, &c).unwrap());
    }

    let rplus = SetDesc::boxed(vec![0.0], vec![INF]).unwrap();
    let prod = sets::product(rplus, SetDesc::whole(1));
    for p in [[0.0, 0.0], [1.0, -4.0], [-0.5, 2.0], [3.0, 7.0]] {
        assert_eq!(sets::membership(&p, &prod, &c).unwrap(), sets::membership(&p, &rplus_times_r(), &c).unwrap());
    }

    let a = SetDesc::boxed(vec![0.0, 0.0], vec![2.0, 2.0]).unwrap();
    let b = SetDesc::boxed(vec![1.0, 1.0], vec![3.0, 3.0]).unwrap();
    let u = sets::union(vec![a, b]).unwrap();
    for p in [[0.5, 0.5], [1.5, 1.5], [2.5, 2.5]] {
        assert!(sets::membership(&p, &u, &c).unwrap());
    }
    assert!(!sets::membership(&[0.5, 2.5], &u, &c).unwrap());
}

#[test]
fn convex_body_rejects_a_curve() {
    assert!(ConvexBody::new(fixtures::omega0()).is_err());
}

#[test]
fn sampling_examples() {
    let c = cfg();
    let single = SetDesc::singleton(&[1.0, 2.0]).unwrap();
    let s1 = sample_near(&single, &[1.0, 2.0], 0.5, 10, 7, &c).unwrap();
    assert!(s1.points.iter().all(|p| p == &vec![1.0, 2.0]));

    let s2 = sample_near(&rplus_times_r(), &[0.0, 0.0], 1.0, 200, 7, &c).unwrap();
    assert!(!s2.shortfall);
    assert!(s2.points.iter().all(|p| p[0] >= -c.tol_mem));

    let om = fixtures::omega0();
    let s3 = sample_near(&om, &[0.0, 0.0], 0.1, 100, 7, &c).unwrap();
    assert!(s3.points.len() > 10);
    for p in &s3.points {
        assert!((p[1] - s(p[0])).abs() <= 1e-9, "{p:?} is off the curve");
        assert!(p[0].hypot(p[1]) <= 0.1 + 1e-12);
    }
}

#[test]
fn sampling_is_seeded() {
    let c = cfg();
    let a = sample_near(&rplus_times_r(), &[0.0, 0.0], 1.0, 50, 3, &c).unwrap();
    let b = sample_near(&rplus_times_r(), &[0.0, 0.0], 1.0, 50, 3, &c).unwrap();
    let d = sample_near(&rplus_times_r(), &[0.0, 0.0], 1.0, 50, 4, &c).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, d);
}
