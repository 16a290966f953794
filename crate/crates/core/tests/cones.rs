mod common;

use common::*;
use vacone::cones::{cluster_limits, slice, Cone, LimitCluster};

fn wedge_sampled(step_deg: f64) -> Cone {
    let mut rays = Vec::new();
    let mut t = -90.0f64;
    while t <= -45.0 + 1e-9 {
        rays.push(vec![t.to_radians().cos(), t.to_radians().sin()]);
        t += step_deg;
    }
    Cone::from_rays(2, rays, cfg().tol_dir)
}

#[test]
fn membership_examples() {
    let c = cfg();
    for k in [exam0_relative(), ray_cone(2, &[&[1.0, 0.0]]), Cone::zero(2)] {
        assert!(k.contains(&[0.0, 0.0], &c));
    }
    let ray = ray_cone(2, &[&unit(&[-1.0, 1.0])]);
    assert!(ray.contains(&[-2.0, 2.0], &c));
    assert!(!ray.contains(&[2.0, -2.0], &c));
    let w = exact(2, vec![wedge()]);
    assert!(!w.contains(&[1.0, 0.0], &c));
    assert!(w.contains(&[0.0, -1.0], &c));
    assert!(w.contains(&[1.0, -1.0], &c));
    assert!(wedge_sampled(1.0).contains(&[0.3, -1.0], &c));
}

#[test]
fn equality_examples() {
    let c = cfg();
    let k = exam0_relative();
    assert!(k.equal_within(&k, 0.0, &c));
    assert!(!k.equal_within(&exact(2, vec![wedge()]), 2.0 * c.tol_dir, &c));
    assert!(wedge_sampled(1.0).equal_within(&wedge_sampled(0.25), 2.0 * c.tol_dir, &c));
    assert!(wedge_sampled(1.0).equal_within(&exact(2, vec![wedge()]), 2.0 * c.tol_dir, &c));
}

#[test]
fn hull_examples() {
    let c = cfg();
    let single = ray_cone(2, &[&[0.0, 1.0]]);
    assert!(single.conic_hull(&c).equal_within(&single, 1e-12, &c));

    let quarter = ray_cone(2, &[&[1.0, 0.0], &[0.0, 1.0]]).conic_hull(&c);
    assert!(quarter.contains(&[1.0, 1.0], &c));
    assert!(quarter.contains(&[1.0, 0.2], &c));
    assert!(!quarter.contains(&[-1.0, 0.0], &c));
    assert!(!quarter.contains(&[1.0, -0.5], &c));

    let mut rays = wedge_sampled(0.5).rays;
    rays.push(unit(&[-1.0, 1.0]));
    let hull = Cone::from_rays(2, rays, c.tol_dir).conic_hull(&c);
    assert!(same_cone(&hull, &exam0_classical(), 2.0 * c.tol_dir), "{}", hull.hausdorff(&exam0_classical(), c.tol_dir));
}

#[test]
fn cluster_examples() {
    let c = cfg();
    let mut constant = LimitCluster::default();
    for &r in &c.radius_schedule {
        constant.push(r, vec![(vec![0.0, 1.0], vec![])]);
    }
    let k = cluster_limits(2, &constant, &c);
    assert_eq!(k.rays.len(), 1);
    assert!(k.rays[0][0].abs() < 1e-12);

    // Normals along the curve: (-s'(r), 1) with s'(r) = 1 - s(r)^2 -> 1.
    let mut curve = LimitCluster::default();
    for &r in &c.radius_schedule {
        let s = 2.0 / (1.0 + (-2.0 * r).exp()) - 1.0;
        curve.push(r, vec![(unit(&[-(1.0 - s * s), 1.0]), vec![])]);
    }
    let k = cluster_limits(2, &curve, &c);
    assert_eq!(k.rays.len(), 1);
    assert!(vacone::linalg::angle(&k.rays[0], &[-1.0, 1.0]) < 1e-3);

    let mut transient = LimitCluster::default();
    for (i, &r) in c.radius_schedule.iter().enumerate() {
        let mut dirs = vec![(vec![1.0, 0.0], vec![])];
        if i == 0 {
            dirs.push((vec![0.0, -1.0], vec![]));
        }
        transient.push(r, dirs);
    }
    let k = cluster_limits(2, &transient, &c);
    assert_eq!(k.rays, vec![vec![1.0, 0.0]]);
}

#[test]
fn slice_examples() {
    let c = cfg();
    // The ray R+(-1, 1) in (x*, -y*) coordinates.
    let k = ray_cone(2, &[&[-1.0, 1.0]]);
    let at_one = slice(&k, 1..2, &[1.0], &c).unwrap();
    assert_eq!(at_one.len(), 1);
    assert!(close(at_one[0][0], -1.0, 1e-12));
    assert!(slice(&k, 1..2, &[-1.0], &c).unwrap().is_empty());
    assert_eq!(slice(&k, 1..2, &[0.0], &c).unwrap(), vec![vec![0.0]]);
    assert!(slice(&k, 1..2, &[1.0, 2.0], &c).is_err());
}
