mod common;

use common::*;
use proptest::prelude::*;
use vacone::cones::{slice, Cone};
use vacone::coderivatives::{to_coderivative_coords, to_normal_coords};
use vacone::fixtures;
use vacone::linalg::{dist, norm};
use vacone::sets::{self, HalfSpace, Polyhedron, SetDesc};

fn test_sets() -> Vec<SetDesc> {
    vec![
        rplus_times_r(),
        SetDesc::boxed(vec![-1.0, -0.5], vec![0.5, 2.0]).unwrap(),
        SetDesc::polyhedron(Polyhedron::new(2, vec![HalfSpace::new(vec![1.0, 1.0], 0.0), HalfSpace::new(vec![-1.0, 0.0], 0.0)], vec![])).unwrap(),
        fixtures::omega0(),
        fixtures::exam1_map().graph,
    ]
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 2)
}

fn direction(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim).prop_filter("nonzero", |v| norm(v) > 0.1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projection_is_idempotent(x in point(), which in 0usize..5) {
        let c = cfg();
        let s = &test_sets()[which];
        for p in sets::project(&x, s, &c).unwrap() {
            prop_assert!(sets::membership(&p, s, &c).unwrap());
            let again = sets::project(&p, s, &c).unwrap();
            prop_assert!(again.iter().any(|q| dist(q, &p) <= 1e-6), "{p:?} -> {again:?}");
        }
    }

    #[test]
    fn distance_is_one_lipschitz(x in point(), y in point(), which in 0usize..5) {
        let c = cfg();
        let s = &test_sets()[which];
        let dx = sets::distance(&x, s, &c).unwrap();
        let dy = sets::distance(&y, s, &c).unwrap();
        prop_assert!((dx - dy).abs() <= dist(&x, &y) + 1e-6);
    }

    #[test]
    fn restriction_is_intersection(x in point(), which in 0usize..5) {
        let c = cfg();
        let s = &test_sets()[which];
        let body = fixtures::c1().times_whole(1);
        let r = sets::restrict(s, &body).unwrap();
        let both = sets::membership(&x, s, &c).unwrap() && body.contains(&x, c.tol_mem);
        prop_assert_eq!(sets::membership(&x, &r, &c).unwrap(), both);
    }

    #[test]
    fn cone_membership_is_scale_invariant(v in direction(2), t in 1e-3f64..1e3, a in direction(2), b in direction(2)) {
        let c = cfg();
        let k = Cone::from_rays(2, vec![unit(&a), unit(&b)], c.tol_dir);
        let scaled: Vec<f64> = v.iter().map(|x| x * t).collect();
        prop_assert_eq!(k.contains(&v, &c), k.contains(&scaled, &c));
    }

    #[test]
    fn zero_slice_holds_zero(rays in prop::collection::vec(direction(4), 0..6), split in 1usize..4) {
        let c = cfg();
        let k = Cone::from_rays(4, rays.iter().map(|r| unit(r)).collect(), c.tol_dir);
        let s = slice(&k, 0..split, &vec![0.0; split], &c).unwrap();
        prop_assert!(s.iter().any(|p| norm(p) == 0.0));
    }

    #[test]
    fn coordinate_flip_round_trips(rays in prop::collection::vec(direction(3), 1..6), n in 1usize..3) {
        let c = cfg();
        let k = Cone::from_rays(3, rays.iter().map(|r| unit(r)).collect(), c.tol_dir);
        let back = to_normal_coords(&to_coderivative_coords(&k, n), 3 - n);
        prop_assert_eq!(back.rays, k.rays);
    }
}
