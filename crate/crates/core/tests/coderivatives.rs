mod common;

use common::*;
use vacone::coderivatives::{
    classical_coderivative_graph, coderivative_graph_wrt, coderivative_slice, coderivative_wrt, lcp_graph_fixture,
    relative_coderivative, BasePair, MultiMap,
};
use vacone::fixtures;
use vacone::sets::{self, SetDesc};
use vacone::Error;

fn origin(n: usize, m: usize) -> BasePair {
    BasePair::new(vec![0.0; n], vec![0.0; m])
}

#[test]
fn curve_map_graph_is_one_ray() {
    let c = cfg();
    let g = coderivative_graph_wrt(&fixtures::exam1_map(), &origin(1, 1), &fixtures::c1(), &c).unwrap();
    assert!(same_cone(&g.cone, &ray_cone(2, &[&[-1.0, -1.0]]), 2.0 * c.tol_dir), "{:?}", g.cone.rays);
}

#[test]
fn curve_map_slices() {
    let c = cfg();
    let f = fixtures::exam1_map();
    let base = origin(1, 1);
    let zero = coderivative_wrt(&f, &base, &fixtures::c1(), &[0.0], &c).unwrap();
    assert_eq!(zero, vec![vec![0.0]]);
    let minus = coderivative_wrt(&f, &base, &fixtures::c1(), &[-1.0], &c).unwrap();
    assert!(!minus.is_empty());
    assert!(minus.iter().all(|p| close(p[0], -1.0, 0.02)), "{minus:?}");
    assert!(coderivative_wrt(&f, &base, &fixtures::c1(), &[1.0], &c).unwrap().is_empty());
}

#[test]
fn identity_map_has_the_diagonal() {
    let c = cfg();
    let f = fixtures::identity_map();
    let expected = ray_cone(2, &[&[1.0, 1.0], &[-1.0, -1.0]]);
    let g = coderivative_graph_wrt(&f, &origin(1, 1), &fixtures::real_line(), &c).unwrap();
    assert!(same_cone(&g.cone, &expected, 2.0 * c.tol_dir));
    let g = classical_coderivative_graph(&f, &origin(1, 1), &c).unwrap();
    assert!(same_cone(&g.cone, &expected, 2.0 * c.tol_dir));
    let one = coderivative_slice(&g, 1, &[2.0], &c).unwrap();
    assert!(one.iter().all(|p| close(p[0], 2.0, 0.05)) && !one.is_empty());
}

#[test]
fn flat_graphs_have_horizontal_normals() {
    let c = cfg();
    let expected = ray_cone(2, &[&[1.0, 0.0], &[-1.0, 0.0]]);
    let base = BasePair::new(vec![0.5], vec![0.0]);
    let g = coderivative_graph_wrt(&fixtures::constant_map(), &base, &fixtures::real_line(), &c).unwrap();
    assert!(same_cone(&g.cone, &expected, 2.0 * c.tol_dir));

    let g = relative_coderivative(&fixtures::indicator_map(), &origin(1, 1), &c).unwrap();
    assert!(same_cone(&g.cone, &expected, 2.0 * c.tol_dir), "{:?}", g.cone.rays);
}

#[test]
fn relative_coderivative_needs_a_domain() {
    let f = MultiMap::new(1, 1, SetDesc::whole(2), None).unwrap();
    let r = relative_coderivative(&f, &origin(1, 1), &cfg());
    assert!(matches!(r, Err(Error::Input(_))));
}

#[test]
fn relative_coderivative_examples() {
    let c = cfg();
    let g = relative_coderivative(&fixtures::exam1_map(), &origin(1, 1), &c).unwrap();
    assert!(same_cone(&g.cone, &ray_cone(2, &[&[-1.0, -1.0]]), 2.0 * c.tol_dir));

    let g = relative_coderivative(&lcp_graph_fixture(), &origin(2, 2), &c).unwrap();
    let zero = coderivative_slice(&g, 2, &[0.0, 0.0], &c).unwrap();
    assert_eq!(zero, vec![vec![0.0, 0.0]]);
}

#[test]
fn classical_examples() {
    let c = cfg();
    let cla = classical_coderivative_graph(&fixtures::exam1_map(), &origin(1, 1), &c).unwrap();
    assert!(cla.cone.contains(&[-1.0, -1.0], &c));
    let rel = relative_coderivative(&fixtures::exam1_map(), &origin(1, 1), &c).unwrap();
    for r in &rel.cone.rays {
        assert!(cla.cone.contains(r, &c));
    }
    assert!(cla.cone.rays.len() > rel.cone.rays.len());

    let solid = MultiMap::new(1, 1, SetDesc::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap(), None).unwrap();
    assert!(classical_coderivative_graph(&solid, &origin(1, 1), &c).unwrap().cone.is_zero());
}

#[test]
fn lcp_graph_membership() {
    let c = cfg();
    let g = &lcp_graph_fixture().graph;
    assert!(sets::membership(&[0.0, 0.0, 0.0, 0.0], g, &c).unwrap());
    assert!(sets::membership(&[1.0, 1.0, 0.0, 0.0], g, &c).unwrap());
    assert!(!sets::membership(&[-1.0, 0.0, 0.0, 0.0], g, &c).unwrap());
    // x = 0, y = -1: the second complementarity row forces v = 1.
    assert!(sets::membership(&[0.0, -1.0, 0.0, 1.0], g, &c).unwrap());
    assert!(!sets::membership(&[0.0, -1.0, 0.0, 0.0], g, &c).unwrap());
}
