//! Built-in sets, bodies, functions and maps used by the example suite.

use crate::coderivatives::MultiMap;
use crate::expr::Expr;
use crate::sets::{Curve, ConvexBody, HalfSpace, Polyhedron, ScalarFn, SetDesc};

const INF: f64 = f64::INFINITY;

/// `s(x) = 2/(1+e^{-2x}) - 1`, a sigmoid with `s(0) = 0` and `s'(0) = 1`.
pub const SIGMOID: &str = "2/(1+exp(-2*x))-1";

fn parse(src: &str) -> Expr {
    Expr::parse(src, &["x"]).expect("built-in expression")
}

fn scalar(branches: &[(f64, f64, &str)]) -> ScalarFn {
    ScalarFn::parse(branches).expect("built-in function")
}

/// The curve `{(x, s(x)) : x >= 0}`.
pub fn omega0() -> SetDesc {
    SetDesc::curve(Curve::new(0, 0.0, INF, vec![parse(SIGMOID)])).expect("curve")
}

/// `[0, inf) x R`.
pub fn right_half_plane() -> ConvexBody {
    ConvexBody::new(SetDesc::boxed(vec![0.0, -INF], vec![INF, INF]).expect("box")).expect("convex")
}

/// `C1 = [0, inf)`.
pub fn c1() -> ConvexBody {
    ConvexBody::interval(0.0, INF).expect("interval")
}

/// `C2 = (-inf, 0]`.
pub fn c2() -> ConvexBody {
    ConvexBody::interval(-INF, 0.0).expect("interval")
}

pub fn real_line() -> ConvexBody {
    ConvexBody::whole(1)
}

/// `x^2` on `[0, inf)`, `x` on `(-inf, 0]`.
pub fn f2() -> ScalarFn {
    scalar(&[(0.0, INF, "x^2"), (-INF, 0.0, "x")])
}

/// `-x` on `[0, inf)`, `+inf` elsewhere.
pub fn f3() -> ScalarFn {
    scalar(&[(0.0, INF, "-x")])
}

/// Indicator of `[0, inf)`.
pub fn indicator_rplus() -> ScalarFn {
    scalar(&[(0.0, INF, "0")])
}

/// `sqrt(x)` on `[0, inf)`.
pub fn sqrt_fn() -> ScalarFn {
    scalar(&[(0.0, INF, "sqrt(x)")])
}

pub fn abs_fn() -> ScalarFn {
    scalar(&[(-INF, INF, "abs(x)")])
}

pub fn square_fn() -> ScalarFn {
    scalar(&[(-INF, INF, "x^2")])
}

pub fn constant_fn() -> ScalarFn {
    scalar(&[(-INF, INF, "1")])
}

/// `F1(x) = (-inf, s(x)]` for `x >= 0`: the hypograph of the sigmoid.
pub fn exam1_map() -> MultiMap {
    let graph = SetDesc::hypograph(scalar(&[(0.0, INF, SIGMOID)]));
    MultiMap::new(1, 1, graph, Some(c1())).expect("map")
}

/// `Delta_{R+}(x) = {0}` for `x >= 0`.
pub fn indicator_map() -> MultiMap {
    let graph = SetDesc::boxed(vec![0.0, 0.0], vec![INF, 0.0]).expect("box");
    MultiMap::new(1, 1, graph, Some(c1())).expect("map")
}

pub fn identity_map() -> MultiMap {
    let graph = SetDesc::polyhedron(Polyhedron::new(2, vec![], vec![HalfSpace::new(vec![1.0, -1.0], 0.0)])).expect("poly");
    MultiMap::new(1, 1, graph, Some(real_line())).expect("map")
}

pub fn constant_map() -> MultiMap {
    let graph = SetDesc::boxed(vec![-INF, 0.0], vec![INF, 0.0]).expect("box");
    MultiMap::new(1, 1, graph, Some(real_line())).expect("map")
}

/// `F(x) = {sqrt|x|}`: graph is `{(±t^2, t) : t >= 0}`.
pub fn sqrt_abs_map() -> MultiMap {
    let right = SetDesc::curve(Curve::new(1, 0.0, INF, vec![parse("x^2")])).expect("curve");
    let left = SetDesc::curve(Curve::new(1, 0.0, INF, vec![parse("-x^2")])).expect("curve");
    let graph = SetDesc::union(vec![right, left]).expect("union");
    MultiMap::new(1, 1, graph, Some(real_line())).expect("map")
}

/// The complementarity matrix of the LCP example.
pub const LCP_M: [[f64; 2]; 2] = [[-1.0, 0.0], [1.0, 1.0]];

/// Solution map of the parametric LCP `0 <= w ⟂ M w + z >= 0` with parameter
/// `z = (x, y)` and solution `w = (u, v)`, in coordinates `(x, y, u, v)`. The
/// graph is the union of nine polyhedral pieces, one per assignment of each
/// index to "w_i = 0 < (Mw+z)_i", "w_i > 0 = (Mw+z)_i" or "both zero".
/// Strict inequalities are closed.
pub fn lcp_graph_fixture() -> MultiMap {
    let mut pieces = Vec::new();
    for class0 in 0..3 {
        for class1 in 0..3 {
            pieces.push(lcp_piece([class0, class1]));
        }
    }
    let graph = SetDesc::union(pieces).expect("union");
    let dom = ConvexBody::new(SetDesc::boxed(vec![0.0, -INF], vec![INF, INF]).expect("box")).expect("convex");
    MultiMap::new(2, 2, graph, Some(dom)).expect("map")
}

/// Class 0: `w_i = 0, (Mw+z)_i >= 0`; class 1: `w_i >= 0, (Mw+z)_i = 0`;
/// class 2: both zero.
fn lcp_piece(classes: [usize; 2]) -> SetDesc {
    let mut rows = Vec::new();
    let mut eqs = Vec::new();
    for (i, class) in classes.iter().enumerate() {
        let mut sol = vec![0.0; 4];
        sol[2 + i] = 1.0;
        let mut comp = vec![0.0; 4];
        comp[i] = 1.0;
        comp[2] = LCP_M[i][0];
        comp[3] = LCP_M[i][1];
        let neg = |v: &[f64]| v.iter().map(|a| -a).collect::<Vec<_>>();
        match class {
            0 => {
                eqs.push(HalfSpace::new(sol, 0.0));
                rows.push(HalfSpace::new(neg(&comp), 0.0));
            }
            1 => {
                rows.push(HalfSpace::new(neg(&sol), 0.0));
                eqs.push(HalfSpace::new(comp, 0.0));
            }
            _ => {
                eqs.push(HalfSpace::new(sol, 0.0));
                eqs.push(HalfSpace::new(comp, 0.0));
            }
        }
    }
    SetDesc::polyhedron(Polyhedron::new(4, rows, eqs)).expect("piece")
}
