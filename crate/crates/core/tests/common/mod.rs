#![allow(dead_code)]

use vacone::cones::{Cone, PolyCone};
use vacone::sets::{ConvexBody, SetDesc};
use vacone::ToleranceConfig;

pub const INF: f64 = f64::INFINITY;

pub fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

pub fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.iter().map(|a| a / n).collect()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

pub fn rplus_times_r() -> SetDesc {
    SetDesc::boxed(vec![0.0, -INF], vec![INF, INF]).unwrap()
}

pub fn body(s: SetDesc) -> ConvexBody {
    ConvexBody::new(s).unwrap()
}

/// `{(a, b) : 0 <= a <= -b}`.
pub fn wedge() -> PolyCone {
    PolyCone::new(vec![vec![-1.0, 0.0], vec![1.0, 1.0]])
}

/// `{(a, b) : a + b <= 0}`.
pub fn halfplane() -> PolyCone {
    PolyCone::new(vec![vec![1.0, 1.0]])
}

pub fn exact(dim: usize, pieces: Vec<PolyCone>) -> Cone {
    Cone::from_pieces(dim, pieces, &cfg())
}

/// The relative normal cone of the curve example: wedge plus the ray (-1, 1).
pub fn exam0_relative() -> Cone {
    exact(2, vec![wedge(), PolyCone::ray(&[-1.0, 1.0])])
}

pub fn exam0_classical() -> Cone {
    exact(2, vec![halfplane()])
}

pub fn ray_cone(dim: usize, rays: &[&[f64]]) -> Cone {
    Cone::from_rays(dim, rays.iter().map(|r| r.to_vec()).collect(), cfg().tol_dir)
}

/// Two-sided angular agreement of sampled cones.
pub fn same_cone(a: &Cone, b: &Cone, tol: f64) -> bool {
    a.hausdorff(b, cfg().tol_dir) <= tol
}

pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}
