//! Coderivatives of set-valued maps as slices of graph normal cones.
//!
//! A graph cone is stored in `(y*, x*)` coordinates: a pair belongs to it
//! when `(x*, -y*)` is a normal to the graph.

use crate::cones::{slice, Cone};
use crate::config::ToleranceConfig;
use crate::error::{check_dim, Error, Result};
use crate::normals::{limiting_normal_cone_with, Engine, NormalQuery};
use crate::sets::{ConvexBody, SetDesc};

#[derive(Debug, Clone, PartialEq)]
pub struct MultiMap {
    pub n: usize,
    pub m: usize,
    pub graph: SetDesc,
    /// The domain, when it is a convex polyhedral set.
    pub dom: Option<ConvexBody>,
}

impl MultiMap {
    pub fn new(n: usize, m: usize, graph: SetDesc, dom: Option<ConvexBody>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Input("map dimensions must be positive".into()));
        }
        check_dim(n + m, graph.dim())?;
        if let Some(d) = &dom {
            check_dim(n, d.dim())?;
        }
        Ok(Self { n, m, graph, dom })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasePair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl BasePair {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { x, y }
    }

    pub fn joined(&self) -> Vec<f64> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.y);
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphCone {
    /// Cone of pairs `(y*, x*)`.
    pub cone: Cone,
    pub engine: Engine,
    pub shortfall: bool,
}

/// `(x*, -y*)` rays to `(y*, x*)` rays.
pub fn to_coderivative_coords(k: &Cone, n: usize) -> Cone {
    let rays = k
        .rays
        .iter()
        .map(|r| {
            let mut v: Vec<f64> = r[n..].iter().map(|a| -a).collect();
            v.extend_from_slice(&r[..n]);
            v
        })
        .collect();
    Cone { dim: k.dim, rays, exact: None, provenance: k.provenance.clone() }
}

/// Inverse of [`to_coderivative_coords`]: `(y*, x*)` back to `(x*, -y*)`.
pub fn to_normal_coords(k: &Cone, m: usize) -> Cone {
    let rays = k
        .rays
        .iter()
        .map(|r| {
            let mut v: Vec<f64> = r[m..].to_vec();
            v.extend(r[..m].iter().map(|a| -a));
            v
        })
        .collect();
    Cone { dim: k.dim, rays, exact: None, provenance: k.provenance.clone() }
}

fn check_base(f: &MultiMap, base: &BasePair) -> Result<()> {
    check_dim(f.n, base.x.len())?;
    check_dim(f.m, base.y.len())
}

/// Graph of the coderivative with respect to `C` (classical when `None`).
pub fn coderivative_graph_with(
    f: &MultiMap,
    base: &BasePair,
    c: Option<&ConvexBody>,
    engine: Engine,
    cfg: &ToleranceConfig,
) -> Result<GraphCone> {
    check_base(f, base)?;
    let body = match c {
        Some(c) => {
            check_dim(f.n, c.dim())?;
            if !c.contains(&base.x, cfg.tol_mem) {
                return Err(Error::Input("the base point is not in the convex body".into()));
            }
            Some(c.times_whole(f.m))
        }
        None => None,
    };
    let q = NormalQuery::new(base.joined(), f.graph.clone(), body, cfg.clone())?;
    let res = limiting_normal_cone_with(&q, engine)?;
    Ok(GraphCone { cone: to_coderivative_coords(&res.cone, f.n), engine: res.engine, shortfall: res.shortfall })
}

pub fn coderivative_graph_wrt(f: &MultiMap, base: &BasePair, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<GraphCone> {
    coderivative_graph_with(f, base, Some(c), Engine::B, cfg)
}

/// `D*_C F(x, y)(y*)` as a point set.
pub fn coderivative_slice(g: &GraphCone, m: usize, ys: &[f64], cfg: &ToleranceConfig) -> Result<Vec<Vec<f64>>> {
    slice(&g.cone, 0..m, ys, cfg)
}

pub fn coderivative_wrt(
    f: &MultiMap,
    base: &BasePair,
    c: &ConvexBody,
    ys: &[f64],
    cfg: &ToleranceConfig,
) -> Result<Vec<Vec<f64>>> {
    check_dim(f.m, ys.len())?;
    let g = coderivative_graph_wrt(f, base, c, cfg)?;
    coderivative_slice(&g, f.m, ys, cfg)
}

fn domain(f: &MultiMap) -> Result<&ConvexBody> {
    f.dom.as_ref().ok_or_else(|| Error::Input("the map has no convex domain attached".into()))
}

/// Coderivative graph with respect to the domain.
pub fn relative_coderivative(f: &MultiMap, base: &BasePair, cfg: &ToleranceConfig) -> Result<GraphCone> {
    coderivative_graph_with(f, base, Some(domain(f)?), Engine::B, cfg)
}

pub fn relative_coderivative_with(f: &MultiMap, base: &BasePair, engine: Engine, cfg: &ToleranceConfig) -> Result<GraphCone> {
    coderivative_graph_with(f, base, Some(domain(f)?), engine, cfg)
}

pub fn classical_coderivative_graph(f: &MultiMap, base: &BasePair, cfg: &ToleranceConfig) -> Result<GraphCone> {
    coderivative_graph_with(f, base, None, Engine::B, cfg)
}

pub use crate::fixtures::lcp_graph_fixture;
