//! Decision procedures: Aubin property and local Lipschitz continuity with
//! respect to a set, and first-order stationarity on a convex body.
//!
//! Every verdict comes from the dual objects (coderivative or subdifferential
//! cones). The primal estimates sampled alongside are reported for cross
//! checking only.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::coderivatives::{coderivative_graph_with, BasePair, GraphCone, MultiMap};
use crate::cones::{slice, zero_block_tolerance, Cone};
use crate::config::ToleranceConfig;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{dist, norm};
use crate::normals::Engine;
use crate::sampling::{sample_near, stream_tag};
use crate::sets::{restrict, ConvexBody, ScalarFn, SetDesc};
use crate::subdiff::{epigraph_normal_cone, in_effective_domain, proximal_certificate, Certificate};

/// Log-log slope of per-radius estimates below which the estimate diverges.
const DIVERGENCE_SLOPE: f64 = -0.25;
const DIVERGENCE_CAP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AubinVerdict {
    pub holds: bool,
    pub constant_estimate: f64,
    pub zero_slice: Vec<Vec<f64>>,
    /// Graph-cone rays in `(y*, x*)` coordinates.
    pub witness_rays: Vec<Vec<f64>>,
    /// Indices of the graph pieces whose normals produced the witness rays.
    pub witness_pieces: Vec<usize>,
    pub direct_estimate: f64,
    /// `(radius, sampled constant)` from the primal inclusion.
    pub direct_trend: Vec<(f64, f64)>,
    pub engine: Engine,
    pub shortfall: bool,
}

/// Verdict from a precomputed graph cone of `(y*, x*)` rays.
pub fn aubin_from_graph(g: &GraphCone, m: usize, cfg: &ToleranceConfig) -> Result<(bool, f64, Vec<Vec<f64>>)> {
    let tau = zero_block_tolerance(cfg);
    let zero_slice = slice(&g.cone, 0..m, &vec![0.0; m], cfg)?;
    let mut holds = true;
    let mut constant: f64 = 0.0;
    for r in &g.cone.rays {
        let (ys, xs) = (norm(&r[..m]), norm(&r[m..]));
        if ys <= tau {
            if xs > tau {
                holds = false;
            }
        } else {
            constant = constant.max(xs / ys);
        }
    }
    Ok((holds, if holds { constant } else { f64::INFINITY }, zero_slice))
}

pub fn aubin_wrt_with(f: &MultiMap, base: &BasePair, c: &ConvexBody, engine: Engine, cfg: &ToleranceConfig) -> Result<AubinVerdict> {
    let g = coderivative_graph_with(f, base, Some(c), engine, cfg)?;
    let (holds, constant_estimate, zero_slice) = aubin_from_graph(&g, f.m, cfg)?;
    let witness_pieces: BTreeSet<usize> = g.cone.provenance.iter().flatten().copied().collect();
    let direct_trend = direct_trend(f, base, c, cfg)?;
    Ok(AubinVerdict {
        holds,
        constant_estimate,
        zero_slice,
        witness_rays: g.cone.rays.clone(),
        witness_pieces: witness_pieces.into_iter().collect(),
        direct_estimate: limit_of_trend(&direct_trend),
        direct_trend,
        engine: g.engine,
        shortfall: g.shortfall,
    })
}

pub fn aubin_wrt(f: &MultiMap, base: &BasePair, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<AubinVerdict> {
    aubin_wrt_with(f, base, c, Engine::B, cfg)
}

/// Aubin property relative to the domain of the map.
pub fn relative_aubin(f: &MultiMap, base: &BasePair, cfg: &ToleranceConfig) -> Result<AubinVerdict> {
    let dom = f.dom.as_ref().ok_or_else(|| Error::Input("the map has no convex domain attached".into()))?;
    aubin_wrt(f, base, dom, cfg)
}

fn direct_radii(cfg: &ToleranceConfig) -> Vec<f64> {
    cfg.radius_schedule.iter().step_by(3).copied().collect()
}

/// Smallest constant making `F(u) ∩ V ⊆ F(x) + κ‖u − x‖B` hold over sampled
/// pairs `x, u ∈ C` near `x̄`, per radius.
fn direct_trend(f: &MultiMap, base: &BasePair, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<Vec<(f64, f64)>> {
    let local = restrict(&f.graph, &c.times_whole(f.m))?;
    let joined = base.joined();
    let count = if f.n + f.m <= 2 { 24 } else { 16 };
    let mut out = Vec::new();
    for (k, r) in direct_radii(cfg).into_iter().enumerate() {
        let seed = cfg.seed ^ stream_tag("aubin-direct").wrapping_add(k as u64);
        let pts = sample_near(&local, &joined, r, count, seed, cfg)?.points;
        let mut best: f64 = 0.0;
        for (i, p) in pts.iter().enumerate() {
            let (u, v) = p.split_at(f.n);
            for (j, q) in pts.iter().enumerate() {
                let x = &q[..f.n];
                let dx = dist(u, x);
                if i == j || dx <= cfg.tol_mem.max(1e-12 * r) {
                    continue;
                }
                if let Some(d) = fiber_distance(&f.graph, x, v, cfg) {
                    best = best.max(d / dx);
                }
            }
        }
        out.push((r, best));
    }
    Ok(out)
}

/// `d(v, F(x))`; `None` when the fiber is empty or the projection fails.
fn fiber_distance(graph: &SetDesc, x: &[f64], v: &[f64], cfg: &ToleranceConfig) -> Option<f64> {
    let n = x.len();
    let mut lo = x.to_vec();
    let mut hi = x.to_vec();
    lo.extend(std::iter::repeat(f64::NEG_INFINITY).take(v.len()));
    hi.extend(std::iter::repeat(f64::INFINITY).take(v.len()));
    let fiber = SetDesc::intersection(vec![graph.clone(), SetDesc::boxed(lo, hi).ok()?]).ok()?;
    let mut q = x.to_vec();
    q.extend_from_slice(v);
    let proj = fiber.project(&q, cfg).ok()?;
    proj.iter().map(|p| dist(&p[n..], v)).min_by(f64::total_cmp)
}

/// Log-log slope of `(radius, value)` pairs by least squares, ignoring zeros.
pub fn trend_slope(trend: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = trend.iter().filter(|(r, v)| *r > 0.0 && *v > 0.0).map(|(r, v)| (r.ln(), v.ln())).collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Limit of a per-radius estimate: `+inf` when it grows as the radius
/// shrinks, else the larger of the two smallest-radius values.
pub fn limit_of_trend(trend: &[(f64, f64)]) -> f64 {
    if trend.iter().any(|(_, v)| !v.is_finite() || *v > DIVERGENCE_CAP) || trend_slope(trend) < DIVERGENCE_SLOPE {
        return f64::INFINITY;
    }
    trend.iter().rev().take(2).map(|(_, v)| *v).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzVerdict {
    pub holds: bool,
    pub lip_estimate: f64,
    pub lip_trend: Vec<(f64, f64)>,
    pub singular_cone: Cone,
    pub subdiff_bound: f64,
    pub limiting: Vec<f64>,
}

/// Sampled `sup |f(x) − f(u)| / |x − u|` over `x, u ∈ C ∩ dom f` within each
/// radius of the schedule.
pub fn lip_trend(f: &ScalarFn, x0: f64, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (k, &r) in cfg.radius_schedule.iter().enumerate() {
        let seed = cfg.seed ^ stream_tag("lipschitz").wrapping_add(k as u64);
        let pts: Vec<(f64, f64)> = sample_near(c.set(), &[x0], r, 40, seed, cfg)?
            .points
            .iter()
            .map(|p| (p[0], f.eval(p[0])))
            .filter(|(_, v)| v.is_finite())
            .collect();
        let mut best: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                let dx = (a.0 - b.0).abs();
                if dx > 0.0 {
                    best = best.max((a.1 - b.1).abs() / dx);
                }
            }
        }
        out.push((r, best));
    }
    Ok(out)
}

pub fn lipschitz_wrt(f: &ScalarFn, x: f64, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<LipschitzVerdict> {
    lipschitz_wrt_with(f, x, c, Engine::B, cfg)
}

pub fn lipschitz_wrt_with(f: &ScalarFn, x: f64, c: &ConvexBody, engine: Engine, cfg: &ToleranceConfig) -> Result<LipschitzVerdict> {
    check_dim(1, c.dim())?;
    if !in_effective_domain(f, x, c, cfg) {
        return Err(Error::Input("the base point is not in C ∩ dom f".into()));
    }
    let k = epigraph_normal_cone(f, x, c, engine, cfg)?.cone;
    let singular_cone = crate::cones::slice_cone(&k, 1..2, cfg)?;
    let limiting: Vec<f64> = slice(&k, 1..2, &[-1.0], cfg)?.into_iter().map(|p| p[0]).collect();
    // A ray whose slope exceeds the angular resolution of the cone cannot be
    // told apart from a horizontal one.
    let resolvable = 1.0 / (2.0 * cfg.tol_dir).tan();
    let unresolved = k.rays.iter().any(|r| r[1] < 0.0 && r[0].abs() > resolvable * r[1].abs());
    let subdiff_bound = if unresolved { f64::INFINITY } else { limiting.iter().map(|v| v.abs()).fold(0.0, f64::max) };
    let lip_trend = lip_trend(f, x, c, cfg)?;
    Ok(LipschitzVerdict {
        holds: singular_cone.is_zero(),
        lip_estimate: limit_of_trend(&lip_trend),
        lip_trend,
        singular_cone,
        subdiff_bound,
        limiting,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarityVerdict {
    pub stationary: bool,
    pub certificate: Certificate,
}

/// Whether `0 ∈ ∂ᵖ_C f(x̄)`, the necessary condition for a local minimum on `C`.
pub fn stationarity_check(f: &ScalarFn, x: f64, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<StationarityVerdict> {
    let certificate = proximal_certificate(f, x, c, 0.0, cfg)?;
    Ok(StationarityVerdict { stationary: certificate.accepted(), certificate })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreenVerdict {
    pub pieces: Vec<StationarityVerdict>,
    /// False as soon as one piece fails: then `x̄` is not a local minimizer.
    pub may_be_minimizer: bool,
}

/// Stationarity on each piece of a cover of `dom f` near `x̄`.
pub fn piecewise_screen(f: &ScalarFn, x: f64, pieces: &[ConvexBody], cfg: &ToleranceConfig) -> Result<ScreenVerdict> {
    if pieces.is_empty() {
        return Err(Error::Input("no pieces given".into()));
    }
    for c in pieces {
        check_dim(1, c.dim())?;
        if !c.contains(&[x], cfg.tol_mem) {
            return Err(Error::Input("the base point is not in every piece".into()));
        }
    }
    for k in 0..8 {
        for sign in [-1.0, 1.0] {
            let u = x + sign * cfg.r0() * 0.5f64.powi(3 * k);
            if f.eval(u).is_finite() && !pieces.iter().any(|c| c.contains(&[u], cfg.tol_mem)) {
                return Err(Error::Input(format!("the pieces do not cover the domain near the base point (at {u})")));
            }
        }
    }
    let verdicts = pieces.iter().map(|c| stationarity_check(f, x, c, cfg)).collect::<Result<Vec<_>>>()?;
    let may_be_minimizer = verdicts.iter().all(|v| v.stationary);
    Ok(ScreenVerdict { pieces: verdicts, may_be_minimizer })
}
