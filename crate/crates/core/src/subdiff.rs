//! Subdifferentials of extended-real functions with respect to a convex body,
//! read off the normal cone to the epigraph.

use serde::Serialize;

use crate::coderivatives::{coderivative_graph_with, coderivative_slice, BasePair, MultiMap};
use crate::cones::{slice, slice_cone, Cone};
use crate::config::ToleranceConfig;
use crate::error::{check_dim, Result};
use crate::normals::{limiting_normal_cone_with, prox_normal_member, Engine, LimitResult, NormalQuery};
use crate::sampling::{shell_samples, stream_tag};
use crate::sets::{restrict, ConvexBody, ScalarFn, SetDesc};

/// `epi f`, or `epi f ∩ (C × R)` when a body is given.
pub fn epigraph(f: &ScalarFn, c: Option<&ConvexBody>) -> Result<SetDesc> {
    let epi = SetDesc::epigraph(f.clone());
    match c {
        Some(c) => {
            check_dim(1, c.dim())?;
            restrict(&epi, &c.times_whole(1))
        }
        None => Ok(epi),
    }
}

/// Whether `x̄` lies in `C ∩ dom f`.
pub fn in_effective_domain(f: &ScalarFn, x: f64, c: &ConvexBody, cfg: &ToleranceConfig) -> bool {
    c.contains(&[x], cfg.tol_mem) && f.eval(x).is_finite()
}

fn epi_query(f: &ScalarFn, x: f64, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<NormalQuery> {
    check_dim(1, c.dim())?;
    NormalQuery::new(vec![x, f.eval(x)], SetDesc::epigraph(f.clone()), Some(c.times_whole(1)), cfg.clone())
}

/// Limiting normal cone to `epi f` with respect to `C × R` at `(x̄, f(x̄))`.
pub fn epigraph_normal_cone(f: &ScalarFn, x: f64, c: &ConvexBody, engine: Engine, cfg: &ToleranceConfig) -> Result<LimitResult> {
    limiting_normal_cone_with(&epi_query(f, x, c, cfg)?, engine)
}

/// The `(p, δ)` pair that accepted a candidate, or the sampled point that
/// violated the inequality for every pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Certificate {
    Accepted { p: f64, delta: f64 },
    Infeasible,
    Violated { x: f64 },
}

impl Certificate {
    pub fn accepted(&self) -> bool {
        matches!(self, Certificate::Accepted { .. })
    }
}

/// Local samples `x ∈ C ∩ dom f` near `x̄` with their function values.
struct LocalValues {
    x0: f64,
    f0: f64,
    pts: Vec<(f64, f64)>,
    shortfall: bool,
}

fn local_values(f: &ScalarFn, x0: f64, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<LocalValues> {
    let floor = 2.0 * cfg.p_min() * 1e-4;
    let seed = cfg.seed ^ stream_tag("subdiff-local");
    let s = shell_samples(c.set(), &[x0], cfg.r0(), floor, 6, seed, cfg)?;
    let pts = s
        .points
        .iter()
        .map(|p| (p[0], f.eval(p[0])))
        .filter(|(x, fx)| fx.is_finite() && *x != x0)
        .collect();
    Ok(LocalValues { x0, f0: f.eval(x0), pts, shortfall: s.shortfall })
}

fn delta_sweep(p: f64) -> [f64; 4] {
    [1.0 / (2.0 * p), 1.0, 10.0, 100.0]
}

/// Inequality route: some grid `p` keeps `x̄ + p x*` in `C`, and for one `δ`
/// of the sweep `x*(x−x̄) − (f(x)−f(x̄)) ≤ δ(|x−x̄|² + (f(x)−f(x̄))²)` on
/// every sample.
fn inequality_test(xs: f64, lv: &LocalValues, c: &ConvexBody, cfg: &ToleranceConfig) -> Certificate {
    let feas = c.max_step(&[lv.x0], &[xs], cfg.tol_mem);
    let mut worst: Option<(f64, f64)> = None;
    for &p in cfg.p_grid.iter().filter(|p| **p <= feas) {
        let mut deltas = delta_sweep(p);
        deltas.sort_by(f64::total_cmp);
        for delta in deltas {
            let mut violator = None;
            for &(x, fx) in &lv.pts {
                let (h, g) = (x - lv.x0, fx - lv.f0);
                let excess = xs * h - g - delta * (h * h + g * g);
                if excess > 0.0 {
                    violator = Some((x, excess));
                    break;
                }
            }
            match violator {
                None => return Certificate::Accepted { p, delta },
                Some(v) => {
                    if worst.map_or(true, |w| v.1 > w.1) {
                        worst = Some(v);
                    }
                }
            }
        }
    }
    match worst {
        Some((x, _)) => Certificate::Violated { x },
        None => Certificate::Infeasible,
    }
}

/// Candidates of the magnitude grid along `±1`, with 0.
fn candidate_grid() -> Vec<f64> {
    let mut out = vec![0.0];
    for k in -8..=4 {
        let m = 2f64.powi(k);
        out.push(m);
        out.push(-m);
    }
    out.sort_by(f64::total_cmp);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProximalResult {
    /// Accepted candidates, including refined ends of accepted runs.
    pub points: Vec<f64>,
    /// Every grid candidate with its verdict.
    pub candidates: Vec<(f64, Certificate)>,
    pub shortfall: bool,
}

/// Proximal subdifferential with respect to `C` by the inequality route,
/// scanned on a geometric magnitude grid and refined by bisection where
/// acceptance switches between neighbours.
pub fn proximal_subdiff_wrt(f: &ScalarFn, x: f64, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<ProximalResult> {
    check_dim(1, c.dim())?;
    if !in_effective_domain(f, x, c, cfg) {
        return Ok(ProximalResult { points: vec![], candidates: vec![], shortfall: false });
    }
    let lv = local_values(f, x, c, cfg)?;
    let grid = candidate_grid();
    let candidates: Vec<(f64, Certificate)> = grid.iter().map(|&v| (v, inequality_test(v, &lv, c, cfg))).collect();
    let mut points: Vec<f64> = candidates.iter().filter(|(_, cert)| cert.accepted()).map(|(v, _)| *v).collect();
    for w in candidates.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.1.accepted() != b.1.accepted() {
            let (mut good, mut bad) = if a.1.accepted() { (a.0, b.0) } else { (b.0, a.0) };
            for _ in 0..40 {
                let mid = 0.5 * (good + bad);
                if inequality_test(mid, &lv, c, cfg).accepted() {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            points.push(good);
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= cfg.tol_mem);
    Ok(ProximalResult { points, candidates, shortfall: lv.shortfall })
}

/// The same grid decided through `(x*, −1) ∈ N^p_{C×R}(epi f)`.
pub fn proximal_subdiff_by_epigraph(f: &ScalarFn, x: f64, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<Vec<(f64, bool)>> {
    if !in_effective_domain(f, x, c, cfg) {
        return Ok(vec![]);
    }
    let q = epi_query(f, x, c, cfg)?;
    candidate_grid().into_iter().map(|v| Ok((v, prox_normal_member(&[v, -1.0], &q)?))).collect()
}

/// Limiting subdifferential: the epigraph normal cone sliced at last
/// component −1.
pub fn limiting_subdiff_wrt(f: &ScalarFn, x: f64, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<Vec<f64>> {
    check_dim(1, c.dim())?;
    if !in_effective_domain(f, x, c, cfg) {
        return Ok(vec![]);
    }
    let k = epigraph_normal_cone(f, x, c, Engine::B, cfg)?.cone;
    limiting_from_cone(&k, cfg)
}

fn limiting_from_cone(k: &Cone, cfg: &ToleranceConfig) -> Result<Vec<f64>> {
    let mut pts: Vec<f64> = slice(k, 1..2, &[-1.0], cfg)?.into_iter().map(|p| p[0]).collect();
    pts.sort_by(f64::total_cmp);
    Ok(pts)
}

/// Singular subdifferential: the zero slice of the epigraph normal cone.
pub fn singular_subdiff_wrt(f: &ScalarFn, x: f64, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<Cone> {
    check_dim(1, c.dim())?;
    if !in_effective_domain(f, x, c, cfg) {
        return Ok(Cone::zero(1));
    }
    let k = epigraph_normal_cone(f, x, c, Engine::B, cfg)?.cone;
    slice_cone(&k, 1..2, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubdiffResult {
    pub proximal: Vec<f64>,
    pub limiting: Vec<f64>,
    pub singular: Cone,
    pub warnings: Vec<String>,
}

/// All three subdifferentials from one epigraph cone.
pub fn subdiff_all(f: &ScalarFn, x: f64, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<SubdiffResult> {
    subdiff_all_with(f, x, c, Engine::B, cfg)
}

pub fn subdiff_all_with(f: &ScalarFn, x: f64, c: &ConvexBody, engine: Engine, cfg: &ToleranceConfig) -> Result<SubdiffResult> {
    check_dim(1, c.dim())?;
    if !in_effective_domain(f, x, c, cfg) {
        return Ok(SubdiffResult {
            proximal: vec![],
            limiting: vec![],
            singular: Cone::zero(1),
            warnings: vec!["base point outside C ∩ dom f".into()],
        });
    }
    let prox = proximal_subdiff_wrt(f, x, c, cfg)?;
    let k = epigraph_normal_cone(f, x, c, engine, cfg)?;
    let mut warnings = Vec::new();
    if prox.shortfall || k.shortfall {
        warnings.push("sampling shortfall".into());
    }
    Ok(SubdiffResult {
        proximal: prox.points,
        limiting: limiting_from_cone(&k.cone, cfg)?,
        singular: slice_cone(&k.cone, 1..2, cfg)?,
        warnings,
    })
}

/// The epigraphical map `x ↦ f(x) + R₊` as a multimap.
pub fn profile_map(f: &ScalarFn) -> Result<MultiMap> {
    MultiMap::new(1, 1, SetDesc::epigraph(f.clone()), None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ProfileValue {
    Points(Vec<f64>),
    Cone(Cone),
}

/// `D*_C E^f(x̄, f(x̄))(λ)` through the coderivative pipeline.
pub fn profile_coderivative(f: &ScalarFn, x: f64, c: &ConvexBody, lambda: f64, cfg: &ToleranceConfig) -> Result<ProfileValue> {
    profile_coderivative_with(f, x, c, lambda, Engine::B, cfg)
}

pub fn profile_coderivative_with(
    f: &ScalarFn,
    x: f64,
    c: &ConvexBody,
    lambda: f64,
    engine: Engine,
    cfg: &ToleranceConfig,
) -> Result<ProfileValue> {
    check_dim(1, c.dim())?;
    if !in_effective_domain(f, x, c, cfg) {
        return Ok(if lambda == 0.0 { ProfileValue::Cone(Cone::zero(1)) } else { ProfileValue::Points(vec![]) });
    }
    let map = profile_map(f)?;
    let base = BasePair::new(vec![x], vec![f.eval(x)]);
    let g = coderivative_graph_with(&map, &base, Some(c), engine, cfg)?;
    if lambda == 0.0 {
        let pts = coderivative_slice(&g, 1, &[0.0], cfg)?;
        return Ok(ProfileValue::Cone(Cone::from_rays(1, pts, cfg.tol_dir)));
    }
    let mut pts: Vec<f64> = coderivative_slice(&g, 1, &[lambda], cfg)?.into_iter().map(|p| p[0]).collect();
    pts.sort_by(f64::total_cmp);
    Ok(ProfileValue::Points(pts))
}

/// Inequality-route verdict for a single candidate `x*`.
pub fn proximal_certificate(f: &ScalarFn, x: f64, c: &ConvexBody, xs: f64, cfg: &ToleranceConfig) -> Result<Certificate> {
    check_dim(1, c.dim())?;
    if !in_effective_domain(f, x, c, cfg) {
        return Ok(Certificate::Infeasible);
    }
    let lv = local_values(f, x, c, cfg)?;
    Ok(inequality_test(xs, &lv, c, cfg))
}
