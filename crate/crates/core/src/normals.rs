//! Proximal, limiting, Fréchet and tangent cones, classical or with respect
//! to a convex body `C`.
//!
//! The proximal test is decided on a finite step grid. Both clauses (the
//! step `x + p x*` staying in `C`, and the local quadratic inequality) are
//! downward closed in `p`, so the smallest grid step decides. The local
//! inequality is checked on samples taken on geometric shells whose radii
//! stop at `2 p_min sin(eta)`; this bounds the angular resolution of the test
//! at `eta`, slightly above the direction-grid spacing.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::cones::{cluster_limits, direction_grid, grid_spacing, Cone, DirIndex, LimitCluster};
use crate::config::ToleranceConfig;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm, normalize, scale, sub};
use crate::sampling::{ball_point, rng_for, sample_near, shell_samples, stream_tag};
use crate::sets::{restrict, ConvexBody, SetDesc};

/// Which computation produced a cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Engine {
    /// Outer limit of proximal cones along points of the restricted set.
    A,
    /// Outer limit of projection residuals along points of the body.
    B,
    /// Lattice brute force.
    Oracle,
}

/// How the quadratic constant of the proximal inequality is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProxForm {
    /// `delta = 1/(2p)` with the same `p` as the feasibility clause.
    #[default]
    Tied,
    /// `delta` swept independently over `{1/(2p)} ∪ {1, 10, 100}`.
    FreeDelta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProxVerdict {
    pub accepted: bool,
    /// Largest accepting grid step, when accepted.
    pub p: Option<f64>,
    pub shortfall: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitResult {
    pub cone: Cone,
    pub engine: Engine,
    pub shortfall: bool,
}

/// Local samples around a base point, stored relative to it.
#[derive(Debug, Clone)]
struct Local {
    rel: Vec<Vec<f64>>,
    norm2: Vec<f64>,
    shortfall: bool,
}

#[derive(Debug)]
pub struct NormalQuery {
    pub base: Vec<f64>,
    pub omega: SetDesc,
    pub body: Option<ConvexBody>,
    pub cfg: ToleranceConfig,
    restricted: SetDesc,
    local: OnceLock<std::result::Result<Local, Error>>,
}

impl Clone for NormalQuery {
    fn clone(&self) -> Self {
        Self {
            base: self.base.clone(),
            omega: self.omega.clone(),
            body: self.body.clone(),
            cfg: self.cfg.clone(),
            restricted: self.restricted.clone(),
            local: OnceLock::new(),
        }
    }
}

fn per_shell(dim: usize) -> usize {
    match dim {
        1 => 4,
        2 => 12,
        3 => 24,
        _ => 32,
    }
}

fn engine_a_count(dim: usize) -> usize {
    match dim {
        1 => 8,
        2 => 24,
        3 => 48,
        _ => 8,
    }
}

fn engine_b_count(dim: usize) -> usize {
    match dim {
        1 => 200,
        2 => 1500,
        3 => 4000,
        _ => 8000,
    }
}

/// Angular resolution of the proximal test.
pub fn prox_resolution(dim: usize) -> f64 {
    (0.75 * grid_spacing(dim)).max(1e-3)
}

impl NormalQuery {
    pub fn new(base: Vec<f64>, omega: SetDesc, body: Option<ConvexBody>, cfg: ToleranceConfig) -> Result<Self> {
        cfg.validate()?;
        check_dim(omega.dim(), base.len())?;
        if !omega.membership(&base, &cfg)? {
            return Err(Error::Input("the base point is not in the set".into()));
        }
        let restricted = match &body {
            Some(c) => {
                check_dim(omega.dim(), c.dim())?;
                if !c.contains(&base, cfg.tol_mem) {
                    return Err(Error::Input("the base point is not in the convex body".into()));
                }
                restrict(&omega, c)?
            }
            None => omega.clone(),
        };
        Ok(Self { base, omega, body, cfg, restricted, local: OnceLock::new() })
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    /// `Omega ∩ C` (or `Omega` in classical mode).
    pub fn restricted(&self) -> &SetDesc {
        &self.restricted
    }

    /// Same set and body at another base point of the restricted set.
    pub fn at(&self, base: Vec<f64>) -> Self {
        Self {
            base,
            omega: self.omega.clone(),
            body: self.body.clone(),
            cfg: self.cfg.clone(),
            restricted: self.restricted.clone(),
            local: OnceLock::new(),
        }
    }

    /// The classical query on `Omega ∩ C`.
    pub fn classical_on_restricted(&self) -> Self {
        Self {
            base: self.base.clone(),
            omega: self.restricted.clone(),
            body: None,
            cfg: self.cfg.clone(),
            restricted: self.restricted.clone(),
            local: OnceLock::new(),
        }
    }

    fn local(&self) -> Result<&Local> {
        let res = self.local.get_or_init(|| {
            let dim = self.dim();
            let floor = 2.0 * self.cfg.p_min() * prox_resolution(dim).sin();
            let seed = rng_seed(&self.cfg, "local", &self.base);
            let s = shell_samples(&self.restricted, &self.base, self.cfg.r0(), floor, per_shell(dim), seed, &self.cfg)?;
            let mut rel = Vec::with_capacity(s.points.len());
            let mut norm2 = Vec::with_capacity(s.points.len());
            // Ball samples can land well inside the innermost shell; below the
            // floor they would reject grid directions a fraction of a step off.
            for p in s.points {
                let v = sub(&p, &self.base);
                let n2 = dot(&v, &v);
                if n2 >= floor * floor {
                    rel.push(v);
                    norm2.push(n2);
                }
            }
            Ok(Local { rel, norm2, shortfall: s.shortfall })
        });
        res.as_ref().map_err(|e| e.clone())
    }

    /// Largest step allowed by the feasibility clause.
    pub fn feasible_step(&self, xs: &[f64]) -> f64 {
        match &self.body {
            Some(c) => c.max_step(&self.base, xs, self.cfg.tol_mem),
            None => f64::INFINITY,
        }
    }

    /// Largest step allowed by the local inequality on the samples.
    fn inequality_step(&self, xs: &[f64]) -> Result<f64> {
        let local = self.local()?;
        let mut best = f64::INFINITY;
        for (v, n2) in local.rel.iter().zip(&local.norm2) {
            let ip = dot(xs, v);
            if ip > 0.0 {
                best = best.min(n2 / (2.0 * ip));
            }
        }
        Ok(best)
    }
}

fn rng_seed(cfg: &ToleranceConfig, purpose: &str, point: &[f64]) -> u64 {
    let mut stream = vec![stream_tag(purpose)];
    stream.extend(point.iter().map(|v| v.to_bits()));
    use rand::RngCore;
    rng_for(cfg.seed, &stream).next_u64()
}

fn largest_grid_step(grid: &[f64], bound: f64) -> Option<f64> {
    grid.iter().copied().find(|p| *p <= bound)
}

/// Proximal normal membership of `xs` with respect to the query's body.
pub fn prox_normal_member_with(xs: &[f64], q: &NormalQuery, form: ProxForm) -> Result<ProxVerdict> {
    check_dim(q.dim(), xs.len())?;
    if norm(xs) <= q.cfg.tol_mem {
        return Ok(ProxVerdict { accepted: true, p: q.cfg.p_grid.first().copied(), shortfall: false });
    }
    let shortfall = q.local()?.shortfall;
    let feas = q.feasible_step(xs);
    let ineq = q.inequality_step(xs)?;
    let p = match form {
        ProxForm::Tied => largest_grid_step(&q.cfg.p_grid, feas.min(ineq)),
        ProxForm::FreeDelta => {
            let p_feas = largest_grid_step(&q.cfg.p_grid, feas);
            let needed = if ineq.is_finite() { 1.0 / (2.0 * ineq) } else { 0.0 };
            let sweep_max = [1.0, 10.0, 100.0, 1.0 / (2.0 * q.cfg.p_min())].into_iter().fold(0.0, f64::max);
            p_feas.filter(|_| needed <= sweep_max)
        }
    };
    Ok(ProxVerdict { accepted: p.is_some(), p, shortfall })
}

pub fn prox_normal_member(xs: &[f64], q: &NormalQuery) -> Result<bool> {
    Ok(prox_normal_member_with(xs, q, ProxForm::Tied)?.accepted)
}

/// Projection form of the same test: some grid step `t` keeps `x + t x*` in
/// `C` and has the base point among its nearest points in `Omega ∩ C`.
pub fn prox_member_by_projection(xs: &[f64], q: &NormalQuery) -> Result<bool> {
    check_dim(q.dim(), xs.len())?;
    let n = norm(xs);
    if n <= q.cfg.tol_mem {
        return Ok(true);
    }
    let feas = q.feasible_step(xs);
    for &t in q.cfg.p_grid.iter().rev() {
        if t > feas {
            break;
        }
        let y: Vec<f64> = q.base.iter().zip(xs).map(|(b, v)| b + t * v).collect();
        let d = q.restricted.distance(&y, &q.cfg)?;
        if d >= t * n * (1.0 - 1e-9) - 1e-15 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Accepted unit directions of the direction grid at the query's base point.
fn accepted_directions(q: &NormalQuery, grid: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let p_min = q.cfg.p_min();
    let mut out = Vec::new();
    for d in grid {
        if q.feasible_step(d) >= p_min && q.inequality_step(d)? >= p_min {
            out.push(d.clone());
        }
    }
    Ok(out)
}

pub fn prox_normal_cone(q: &NormalQuery) -> Result<Cone> {
    let grid = direction_grid(q.dim(), &q.cfg);
    let dirs = accepted_directions(q, &grid)?;
    Ok(Cone::from_rays(q.dim(), dirs, q.cfg.tol_dir))
}

/// Limiting normal cone by the chosen engine.
pub fn limiting_normal_cone_with(q: &NormalQuery, engine: Engine) -> Result<LimitResult> {
    match engine {
        Engine::A => engine_a(q),
        Engine::B => engine_b(q),
        Engine::Oracle => {
            let cone = crate::oracle::brute_limit_cone(&q.base, &q.omega, q.body.as_ref(), &q.cfg)?;
            Ok(LimitResult { cone, engine, shortfall: false })
        }
    }
}

pub fn limiting_normal_cone(q: &NormalQuery) -> Result<Cone> {
    Ok(engine_b(q)?.cone)
}

fn engine_a(q: &NormalQuery) -> Result<LimitResult> {
    let dim = q.dim();
    let grid = direction_grid(dim, &q.cfg);
    let mut batches = LimitCluster::default();
    let mut shortfall = false;
    for (k, &r) in q.cfg.radius_schedule.iter().enumerate() {
        let seed = rng_seed(&q.cfg, "engine-a", &[k as f64]);
        let bases = sample_near(&q.restricted, &q.base, r, engine_a_count(dim), seed, &q.cfg)?;
        shortfall |= bases.shortfall;
        let mut dirs = Vec::new();
        for b in bases.points {
            let tags = q.restricted.project_tagged(&b, &q.cfg)?.into_iter().flat_map(|p| p.pieces).collect::<Vec<_>>();
            let at = q.at(b);
            shortfall |= at.local()?.shortfall;
            for d in accepted_directions(&at, &grid)? {
                dirs.push((d, tags.clone()));
            }
        }
        batches.push(r, dirs);
    }
    Ok(LimitResult { cone: cluster_limits(dim, &batches, &q.cfg), engine: Engine::A, shortfall })
}

fn engine_b(q: &NormalQuery) -> Result<LimitResult> {
    let dim = q.dim();
    let mut batches = LimitCluster::default();
    let mut shortfall = false;
    let count = engine_b_count(dim);
    for (k, &r) in q.cfg.radius_schedule.iter().enumerate() {
        let seed = rng_seed(&q.cfg, "engine-b", &[k as f64]);
        let xs = match &q.body {
            Some(c) => {
                let s = sample_near(c.set(), &q.base, r, count, seed, &q.cfg)?;
                shortfall |= s.shortfall;
                s.points
            }
            None => {
                let mut rng = rng_for(seed, &[]);
                (0..count).map(|_| ball_point(&mut rng, &q.base, r)).collect()
            }
        };
        let mut dirs = Vec::new();
        for x in xs {
            let projs = match q.restricted.project_tagged(&x, &q.cfg) {
                Ok(p) => p,
                Err(Error::Numerical { .. }) => {
                    shortfall = true;
                    continue;
                }
                Err(e) => return Err(e),
            };
            for p in projs {
                let res = sub(&x, &p.point);
                let n = norm(&res);
                if n > q.cfg.tol_mem {
                    dirs.push((scale(&res, 1.0 / n), p.pieces));
                }
            }
        }
        batches.push(r, dirs);
    }
    Ok(LimitResult { cone: cluster_limits(dim, &batches, &q.cfg), engine: Engine::B, shortfall })
}

fn radius_batches(omega: &SetDesc, base: &[f64], count: usize, purpose: &str, cfg: &ToleranceConfig) -> Result<Vec<Vec<Vec<f64>>>> {
    let mut out = Vec::new();
    for (k, &r) in cfg.radius_schedule.iter().enumerate() {
        let seed = rng_seed(cfg, purpose, &[k as f64]);
        let s = sample_near(omega, base, r, count, seed, cfg)?;
        out.push(s.points.iter().filter_map(|p| normalize(&sub(p, base))).collect());
    }
    Ok(out)
}

fn frechet_count(dim: usize) -> usize {
    match dim {
        1 => 20,
        2 => 80,
        _ => 200,
    }
}

/// Grid directions `d` with `<d, u> <= sin(tol_dir)` for every sampled unit
/// increment `u` at every radius.
pub fn frechet_normal_cone(base: &[f64], omega: &SetDesc, cfg: &ToleranceConfig) -> Result<Cone> {
    check_dim(omega.dim(), base.len())?;
    if !omega.membership(base, cfg)? {
        return Err(Error::Input("the base point is not in the set".into()));
    }
    let incs: Vec<Vec<f64>> = radius_batches(omega, base, frechet_count(base.len()), "frechet", cfg)?.concat();
    let slack = cfg.tol_dir.sin();
    let dirs: Vec<Vec<f64>> = direction_grid(base.len(), cfg)
        .into_iter()
        .filter(|d| incs.iter().all(|u| dot(d, u) <= slack))
        .collect();
    Ok(Cone::from_rays(base.len(), dirs, cfg.tol_dir))
}

fn tangent_count(dim: usize) -> usize {
    match dim {
        1 => 20,
        2 => 1000,
        _ => 6000,
    }
}

/// Grid directions approached by sampled increments at every radius.
pub fn tangent_cone(base: &[f64], omega: &SetDesc, cfg: &ToleranceConfig) -> Result<Cone> {
    check_dim(omega.dim(), base.len())?;
    if !omega.membership(base, cfg)? {
        return Err(Error::Input("the base point is not in the set".into()));
    }
    let batches = radius_batches(omega, base, tangent_count(base.len()), "tangent", cfg)?;
    let indices: Vec<DirIndex> = batches
        .into_iter()
        .map(|b| {
            let mut idx = DirIndex::new(cfg.tol_dir);
            for d in b {
                idx.insert(d);
            }
            idx
        })
        .collect();
    let dirs: Vec<Vec<f64>> = direction_grid(base.len(), cfg)
        .into_iter()
        .filter(|d| indices.iter().all(|i| i.find_within(d, cfg.tol_dir).is_some()))
        .collect();
    Ok(Cone::from_rays(base.len(), dirs, cfg.tol_dir))
}
