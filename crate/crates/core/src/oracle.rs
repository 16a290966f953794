//! Brute-force references. Sets are replaced by finite point clouds: lattice
//! points of full-dimensional pieces, parameter lattices of curves, graphs
//! and affine pieces. Nothing here calls the projection code of `sets`.

use std::collections::HashMap;

use serde::Serialize;

use crate::cones::Cone;
use crate::config::ToleranceConfig;
use crate::criteria::limit_of_trend;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{dist, dot, norm, null_space, scale, solve, sub};
use crate::sets::{Body, ConvexBody, Curve, Polyhedron, ScalarFn, SetDesc};

/// Cap on the number of lattice points a single cloud may visit.
const MAX_POINTS: usize = 20_000_000;

/// Axis-aligned lattice `center + h·k`, clipped to `center ± half_width`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub center: Vec<f64>,
    pub half_width: f64,
    /// Lattice points per unit length.
    pub resolution: f64,
}

impl GridSpec {
    pub fn new(center: Vec<f64>, half_width: f64, resolution: f64) -> Result<Self> {
        if center.len() > 4 {
            return Err(Error::Input(format!("brute-force oracles are capped at dimension 4, got {}", center.len())));
        }
        if !(half_width > 0.0) || !(resolution > 0.0) {
            return Err(Error::Input("grid half-width and resolution must be positive".into()));
        }
        Ok(Self { center, half_width, resolution })
    }

    /// Default resolution: `grid_res` per unit in one and two dimensions,
    /// 40 per unit in three and four.
    pub fn default_resolution(dim: usize, cfg: &ToleranceConfig) -> Result<f64> {
        match dim {
            1 => Ok(cfg.grid_res_1d as f64),
            2 => Ok(cfg.grid_res_2d as f64),
            3 | 4 => Ok(40.0),
            _ => Err(Error::Input(format!("brute-force oracles are capped at dimension 4, got {dim}"))),
        }
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.resolution
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn steps(&self) -> i64 {
        (self.half_width * self.resolution).floor() as i64
    }

    fn count(&self, free: usize) -> usize {
        (2 * self.steps() as usize + 1).saturating_pow(free as u32)
    }

    fn in_box(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.center).all(|(a, c)| (a - c).abs() <= self.half_width * (1.0 + 1e-12))
    }

    /// Visits lattice points whose coordinates in `fixed` are pinned.
    fn for_each(&self, fixed: &[Option<f64>], mut visit: impl FnMut(&[f64])) -> Result<()> {
        let free: Vec<usize> = (0..self.dim()).filter(|i| fixed[*i].is_none()).collect();
        if self.count(free.len()) > MAX_POINTS {
            return Err(Error::Input("lattice too large for the oracle".into()));
        }
        let n = self.steps();
        let h = self.spacing();
        let mut x: Vec<f64> = (0..self.dim()).map(|i| fixed[i].unwrap_or(self.center[i] - n as f64 * h)).collect();
        let mut idx = vec![-n; free.len()];
        loop {
            for (k, &i) in free.iter().enumerate() {
                x[i] = self.center[i] + idx[k] as f64 * h;
            }
            visit(&x);
            let mut k = 0;
            loop {
                if k == free.len() {
                    return Ok(());
                }
                idx[k] += 1;
                if idx[k] <= n {
                    break;
                }
                idx[k] = -n;
                k += 1;
            }
        }
    }
}

/// A finite sample of a set with the top-level union member of each point.
#[derive(Debug, Clone, Default)]
pub struct Cloud {
    pub points: Vec<Vec<f64>>,
    pub pieces: Vec<usize>,
}

/// Point cloud of `S` within the grid box.
pub fn cloud(s: &SetDesc, grid: &GridSpec) -> Result<Cloud> {
    check_dim(s.dim(), grid.dim())?;
    let mut out = Cloud::default();
    match s.body() {
        Body::Union(ms) => {
            for (i, m) in ms.iter().enumerate() {
                let pts = raw_cloud(m, grid)?;
                out.pieces.extend(std::iter::repeat(i).take(pts.len()));
                out.points.extend(pts);
            }
        }
        _ => {
            out.points = raw_cloud(s, grid)?;
            out.pieces = vec![0; out.points.len()];
        }
    }
    Ok(out)
}

fn raw_cloud(s: &SetDesc, grid: &GridSpec) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    match s.body() {
        Body::Box { lo, hi } => {
            let fixed: Vec<Option<f64>> = lo.iter().zip(hi).map(|(l, h)| (l == h).then_some(*l)).collect();
            grid.for_each(&fixed, |x| {
                if x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| v >= l && v <= h) && grid.in_box(x) {
                    out.push(x.to_vec());
                }
            })?;
        }
        Body::Polyhedron(p) => out = poly_cloud(p, grid)?,
        Body::Curve(c) => out = curve_cloud(c, grid),
        Body::Epigraph(f) => out = graph_cloud(f, grid, 1.0),
        Body::Hypograph { f, .. } => out = graph_cloud(f, grid, -1.0),
        Body::Product(a, b) => {
            let ga = GridSpec { center: grid.center[..a.dim()].to_vec(), ..grid.clone() };
            let gb = GridSpec { center: grid.center[a.dim()..].to_vec(), ..grid.clone() };
            let (ca, cb) = (raw_cloud(a, &ga)?, raw_cloud(b, &gb)?);
            if ca.len().saturating_mul(cb.len()) > MAX_POINTS {
                return Err(Error::Input("product cloud too large for the oracle".into()));
            }
            for p in &ca {
                for q in &cb {
                    let mut v = p.clone();
                    v.extend_from_slice(q);
                    out.push(v);
                }
            }
        }
        Body::Union(ms) => {
            for m in ms {
                out.extend(raw_cloud(m, grid)?);
            }
        }
        Body::Intersection(ms) => {
            let (first, rest) = ms.split_first().expect("non-empty intersection");
            out = raw_cloud(first, grid)?
                .into_iter()
                .filter(|x| rest.iter().all(|m| m.contains_direct(x, 1e-9)))
                .collect();
        }
    }
    Ok(out)
}

fn poly_cloud(p: &Polyhedron, grid: &GridSpec) -> Result<Vec<Vec<f64>>> {
    let inside = |x: &[f64]| p.rows.iter().all(|r| r.residual(x) <= 1e-12 * (1.0 + r.offset.abs()));
    let mut out = Vec::new();
    if p.eqs.is_empty() {
        grid.for_each(&vec![None; grid.dim()], |x| {
            if inside(x) {
                out.push(x.to_vec());
            }
        })?;
        return Ok(out);
    }
    // Affine hull x0 + span(basis): x0 is the least-norm solution shifted to
    // the point of the hull closest to the grid center.
    let a: Vec<Vec<f64>> = p.eqs.iter().map(|r| r.normal.clone()).collect();
    let b: Vec<f64> = p.eqs.iter().map(|r| r.offset - dot(&r.normal, &grid.center)).collect();
    let gram: Vec<Vec<f64>> = a.iter().map(|ai| a.iter().map(|aj| dot(ai, aj)).collect()).collect();
    let Some(w) = solve(gram, b) else {
        return Ok(out);
    };
    let mut x0 = grid.center.clone();
    for (ai, wi) in a.iter().zip(&w) {
        for (x, v) in x0.iter_mut().zip(ai) {
            *x += wi * v;
        }
    }
    let basis = null_space(&a, grid.dim());
    if basis.is_empty() {
        if inside(&x0) && grid.in_box(&x0) {
            out.push(x0);
        }
        return Ok(out);
    }
    let sub_grid = GridSpec { center: vec![0.0; basis.len()], half_width: grid.half_width * (grid.dim() as f64).sqrt(), resolution: grid.resolution };
    sub_grid.for_each(&vec![None; basis.len()], |s| {
        let mut x = x0.clone();
        for (sk, bk) in s.iter().zip(&basis) {
            for (xi, bi) in x.iter_mut().zip(bk) {
                *xi += sk * bi;
            }
        }
        if grid.in_box(&x) && inside(&x) {
            out.push(x);
        }
    })?;
    Ok(out)
}

/// Parameter lattice fine enough that consecutive points are at most one
/// grid spacing apart.
fn curve_cloud(c: &Curve, grid: &GridSpec) -> Vec<Vec<f64>> {
    let lo = c.lo.max(grid.center[c.axis] - grid.half_width);
    let hi = c.hi.min(grid.center[c.axis] + grid.half_width);
    if lo > hi {
        return vec![];
    }
    let probe = 64;
    let speed = (0..=probe)
        .map(|i| norm(&c.velocity(lo + (hi - lo) * i as f64 / probe as f64)))
        .fold(1.0, f64::max);
    let n = (((hi - lo) * grid.resolution * speed).ceil() as usize).clamp(1, MAX_POINTS);
    (0..=n)
        .map(|i| c.point(lo + (hi - lo) * i as f64 / n as f64))
        .filter(|x| grid.in_box(x))
        .collect()
}

/// Lattice points above (`side = 1`) or below (`side = -1`) the graph, plus
/// the graph itself and vertical segments at finite branch ends.
fn graph_cloud(f: &ScalarFn, grid: &GridSpec, side: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let _ = grid.for_each(&[None, None], |x| {
        let v = f.eval(x[0]);
        if v.is_finite() && side * (x[1] - v) >= 0.0 {
            out.push(x.to_vec());
        }
    });
    let h = grid.spacing();
    for b in &f.branches {
        let lo = b.lo.max(grid.center[0] - grid.half_width);
        let hi = b.hi.min(grid.center[0] + grid.half_width);
        if lo > hi {
            continue;
        }
        let c = Curve::new(0, lo, hi, vec![b.expr.clone()]);
        out.extend(curve_cloud(&c, grid));
        for end in [b.lo, b.hi] {
            if end.is_finite() && (end - grid.center[0]).abs() <= grid.half_width {
                let y0 = b.expr.eval1(end);
                let top = grid.center[1] + side * grid.half_width;
                let n = ((top - y0) * side / h).ceil().max(0.0) as usize;
                out.extend((0..=n).map(|k| vec![end, y0 + side * k as f64 * h]).filter(|x| grid.in_box(x)));
            }
        }
    }
    out
}

/// Uniform hash grid for nearest-point queries on a cloud.
struct PointIndex<'a> {
    cell: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
    points: &'a [Vec<f64>],
    max_ring: i64,
}

impl<'a> PointIndex<'a> {
    fn new(points: &'a [Vec<f64>], cell: f64, extent: f64) -> Self {
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key(p, cell)).or_default().push(i);
        }
        Self { cell, cells, points, max_ring: (extent / cell).ceil() as i64 + 1 }
    }

    fn key(p: &[f64], cell: f64) -> Vec<i64> {
        p.iter().map(|v| (v / cell).floor() as i64).collect()
    }

    /// Indices within `slack` of the nearest distance.
    fn nearest(&self, x: &[f64], slack: f64) -> Vec<usize> {
        let k = Self::key(x, self.cell);
        let mut found: Vec<(usize, f64)> = Vec::new();
        let mut best = f64::INFINITY;
        for ring in 0..=self.max_ring {
            if best.is_finite() && (ring as f64 - 1.0) * self.cell > best + slack {
                break;
            }
            for_ring(&k, ring, |key| {
                if let Some(ids) = self.cells.get(key) {
                    for &i in ids {
                        let d = dist(&self.points[i], x);
                        best = best.min(d);
                        found.push((i, d));
                    }
                }
            });
        }
        found.into_iter().filter(|(_, d)| *d <= best + slack).map(|(i, _)| i).collect()
    }
}

/// Calls `visit` on every cell key at Chebyshev distance `ring` from `k`.
fn for_ring(k: &[i64], ring: i64, mut visit: impl FnMut(&Vec<i64>)) {
    let dim = k.len();
    let mut off = vec![-ring; dim];
    loop {
        if off.iter().any(|o| o.abs() == ring) {
            let key: Vec<i64> = k.iter().zip(&off).map(|(a, b)| a + b).collect();
            visit(&key);
        }
        let mut i = 0;
        loop {
            if i == dim {
                return;
            }
            off[i] += 1;
            if off[i] <= ring {
                break;
            }
            off[i] = -ring;
            i += 1;
        }
    }
}

/// Nearest cloud points of `S` to `x`, refined once on a ten times finer
/// lattice around each candidate.
fn brute_nearest(x: &[f64], s: &SetDesc, resolution: f64) -> Result<(f64, Vec<Vec<f64>>)> {
    check_dim(s.dim(), x.len())?;
    let mut half = 1.0;
    let (best, pts) = loop {
        let grid = GridSpec::new(x.to_vec(), half, resolution)?;
        let c = cloud(s, &grid)?;
        let best = c.points.iter().map(|p| dist(p, x)).fold(f64::INFINITY, f64::min);
        if best <= half {
            break (best, c.points);
        }
        if half >= crate::sets::WORKING_HALF_WIDTH {
            return Err(Error::Input("no point of the set near the query".into()));
        }
        half = if best.is_finite() { best * 1.01 } else { half * 4.0 };
    };
    let h = 1.0 / resolution;
    let near: Vec<&Vec<f64>> = pts.iter().filter(|p| dist(p, x) <= best + 2.0 * h).collect();
    let mut refined: Vec<(f64, Vec<f64>)> = Vec::new();
    for p in near {
        let fine = GridSpec::new(p.clone(), 2.0 * h, resolution * 10.0)?;
        for q in cloud(s, &fine)?.points {
            refined.push((dist(&q, x), q));
        }
    }
    let best = refined.iter().map(|r| r.0).fold(best, f64::min);
    let mut reps: Vec<Vec<f64>> = Vec::new();
    for (d, q) in refined {
        if d <= best + 0.2 * h && !reps.iter().any(|r| dist(r, &q) <= 4.0 * h) {
            reps.push(q);
        }
    }
    Ok((best, reps))
}

pub fn brute_distance(x: &[f64], s: &SetDesc, cfg: &ToleranceConfig) -> Result<f64> {
    let res = GridSpec::default_resolution(x.len(), cfg)?;
    Ok(brute_nearest(x, s, res)?.0)
}

pub fn brute_project(x: &[f64], s: &SetDesc, cfg: &ToleranceConfig) -> Result<Vec<Vec<f64>>> {
    let res = GridSpec::default_resolution(x.len(), cfg)?;
    Ok(brute_nearest(x, s, res)?.1)
}

fn restricted(omega: &SetDesc, c: Option<&ConvexBody>) -> Result<SetDesc> {
    match c {
        Some(c) => crate::sets::restrict(omega, c),
        None => Ok(omega.clone()),
    }
}

/// Nested lattices around `x̄`: scale `k` has half-width `r0·4^-k` and
/// resolution `res·4^k`, down to a spacing below `p_min / 100`.
fn nested_clouds(s: &SetDesc, base: &[f64], cfg: &ToleranceConfig) -> Result<Vec<Vec<f64>>> {
    let dim = base.len();
    let res = GridSpec::default_resolution(dim, cfg)?;
    let per_side = match dim {
        1 | 2 => res * cfg.r0(),
        _ => 10.0,
    };
    let mut out = Vec::new();
    let mut half = cfg.r0();
    loop {
        let grid = GridSpec::new(base.to_vec(), half, per_side / half)?;
        out.extend(cloud(s, &grid)?.points.into_iter().filter(|p| dist(p, base) <= half));
        if grid.spacing() < cfg.p_min() * 1e-2 {
            break;
        }
        half *= 0.25;
    }
    Ok(out)
}

/// Exhaustive proximal-normal test over nested lattices of `Omega ∩ C` and
/// the p-grid extended to `{4, 2}` above.
pub fn brute_prox_member(xs: &[f64], base: &[f64], omega: &SetDesc, c: Option<&ConvexBody>, cfg: &ToleranceConfig) -> Result<bool> {
    check_dim(omega.dim(), xs.len())?;
    check_dim(omega.dim(), base.len())?;
    if norm(xs) <= cfg.tol_mem {
        return Ok(true);
    }
    let set = restricted(omega, c)?;
    let pts = nested_clouds(&set, base, cfg)?;
    let mut grid = vec![4.0, 2.0];
    grid.extend(cfg.p_grid.iter().copied());
    for p in grid {
        let feasible = c.map_or(true, |c| c.contains(&crate::linalg::axpy(base, p, xs), cfg.tol_mem));
        if !feasible {
            continue;
        }
        let ok = pts.iter().all(|x| {
            let v = sub(x, base);
            dot(xs, &v) <= dot(&v, &v) / (2.0 * p) + 1e-15
        });
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Lattice points of the query body (or of the ball) per side, by dimension.
fn limit_lattice(dim: usize) -> (f64, f64) {
    // (points per radius for the x-lattice, refinement factor of the cloud)
    match dim {
        1 => (40.0, 16.0),
        2 => (20.0, 8.0),
        3 => (8.0, 5.0),
        _ => (4.0, 4.0),
    }
}

/// Residual directions `x − π(x)` over lattice points `x` of `C` near `x̄` at
/// two radii; directions present at both radii within `2 tol_dir` survive.
pub fn brute_limit_cone(base: &[f64], omega: &SetDesc, c: Option<&ConvexBody>, cfg: &ToleranceConfig) -> Result<Cone> {
    let dim = base.len();
    check_dim(omega.dim(), dim)?;
    GridSpec::default_resolution(dim, cfg)?;
    let set = restricted(omega, c)?;
    let n = cfg.radius_schedule.len();
    let radii = [cfg.radius_schedule[0], cfg.radius_schedule[4.min(n - 1)]];
    let mut batches: Vec<Vec<(Vec<f64>, usize)>> = Vec::new();
    for r in radii {
        batches.push(residual_batch(&set, base, c, r, dim)?);
    }
    let tol = 2.0 * cfg.tol_dir;
    let survivors: Vec<(Vec<f64>, Vec<usize>)> = batches[1]
        .iter()
        .filter(|(d, _)| batches[0].iter().any(|(e, _)| crate::linalg::angle(d, e) <= tol))
        .map(|(d, piece)| (d.clone(), vec![*piece]))
        .collect();
    Ok(Cone::from_tagged(dim, survivors, cfg.tol_dir))
}

fn residual_batch(set: &SetDesc, base: &[f64], c: Option<&ConvexBody>, r: f64, dim: usize) -> Result<Vec<(Vec<f64>, usize)>> {
    let (per_r, refine) = limit_lattice(dim);
    let h = r / per_r;
    let xs_grid = GridSpec::new(base.to_vec(), r, 1.0 / h)?;
    let mut xs = Vec::new();
    xs_grid.for_each(&vec![None; dim], |x| {
        if dist(x, base) <= r && c.map_or(true, |c| c.contains(x, 0.0)) {
            xs.push(x.to_vec());
        }
    })?;
    let hc = h / refine;
    let cl = cloud(set, &GridSpec::new(base.to_vec(), 2.5 * r, 1.0 / hc)?)?;
    let index = PointIndex::new(&cl.points, 2.0 * hc, 5.0 * r);
    let mut out = Vec::new();
    for x in xs {
        for i in index.nearest(&x, 0.0) {
            let p = &cl.points[i];
            if dist(&x, p) < 4.0 * hc {
                continue;
            }
            // One refinement pass around the lattice nearest point.
            let fine = cloud(set, &GridSpec::new(p.clone(), 2.0 * hc, 16.0 / hc)?)?;
            let q = fine.points.iter().chain(std::iter::once(p)).min_by(|a, b| dist(a, &x).total_cmp(&dist(b, &x))).expect("non-empty");
            let res = sub(&x, q);
            out.push((scale(&res, 1.0 / norm(&res)), cl.pieces[i]));
        }
    }
    Ok(out)
}

/// Largest difference quotient of `f` over lattice pairs of `C ∩ dom f` in
/// each ball of the radius schedule, and its limiting trend.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipRatio {
    pub trend: Vec<(f64, f64)>,
    pub limit: f64,
}

pub fn brute_lip_ratio(f: &ScalarFn, base: f64, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<LipRatio> {
    check_dim(1, c.dim())?;
    let mut trend = Vec::new();
    for &r in &cfg.radius_schedule {
        let grid = GridSpec::new(vec![base], r, 100.0 / r)?;
        let mut pts = Vec::new();
        grid.for_each(&[None], |x| {
            let v = f.eval(x[0]);
            if v.is_finite() && c.contains(x, 0.0) {
                pts.push((x[0], v));
            }
        })?;
        let mut best: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                best = best.max((a.1 - b.1).abs() / (a.0 - b.0).abs());
            }
        }
        trend.push((r, best));
    }
    let limit = limit_of_trend(&trend);
    Ok(LipRatio { trend, limit })
}
