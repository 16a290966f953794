//! Closed sets built from primitives, with membership, distance and
//! (multi-valued) Euclidean projection.
//!
//! Intersections are simplified structurally when they are built: polyhedral
//! pieces merge, unions and products distribute, and curves or epigraphs cut
//! by polyhedra become the same primitive on a smaller parameter range. What
//! cannot be simplified is projected by a penalty descent seeded from the
//! members' own projections.

pub mod curve;
pub mod poly;
pub mod scalar;

pub use curve::Curve;
pub use poly::{HalfSpace, Polyhedron};
pub use scalar::{Branch, ScalarFn};

use crate::config::ToleranceConfig;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{dist, norm};

/// Half-width of the box that truncates unbounded sets around a query point.
pub const WORKING_HALF_WIDTH: f64 = 1e3;

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Polyhedron(Polyhedron),
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Curve(Curve),
    Epigraph(ScalarFn),
    /// Stored together with `-f` so projection can reflect onto `epi(-f)`.
    Hypograph { f: ScalarFn, neg: ScalarFn },
    Product(Box<SetDesc>, Box<SetDesc>),
    /// An empty member list is the empty set.
    Union(Vec<SetDesc>),
    Intersection(Vec<SetDesc>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetDesc {
    dim: usize,
    body: Body,
}

/// One nearest point, with the indices of the top-level union members that
/// attain it (empty when the set is not a union).
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub point: Vec<f64>,
    pub pieces: Vec<usize>,
}

type Candidate = (Vec<f64>, f64);

impl SetDesc {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn whole(dim: usize) -> Self {
        Self { dim, body: Body::Box { lo: vec![f64::NEG_INFINITY; dim], hi: vec![f64::INFINITY; dim] } }
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, body: Body::Union(Vec::new()) }
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        if lo.is_empty() {
            return Err(Error::Input("a box needs at least one coordinate".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l.is_nan() || h.is_nan() || l > h) {
            return Err(Error::Input("box bounds must satisfy lo <= hi".into()));
        }
        Ok(Self { dim: lo.len(), body: Body::Box { lo, hi } })
    }

    pub fn singleton(p: &[f64]) -> Result<Self> {
        Self::boxed(p.to_vec(), p.to_vec())
    }

    pub fn polyhedron(p: Polyhedron) -> Result<Self> {
        for r in p.rows.iter().chain(&p.eqs) {
            check_dim(p.dim, r.normal.len())?;
        }
        Ok(Self { dim: p.dim, body: Body::Polyhedron(p) })
    }

    pub fn curve(c: Curve) -> Result<Self> {
        if c.axis >= c.dim() || c.lo > c.hi {
            return Err(Error::Input("curve axis or interval invalid".into()));
        }
        Ok(Self { dim: c.dim(), body: Body::Curve(c) })
    }

    pub fn epigraph(f: ScalarFn) -> Self {
        Self { dim: 2, body: Body::Epigraph(f) }
    }

    pub fn hypograph(f: ScalarFn) -> Self {
        let neg = f.negated();
        Self { dim: 2, body: Body::Hypograph { f, neg } }
    }

    pub fn product(a: SetDesc, b: SetDesc) -> Self {
        Self { dim: a.dim + b.dim, body: Body::Product(Box::new(a), Box::new(b)) }
    }

    pub fn union(members: Vec<SetDesc>) -> Result<Self> {
        let dim = members.first().map(|m| m.dim).ok_or_else(|| Error::Input("empty union".into()))?;
        for m in &members {
            check_dim(dim, m.dim)?;
        }
        Ok(Self { dim, body: Body::Union(members) })
    }

    /// Intersection with structural simplification.
    pub fn intersection(members: Vec<SetDesc>) -> Result<Self> {
        let mut it = members.into_iter();
        let mut acc = it.next().ok_or_else(|| Error::Input("empty intersection".into()))?;
        let mut rest = Vec::new();
        for m in it {
            check_dim(acc.dim, m.dim)?;
            if !rest.is_empty() {
                rest.push(m);
                continue;
            }
            match meet(&acc, &m) {
                Some(s) => acc = s,
                None => rest.push(m),
            }
        }
        if rest.is_empty() {
            return Ok(acc);
        }
        let dim = acc.dim;
        let mut all = vec![acc];
        all.extend(rest);
        Ok(Self { dim, body: Body::Intersection(all) })
    }

    pub fn is_whole(&self) -> bool {
        match &self.body {
            Body::Box { lo, hi } => lo.iter().all(|v| *v == f64::NEG_INFINITY) && hi.iter().all(|v| *v == f64::INFINITY),
            Body::Polyhedron(p) => p.rows.is_empty() && p.eqs.is_empty(),
            Body::Product(a, b) => a.is_whole() && b.is_whole(),
            _ => false,
        }
    }

    /// Membership decided from the defining relations, without projecting.
    pub fn contains_direct(&self, x: &[f64], tol: f64) -> bool {
        match &self.body {
            Body::Polyhedron(p) => p.contains(x, tol),
            Body::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| *v >= l - tol && *v <= h + tol),
            Body::Curve(c) => c.contains_direct(x, tol),
            Body::Epigraph(f) => f.epi_contains(x, tol),
            Body::Hypograph { neg, .. } => neg.epi_contains(&[x[0], -x[1]], tol),
            Body::Product(a, b) => a.contains_direct(&x[..a.dim], tol) && b.contains_direct(&x[a.dim..], tol),
            Body::Union(ms) => ms.iter().any(|m| m.contains_direct(x, tol)),
            Body::Intersection(ms) => ms.iter().all(|m| m.contains_direct(x, tol)),
        }
    }

    fn candidates(&self, x: &[f64], cfg: &ToleranceConfig) -> Result<Vec<Candidate>> {
        let with_dist = |p: Vec<f64>| {
            let d = dist(&p, x);
            (p, d)
        };
        Ok(match &self.body {
            Body::Polyhedron(p) => p.project(x).map(with_dist).into_iter().collect(),
            Body::Box { lo, hi } => {
                let p: Vec<f64> = x.iter().zip(lo.iter().zip(hi)).map(|(v, (l, h))| v.clamp(*l, *h)).collect();
                vec![with_dist(p)]
            }
            Body::Curve(c) => c.project_candidates(x, cfg.grid_res_1d),
            Body::Epigraph(f) => f.epi_project_candidates(x, cfg.grid_res_1d),
            Body::Hypograph { neg, .. } => neg
                .epi_project_candidates(&[x[0], -x[1]], cfg.grid_res_1d)
                .into_iter()
                .map(|(p, d)| (vec![p[0], -p[1]], d))
                .collect(),
            Body::Product(a, b) => {
                let pa = a.best_candidates(&x[..a.dim], cfg)?;
                let pb = b.best_candidates(&x[a.dim..], cfg)?;
                let mut out = Vec::with_capacity(pa.len() * pb.len());
                for (u, du) in &pa {
                    for (v, dv) in &pb {
                        let mut p = u.clone();
                        p.extend_from_slice(v);
                        out.push((p, (du * du + dv * dv).sqrt()));
                    }
                }
                out
            }
            Body::Union(ms) => {
                let mut out = Vec::new();
                for m in ms {
                    out.extend(m.best_candidates(x, cfg)?);
                }
                out
            }
            Body::Intersection(ms) => intersection_candidates(ms, x, cfg)?,
        })
    }

    /// Candidates within `tol_mem` of the best distance, deduplicated.
    fn best_candidates(&self, x: &[f64], cfg: &ToleranceConfig) -> Result<Vec<Candidate>> {
        let all = self.candidates(x, cfg)?.into_iter().map(|(p, d)| (p, d, Vec::new())).collect();
        Ok(keep_best(all, cfg.tol_mem).into_iter().map(|(p, d, _)| (p, d)).collect())
    }

    pub fn project_tagged(&self, x: &[f64], cfg: &ToleranceConfig) -> Result<Vec<Projection>> {
        check_dim(self.dim, x.len())?;
        let tagged: Vec<Tagged> = match &self.body {
            Body::Union(ms) => {
                let mut all = Vec::new();
                for (i, m) in ms.iter().enumerate() {
                    for (p, d) in m.best_candidates(x, cfg)? {
                        all.push((p, d, vec![i]));
                    }
                }
                all
            }
            _ => self.candidates(x, cfg)?.into_iter().map(|(p, d)| (p, d, Vec::new())).collect(),
        };
        if tagged.is_empty() {
            return Err(Error::Input("projection onto an empty set".into()));
        }
        Ok(keep_best(tagged, cfg.tol_mem)
            .into_iter()
            .map(|(point, _, pieces)| Projection { point, pieces })
            .collect())
    }

    pub fn project(&self, x: &[f64], cfg: &ToleranceConfig) -> Result<Vec<Vec<f64>>> {
        Ok(self.project_tagged(x, cfg)?.into_iter().map(|p| p.point).collect())
    }

    pub fn distance(&self, x: &[f64], cfg: &ToleranceConfig) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        let c = self.candidates(x, cfg)?;
        c.iter()
            .map(|(_, d)| *d)
            .min_by(f64::total_cmp)
            .ok_or_else(|| Error::Input("distance to an empty set".into()))
    }

    pub fn membership(&self, x: &[f64], cfg: &ToleranceConfig) -> Result<bool> {
        Ok(self.distance(x, cfg)? <= cfg.tol_mem)
    }

    /// Whether `x` belongs to the inverse projector of `u`, i.e. `u` is a
    /// nearest point of the set to `x`.
    pub fn in_inverse_projector(&self, u: &[f64], x: &[f64], cfg: &ToleranceConfig) -> Result<bool> {
        check_dim(self.dim, u.len())?;
        if !self.membership(u, cfg)? {
            return Err(Error::Input("the candidate nearest point is not in the set".into()));
        }
        Ok(self.project(x, cfg)?.iter().any(|p| dist(p, u) <= cfg.tol_mem))
    }
}

type Tagged = (Vec<f64>, f64, Vec<usize>);

fn keep_best(mut all: Vec<Tagged>, tol: f64) -> Vec<Tagged> {
    let best = all.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    all.retain(|c| c.1 <= best + tol);
    let mut out: Vec<Tagged> = Vec::new();
    for (p, d, tags) in all {
        match out.iter_mut().find(|o| dist(&o.0, &p) <= tol) {
            Some(o) => {
                for t in tags {
                    if !o.2.contains(&t) {
                        o.2.push(t);
                    }
                }
                if d < o.1 {
                    o.0 = p;
                    o.1 = d;
                }
            }
            None => out.push((p, d, tags)),
        }
    }
    for o in &mut out {
        o.2.sort_unstable();
    }
    out
}

/// Quadratic-penalty descent `min |u-x|^2 + mu * sum d_i(u)^2` with increasing
/// `mu`, seeded from `x` and from each member's projection of `x`.
fn intersection_candidates(ms: &[SetDesc], x: &[f64], cfg: &ToleranceConfig) -> Result<Vec<Candidate>> {
    let first = |m: &SetDesc, u: &[f64]| -> Result<Vec<f64>> {
        Ok(m.best_candidates(u, cfg)?.into_iter().next().map(|c| c.0).unwrap_or_else(|| u.to_vec()))
    };
    let mut seeds = vec![x.to_vec()];
    for m in ms {
        seeds.push(first(m, x)?);
    }
    let k = ms.len() as f64;
    let mut out = Vec::new();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for seed in seeds {
        let mut u = seed;
        let mut mu = 1.0;
        while mu <= 1e10 {
            for _ in 0..500 {
                let mut acc = x.to_vec();
                for m in ms {
                    let p = first(m, &u)?;
                    for (a, v) in acc.iter_mut().zip(&p) {
                        *a += mu * v;
                    }
                }
                let next: Vec<f64> = acc.iter().map(|v| v / (1.0 + mu * k)).collect();
                let step = dist(&next, &u);
                u = next;
                if step <= 1e-15 * (1.0 + norm(&u)) {
                    break;
                }
            }
            mu *= 10.0;
        }
        let mut viol: f64 = 0.0;
        for m in ms {
            viol = viol.max(m.distance(&u, cfg)?);
        }
        if viol <= 10.0 * cfg.tol_mem {
            let d = dist(&u, x);
            out.push((u, d));
        } else if best.as_ref().map_or(true, |b| viol < b.0) {
            best = Some((viol, u));
        }
    }
    if out.is_empty() {
        let best = best.map(|b| b.1).unwrap_or_default();
        return Err(Error::Numerical { message: "intersection projection did not reach feasibility".into(), best });
    }
    Ok(out)
}

/// Box, polyhedron, or product of such, as one polyhedron.
pub fn as_poly(s: &SetDesc) -> Option<Polyhedron> {
    match &s.body {
        Body::Polyhedron(p) => Some(p.clone()),
        Body::Box { lo, hi } => Some(Polyhedron::from_box(lo, hi)),
        Body::Product(a, b) => {
            let pa = as_poly(a)?;
            let pb = as_poly(b)?;
            let (na, nb) = (a.dim, b.dim);
            let lift = |r: &HalfSpace, left: bool| {
                let mut n = vec![0.0; na + nb];
                if left {
                    n[..na].copy_from_slice(&r.normal);
                } else {
                    n[na..].copy_from_slice(&r.normal);
                }
                HalfSpace::new(n, r.offset)
            };
            let rows = pa.rows.iter().map(|r| lift(r, true)).chain(pb.rows.iter().map(|r| lift(r, false))).collect();
            let eqs = pa.eqs.iter().map(|r| lift(r, true)).chain(pb.eqs.iter().map(|r| lift(r, false))).collect();
            Some(Polyhedron::new(na + nb, rows, eqs))
        }
        _ => None,
    }
}

/// Splits a polyhedron whose rows each involve only the first `k` or only the
/// remaining coordinates.
fn split_poly(p: &Polyhedron, k: usize) -> Option<(Polyhedron, Polyhedron)> {
    let mut left = Polyhedron::new(k, vec![], vec![]);
    let mut right = Polyhedron::new(p.dim - k, vec![], vec![]);
    for (rows, is_eq) in [(&p.rows, false), (&p.eqs, true)] {
        for r in rows {
            let l_nz = r.normal[..k].iter().any(|v| *v != 0.0);
            let r_nz = r.normal[k..].iter().any(|v| *v != 0.0);
            let target = match (l_nz, r_nz) {
                (true, true) => return None,
                (false, true) => (&mut right, HalfSpace::new(r.normal[k..].to_vec(), r.offset)),
                _ => (&mut left, HalfSpace::new(r.normal[..k].to_vec(), r.offset)),
            };
            if is_eq {
                target.0.eqs.push(target.1);
            } else {
                target.0.rows.push(target.1);
            }
        }
    }
    Some((left, right))
}

fn poly_set(p: Polyhedron) -> SetDesc {
    SetDesc { dim: p.dim, body: Body::Polyhedron(p) }
}

fn meet_or_keep(a: &SetDesc, b: &SetDesc) -> SetDesc {
    meet(a, b).unwrap_or_else(|| SetDesc { dim: a.dim, body: Body::Intersection(vec![a.clone(), b.clone()]) })
}

/// Structural intersection of two sets, when one of the rules applies.
fn meet(a: &SetDesc, b: &SetDesc) -> Option<SetDesc> {
    if b.is_whole() {
        return Some(a.clone());
    }
    if a.is_whole() {
        return Some(b.clone());
    }
    match (&a.body, &b.body) {
        (Body::Box { lo: l1, hi: h1 }, Body::Box { lo: l2, hi: h2 }) => {
            let lo: Vec<f64> = l1.iter().zip(l2).map(|(x, y)| x.max(*y)).collect();
            let hi: Vec<f64> = h1.iter().zip(h2).map(|(x, y)| x.min(*y)).collect();
            if lo.iter().zip(&hi).any(|(l, h)| l > h) {
                return Some(SetDesc::empty(a.dim));
            }
            return Some(SetDesc { dim: a.dim, body: Body::Box { lo, hi } });
        }
        (Body::Union(ms), _) => {
            return Some(SetDesc { dim: a.dim, body: Body::Union(ms.iter().map(|m| meet_or_keep(m, b)).collect()) });
        }
        (_, Body::Union(ms)) => {
            return Some(SetDesc { dim: a.dim, body: Body::Union(ms.iter().map(|m| meet_or_keep(a, m)).collect()) });
        }
        (Body::Product(a1, a2), Body::Product(b1, b2)) if a1.dim == b1.dim => {
            return Some(SetDesc::product(meet_or_keep(a1, b1), meet_or_keep(a2, b2)));
        }
        _ => {}
    }
    if let (Some(pa), Some(pb)) = (as_poly(a), as_poly(b)) {
        return Some(poly_set(pa.intersect(&pb)));
    }
    let (other, poly) = match (as_poly(a), as_poly(b)) {
        (None, Some(p)) => (a, p),
        (Some(p), None) => (b, p),
        _ => return None,
    };
    match &other.body {
        Body::Product(s1, s2) => {
            let (p1, p2) = split_poly(&poly, s1.dim)?;
            Some(SetDesc::product(meet_or_keep(s1, &poly_set(p1)), meet_or_keep(s2, &poly_set(p2))))
        }
        Body::Epigraph(f) => {
            let (lo, hi) = axis_interval(&poly, 0)?;
            Some(f.restricted(lo, hi).map(SetDesc::epigraph).unwrap_or_else(|| SetDesc::empty(2)))
        }
        Body::Hypograph { f, .. } => {
            let (lo, hi) = axis_interval(&poly, 0)?;
            Some(f.restricted(lo, hi).map(SetDesc::hypograph).unwrap_or_else(|| SetDesc::empty(2)))
        }
        Body::Curve(c) => curve_meet_poly(c, &poly),
        _ => None,
    }
}

/// The interval `{t : rows hold}` when every row involves coordinate `axis` only.
fn axis_interval(p: &Polyhedron, axis: usize) -> Option<(f64, f64)> {
    let only_axis = |r: &HalfSpace| r.normal.iter().enumerate().all(|(i, v)| i == axis || *v == 0.0);
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for r in &p.rows {
        if !only_axis(r) {
            return None;
        }
        let a = r.normal[axis];
        if a > 0.0 {
            hi = hi.min(r.offset / a);
        } else if a < 0.0 {
            lo = lo.max(r.offset / a);
        } else if r.offset < 0.0 {
            return Some((1.0, 0.0));
        }
    }
    for r in &p.eqs {
        if !only_axis(r) {
            return None;
        }
        let a = r.normal[axis];
        if a == 0.0 {
            if r.offset != 0.0 {
                return Some((1.0, 0.0));
            }
            continue;
        }
        let t = r.offset / a;
        lo = lo.max(t);
        hi = hi.min(t);
    }
    Some((lo, hi))
}

fn curve_meet_poly(c: &Curve, p: &Polyhedron) -> Option<SetDesc> {
    let dim = c.dim();
    let axis_only = |r: &HalfSpace| r.normal.iter().enumerate().all(|(i, v)| i == c.axis || *v == 0.0);
    let (simple_eqs, general_eqs): (Vec<HalfSpace>, Vec<HalfSpace>) = p.eqs.iter().cloned().partition(|r| axis_only(r));
    let (simple_rows, general): (Vec<HalfSpace>, Vec<HalfSpace>) = p.rows.iter().cloned().partition(|r| axis_only(r));
    let (lo, hi) = axis_interval(&Polyhedron::new(dim, simple_rows, simple_eqs), c.axis)?;
    let (lo, hi) = (lo.max(c.lo), hi.min(c.hi));
    if lo > hi {
        return Some(SetDesc::empty(dim));
    }
    if let Some((first, others)) = general_eqs.split_first() {
        return Some(curve_roots(c, lo, hi, first, others, &general));
    }
    if general.is_empty() {
        return Some(SetDesc { dim, body: Body::Curve(c.with_interval(lo, hi)) });
    }
    // Remaining rows: scan the (truncated) parameter range and bisect the
    // boundaries of the feasible runs.
    let violation = |t: f64| general.iter().map(|r| r.residual(&c.point(t))).fold(f64::NEG_INFINITY, f64::max);
    let a = lo.max(-WORKING_HALF_WIDTH);
    let b = hi.min(WORKING_HALF_WIDTH);
    let n = 20_000usize;
    let ts: Vec<f64> = if a == b { vec![a] } else { (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect() };
    let ok: Vec<bool> = ts.iter().map(|&t| violation(t) <= 0.0).collect();
    let edge = |mut inside: f64, mut outside: f64| {
        for _ in 0..100 {
            let mid = 0.5 * (inside + outside);
            if violation(mid) <= 0.0 {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    let mut pieces = Vec::new();
    let mut i = 0;
    while i < ts.len() {
        if !ok[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < ts.len() && ok[i + 1] {
            i += 1;
        }
        let s = if start == 0 { if a == -WORKING_HALF_WIDTH { lo } else { a } } else { edge(ts[start], ts[start - 1]) };
        let e = if i == ts.len() - 1 { if b == WORKING_HALF_WIDTH { hi } else { b } } else { edge(ts[i], ts[i + 1]) };
        pieces.push(SetDesc { dim, body: Body::Curve(c.with_interval(s, e)) });
        i += 1;
    }
    Some(match pieces.len() {
        0 => SetDesc::empty(dim),
        1 => pieces.pop().expect("one piece"),
        _ => SetDesc { dim, body: Body::Union(pieces) },
    })
}

/// Points of the curve on the hyperplane `first`, kept when they satisfy the
/// other equalities and rows. Roots are located by sign changes on a scan of
/// the (truncated) parameter range.
fn curve_roots(c: &Curve, lo: f64, hi: f64, first: &HalfSpace, eqs: &[HalfSpace], rows: &[HalfSpace]) -> SetDesc {
    let dim = c.dim();
    let g = |t: f64| first.residual(&c.point(t));
    let a = lo.max(-WORKING_HALF_WIDTH);
    let b = hi.min(WORKING_HALF_WIDTH);
    let n = 20_000usize;
    let ts: Vec<f64> = if a == b { vec![a] } else { (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect() };
    let vals: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
    let mut roots = Vec::new();
    for i in 0..ts.len() {
        if vals[i] == 0.0 {
            roots.push(ts[i]);
        } else if i + 1 < ts.len() && vals[i + 1] != 0.0 && (vals[i] < 0.0) != (vals[i + 1] < 0.0) {
            let (mut l, mut h) = (ts[i], ts[i + 1]);
            for _ in 0..100 {
                let mid = 0.5 * (l + h);
                if (g(mid) < 0.0) == (vals[i] < 0.0) {
                    l = mid;
                } else {
                    h = mid;
                }
            }
            roots.push(0.5 * (l + h));
        }
    }
    let tol = 1e-9;
    let pieces: Vec<SetDesc> = roots
        .into_iter()
        .map(|t| c.point(t))
        .filter(|x| eqs.iter().all(|r| r.residual(x).abs() <= tol) && rows.iter().all(|r| r.residual(x) <= tol))
        .map(|x| SetDesc { dim, body: Body::Box { lo: x.clone(), hi: x } })
        .collect();
    match pieces.len() {
        0 => SetDesc::empty(dim),
        1 => pieces.into_iter().next().expect("one piece"),
        _ => SetDesc { dim, body: Body::Union(pieces) },
    }
}

/// A closed convex set built only from polyhedral primitives.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody {
    set: SetDesc,
    poly: Polyhedron,
}

impl ConvexBody {
    pub fn new(set: SetDesc) -> Result<Self> {
        let poly = as_poly(&set)
            .ok_or_else(|| Error::Input("a convex body must be a box, a polyhedron, or a product of such".into()))?;
        if poly.project(&vec![0.0; poly.dim]).is_none() {
            return Err(Error::Input("a convex body must be nonempty".into()));
        }
        Ok(Self { set, poly })
    }

    pub fn whole(dim: usize) -> Self {
        Self::new(SetDesc::whole(dim)).expect("whole space is convex")
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(SetDesc::boxed(vec![lo], vec![hi])?)
    }

    pub fn set(&self) -> &SetDesc {
        &self.set
    }

    pub fn dim(&self) -> usize {
        self.set.dim
    }

    pub fn polyhedron(&self) -> &Polyhedron {
        &self.poly
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.poly.contains(x, tol)
    }

    /// `C x R^m`.
    pub fn times_whole(&self, m: usize) -> Self {
        Self::new(SetDesc::product(self.set.clone(), SetDesc::whole(m))).expect("product of convex bodies")
    }

    /// Largest step `p` with `x + p d` in the body, rows relaxed by `slack`.
    pub fn max_step(&self, x: &[f64], d: &[f64], slack: f64) -> f64 {
        self.poly.max_step(x, d, slack)
    }

    /// The body as an interval when it is one-dimensional.
    pub fn as_interval(&self) -> Option<(f64, f64)> {
        if self.dim() != 1 {
            return None;
        }
        axis_interval(&self.poly, 0)
    }
}

pub fn membership(x: &[f64], s: &SetDesc, cfg: &ToleranceConfig) -> Result<bool> {
    s.membership(x, cfg)
}

pub fn distance(x: &[f64], s: &SetDesc, cfg: &ToleranceConfig) -> Result<f64> {
    s.distance(x, cfg)
}

pub fn project(x: &[f64], s: &SetDesc, cfg: &ToleranceConfig) -> Result<Vec<Vec<f64>>> {
    s.project(x, cfg)
}

pub fn in_inverse_projector(u: &[f64], x: &[f64], s: &SetDesc, cfg: &ToleranceConfig) -> Result<bool> {
    s.in_inverse_projector(u, x, cfg)
}

/// `S ∩ C`.
pub fn restrict(s: &SetDesc, c: &ConvexBody) -> Result<SetDesc> {
    SetDesc::intersection(vec![s.clone(), c.set.clone()])
}

pub fn product(a: SetDesc, b: SetDesc) -> SetDesc {
    SetDesc::product(a, b)
}

pub fn union(members: Vec<SetDesc>) -> Result<SetDesc> {
    SetDesc::union(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn half_plane() -> SetDesc {
        SetDesc::boxed(vec![0.0, f64::NEG_INFINITY], vec![f64::INFINITY, f64::INFINITY]).unwrap()
    }

    fn sigmoid_curve() -> SetDesc {
        let s = Expr::parse("2/(1+exp(-2*x))-1", &["x"]).unwrap();
        SetDesc::curve(Curve::new(0, 0.0, f64::INFINITY, vec![s])).unwrap()
    }

    #[test]
    fn half_plane_queries() {
        let c = cfg();
        let s = half_plane();
        assert!(s.membership(&[0.0, 0.0], &c).unwrap());
        assert!(s.membership(&[-1e-12, 0.0], &c).unwrap());
        assert_eq!(s.distance(&[-2.0, 0.0], &c).unwrap(), 2.0);
        assert_eq!(s.project(&[-1.0, 3.0], &c).unwrap(), vec![vec![0.0, 3.0]]);
        assert!(matches!(s.membership(&[0.0], &c), Err(Error::Dimension { .. })));
    }

    #[test]
    fn epigraph_of_abs() {
        let f = ScalarFn::parse(&[(f64::NEG_INFINITY, f64::INFINITY, "abs(x)")]).unwrap();
        let e = SetDesc::epigraph(f);
        let c = cfg();
        assert!((e.distance(&[0.0, -1.0], &c).unwrap() - 1.0).abs() < 1e-9);
        let p = e.project(&[0.0, -1.0], &c).unwrap();
        assert_eq!(p.len(), 1);
        assert!(norm(&p[0]) < 1e-9);
    }

    #[test]
    fn curve_inverse_projector() {
        let c = cfg();
        let s = sigmoid_curve();
        assert!(s.membership(&[0.0, 0.0], &c).unwrap());
        assert!(s.in_inverse_projector(&[0.0, 0.0], &[0.0, -1.0], &c).unwrap());
        assert!(!s.in_inverse_projector(&[0.0, 0.0], &[1.0, 1.0], &c).unwrap());
        assert!(s.in_inverse_projector(&[1.0, 1.0], &[0.0, 0.0], &c).is_err());
    }

    #[test]
    fn restrict_curve_to_half_plane_keeps_it() {
        let c = ConvexBody::new(half_plane()).unwrap();
        let r = restrict(&sigmoid_curve(), &c).unwrap();
        assert!(matches!(r.body(), Body::Curve(_)));
        assert_eq!(r, sigmoid_curve());
    }

    #[test]
    fn union_tracks_pieces() {
        let a = SetDesc::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let b = SetDesc::boxed(vec![0.5, 0.5], vec![2.0, 2.0]).unwrap();
        let u = SetDesc::union(vec![a, b]).unwrap();
        let c = cfg();
        assert!(u.membership(&[0.2, 0.2], &c).unwrap());
        assert!(u.membership(&[1.8, 1.8], &c).unwrap());
        let p = u.project_tagged(&[0.75, 0.75], &c).unwrap();
        assert_eq!(p[0].pieces, vec![0, 1]);
    }

    #[test]
    fn epigraph_cut_by_slab_restricts_domain() {
        let f = ScalarFn::parse(&[(0.0, f64::INFINITY, "x^2"), (f64::NEG_INFINITY, 0.0, "x")]).unwrap();
        let c = ConvexBody::new(SetDesc::product(
            SetDesc::boxed(vec![f64::NEG_INFINITY], vec![0.0]).unwrap(),
            SetDesc::whole(1),
        ))
        .unwrap();
        let r = restrict(&SetDesc::epigraph(f), &c).unwrap();
        match r.body() {
            Body::Epigraph(g) => assert_eq!(g.domain_hull(), (f64::NEG_INFINITY, 0.0)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn curve_cut_by_oblique_row_splits() {
        // Parabola below the line y = 1: t in [-1, 1].
        let c = Curve::new(0, f64::NEG_INFINITY, f64::INFINITY, vec![Expr::parse("x^2", &["x"]).unwrap()]);
        let p = Polyhedron::new(2, vec![HalfSpace::new(vec![0.0, 1.0], 1.0)], vec![]);
        let s = SetDesc::intersection(vec![SetDesc::curve(c).unwrap(), SetDesc::polyhedron(p).unwrap()]).unwrap();
        match s.body() {
            Body::Curve(c) => assert!((c.lo + 1.0).abs() < 1e-12 && (c.hi - 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn penalty_intersection_of_curves_finds_crossing() {
        let c1 = Curve::new(0, -2.0, 2.0, vec![Expr::parse("x^2", &["x"]).unwrap()]);
        let c2 = Curve::new(0, -2.0, 2.0, vec![Expr::parse("2-x^2", &["x"]).unwrap()]);
        let s = SetDesc::intersection(vec![SetDesc::curve(c1).unwrap(), SetDesc::curve(c2).unwrap()]).unwrap();
        assert!(matches!(s.body(), Body::Intersection(_)));
        let p = s.project(&[0.9, 1.2], &cfg()).unwrap();
        assert!(dist(&p[0], &[1.0, 1.0]) < 1e-6);
    }

    #[test]
    fn convex_body_rejects_curves() {
        assert!(ConvexBody::new(sigmoid_curve()).is_err());
        let c = ConvexBody::interval(0.0, f64::INFINITY).unwrap();
        assert_eq!(c.as_interval(), Some((0.0, f64::INFINITY)));
    }
}
