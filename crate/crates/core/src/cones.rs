//! Cones as clustered unit rays, optionally with an exact union of polyhedral
//! cones, and the algebra used on them: membership, comparison, hulls,
//! outer limits of direction batches, and block slicing.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::error::{check_dim, Result};
use crate::linalg::{angle, dot, norm, normalize, null_space, scale};
use crate::sampling::rng_for;
use crate::sets::{HalfSpace, Polyhedron};

/// Rays closer than this multiple of `tol_dir` are treated as sampling the
/// arc between them.
const FILL_FACTOR: f64 = 2.5;

/// Number of smallest-radius batches a limiting direction must persist in.
pub const PERSISTENCE: usize = 6;

/// `{v : <a, v> <= 0 for every normal a}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCone {
    pub normals: Vec<Vec<f64>>,
}

impl PolyCone {
    pub fn new(normals: Vec<Vec<f64>>) -> Self {
        Self { normals }
    }

    /// A ray `R+ d`.
    pub fn ray(d: &[f64]) -> Self {
        let mut normals: Vec<Vec<f64>> = null_space(&[d.to_vec()], d.len())
            .into_iter()
            .flat_map(|b| [b.clone(), scale(&b, -1.0)])
            .collect();
        normals.push(scale(d, -1.0));
        Self { normals }
    }

    fn as_poly(&self, dim: usize) -> Polyhedron {
        Polyhedron::new(dim, self.normals.iter().map(|a| HalfSpace::new(a.clone(), 0.0)).collect(), vec![])
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        let n = norm(v);
        self.normals.iter().all(|a| dot(a, v) <= tol * norm(a) * n)
    }

    /// Angle from `v` to the cone (`pi/2` when the nearest point is the apex).
    pub fn angle_to(&self, v: &[f64]) -> f64 {
        if self.contains(v, 1e-12) {
            return 0.0;
        }
        match self.as_poly(v.len()).project(v) {
            Some(p) if norm(&p) > 1e-12 * norm(v) => angle(v, &p),
            _ => std::f64::consts::FRAC_PI_2,
        }
    }

    /// Extreme rays (unit), found from `(dim-1)`-subsets of the normals.
    pub fn extreme_rays(&self, dim: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        let m = self.normals.len();
        let mut subset = Vec::new();
        fn rec(c: &PolyCone, dim: usize, start: usize, m: usize, subset: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
            if subset.len() == dim - 1 {
                let rows: Vec<Vec<f64>> = subset.iter().map(|&i| c.normals[i].clone()).collect();
                let ns = null_space(&rows, dim);
                if ns.len() == 1 {
                    for d in [ns[0].clone(), scale(&ns[0], -1.0)] {
                        if c.contains(&d, 1e-9) {
                            out.push(d);
                        }
                    }
                }
                return;
            }
            for i in start..m {
                subset.push(i);
                rec(c, dim, i + 1, m, subset, out);
                subset.pop();
            }
        }
        if dim == 1 {
            for d in [vec![1.0], vec![-1.0]] {
                if self.contains(&d, 1e-9) {
                    out.push(d);
                }
            }
            return out;
        }
        rec(self, dim, 0, m, &mut subset, &mut out);
        out
    }
}

/// Hash grid over unit vectors for "any direction within angle" queries.
pub struct DirIndex {
    cell: f64,
    dirs: Vec<Vec<f64>>,
    map: HashMap<Vec<i64>, Vec<usize>>,
}

impl DirIndex {
    pub fn new(tol: f64) -> Self {
        let cell = (2.0 * (tol / 2.0).sin()).max(1e-9);
        Self { cell, dirs: Vec::new(), map: HashMap::new() }
    }

    fn key(&self, v: &[f64]) -> Vec<i64> {
        v.iter().map(|x| (x / self.cell).floor() as i64).collect()
    }

    pub fn insert(&mut self, v: Vec<f64>) -> usize {
        let k = self.key(&v);
        let idx = self.dirs.len();
        self.dirs.push(v);
        self.map.entry(k).or_default().push(idx);
        idx
    }

    /// Index of some stored direction within `tol` of `v`.
    pub fn find_within(&self, v: &[f64], tol: f64) -> Option<usize> {
        let base = self.key(v);
        let d = v.len();
        let total = 3usize.pow(d as u32);
        let mut key = base.clone();
        for code in 0..total {
            let mut c = code;
            for i in 0..d {
                key[i] = base[i] + (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(ids) = self.map.get(&key) {
                for &i in ids {
                    if angle(&self.dirs[i], v) <= tol {
                        return Some(i);
                    }
                }
            }
        }
        None
    }
}

/// Greedy angular deduplication after a lexicographic sort, merging tags.
fn dedup_tagged(mut rays: Vec<(Vec<f64>, Vec<usize>)>, tol: f64) -> Vec<(Vec<f64>, Vec<usize>)> {
    rays.sort_by(|a, b| {
        for (x, y) in a.0.iter().zip(&b.0) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    });
    let mut index = DirIndex::new(tol);
    let mut out: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    for (r, tags) in rays {
        match index.find_within(&r, tol) {
            Some(i) => {
                for t in tags {
                    if !out[i].1.contains(&t) {
                        out[i].1.push(t);
                    }
                }
            }
            None => {
                index.insert(r.clone());
                out.push((r, tags));
            }
        }
    }
    for o in &mut out {
        o.1.sort_unstable();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    pub dim: usize,
    /// Unit rays; empty means the zero cone.
    pub rays: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<PolyCone>>,
    /// Per-ray indices of the set pieces that produced the ray, when tracked.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<Vec<usize>>,
}

impl Cone {
    pub fn zero(dim: usize) -> Self {
        Self { dim, rays: Vec::new(), exact: None, provenance: Vec::new() }
    }

    pub fn from_rays(dim: usize, rays: Vec<Vec<f64>>, tol_dir: f64) -> Self {
        Self::from_tagged(dim, rays.into_iter().map(|r| (r, Vec::new())).collect(), tol_dir)
    }

    pub fn from_tagged(dim: usize, rays: Vec<(Vec<f64>, Vec<usize>)>, tol_dir: f64) -> Self {
        let unit: Vec<(Vec<f64>, Vec<usize>)> =
            rays.into_iter().filter_map(|(r, t)| normalize(&r).map(|u| (u, t))).collect();
        let kept = dedup_tagged(unit, tol_dir);
        let tracked = kept.iter().any(|k| !k.1.is_empty());
        let (rays, tags): (Vec<_>, Vec<_>) = kept.into_iter().unzip();
        Self { dim, rays, exact: None, provenance: if tracked { tags } else { Vec::new() } }
    }

    /// Union of polyhedral cones, sampled by the direction grid plus the
    /// extreme rays of every piece.
    pub fn from_pieces(dim: usize, pieces: Vec<PolyCone>, cfg: &ToleranceConfig) -> Self {
        let mut rays = Vec::new();
        for p in &pieces {
            rays.extend(p.extreme_rays(dim));
        }
        for d in direction_grid(dim, cfg) {
            if pieces.iter().any(|p| p.contains(&d, 1e-12)) {
                rays.push(d);
            }
        }
        let mut c = Self::from_rays(dim, rays, cfg.tol_dir);
        c.exact = Some(pieces);
        c
    }

    pub fn is_zero(&self) -> bool {
        self.rays.is_empty()
    }

    /// Angle from `v` to the cone: nearest ray, nearest arc between close
    /// rays, or nearest exact piece.
    pub fn angle_to(&self, v: &[f64], tol_dir: f64) -> f64 {
        let mut best = std::f64::consts::PI;
        let fill = FILL_FACTOR * tol_dir;
        let mut near = Vec::new();
        for r in &self.rays {
            let a = angle(v, r);
            best = best.min(a);
            if a <= fill {
                near.push(r);
            }
        }
        for i in 0..near.len() {
            for j in i + 1..near.len() {
                if angle(near[i], near[j]) <= fill {
                    best = best.min(angle_to_pair(v, near[i], near[j]));
                }
            }
        }
        if let Some(pieces) = &self.exact {
            for p in pieces {
                best = best.min(p.angle_to(v));
            }
        }
        best
    }

    pub fn contains(&self, v: &[f64], cfg: &ToleranceConfig) -> bool {
        self.contains_within(v, cfg.tol_dir, cfg)
    }

    pub fn contains_within(&self, v: &[f64], tol: f64, cfg: &ToleranceConfig) -> bool {
        norm(v) <= cfg.tol_mem || self.angle_to(v, cfg.tol_dir) <= tol
    }

    /// Largest angle from a ray of `self` to `other`.
    pub fn excess(&self, other: &Cone, tol_dir: f64) -> f64 {
        self.rays.iter().map(|r| other.angle_to(r, tol_dir)).fold(0.0, f64::max)
    }

    pub fn hausdorff(&self, other: &Cone, tol_dir: f64) -> f64 {
        self.excess(other, tol_dir).max(other.excess(self, tol_dir))
    }

    pub fn equal_within(&self, other: &Cone, tol: f64, cfg: &ToleranceConfig) -> bool {
        self.dim == other.dim && self.hausdorff(other, cfg.tol_dir) <= tol
    }

    /// Smallest convex cone containing the rays: repeated pairwise sums until
    /// no new direction appears. Opposite pairs are skipped.
    pub fn conic_hull(&self, cfg: &ToleranceConfig) -> Cone {
        let tol = cfg.tol_dir;
        let mut rays = self.rays.clone();
        for _ in 0..16 {
            let mut index = DirIndex::new(tol);
            for r in &rays {
                index.insert(r.clone());
            }
            let mut added = Vec::new();
            for i in 0..rays.len() {
                for j in i + 1..rays.len() {
                    if angle(&rays[i], &rays[j]) >= std::f64::consts::PI - 1e-9 {
                        continue;
                    }
                    let s: Vec<f64> = rays[i].iter().zip(&rays[j]).map(|(a, b)| a + b).collect();
                    if let Some(u) = normalize(&s) {
                        if index.find_within(&u, tol).is_none() {
                            index.insert(u.clone());
                            added.push(u);
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            rays.extend(added);
        }
        Cone::from_rays(self.dim, rays, tol)
    }
}

/// Angle from `v` to the 2-generator cone `{s a + t b : s, t >= 0}`.
fn angle_to_pair(v: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let (aa, ab, bb) = (dot(a, a), dot(a, b), dot(b, b));
    let (va, vb) = (dot(v, a), dot(v, b));
    let det = aa * bb - ab * ab;
    if det <= 1e-18 {
        return angle(v, a).min(angle(v, b));
    }
    let s = (va * bb - vb * ab) / det;
    let t = (vb * aa - va * ab) / det;
    if s >= 0.0 && t >= 0.0 {
        let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| s * x + t * y).collect();
        if norm(&p) > 0.0 {
            return angle(v, &p);
        }
    }
    angle(v, a).min(angle(v, b))
}

/// Per-radius direction batches of a sampled outer limit, with per-direction
/// tags naming the set pieces involved.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LimitCluster {
    pub batches: Vec<(f64, Vec<(Vec<f64>, Vec<usize>)>)>,
}

impl LimitCluster {
    pub fn push(&mut self, radius: f64, dirs: Vec<(Vec<f64>, Vec<usize>)>) {
        self.batches.push((radius, dirs));
    }
}

/// Directions of the smallest-radius batch that have a neighbour within
/// `tol_dir` in each of the `PERSISTENCE` smallest batches.
pub fn cluster_limits(dim: usize, batches: &LimitCluster, cfg: &ToleranceConfig) -> Cone {
    let n = batches.batches.len();
    if n == 0 {
        return Cone::zero(dim);
    }
    let used = &batches.batches[n.saturating_sub(PERSISTENCE)..];
    let indices: Vec<DirIndex> = used[..used.len() - 1]
        .iter()
        .map(|(_, dirs)| {
            let mut idx = DirIndex::new(cfg.tol_dir);
            for (d, _) in dirs {
                idx.insert(d.clone());
            }
            idx
        })
        .collect();
    let smallest = &used[used.len() - 1].1;
    let survivors: Vec<(Vec<f64>, Vec<usize>)> = smallest
        .iter()
        .filter(|(d, _)| indices.iter().all(|idx| idx.find_within(d, cfg.tol_dir).is_some()))
        .cloned()
        .collect();
    Cone::from_tagged(dim, survivors, cfg.tol_dir)
}

/// Relative size under which a block of a unit ray counts as zero: the
/// configured `eps_zero`, raised to the angular resolution of a sampled cone
/// (dedup plus persistence, `2 tol_dir`).
pub fn zero_block_tolerance(cfg: &ToleranceConfig) -> f64 {
    cfg.eps_zero.max((2.0 * cfg.tol_dir).sin())
}

/// Points `v` with `(v, target)` in the cone, where `target` occupies `block`
/// and `v` the complementary coordinates (in order). For a zero target the
/// result is the zero vector plus the unit complements of rays vanishing on
/// the block.
pub fn slice(k: &Cone, block: std::ops::Range<usize>, target: &[f64], cfg: &ToleranceConfig) -> Result<Vec<Vec<f64>>> {
    check_dim(block.len(), target.len())?;
    let comp_dim = k.dim - block.len();
    let split = |r: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let b: Vec<f64> = r[block.clone()].to_vec();
        let c: Vec<f64> = r.iter().enumerate().filter(|(i, _)| !block.contains(i)).map(|(_, v)| *v).collect();
        (b, c)
    };
    let tn = norm(target);
    let mut out: Vec<Vec<f64>> = Vec::new();
    let push = |out: &mut Vec<Vec<f64>>, p: Vec<f64>| {
        let tol = cfg.tol_mem * (1.0 + norm(&p));
        if !out.iter().any(|q| crate::linalg::dist(q, &p) <= tol) {
            out.push(p);
        }
    };
    if tn <= cfg.tol_mem {
        push(&mut out, vec![0.0; comp_dim]);
        for r in &k.rays {
            let (b, c) = split(r);
            if norm(&b) <= zero_block_tolerance(cfg) * norm(r) {
                if let Some(u) = normalize(&c) {
                    push(&mut out, u);
                }
            }
        }
        return Ok(out);
    }
    for r in &k.rays {
        let (b, c) = split(r);
        let bn2 = dot(&b, &b);
        if bn2.sqrt() <= 1e-12 || angle(&b, target) > cfg.tol_dir {
            continue;
        }
        let s = dot(&b, target) / bn2;
        push(&mut out, scale(&c, s));
    }
    Ok(out)
}

/// The zero-target slice as a cone of complement directions.
pub fn slice_cone(k: &Cone, block: std::ops::Range<usize>, cfg: &ToleranceConfig) -> Result<Cone> {
    let comp_dim = k.dim - block.len();
    let zeros = vec![0.0; block.len()];
    let pts = slice(k, block, &zeros, cfg)?;
    Ok(Cone::from_rays(comp_dim, pts, cfg.tol_dir))
}

/// Approximate angular spacing of the direction grid.
pub fn grid_spacing(dim: usize) -> f64 {
    match dim {
        0 | 1 => 0.0,
        2 => 2.0 * std::f64::consts::PI / 720.0,
        3 => (4.0 * std::f64::consts::PI / FIB_3D as f64).sqrt(),
        _ => (2.0 * std::f64::consts::PI.powi(2) / RANDOM_4D as f64).cbrt(),
    }
}

const FIB_3D: usize = 5000;
const RANDOM_4D: usize = 20000;

/// Unit directions: both signs in 1-D, 720 angles in 2-D, a Fibonacci sphere
/// in 3-D and seeded Gaussian directions above.
pub fn direction_grid(dim: usize, cfg: &ToleranceConfig) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![-1.0], vec![1.0]],
        2 => (0..720)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 720.0;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..FIB_3D)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / FIB_3D as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    vec![rho * t.cos(), rho * t.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = rng_for(cfg.seed, &[dim as u64, 0x6772_6964]);
            (0..RANDOM_4D)
                .filter_map(|_| normalize(&(0..dim).map(|_| gaussian(&mut rng)).collect::<Vec<_>>()))
                .collect()
        }
    }
}

/// Standard normal variate by the Box-Muller transform.
fn gaussian<R: rand::Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn wedge() -> PolyCone {
        // {0 <= a <= -b}
        PolyCone::new(vec![vec![-1.0, 0.0], vec![1.0, 1.0]])
    }

    #[test]
    fn membership_basics() {
        let c = cfg();
        let k = Cone::from_rays(2, vec![vec![-1.0, 1.0]], c.tol_dir);
        assert!(k.contains(&[0.0, 0.0], &c));
        assert!(k.contains(&[-2.0, 2.0], &c));
        let w = Cone::from_pieces(2, vec![wedge()], &c);
        assert!(!w.contains(&[1.0, 0.0], &c));
        assert!(w.contains(&[0.0, -1.0], &c));
    }

    #[test]
    fn wedge_with_ray_differs_from_wedge() {
        let c = cfg();
        let w = Cone::from_pieces(2, vec![wedge()], &c);
        let wr = Cone::from_pieces(2, vec![wedge(), PolyCone::ray(&[-1.0, 1.0])], &c);
        assert!(w.equal_within(&w, c.tol_dir, &c));
        assert!(!wr.equal_within(&w, c.tol_dir, &c));
    }

    #[test]
    fn resampled_wedge_is_equal() {
        let c = cfg();
        let coarse = Cone::from_pieces(2, vec![wedge()], &c);
        let fine: Vec<Vec<f64>> = (0..=4500)
            .map(|k| {
                let t = -std::f64::consts::FRAC_PI_2 + std::f64::consts::FRAC_PI_4 * k as f64 / 4500.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let fine = Cone::from_rays(2, fine, c.tol_dir / 3.0);
        assert!(coarse.equal_within(&fine, c.tol_dir, &c));
    }

    #[test]
    fn hulls() {
        let c = cfg();
        let one = Cone::from_rays(2, vec![vec![1.0, 1.0]], c.tol_dir);
        assert_eq!(one.conic_hull(&c).rays.len(), 1);
        let quarter = Cone::from_rays(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]], c.tol_dir).conic_hull(&c);
        let expected = Cone::from_pieces(2, vec![PolyCone::new(vec![vec![-1.0, 0.0], vec![0.0, -1.0]])], &c);
        assert!(quarter.equal_within(&expected, c.tol_dir, &c));
    }

    #[test]
    fn persistence_drops_transient_directions() {
        let c = cfg();
        let mut lc = LimitCluster::default();
        for (k, r) in c.radius_schedule.iter().enumerate() {
            let mut dirs = vec![(vec![0.0, 1.0], vec![])];
            if k == 0 {
                dirs.push((vec![1.0, 0.0], vec![]));
            }
            lc.push(*r, dirs);
        }
        let k = cluster_limits(2, &lc, &c);
        assert_eq!(k.rays, vec![vec![0.0, 1.0]]);
    }

    #[test]
    fn slices_of_a_ray() {
        let c = cfg();
        let k = Cone::from_rays(2, vec![vec![-1.0, 1.0]], c.tol_dir);
        assert_eq!(slice(&k, 1..2, &[1.0], &c).unwrap(), vec![vec![-1.0]]);
        assert!(slice(&k, 1..2, &[-1.0], &c).unwrap().is_empty());
        assert_eq!(slice(&k, 1..2, &[0.0], &c).unwrap(), vec![vec![0.0]]);
    }

    #[test]
    fn grid_sizes() {
        let c = cfg();
        assert_eq!(direction_grid(2, &c).len(), 720);
        assert_eq!(direction_grid(3, &c).len(), FIB_3D);
        assert!(direction_grid(3, &c).iter().all(|d| (norm(d) - 1.0).abs() < 1e-12));
    }

    #[test]
    fn extreme_rays_of_wedge() {
        let mut rays = wedge().extreme_rays(2);
        rays.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(rays.len(), 2);
        assert!(angle(&rays[0], &[0.0, -1.0]) < 1e-12);
        assert!(angle(&rays[1], &[1.0, -1.0]) < 1e-12);
    }
}
