//! Polyhedra `{x : <a_i, x> <= b_i, <e_j, x> = c_j}` and their exact Euclidean projection.

use serde::{Deserialize, Serialize};

use crate::linalg::{dot, norm, solve};

/// `<normal, x> <= offset` (or `=` when used as an equality row).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    pub fn residual(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyhedron {
    pub dim: usize,
    pub rows: Vec<HalfSpace>,
    #[serde(default)]
    pub eqs: Vec<HalfSpace>,
}

fn row_tol(row: &HalfSpace, x: &[f64], tol: f64) -> f64 {
    tol * (1.0 + row.offset.abs() + norm(&row.normal) * norm(x))
}

impl Polyhedron {
    pub fn new(dim: usize, rows: Vec<HalfSpace>, eqs: Vec<HalfSpace>) -> Self {
        Self { dim, rows, eqs }
    }

    /// Coordinate box as a polyhedron; infinite bounds produce no row.
    pub fn from_box(lo: &[f64], hi: &[f64]) -> Self {
        let dim = lo.len();
        let mut rows = Vec::new();
        let mut eqs = Vec::new();
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            if lo[i] == hi[i] {
                eqs.push(HalfSpace::new(e, lo[i]));
                continue;
            }
            if hi[i].is_finite() {
                rows.push(HalfSpace::new(e.clone(), hi[i]));
            }
            if lo[i].is_finite() {
                rows.push(HalfSpace::new(e.iter().map(|v| -v).collect(), -lo[i]));
            }
        }
        Self { dim, rows, eqs }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.rows.iter().all(|r| r.residual(x) <= row_tol(r, x, tol))
            && self.eqs.iter().all(|r| r.residual(x).abs() <= row_tol(r, x, tol))
    }

    pub fn intersect(&self, other: &Polyhedron) -> Polyhedron {
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        let mut eqs = self.eqs.clone();
        eqs.extend(other.eqs.iter().cloned());
        Polyhedron { dim: self.dim, rows, eqs }
    }

    /// Exact projection by active-set enumeration. Subsets of inequality rows
    /// are tried by increasing size; the first one satisfying the KKT
    /// conditions is the unique minimizer. `None` means the polyhedron is empty.
    pub fn project(&self, x: &[f64]) -> Option<Vec<f64>> {
        const TOL: f64 = 1e-11;
        if self.eqs.is_empty() && self.contains(x, TOL) {
            return Some(x.to_vec());
        }
        let m = self.rows.len();
        let max_active = self.dim.min(m);
        let mut subset: Vec<usize> = Vec::with_capacity(max_active);
        for k in 0..=max_active {
            if let Some(u) = self.try_subsets(x, k, 0, &mut subset, TOL) {
                return Some(u);
            }
        }
        None
    }

    fn try_subsets(&self, x: &[f64], k: usize, start: usize, subset: &mut Vec<usize>, tol: f64) -> Option<Vec<f64>> {
        if subset.len() == k {
            return self.kkt_point(x, subset, tol);
        }
        let m = self.rows.len();
        for i in start..m {
            if m - i < k - subset.len() {
                break;
            }
            subset.push(i);
            let found = self.try_subsets(x, k, i + 1, subset, tol);
            subset.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    fn kkt_point(&self, x: &[f64], active: &[usize], tol: f64) -> Option<Vec<f64>> {
        let rows: Vec<&HalfSpace> = self.eqs.iter().chain(active.iter().map(|&i| &self.rows[i])).collect();
        let n_eq = self.eqs.len();
        let u = if rows.is_empty() {
            x.to_vec()
        } else {
            let gram: Vec<Vec<f64>> = rows
                .iter()
                .map(|ri| rows.iter().map(|rj| dot(&ri.normal, &rj.normal)).collect())
                .collect();
            let rhs: Vec<f64> = rows.iter().map(|r| r.residual(x)).collect();
            let lambda = solve(gram, rhs)?;
            let scale_ref = lambda.iter().fold(1.0f64, |a, l| a.max(l.abs()));
            if lambda[n_eq..].iter().any(|l| *l < -1e-12 * scale_ref) {
                return None;
            }
            let mut u = x.to_vec();
            for (r, l) in rows.iter().zip(&lambda) {
                for (ui, ai) in u.iter_mut().zip(&r.normal) {
                    *ui -= l * ai;
                }
            }
            u
        };
        let feasible = self
            .rows
            .iter()
            .enumerate()
            .all(|(i, r)| active.contains(&i) || r.residual(&u) <= row_tol(r, &u, tol))
            && self.eqs.iter().all(|r| r.residual(&u).abs() <= row_tol(r, &u, 1e-9));
        feasible.then_some(u)
    }

    /// Largest `p >= 0` with `x + p d` inside the polyhedron. `slack * |a|`
    /// absorbs the membership error of `x` only: a row active at `x` blocks
    /// every strictly outward `d`, whatever its length. Returns 0 when no
    /// positive step is feasible.
    pub fn max_step(&self, x: &[f64], d: &[f64], slack: f64) -> f64 {
        let dn = norm(d);
        let mut best = f64::INFINITY;
        let rows = self.rows.iter().map(|r| (r, false)).chain(self.eqs.iter().map(|r| (r, true)));
        for (r, eq) in rows {
            let an = norm(&r.normal);
            let tol = slack * an;
            let res = r.residual(x);
            if res > tol || (eq && res < -tol) {
                return 0.0;
            }
            let outward = 1e-12 * an * dn;
            for (sign, res) in if eq { vec![(1.0, res), (-1.0, -res)] } else { vec![(1.0, res)] } {
                let rate = sign * dot(&r.normal, d);
                if rate <= outward {
                    continue;
                }
                if res >= -tol {
                    return 0.0;
                }
                best = best.min(-res / rate);
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadrant() -> Polyhedron {
        Polyhedron::from_box(&[0.0, 0.0], &[f64::INFINITY, f64::INFINITY])
    }

    #[test]
    fn projects_onto_orthant() {
        let q = quadrant();
        assert_eq!(q.project(&[-1.0, 3.0]).unwrap(), vec![0.0, 3.0]);
        assert_eq!(q.project(&[-1.0, -2.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(q.project(&[2.0, 5.0]).unwrap(), vec![2.0, 5.0]);
    }

    #[test]
    fn projects_onto_affine_line() {
        // x + y = 1 within 3-space.
        let p = Polyhedron::new(3, vec![], vec![HalfSpace::new(vec![1.0, 1.0, 0.0], 1.0)]);
        let u = p.project(&[0.0, 0.0, 4.0]).unwrap();
        assert!((u[0] - 0.5).abs() < 1e-12 && (u[1] - 0.5).abs() < 1e-12 && (u[2] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn empty_polyhedron_projects_to_none() {
        let p = Polyhedron::new(
            1,
            vec![HalfSpace::new(vec![1.0], -1.0), HalfSpace::new(vec![-1.0], -1.0)],
            vec![],
        );
        assert!(p.project(&[0.0]).is_none());
    }

    #[test]
    fn max_step_respects_rows() {
        let q = quadrant();
        assert_eq!(q.max_step(&[0.0, 0.0], &[-1.0, 1.0], 0.0), 0.0);
        assert_eq!(q.max_step(&[0.0, 0.0], &[0.0, 1.0], 0.0), f64::INFINITY);
        assert!((q.max_step(&[1.0, 0.0], &[-1.0, 1.0], 0.0) - 1.0).abs() < 1e-15);
    }
}
