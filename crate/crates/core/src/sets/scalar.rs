//! Extended-real functions of one variable assembled from closed-form branches
//! on closed intervals, and projection onto their epigraphs.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::sets::curve::Curve;

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub lo: f64,
    pub hi: f64,
    pub expr: Expr,
    deriv: Expr,
}

impl Branch {
    pub fn new(lo: f64, hi: f64, expr: Expr) -> Self {
        let deriv = expr.derivative(0).simplify();
        Self { lo, hi, expr, deriv }
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }
}

/// `f(x)` is the value of the first branch whose interval contains `x`, and
/// `+inf` outside every branch.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFn {
    pub branches: Vec<Branch>,
}

impl ScalarFn {
    pub fn new(branches: Vec<Branch>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::Input("a scalar function needs at least one branch".into()));
        }
        for br in &branches {
            if br.lo.is_nan() || br.hi.is_nan() || br.lo > br.hi {
                return Err(Error::Input(format!("invalid branch interval [{}, {}]", br.lo, br.hi)));
            }
        }
        Ok(Self { branches })
    }

    /// Parses `(lo, hi, expression in x)` triples.
    pub fn parse(branches: &[(f64, f64, &str)]) -> Result<Self> {
        let parsed = branches
            .iter()
            .map(|(lo, hi, src)| Ok(Branch::new(*lo, *hi, Expr::parse(src, &["x"])?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(parsed)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.branches
            .iter()
            .find(|b| b.contains(x, 0.0))
            .map(|b| b.expr.eval1(x))
            .unwrap_or(f64::INFINITY)
    }

    /// Derivative of the first branch containing `x`; one-sided at branch ends.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        self.branches.iter().find(|b| b.contains(x, 0.0)).map(|b| b.deriv.eval1(x))
    }

    pub fn in_domain(&self, x: f64, tol: f64) -> bool {
        self.branches.iter().any(|b| b.contains(x, tol))
    }

    /// Lower/upper end of the effective domain.
    pub fn domain_hull(&self) -> (f64, f64) {
        let lo = self.branches.iter().map(|b| b.lo).fold(f64::INFINITY, f64::min);
        let hi = self.branches.iter().map(|b| b.hi).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub fn negated(&self) -> Self {
        let branches = self
            .branches
            .iter()
            .map(|b| Branch::new(b.lo, b.hi, Expr::Neg(Box::new(b.expr.clone())).simplify()))
            .collect();
        Self { branches }
    }

    /// Restriction of the function to `[lo, hi]`. May leave no branch, in which
    /// case `None` is returned.
    pub fn restricted(&self, lo: f64, hi: f64) -> Option<Self> {
        let branches: Vec<Branch> = self
            .branches
            .iter()
            .filter_map(|b| {
                let (l, h) = (b.lo.max(lo), b.hi.min(hi));
                (l <= h).then(|| Branch { lo: l, hi: h, ..b.clone() })
            })
            .collect();
        (!branches.is_empty()).then_some(Self { branches })
    }

    pub fn epi_contains(&self, x: &[f64], tol: f64) -> bool {
        self.branches
            .iter()
            .any(|b| b.contains(x[0], tol) && x[1] >= b.expr.eval1(x[0].clamp(b.lo, b.hi)) - tol)
    }

    /// Candidate nearest points of the epigraph: the query itself when inside,
    /// otherwise local minimizers on each branch graph and on the vertical rays
    /// rising from finite branch ends.
    pub fn epi_project_candidates(&self, q: &[f64], grid_res: usize) -> Vec<(Vec<f64>, f64)> {
        if self.epi_contains(q, 0.0) {
            return vec![(q.to_vec(), 0.0)];
        }
        let mut out = Vec::new();
        for b in &self.branches {
            let curve = Curve::new(0, b.lo, b.hi, vec![b.expr.clone()]);
            out.extend(curve.project_candidates(q, grid_res));
            for end in [b.lo, b.hi] {
                if end.is_finite() {
                    let p = vec![end, q[1].max(b.expr.eval1(end))];
                    let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
                    out.push((p, d));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs() -> ScalarFn {
        ScalarFn::parse(&[(f64::NEG_INFINITY, f64::INFINITY, "abs(x)")]).unwrap()
    }

    fn best(c: &[(Vec<f64>, f64)]) -> (Vec<f64>, f64) {
        c.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap().clone()
    }

    #[test]
    fn evaluates_piecewise_and_off_domain() {
        let f = ScalarFn::parse(&[(0.0, f64::INFINITY, "x^2"), (f64::NEG_INFINITY, 0.0, "x")]).unwrap();
        assert_eq!(f.eval(2.0), 4.0);
        assert_eq!(f.eval(-2.0), -2.0);
        let g = ScalarFn::parse(&[(0.0, f64::INFINITY, "-x")]).unwrap();
        assert_eq!(g.eval(-1.0), f64::INFINITY);
    }

    #[test]
    fn epigraph_of_abs_projects_below_to_kink() {
        let (p, d) = best(&abs().epi_project_candidates(&[0.0, -1.0], 400));
        assert!(p[0].abs() < 1e-9 && p[1].abs() < 1e-9);
        assert!((d - 1.0).abs() < 1e-9);
    }

    #[test]
    fn vertical_ray_at_domain_end() {
        let f = ScalarFn::parse(&[(0.0, f64::INFINITY, "-x")]).unwrap();
        let (p, d) = best(&f.epi_project_candidates(&[-2.0, 3.0], 400));
        assert_eq!(p, vec![0.0, 3.0]);
        assert_eq!(d, 2.0);
    }

    #[test]
    fn restriction_drops_empty_branches() {
        let f = ScalarFn::parse(&[(0.0, f64::INFINITY, "x^2"), (f64::NEG_INFINITY, 0.0, "x")]).unwrap();
        let r = f.restricted(0.0, f64::INFINITY).unwrap();
        assert_eq!(r.branches.len(), 2);
        assert_eq!(r.branches[1].lo, 0.0);
        assert!(f.restricted(5.0, 4.0).is_none());
    }
}
