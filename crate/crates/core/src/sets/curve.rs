//! Graphs of smooth curves `{gamma(t) : t in [lo, hi]}` where coordinate `axis`
//! equals `t` and every other coordinate is a closed-form function of `t`.

use crate::expr::Expr;
use crate::linalg::{dist, dot};

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub axis: usize,
    pub lo: f64,
    pub hi: f64,
    /// One expression per non-axis coordinate, in coordinate order.
    pub coords: Vec<Expr>,
    d1: Vec<Expr>,
    d2: Vec<Expr>,
}

const GOLDEN: f64 = 0.381_966_011_250_105_1;

impl Curve {
    pub fn new(axis: usize, lo: f64, hi: f64, coords: Vec<Expr>) -> Self {
        let d1: Vec<Expr> = coords.iter().map(|c| c.derivative(0).simplify()).collect();
        let d2 = d1.iter().map(|c| c.derivative(0).simplify()).collect();
        Self { axis, lo, hi, coords, d1, d2 }
    }

    pub fn dim(&self) -> usize {
        self.coords.len() + 1
    }

    fn assemble(&self, t: f64, axis_value: f64, exprs: &[Expr]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        let mut it = exprs.iter();
        for i in 0..self.dim() {
            if i == self.axis {
                out.push(axis_value);
            } else {
                out.push(it.next().expect("coordinate count").eval1(t));
            }
        }
        out
    }

    pub fn point(&self, t: f64) -> Vec<f64> {
        self.assemble(t, t, &self.coords)
    }

    pub fn velocity(&self, t: f64) -> Vec<f64> {
        self.assemble(t, 1.0, &self.d1)
    }

    fn acceleration(&self, t: f64) -> Vec<f64> {
        self.assemble(t, 0.0, &self.d2)
    }

    /// Same curve over a sub-interval.
    pub fn with_interval(&self, lo: f64, hi: f64) -> Self {
        Self { lo, hi, ..self.clone() }
    }

    pub fn contains_direct(&self, x: &[f64], tol: f64) -> bool {
        let t = x[self.axis];
        if t < self.lo - tol || t > self.hi + tol {
            return false;
        }
        dist(&self.point(t.clamp(self.lo, self.hi)), x) <= tol
    }

    /// Local minimizers of `|gamma(t) - x|` over the interval, refined to
    /// machine precision. Any global minimizer lies within distance `d0` of
    /// the clamped axis value, which bounds the search window.
    pub fn project_candidates(&self, x: &[f64], grid_res: usize) -> Vec<(Vec<f64>, f64)> {
        let t0 = x[self.axis].clamp(self.lo, self.hi);
        let p0 = self.point(t0);
        let d0 = dist(&p0, x);
        if d0 == 0.0 {
            return vec![(p0, 0.0)];
        }
        let a = (x[self.axis] - d0).max(self.lo);
        let b = (x[self.axis] + d0).min(self.hi);
        if !(b > a) {
            return vec![(p0, d0)];
        }
        let n = (((b - a) * grid_res as f64).ceil() as usize).clamp(64, 4096);
        let ts: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        let phi: Vec<f64> = ts.iter().map(|&t| self.sq_dist(t, x)).collect();
        let mut out = vec![(p0, d0)];
        for i in 0..=n {
            let left = if i > 0 { phi[i - 1] } else { f64::INFINITY };
            let right = if i < n { phi[i + 1] } else { f64::INFINITY };
            if phi[i] <= left && phi[i] <= right {
                let lo = ts[i.saturating_sub(1)];
                let hi = ts[(i + 1).min(n)];
                let t = self.refine(x, lo, hi);
                let p = self.point(t);
                let d = dist(&p, x);
                out.push((p, d));
            }
        }
        out
    }

    fn sq_dist(&self, t: f64, x: &[f64]) -> f64 {
        let p = self.point(t);
        p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    /// Golden-section search on the squared distance, then Newton on its
    /// derivative `<gamma', gamma - x>` kept inside the bracket.
    fn refine(&self, x: &[f64], mut lo: f64, mut hi: f64) -> f64 {
        let (blo, bhi) = (lo, hi);
        let mut c = lo + GOLDEN * (hi - lo);
        let mut d = hi - GOLDEN * (hi - lo);
        let mut fc = self.sq_dist(c, x);
        let mut fd = self.sq_dist(d, x);
        for _ in 0..80 {
            if hi - lo <= 1e-13 * (1.0 + lo.abs()) {
                break;
            }
            if fc <= fd {
                hi = d;
                d = c;
                fd = fc;
                c = lo + GOLDEN * (hi - lo);
                fc = self.sq_dist(c, x);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = hi - GOLDEN * (hi - lo);
                fd = self.sq_dist(d, x);
            }
        }
        let mut t = if fc <= fd { c } else { d };
        let mut best = self.sq_dist(t, x);
        for end in [blo, bhi] {
            let fe = self.sq_dist(end, x);
            if fe < best {
                best = fe;
                t = end;
            }
        }
        for _ in 0..8 {
            let g = self.point(t);
            let v = self.velocity(t);
            let acc = self.acceleration(t);
            let r: Vec<f64> = g.iter().zip(x).map(|(a, b)| a - b).collect();
            let psi = dot(&v, &r);
            let dpsi = dot(&v, &v) + dot(&acc, &r);
            if !(dpsi > 0.0) || psi == 0.0 {
                break;
            }
            let cand = (t - psi / dpsi).clamp(blo, bhi);
            let fcand = self.sq_dist(cand, x);
            if fcand <= best {
                let done = (cand - t).abs() <= 1e-16 * (1.0 + t.abs());
                t = cand;
                best = fcand;
                if done {
                    break;
                }
            } else {
                break;
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parabola() -> Curve {
        Curve::new(0, f64::NEG_INFINITY, f64::INFINITY, vec![Expr::parse("x^2", &["x"]).unwrap()])
    }

    #[test]
    fn point_and_velocity() {
        let c = parabola();
        assert_eq!(c.point(2.0), vec![2.0, 4.0]);
        assert_eq!(c.velocity(2.0), vec![1.0, 4.0]);
    }

    #[test]
    fn projection_onto_parabola_is_two_valued_on_axis() {
        // From (0, 1) the nearest points are (±1/√2, 1/2).
        let c = parabola();
        let cands = c.project_candidates(&[0.0, 1.0], 400);
        let best = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let mins: Vec<_> = cands.iter().filter(|c| c.1 <= best + 1e-9).collect();
        assert!((best - 0.75f64.sqrt()).abs() < 1e-10);
        assert!(mins.iter().any(|c| c.0[0] > 0.7) && mins.iter().any(|c| c.0[0] < -0.7));
    }

    #[test]
    fn endpoint_is_a_candidate() {
        let c = Curve::new(0, 0.0, 1.0, vec![Expr::parse("x", &["x"]).unwrap()]);
        let cands = c.project_candidates(&[-1.0, -2.0], 400);
        let best = cands.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        assert_eq!(best.0, vec![0.0, 0.0]);
    }
}
