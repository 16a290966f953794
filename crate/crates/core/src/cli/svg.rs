//! Plain-text SVG plots of two-dimensional cone queries.

use std::fmt::Write as _;

use crate::coderivatives::{coderivative_graph_with, to_normal_coords};
use crate::cones::Cone;
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::normals::{frechet_normal_cone, limiting_normal_cone_with, prox_normal_cone, tangent_cone, Engine};
use crate::oracle::{cloud, GridSpec};
use crate::sets::{ConvexBody, SetDesc};

use super::problem::{Op, Problem};
use super::report::engine_name;
use super::{normal_query, RunFlags};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;
const HALF_WIDTH: f64 = 1.0;
const SAMPLES_PER_UNIT: f64 = 60.0;

/// Everything drawn in one plot.
#[derive(Debug, Clone)]
pub struct Scene {
    pub title: String,
    pub set: SetDesc,
    pub body: Option<ConvexBody>,
    pub base: Vec<f64>,
    pub cone: Cone,
    pub engine: Engine,
}

fn not_planar() -> Error {
    Error::Input("plots need a two-dimensional query".into())
}

/// Builds the scene for a query of a problem file.
pub fn scene(problem: &Problem, id: &str, flags: &RunFlags) -> Result<Scene> {
    let q = problem.query(id)?;
    let cfg = flags.config(Some(&problem.overrides))?;
    let engine = q.engine.map(Engine::from).or(flags.engine).unwrap_or(Engine::B);
    match q.op {
        Op::LimitingNormalCone | Op::ProximalNormalCone | Op::FrechetNormalCone | Op::TangentCone => {
            let set = problem.set(q.set.as_deref().ok_or_else(|| Error::Input(format!("query `{id}` names no set")))?)?;
            if set.dim() != 2 {
                return Err(not_planar());
            }
            let nq = normal_query(problem, q, &cfg)?;
            let (cone, engine) = match q.op {
                Op::LimitingNormalCone => {
                    let r = limiting_normal_cone_with(&nq, engine)?;
                    (r.cone, r.engine)
                }
                Op::ProximalNormalCone => (prox_normal_cone(&nq)?, Engine::A),
                Op::FrechetNormalCone => (frechet_normal_cone(&nq.base, nq.restricted(), &cfg)?, Engine::A),
                _ => (tangent_cone(&nq.base, nq.restricted(), &cfg)?, Engine::A),
            };
            Ok(Scene { title: format!("{id}: {}", q.op.name()), set: set.clone(), body: nq.body.clone(), base: nq.base.clone(), cone, engine })
        }
        Op::Coderivative => {
            let f = problem.map(q.map.as_deref().ok_or_else(|| Error::Input(format!("query `{id}` names no map")))?)?;
            if f.n + f.m != 2 {
                return Err(not_planar());
            }
            let x = q.x.as_ref().ok_or_else(|| Error::Input(format!("query `{id}` needs `x`")))?.coords();
            let y = q.y.as_ref().ok_or_else(|| Error::Input(format!("query `{id}` needs `y`")))?.coords();
            let base = crate::coderivatives::BasePair::new(x, y);
            let body = if q.classical {
                None
            } else if let Some(b) = &q.body {
                Some(problem.body(b)?)
            } else {
                f.dom.as_ref()
            };
            let g = coderivative_graph_with(f, &base, body, engine, &cfg)?;
            Ok(Scene {
                title: format!("{id}: graph normals"),
                set: f.graph.clone(),
                body: body.map(|c| c.times_whole(f.m)),
                base: base.joined(),
                cone: to_normal_coords(&g.cone, f.m),
                engine: g.engine,
            })
        }
        _ => Err(not_planar()),
    }
}

struct View {
    lo: [f64; 2],
}

impl View {
    fn new(base: &[f64]) -> Self {
        Self { lo: [base[0] - HALF_WIDTH, base[1] - HALF_WIDTH] }
    }

    fn px(&self, p: &[f64]) -> (f64, f64) {
        let scale = (SIZE - 2.0 * MARGIN) / (2.0 * HALF_WIDTH);
        (MARGIN + (p[0] - self.lo[0]) * scale, SIZE - MARGIN - (p[1] - self.lo[1]) * scale)
    }

    fn square(&self) -> Vec<Vec<f64>> {
        let (x0, y0) = (self.lo[0], self.lo[1]);
        let w = 2.0 * HALF_WIDTH;
        vec![vec![x0, y0], vec![x0 + w, y0], vec![x0 + w, y0 + w], vec![x0, y0 + w]]
    }
}

/// Clips a convex polygon to `<a, x> <= b`.
fn clip(poly: &[Vec<f64>], a: &[f64], b: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (p, q) = (&poly[i], &poly[(i + 1) % poly.len()]);
        let (fp, fq) = (dot(a, p) - b, dot(a, q) - b);
        if fp <= 0.0 {
            out.push(p.clone());
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            out.push(vec![p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

fn body_polygon(c: &ConvexBody, view: &View) -> Vec<Vec<f64>> {
    let poly = c.polyhedron();
    let mut shape = view.square();
    for r in &poly.rows {
        shape = clip(&shape, &r.normal, r.offset);
    }
    for e in &poly.eqs {
        shape = clip(&shape, &e.normal, e.offset);
        let neg: Vec<f64> = e.normal.iter().map(|v| -v).collect();
        shape = clip(&shape, &neg, -e.offset);
    }
    shape
}

/// Sampled points of the set that have a lattice neighbour outside it.
fn boundary_samples(set: &SetDesc, base: &[f64]) -> Result<Vec<Vec<f64>>> {
    let grid = GridSpec::new(base.to_vec(), HALF_WIDTH, SAMPLES_PER_UNIT)?;
    let h = grid.spacing();
    let pts = cloud(set, &grid)?.points;
    Ok(pts
        .into_iter()
        .filter(|p| {
            [[h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]]
                .iter()
                .any(|d| !set.contains_direct(&[p[0] + d[0], p[1] + d[1]], 1e-9))
        })
        .collect())
}

/// Renders a scene. The output depends only on the scene.
pub fn render(s: &Scene) -> Result<String> {
    if s.base.len() != 2 {
        return Err(not_planar());
    }
    let view = View::new(&s.base);
    let mut out = String::new();
    let w = |out: &mut String, line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    w(&mut out, format!(r##"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"##));
    w(&mut out, r##"<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" markerHeight="7" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#1f4e9c"/></marker></defs>"##.into());
    w(&mut out, format!(r##"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"##));
    let (x0, y0) = view.px(&[view.lo[0], view.lo[1] + 2.0 * HALF_WIDTH]);
    let side = SIZE - 2.0 * MARGIN;
    w(&mut out, format!(r##"<rect x="{x0:.2}" y="{y0:.2}" width="{side:.2}" height="{side:.2}" fill="none" stroke="#999"/>"##));
    if let Some(c) = &s.body {
        let shape = body_polygon(c, &view);
        if !shape.is_empty() {
            let mut pts = String::new();
            for p in &shape {
                let (x, y) = view.px(p);
                let _ = write!(pts, "{x:.2},{y:.2} ");
            }
            w(&mut out, format!(r##"<polygon class="body" points="{}" fill="#cfe3cf" fill-opacity="0.6" stroke="#6a9f6a"/>"##, pts.trim_end()));
        }
    }
    w(&mut out, r##"<g class="set" fill="#333">"##.into());
    for p in boundary_samples(&s.set, &s.base)? {
        let (x, y) = view.px(&p);
        w(&mut out, format!(r##"<circle cx="{x:.2}" cy="{y:.2}" r="1.2"/>"##));
    }
    w(&mut out, "</g>".into());
    w(&mut out, r##"<g class="rays" stroke="#1f4e9c" stroke-width="2" marker-end="url(#arrow)">"##.into());
    let (bx, by) = view.px(&s.base);
    for r in &s.cone.rays {
        let tip = [s.base[0] + 0.85 * HALF_WIDTH * r[0], s.base[1] + 0.85 * HALF_WIDTH * r[1]];
        let (tx, ty) = view.px(&tip);
        w(&mut out, format!(r##"<line x1="{bx:.2}" y1="{by:.2}" x2="{tx:.2}" y2="{ty:.2}"/>"##));
    }
    w(&mut out, "</g>".into());
    w(&mut out, format!(r##"<circle class="base" cx="{bx:.2}" cy="{by:.2}" r="4" fill="black"/>"##));
    w(&mut out, format!(r##"<text x="{MARGIN}" y="24" font-family="sans-serif" font-size="14">{} (engine {})</text>"##, escape(&s.title), engine_name(s.engine)));
    w(&mut out, "</svg>".into());
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn plot(problem: &Problem, id: &str, flags: &RunFlags) -> Result<String> {
    render(&scene(problem, id, flags)?)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clipping_a_square_by_a_halfplane() {
        let sq = vec![vec![-1.0, -1.0], vec![1.0, -1.0], vec![1.0, 1.0], vec![-1.0, 1.0]];
        let half = clip(&sq, &[-1.0, 0.0], 0.0);
        assert_eq!(half.len(), 4);
        assert!(half.iter().all(|p| p[0] >= 0.0));
    }

    #[test]
    fn zero_cone_draws_no_arrows() {
        let s = Scene {
            title: "t".into(),
            set: SetDesc::whole(2),
            body: None,
            base: vec![0.0, 0.0],
            cone: Cone::zero(2),
            engine: Engine::B,
        };
        let svg = render(&s).unwrap();
        assert!(!svg.contains("<line"));
        assert!(svg.contains(r##"class="base""##));
    }
}
