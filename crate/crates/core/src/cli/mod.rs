//! Command-line surface: problem files, reports, the example suite and plots.

pub mod problem;
pub mod report;
pub mod suite;
pub mod svg;

use serde_json::{json, Value};

use crate::coderivatives::{coderivative_graph_with, coderivative_slice, BasePair};
use crate::config::ToleranceConfig;
use crate::criteria::{aubin_wrt_with, lipschitz_wrt_with, piecewise_screen, stationarity_check};
use crate::error::{check_dim, Error, Result};
use crate::normals::{frechet_normal_cone, limiting_normal_cone_with, prox_normal_cone, tangent_cone, Engine, NormalQuery};
use crate::oracle::{brute_distance, brute_project};
use crate::sets::{restrict, ConvexBody, SetDesc};
use crate::subdiff::{profile_coderivative_with, subdiff_all_with, Certificate, ProfileValue};

use problem::{Op, Problem, QuerySpec};
use report::{cone, num, point_set, points, QueryOutcome, Report};

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct RunFlags {
    pub seed: u64,
    pub tol_mem: Option<f64>,
    pub tol_dir: Option<f64>,
    pub grid_res: Option<usize>,
    pub engine: Option<Engine>,
}

impl RunFlags {
    /// Defaults, then file overrides, then command-line flags.
    pub fn config(&self, file: Option<&problem::Overrides>) -> Result<ToleranceConfig> {
        let mut cfg = ToleranceConfig::default().with_seed(self.seed);
        if let Some(o) = file {
            o.apply(&mut cfg);
        }
        if let Some(v) = self.tol_mem {
            cfg.tol_mem = v;
        }
        if let Some(v) = self.tol_dir {
            cfg.tol_dir = v;
        }
        if let Some(v) = self.grid_res {
            cfg.grid_res_1d = v;
            cfg.grid_res_2d = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses and runs a problem file. Errors in the file itself are returned;
/// errors in single queries are recorded in the report.
pub fn run_text(text: &str, flags: &RunFlags) -> Result<Report> {
    let problem = problem::parse_problem(text)?;
    let cfg = flags.config(Some(&problem.overrides))?;
    Ok(run_problem(&problem, flags.engine, &cfg))
}

/// Runs every query, in parallel, reporting in file order.
pub fn run_problem(problem: &Problem, engine: Option<Engine>, cfg: &ToleranceConfig) -> Report {
    let mut report = Report::new(cfg);
    report.results = std::thread::scope(|s| {
        let handles: Vec<_> = problem
            .queries
            .iter()
            .map(|q| s.spawn(move || run_query(problem, q, engine, cfg)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("query thread")).collect()
    });
    report
}

fn outcome(q: &QuerySpec, res: Result<Answer>) -> QueryOutcome {
    match res {
        Ok(a) => QueryOutcome { id: q.id.clone(), op: q.op.name().into(), result: Ok(a.value), verdict: a.verdict, warnings: a.warnings },
        Err(e) => QueryOutcome { id: q.id.clone(), op: q.op.name().into(), result: Err(e.to_string()), verdict: None, warnings: vec![] },
    }
}

struct Answer {
    value: Value,
    verdict: Option<bool>,
    warnings: Vec<String>,
}

impl Answer {
    fn plain(value: Value) -> Self {
        Self { value, verdict: None, warnings: vec![] }
    }
}

pub fn run_query(problem: &Problem, q: &QuerySpec, engine: Option<Engine>, cfg: &ToleranceConfig) -> QueryOutcome {
    let engine = q.engine.map(Engine::from).or(engine).unwrap_or(Engine::B);
    outcome(q, answer(problem, q, engine, cfg))
}

fn need<'a, T>(v: &'a Option<T>, field: &str, q: &QuerySpec) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::Input(format!("query `{}` ({}) needs `{field}`", q.id, q.op.name())))
}

fn scalar_point(q: &QuerySpec) -> Result<f64> {
    let x = need(&q.x, "x", q)?.coords();
    check_dim(1, x.len())?;
    Ok(x[0])
}

fn optional_body<'a>(problem: &'a Problem, q: &QuerySpec) -> Result<Option<&'a ConvexBody>> {
    q.body.as_deref().map(|b| problem.body(b)).transpose()
}

fn scalar_body(problem: &Problem, q: &QuerySpec) -> Result<ConvexBody> {
    Ok(optional_body(problem, q)?.cloned().unwrap_or_else(|| ConvexBody::whole(1)))
}

fn shortfall_warning(flag: bool) -> Vec<String> {
    if flag {
        vec!["sampling shortfall: fewer local samples than requested".into()]
    } else {
        vec![]
    }
}

fn certificate(c: &Certificate) -> Value {
    match c {
        Certificate::Accepted { p, delta } => json!({ "accepted": { "p": num(*p), "delta": num(*delta) } }),
        Certificate::Infeasible => json!("infeasible"),
        Certificate::Violated { x } => json!({ "violated_at": num(*x) }),
    }
}

fn trend(t: &[(f64, f64)]) -> Value {
    Value::Array(t.iter().map(|(r, v)| json!([num(*r), num(*v)])).collect())
}

/// The normal-cone query for a set, an optional body and a base point.
pub fn normal_query(problem: &Problem, q: &QuerySpec, cfg: &ToleranceConfig) -> Result<NormalQuery> {
    let set = problem.set(need(&q.set, "set", q)?)?;
    let point = need(&q.point, "point", q)?.coords();
    NormalQuery::new(point, set.clone(), optional_body(problem, q)?.cloned(), cfg.clone())
}

fn restricted_set(problem: &Problem, q: &QuerySpec) -> Result<SetDesc> {
    let set = problem.set(need(&q.set, "set", q)?)?;
    match optional_body(problem, q)? {
        Some(c) => restrict(set, c),
        None => Ok(set.clone()),
    }
}

fn base_pair(q: &QuerySpec) -> Result<BasePair> {
    Ok(BasePair::new(need(&q.x, "x", q)?.coords(), need(&q.y, "y", q)?.coords()))
}

/// The body a map query is taken with respect to: the named body, the
/// domain, or nothing in classical mode.
fn map_body<'a>(problem: &'a Problem, q: &QuerySpec) -> Result<Option<&'a ConvexBody>> {
    if q.classical {
        return Ok(None);
    }
    if let Some(b) = &q.body {
        return problem.body(b).map(Some);
    }
    Ok(problem.map(need(&q.map, "map", q)?)?.dom.as_ref())
}

fn answer(problem: &Problem, q: &QuerySpec, engine: Engine, cfg: &ToleranceConfig) -> Result<Answer> {
    match q.op {
        Op::Membership => {
            let s = restricted_set(problem, q)?;
            let p = need(&q.point, "point", q)?.coords();
            check_dim(s.dim(), p.len())?;
            Ok(Answer::plain(json!({ "member": s.membership(&p, cfg)? })))
        }
        Op::Distance => {
            let s = restricted_set(problem, q)?;
            let p = need(&q.point, "point", q)?.coords();
            check_dim(s.dim(), p.len())?;
            let (d, e) = match engine {
                Engine::Oracle => (brute_distance(&p, &s, cfg)?, Engine::Oracle),
                _ => (s.distance(&p, cfg)?, Engine::A),
            };
            Ok(Answer::plain(json!({ "distance": num(d), "engine": report::engine_name(e) })))
        }
        Op::Project => {
            let s = restricted_set(problem, q)?;
            let p = need(&q.point, "point", q)?.coords();
            check_dim(s.dim(), p.len())?;
            let (ps, e) = match engine {
                Engine::Oracle => (brute_project(&p, &s, cfg)?, Engine::Oracle),
                _ => (s.project(&p, cfg)?, Engine::A),
            };
            Ok(Answer::plain(json!({ "projection": point_set(&ps, e) })))
        }
        Op::ProximalNormalCone => {
            let nq = normal_query(problem, q, cfg)?;
            Ok(Answer::plain(json!({ "cone": cone(&prox_normal_cone(&nq)?, Engine::A) })))
        }
        Op::LimitingNormalCone => {
            let nq = normal_query(problem, q, cfg)?;
            let res = limiting_normal_cone_with(&nq, engine)?;
            Ok(Answer { value: json!({ "cone": cone(&res.cone, res.engine) }), verdict: None, warnings: shortfall_warning(res.shortfall) })
        }
        Op::FrechetNormalCone | Op::TangentCone => {
            let s = restricted_set(problem, q)?;
            let p = need(&q.point, "point", q)?.coords();
            let c = if q.op == Op::FrechetNormalCone { frechet_normal_cone(&p, &s, cfg)? } else { tangent_cone(&p, &s, cfg)? };
            Ok(Answer::plain(json!({ "cone": cone(&c, Engine::A) })))
        }
        Op::Coderivative => {
            let f = problem.map(need(&q.map, "map", q)?)?;
            let base = base_pair(q)?;
            let g = coderivative_graph_with(f, &base, map_body(problem, q)?, engine, cfg)?;
            let mut v = json!({ "graph_cone": cone(&g.cone, g.engine) });
            if let Some(ys) = &q.ystar {
                let ys = ys.coords();
                check_dim(f.m, ys.len())?;
                v["slice"] = point_set(&coderivative_slice(&g, f.m, &ys, cfg)?, g.engine);
            }
            Ok(Answer { value: v, verdict: None, warnings: shortfall_warning(g.shortfall) })
        }
        Op::Subdifferential => {
            let f = problem.function(need(&q.function, "function", q)?)?;
            let r = subdiff_all_with(f, scalar_point(q)?, &scalar_body(problem, q)?, engine, cfg)?;
            let col = |v: &[f64]| v.iter().map(|a| vec![*a]).collect::<Vec<_>>();
            Ok(Answer {
                value: json!({
                    "proximal": point_set(&col(&r.proximal), Engine::A),
                    "limiting": point_set(&col(&r.limiting), engine),
                    "singular": cone(&r.singular, engine),
                }),
                verdict: None,
                warnings: r.warnings,
            })
        }
        Op::ProfileCoderivative => {
            let f = problem.function(need(&q.function, "function", q)?)?;
            let lambda = *need(&q.lambda, "lambda", q)?;
            let v = profile_coderivative_with(f, scalar_point(q)?, &scalar_body(problem, q)?, lambda, engine, cfg)?;
            let value = match v {
                ProfileValue::Points(ps) => {
                    json!({ "points": point_set(&ps.iter().map(|a| vec![*a]).collect::<Vec<_>>(), engine) })
                }
                ProfileValue::Cone(c) => json!({ "cone": cone(&c, engine) }),
            };
            Ok(Answer::plain(value))
        }
        Op::Aubin => {
            let f = problem.map(need(&q.map, "map", q)?)?;
            let base = base_pair(q)?;
            let c = map_body(problem, q)?.cloned().unwrap_or_else(|| ConvexBody::whole(f.n));
            let v = aubin_wrt_with(f, &base, &c, engine, cfg)?;
            Ok(Answer {
                value: json!({
                    "holds": v.holds,
                    "constant_estimate": num(v.constant_estimate),
                    "zero_slice": point_set(&v.zero_slice, v.engine),
                    "witness_rays": { "engine": report::engine_name(v.engine), "rays": points(&v.witness_rays) },
                    "witness_pieces": v.witness_pieces,
                    "direct_estimate": num(v.direct_estimate),
                    "direct_trend": trend(&v.direct_trend),
                }),
                verdict: Some(v.holds),
                warnings: shortfall_warning(v.shortfall),
            })
        }
        Op::Lipschitz => {
            let f = problem.function(need(&q.function, "function", q)?)?;
            let v = lipschitz_wrt_with(f, scalar_point(q)?, &scalar_body(problem, q)?, engine, cfg)?;
            Ok(Answer {
                value: json!({
                    "holds": v.holds,
                    "lip_estimate": num(v.lip_estimate),
                    "lip_trend": trend(&v.lip_trend),
                    "singular": cone(&v.singular_cone, engine),
                    "subdiff_bound": num(v.subdiff_bound),
                    "limiting": point_set(&v.limiting.iter().map(|a| vec![*a]).collect::<Vec<_>>(), engine),
                }),
                verdict: Some(v.holds),
                warnings: vec![],
            })
        }
        Op::Stationarity => {
            let f = problem.function(need(&q.function, "function", q)?)?;
            let v = stationarity_check(f, scalar_point(q)?, &scalar_body(problem, q)?, cfg)?;
            Ok(Answer {
                value: json!({ "stationary": v.stationary, "certificate": certificate(&v.certificate) }),
                verdict: Some(v.stationary),
                warnings: vec![],
            })
        }
        Op::Screen => {
            let f = problem.function(need(&q.function, "function", q)?)?;
            let pieces = need(&q.pieces, "pieces", q)?
                .iter()
                .map(|p| problem.body(p).cloned())
                .collect::<Result<Vec<_>>>()?;
            let v = piecewise_screen(f, scalar_point(q)?, &pieces, cfg)?;
            let per: Vec<Value> = v
                .pieces
                .iter()
                .map(|s| json!({ "stationary": s.stationary, "certificate": certificate(&s.certificate) }))
                .collect();
            Ok(Answer {
                value: json!({ "may_be_minimizer": v.may_be_minimizer, "pieces": per }),
                verdict: Some(v.may_be_minimizer),
                warnings: vec![],
            })
        }
    }
}
