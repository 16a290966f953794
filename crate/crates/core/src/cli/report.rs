//! Report documents. Keys are sorted and non-finite numbers are written as
//! strings, so the same input always yields the same bytes.

use serde_json::{json, Map, Value};

use crate::cones::{Cone, PolyCone};
use crate::config::ToleranceConfig;
use crate::normals::Engine;

pub const TOOL: &str = "vacone";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn vector(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|a| num(*a)).collect())
}

pub fn points(ps: &[Vec<f64>]) -> Value {
    Value::Array(ps.iter().map(|p| vector(p)).collect())
}

pub fn engine_name(e: Engine) -> &'static str {
    match e {
        Engine::A => "A",
        Engine::B => "B",
        Engine::Oracle => "oracle",
    }
}

fn poly_cone(p: &PolyCone) -> Value {
    json!({ "normals": points(&p.normals) })
}

/// A cone as its ray list, tagged with the engine that produced it.
pub fn cone(c: &Cone, engine: Engine) -> Value {
    let mut m = Map::new();
    m.insert("engine".into(), json!(engine_name(engine)));
    m.insert("dim".into(), json!(c.dim));
    m.insert("rays".into(), points(&c.rays));
    if let Some(ex) = &c.exact {
        m.insert("exact".into(), Value::Array(ex.iter().map(poly_cone).collect()));
    }
    if !c.provenance.is_empty() {
        m.insert("pieces".into(), json!(c.provenance));
    }
    Value::Object(m)
}

/// A finite point set, tagged with its engine.
pub fn point_set(ps: &[Vec<f64>], engine: Engine) -> Value {
    json!({ "engine": engine_name(engine), "points": points(ps) })
}

pub fn config(cfg: &ToleranceConfig) -> Value {
    json!({
        "tol_mem": num(cfg.tol_mem),
        "tol_dir": num(cfg.tol_dir),
        "p_grid": vector(&cfg.p_grid),
        "radius_schedule": vector(&cfg.radius_schedule),
        "grid_res_1d": cfg.grid_res_1d,
        "grid_res_2d": cfg.grid_res_2d,
        "eps_zero": num(cfg.eps_zero),
    })
}

/// The outcome of one query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryOutcome {
    pub id: String,
    pub op: String,
    pub result: Result<Value, String>,
    /// `Some(false)` for a verdict query that came out negative.
    pub verdict: Option<bool>,
    pub warnings: Vec<String>,
}

impl QueryOutcome {
    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("id".into(), json!(self.id));
        m.insert("op".into(), json!(self.op));
        match &self.result {
            Ok(v) => m.insert("result".into(), v.clone()),
            Err(e) => m.insert("error".into(), json!(e)),
        };
        if let Some(v) = self.verdict {
            m.insert("verdict".into(), json!(if v { "holds" } else { "fails" }));
        }
        if !self.warnings.is_empty() {
            m.insert("warnings".into(), json!(self.warnings));
        }
        Value::Object(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub seed: u64,
    pub cfg: ToleranceConfig,
    pub results: Vec<QueryOutcome>,
    pub warnings: Vec<String>,
    /// Extra top-level sections, such as expectation checks.
    pub extra: Map<String, Value>,
}

impl Report {
    pub fn new(cfg: &ToleranceConfig) -> Self {
        Self { seed: cfg.seed, cfg: cfg.clone(), results: Vec::new(), warnings: Vec::new(), extra: Map::new() }
    }

    pub fn has_errors(&self) -> bool {
        self.results.iter().any(|r| r.result.is_err())
    }

    pub fn any_verdict_fails(&self) -> bool {
        self.results.iter().any(|r| r.verdict == Some(false))
    }

    pub fn to_value(&self) -> Value {
        let mut m = self.extra.clone();
        m.insert("tool".into(), json!(TOOL));
        m.insert("version".into(), json!(VERSION));
        m.insert("seed".into(), json!(self.seed));
        m.insert("config".into(), config(&self.cfg));
        m.insert("results".into(), Value::Array(self.results.iter().map(QueryOutcome::to_value).collect()));
        m.insert("warnings".into(), json!(self.warnings));
        Value::Object(m)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report serializes");
        s.push('\n');
        s
    }
}
