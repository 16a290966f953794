//! Problem files: named sets, bodies, functions and maps plus a query list.
//!
//! Infinite bounds are written as the strings `"inf"` and `"-inf"`. Function
//! branches use the variable `x`; curve coordinates use the parameter `t`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;

use crate::coderivatives::MultiMap;
use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::normals::Engine;
use crate::sets::{Branch, ConvexBody, Curve, HalfSpace, Polyhedron, ScalarFn, SetDesc};

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Finite(f64),
    Named(Bound),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub enum Bound {
    #[serde(rename = "inf", alias = "+inf")]
    Inf,
    #[serde(rename = "-inf")]
    NegInf,
}

impl Num {
    pub fn value(self) -> f64 {
        match self {
            Num::Finite(v) => v,
            Num::Named(Bound::Inf) => f64::INFINITY,
            Num::Named(Bound::NegInf) => f64::NEG_INFINITY,
        }
    }
}

fn values(v: &[Num]) -> Vec<f64> {
    v.iter().map(|n| n.value()).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// A set tree. A bare string refers to another named set.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SetSpec {
    Ref(String),
    Node(SetNode),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SetNode {
    Whole { dim: usize },
    Empty { dim: usize },
    Point(Vec<f64>),
    Box { lo: Vec<Num>, hi: Vec<Num> },
    Polyhedron {
        dim: usize,
        #[serde(default)]
        rows: Vec<RowSpec>,
        #[serde(default)]
        eqs: Vec<RowSpec>,
    },
    Curve { axis: usize, lo: Num, hi: Num, coords: Vec<String> },
    Epigraph(String),
    Hypograph(String),
    Product(Vec<SetSpec>),
    Union(Vec<SetSpec>),
    Intersection(Vec<SetSpec>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    pub lo: Num,
    pub hi: Num,
    pub expr: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub n: usize,
    pub m: usize,
    pub graph: SetSpec,
    #[serde(default)]
    pub dom: Option<SetSpec>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub tol_mem: Option<f64>,
    pub tol_dir: Option<f64>,
    pub grid_res_1d: Option<usize>,
    pub grid_res_2d: Option<usize>,
    pub eps_zero: Option<f64>,
    pub p_grid: Option<Vec<f64>>,
    pub radius_schedule: Option<Vec<f64>>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ToleranceConfig) {
        if let Some(v) = self.tol_mem {
            cfg.tol_mem = v;
        }
        if let Some(v) = self.tol_dir {
            cfg.tol_dir = v;
        }
        if let Some(v) = self.grid_res_1d {
            cfg.grid_res_1d = v;
        }
        if let Some(v) = self.grid_res_2d {
            cfg.grid_res_2d = v;
        }
        if let Some(v) = self.eps_zero {
            cfg.eps_zero = v;
        }
        if let Some(v) = &self.p_grid {
            cfg.p_grid = v.clone();
        }
        if let Some(v) = &self.radius_schedule {
            cfg.radius_schedule = v.clone();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Membership,
    Distance,
    Project,
    ProximalNormalCone,
    LimitingNormalCone,
    FrechetNormalCone,
    TangentCone,
    Coderivative,
    Subdifferential,
    ProfileCoderivative,
    Aubin,
    Lipschitz,
    Stationarity,
    Screen,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::Membership => "membership",
            Op::Distance => "distance",
            Op::Project => "project",
            Op::ProximalNormalCone => "proximal_normal_cone",
            Op::LimitingNormalCone => "limiting_normal_cone",
            Op::FrechetNormalCone => "frechet_normal_cone",
            Op::TangentCone => "tangent_cone",
            Op::Coderivative => "coderivative",
            Op::Subdifferential => "subdifferential",
            Op::ProfileCoderivative => "profile_coderivative",
            Op::Aubin => "aubin",
            Op::Lipschitz => "lipschitz",
            Op::Stationarity => "stationarity",
            Op::Screen => "screen",
        }
    }

    /// Queries whose result is a yes/no verdict.
    pub fn is_verdict(self) -> bool {
        matches!(self, Op::Aubin | Op::Lipschitz | Op::Stationarity | Op::Screen)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum EngineName {
    A,
    B,
    #[serde(rename = "oracle")]
    Oracle,
}

impl From<EngineName> for Engine {
    fn from(e: EngineName) -> Self {
        match e {
            EngineName::A => Engine::A,
            EngineName::B => Engine::B,
            EngineName::Oracle => Engine::Oracle,
        }
    }
}

/// A point given either as a number or as a coordinate list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl PointSpec {
    pub fn coords(&self) -> Vec<f64> {
        match self {
            PointSpec::Scalar(v) => vec![*v],
            PointSpec::Vector(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuerySpec {
    pub id: String,
    pub op: Op,
    #[serde(default)]
    pub set: Option<String>,
    /// Convex body; omitted means the classical setting, or the domain for maps.
    #[serde(default)]
    pub body: Option<String>,
    #[serde(default)]
    pub map: Option<String>,
    #[serde(default)]
    pub function: Option<String>,
    #[serde(default)]
    pub point: Option<PointSpec>,
    #[serde(default)]
    pub x: Option<PointSpec>,
    #[serde(default)]
    pub y: Option<PointSpec>,
    #[serde(default)]
    pub ystar: Option<PointSpec>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub pieces: Option<Vec<String>>,
    /// Ignore the map's domain and compute the classical coderivative.
    #[serde(default)]
    pub classical: bool,
    #[serde(default)]
    pub engine: Option<EngineName>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub tolerances: Overrides,
    #[serde(default)]
    pub sets: BTreeMap<String, SetSpec>,
    #[serde(default)]
    pub bodies: BTreeMap<String, SetSpec>,
    #[serde(default)]
    pub functions: BTreeMap<String, Vec<BranchSpec>>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapSpec>,
    #[serde(default)]
    pub queries: Vec<QuerySpec>,
}

/// A problem file with every name resolved.
#[derive(Debug, Clone)]
pub struct Problem {
    pub overrides: Overrides,
    pub sets: BTreeMap<String, SetDesc>,
    pub bodies: BTreeMap<String, ConvexBody>,
    pub functions: BTreeMap<String, ScalarFn>,
    pub maps: BTreeMap<String, MultiMap>,
    pub queries: Vec<QuerySpec>,
}

pub fn parse_problem(text: &str) -> Result<Problem> {
    let file: ProblemFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    resolve(file)
}

fn unknown(kind: &str, name: &str) -> Error {
    Error::Input(format!("unknown {kind} `{name}`"))
}

fn in_context(e: Error, what: &str) -> Error {
    match e {
        Error::Expression { column, message } => Error::Input(format!("{what}: expression error at column {column}: {message}")),
        Error::Input(m) => Error::Input(format!("{what}: {m}")),
        other => other,
    }
}

struct Resolver<'a> {
    file: &'a ProblemFile,
    functions: BTreeMap<String, ScalarFn>,
    sets: BTreeMap<String, SetDesc>,
    visiting: BTreeSet<String>,
}

impl Resolver<'_> {
    fn function(&self, name: &str) -> Result<ScalarFn> {
        self.functions.get(name).cloned().ok_or_else(|| unknown("function", name))
    }

    fn named_set(&mut self, name: &str) -> Result<SetDesc> {
        if let Some(s) = self.sets.get(name) {
            return Ok(s.clone());
        }
        let spec = self.file.sets.get(name).ok_or_else(|| unknown("set", name))?;
        if !self.visiting.insert(name.to_string()) {
            return Err(Error::Input(format!("set `{name}` refers to itself")));
        }
        let s = self.set(spec).map_err(|e| in_context(e, &format!("set `{name}`")))?;
        self.visiting.remove(name);
        self.sets.insert(name.to_string(), s.clone());
        Ok(s)
    }

    fn set(&mut self, spec: &SetSpec) -> Result<SetDesc> {
        let node = match spec {
            SetSpec::Ref(name) => return self.named_set(name),
            SetSpec::Node(n) => n,
        };
        match node {
            SetNode::Whole { dim } => Ok(SetDesc::whole(*dim)),
            SetNode::Empty { dim } => Ok(SetDesc::empty(*dim)),
            SetNode::Point(p) => SetDesc::singleton(p),
            SetNode::Box { lo, hi } => SetDesc::boxed(values(lo), values(hi)),
            SetNode::Polyhedron { dim, rows, eqs } => {
                let conv = |rs: &[RowSpec]| -> Result<Vec<HalfSpace>> {
                    rs.iter()
                        .map(|r| {
                            crate::error::check_dim(*dim, r.normal.len())?;
                            Ok(HalfSpace::new(r.normal.clone(), r.offset))
                        })
                        .collect()
                };
                SetDesc::polyhedron(Polyhedron::new(*dim, conv(rows)?, conv(eqs)?))
            }
            SetNode::Curve { axis, lo, hi, coords } => {
                if *axis > coords.len() {
                    return Err(Error::Input(format!("curve axis {axis} exceeds dimension {}", coords.len() + 1)));
                }
                let exprs = coords.iter().map(|c| Expr::parse(c, &["t"])).collect::<Result<Vec<_>>>()?;
                SetDesc::curve(Curve::new(*axis, lo.value(), hi.value(), exprs))
            }
            SetNode::Epigraph(f) => Ok(SetDesc::epigraph(self.function(f)?)),
            SetNode::Hypograph(f) => Ok(SetDesc::hypograph(self.function(f)?)),
            SetNode::Product(ms) => {
                let mut it = ms.iter();
                let first = it.next().ok_or_else(|| Error::Input("empty product".into()))?;
                let mut acc = self.set(first)?;
                for m in it {
                    acc = SetDesc::product(acc, self.set(m)?);
                }
                Ok(acc)
            }
            SetNode::Union(ms) => {
                let members = ms.iter().map(|m| self.set(m)).collect::<Result<Vec<_>>>()?;
                SetDesc::union(members)
            }
            SetNode::Intersection(ms) => {
                let members = ms.iter().map(|m| self.set(m)).collect::<Result<Vec<_>>>()?;
                SetDesc::intersection(members)
            }
        }
    }

    /// A body is either a named body, a named set, or an inline tree.
    fn body(&mut self, spec: &SetSpec, bodies: &BTreeMap<String, ConvexBody>) -> Result<ConvexBody> {
        if let SetSpec::Ref(name) = spec {
            if let Some(b) = bodies.get(name) {
                return Ok(b.clone());
            }
            if !self.file.sets.contains_key(name) {
                return Err(unknown("body", name));
            }
        }
        ConvexBody::new(self.set(spec)?)
    }
}

fn resolve(file: ProblemFile) -> Result<Problem> {
    let mut functions = BTreeMap::new();
    for (name, branches) in &file.functions {
        let parsed = branches
            .iter()
            .map(|b| Ok(Branch::new(b.lo.value(), b.hi.value(), Expr::parse(&b.expr, &["x"])?)))
            .collect::<Result<Vec<_>>>()
            .and_then(ScalarFn::new)
            .map_err(|e| in_context(e, &format!("function `{name}`")))?;
        functions.insert(name.clone(), parsed);
    }
    let mut r = Resolver { file: &file, functions, sets: BTreeMap::new(), visiting: BTreeSet::new() };
    for name in file.sets.keys() {
        r.named_set(name)?;
    }
    let mut bodies = BTreeMap::new();
    for (name, spec) in &file.bodies {
        let b = r.body(spec, &bodies).map_err(|e| in_context(e, &format!("body `{name}`")))?;
        bodies.insert(name.clone(), b);
    }
    let mut maps = BTreeMap::new();
    for (name, spec) in &file.maps {
        let built = (|| {
            let graph = r.set(&spec.graph)?;
            let dom = spec.dom.as_ref().map(|d| r.body(d, &bodies)).transpose()?;
            MultiMap::new(spec.n, spec.m, graph, dom)
        })()
        .map_err(|e| in_context(e, &format!("map `{name}`")))?;
        maps.insert(name.clone(), built);
    }
    let problem = Problem {
        overrides: file.tolerances.clone(),
        sets: r.sets,
        bodies,
        functions: r.functions,
        maps,
        queries: file.queries.clone(),
    };
    let mut ids = BTreeSet::new();
    for q in &problem.queries {
        if !ids.insert(q.id.as_str()) {
            return Err(Error::Input(format!("duplicate query id `{}`", q.id)));
        }
        problem.check_names(q)?;
    }
    Ok(problem)
}

impl Problem {
    pub fn set(&self, name: &str) -> Result<&SetDesc> {
        self.sets.get(name).ok_or_else(|| unknown("set", name))
    }

    pub fn body(&self, name: &str) -> Result<&ConvexBody> {
        self.bodies.get(name).ok_or_else(|| unknown("body", name))
    }

    pub fn function(&self, name: &str) -> Result<&ScalarFn> {
        self.functions.get(name).ok_or_else(|| unknown("function", name))
    }

    pub fn map(&self, name: &str) -> Result<&MultiMap> {
        self.maps.get(name).ok_or_else(|| unknown("map", name))
    }

    pub fn query(&self, id: &str) -> Result<&QuerySpec> {
        self.queries.iter().find(|q| q.id == id).ok_or_else(|| unknown("query", id))
    }

    /// Every name a query mentions must resolve before anything runs.
    fn check_names(&self, q: &QuerySpec) -> Result<()> {
        let ctx = |e: Error| in_context(e, &format!("query `{}`", q.id));
        if let Some(s) = &q.set {
            self.set(s).map_err(ctx)?;
        }
        if let Some(b) = &q.body {
            self.body(b).map_err(ctx)?;
        }
        if let Some(m) = &q.map {
            self.map(m).map_err(ctx)?;
        }
        if let Some(f) = &q.function {
            self.function(f).map_err(ctx)?;
        }
        for p in q.pieces.iter().flatten() {
            self.body(p).map_err(ctx)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sets_and_bodies() {
        let text = r#"{
            "functions": {"s": [{"lo": 0, "hi": "inf", "expr": "x^2"}]},
            "sets": {
                "line": {"polyhedron": {"dim": 2, "eqs": [{"normal": [1, 0], "offset": 0}]}},
                "epi": {"epigraph": "s"},
                "both": {"union": ["line", "epi"]}
            },
            "bodies": {"C": {"box": {"lo": [0, "-inf"], "hi": ["inf", "inf"]}}}
        }"#;
        let p = parse_problem(text).unwrap();
        assert_eq!(p.sets.len(), 3);
        assert_eq!(p.body("C").unwrap().dim(), 2);
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_problem("{\n  \"sets\": {,}\n}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_names_are_reported() {
        let text = r#"{"sets": {"a": {"union": ["ghost"]}}}"#;
        let err = parse_problem(text).unwrap_err().to_string();
        assert!(err.contains("ghost"), "{err}");
        let text = r#"{"queries": [{"id": "q", "op": "distance", "set": "nowhere", "point": [0]}]}"#;
        let err = parse_problem(text).unwrap_err().to_string();
        assert!(err.contains("nowhere"), "{err}");
    }

    #[test]
    fn self_reference_is_rejected() {
        let text = r#"{"sets": {"a": {"union": ["a"]}}}"#;
        assert!(parse_problem(text).is_err());
    }
}
