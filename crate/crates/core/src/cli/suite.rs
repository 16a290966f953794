//! The built-in example suite and its expectations file.
//!
//! Every expected value is produced by the brute-force oracles (`generate`)
//! and checked in; `run_suite` recomputes each value with the fast paths and
//! compares.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coderivatives::{coderivative_graph_with, BasePair, MultiMap};
use crate::cones::{grid_spacing, slice, slice_cone, Cone};
use crate::config::ToleranceConfig;
use crate::criteria::{aubin_from_graph, aubin_wrt_with, lipschitz_wrt_with, piecewise_screen, stationarity_check};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::linalg::norm;
use crate::normals::{limiting_normal_cone_with, Engine, NormalQuery};
use crate::oracle::{brute_limit_cone, brute_lip_ratio, brute_prox_member};
use crate::sets::{ConvexBody, ScalarFn, SetDesc};
use crate::subdiff::{epigraph, epigraph_normal_cone};

use super::report::{engine_name, QueryOutcome, Report};
use super::RunFlags;

pub const EXPECTATIONS_VERSION: u32 = 1;

/// The checked-in expectations, compiled into the binary.
pub const BUILTIN_EXPECTATIONS: &str = include_str!("../../fixtures/expectations.json");

pub const FIXTURES: [&str; 5] = ["exam0", "exam1", "exam2", "indicators", "scalar"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expected {
    Cone { dim: usize, rays: Vec<Vec<f64>> },
    Points { points: Vec<f64>, tol: f64 },
    Scalar { value: f64, tol: f64 },
    Bool { value: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    pub version: u32,
    pub seed: u64,
    pub entries: BTreeMap<String, Expected>,
}

impl Expectations {
    pub fn parse(text: &str) -> Result<Self> {
        let e: Expectations = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        if e.version != EXPECTATIONS_VERSION {
            return Err(Error::Input(format!("expectations version {} is not {}", e.version, EXPECTATIONS_VERSION)));
        }
        Ok(e)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("expectations serialize");
        s.push('\n');
        s
    }
}

fn cone_value(c: &Cone) -> Expected {
    Expected::Cone { dim: c.dim, rays: c.rays.clone() }
}

fn points_value(mut pts: Vec<f64>) -> Expected {
    pts.sort_by(f64::total_cmp);
    Expected::Points { points: pts, tol: 0.02 }
}

/// One recomputed value, with the engine that produced it.
struct Observed {
    key: String,
    value: Expected,
    engine: Engine,
}

fn obs(key: &str, value: Expected, engine: Engine) -> Observed {
    Observed { key: key.into(), value, engine }
}

fn nc_query(omega: SetDesc, c: Option<ConvexBody>, cfg: &ToleranceConfig) -> Result<NormalQuery> {
    NormalQuery::new(vec![0.0, 0.0], omega, c, cfg.clone())
}

fn witness() -> Vec<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![-s, s]
}

fn distinct_pieces(c: &Cone) -> usize {
    let mut v: Vec<usize> = c.provenance.iter().flatten().copied().collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn trivial(points: &[Vec<f64>], cfg: &ToleranceConfig) -> bool {
    points.iter().all(|p| norm(p) <= cfg.eps_zero)
}

fn origin_pair(n: usize, m: usize) -> BasePair {
    BasePair::new(vec![0.0; n], vec![0.0; m])
}

/// Fast-path values of one fixture.
fn compute(name: &str, engine: Engine, cfg: &ToleranceConfig) -> Result<Vec<Observed>> {
    let mut out = Vec::new();
    match name {
        "exam0" => {
            let nc = limiting_normal_cone_with(&nc_query(fixtures::omega0(), Some(fixtures::right_half_plane()), cfg)?, engine)?;
            let classical = limiting_normal_cone_with(&nc_query(fixtures::omega0(), None, cfg)?, engine)?;
            out.push(obs("exam0.witness_in_relative_cone", Expected::Bool { value: nc.cone.contains(&witness(), cfg) }, nc.engine));
            out.push(obs("exam0.relative_normal_cone", cone_value(&nc.cone), nc.engine));
            out.push(obs("exam0.classical_normal_cone", cone_value(&classical.cone), classical.engine));
        }
        "exam1" => {
            let f = fixtures::exam1_map();
            let base = origin_pair(1, 1);
            let g = coderivative_graph_with(&f, &base, f.dom.as_ref(), engine, cfg)?;
            out.push(obs("exam1.relative_coderivative", cone_value(&g.cone), g.engine));
            let v = aubin_wrt_with(&f, &base, f.dom.as_ref().expect("domain"), engine, cfg)?;
            out.push(obs("exam1.relative_aubin", Expected::Bool { value: v.holds }, v.engine));
            out.push(obs("exam1.aubin_constant", Expected::Scalar { value: v.constant_estimate, tol: 0.1 }, v.engine));
        }
        "exam2" => {
            let f = fixtures::lcp_graph_fixture();
            let v = aubin_wrt_with(&f, &origin_pair(2, 2), f.dom.as_ref().expect("domain"), engine, cfg)?;
            out.push(obs("exam2.relative_aubin", Expected::Bool { value: v.holds }, v.engine));
            out.push(obs("exam2.zero_slice_trivial", Expected::Bool { value: trivial(&v.zero_slice, cfg) }, v.engine));
            out.push(obs("exam2.five_pieces_contribute", Expected::Bool { value: v.witness_pieces.len() >= 5 }, v.engine));
        }
        "indicators" => {
            let delta = fixtures::indicator_rplus();
            let rel = lipschitz_wrt_with(&delta, 0.0, &fixtures::c1(), engine, cfg)?;
            out.push(obs("indicators.scalar_relative_lipschitz", Expected::Bool { value: rel.holds }, engine));
            out.push(obs("indicators.scalar_relative_constant", Expected::Scalar { value: rel.lip_estimate, tol: 0.05 }, engine));
            let cla = lipschitz_wrt_with(&delta, 0.0, &fixtures::real_line(), engine, cfg)?;
            out.push(obs("indicators.scalar_classical_lipschitz", Expected::Bool { value: cla.holds }, engine));
            let map = fixtures::indicator_map();
            let base = origin_pair(1, 1);
            let rel = aubin_wrt_with(&map, &base, &fixtures::c1(), engine, cfg)?;
            out.push(obs("indicators.map_relative_aubin", Expected::Bool { value: rel.holds }, rel.engine));
            let cla = aubin_wrt_with(&map, &base, &fixtures::real_line(), engine, cfg)?;
            out.push(obs("indicators.map_classical_aubin", Expected::Bool { value: cla.holds }, cla.engine));
        }
        "scalar" => {
            for (key, f, c) in scalar_cases() {
                let k = epigraph_normal_cone(&f, 0.0, &c, engine, cfg)?;
                let pts = slice(&k.cone, 1..2, &[-1.0], cfg)?.into_iter().map(|p| p[0]).collect();
                out.push(obs(&format!("scalar.{key}.limiting"), points_value(pts), k.engine));
            }
            let screen = piecewise_screen(&fixtures::f2(), 0.0, &[fixtures::c1(), fixtures::c2()], cfg)?;
            out.push(obs("scalar.f2.may_be_minimizer", Expected::Bool { value: screen.may_be_minimizer }, Engine::A));
            let st = stationarity_check(&fixtures::f3(), 0.0, &fixtures::c1(), cfg)?;
            out.push(obs("scalar.f3.stationary", Expected::Bool { value: st.stationary }, Engine::A));
        }
        other => return Err(Error::Input(format!("unknown fixture `{other}`"))),
    }
    Ok(out)
}

fn scalar_cases() -> Vec<(&'static str, ScalarFn, ConvexBody)> {
    vec![
        ("f2_c1", fixtures::f2(), fixtures::c1()),
        ("f2_c2", fixtures::f2(), fixtures::c2()),
        ("f3", fixtures::f3(), fixtures::c1()),
    ]
}

fn oracle_graph(f: &MultiMap, c: Option<&ConvexBody>, cfg: &ToleranceConfig) -> Result<crate::coderivatives::GraphCone> {
    coderivative_graph_with(f, &origin_pair(f.n, f.m), c, Engine::Oracle, cfg)
}

fn oracle_epi_cone(f: &ScalarFn, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<Cone> {
    brute_limit_cone(&[0.0, f.eval(0.0)], &SetDesc::epigraph(f.clone()), Some(&c.times_whole(1)), cfg)
}

fn oracle_stationary(f: &ScalarFn, c: &ConvexBody, cfg: &ToleranceConfig) -> Result<bool> {
    let epi = epigraph(f, None)?;
    brute_prox_member(&[0.0, -1.0], &[0.0, f.eval(0.0)], &epi, Some(&c.times_whole(1)), cfg)
}

/// Oracle values of one fixture.
fn oracle(name: &str, cfg: &ToleranceConfig) -> Result<Vec<(String, Expected)>> {
    let mut out: Vec<(String, Expected)> = Vec::new();
    let mut put = |k: &str, v: Expected| out.push((k.to_string(), v));
    match name {
        "exam0" => {
            let nc = brute_limit_cone(&[0.0, 0.0], &fixtures::omega0(), Some(&fixtures::right_half_plane()), cfg)?;
            let classical = brute_limit_cone(&[0.0, 0.0], &fixtures::omega0(), None, cfg)?;
            put("exam0.witness_in_relative_cone", Expected::Bool { value: nc.contains(&witness(), cfg) });
            put("exam0.relative_normal_cone", cone_value(&nc));
            put("exam0.classical_normal_cone", cone_value(&classical));
        }
        "exam1" => {
            let f = fixtures::exam1_map();
            let g = oracle_graph(&f, f.dom.as_ref(), cfg)?;
            let (holds, constant, _) = aubin_from_graph(&g, 1, cfg)?;
            put("exam1.relative_coderivative", cone_value(&g.cone));
            put("exam1.relative_aubin", Expected::Bool { value: holds });
            put("exam1.aubin_constant", Expected::Scalar { value: constant, tol: 0.1 });
        }
        "exam2" => {
            let f = fixtures::lcp_graph_fixture();
            let g = oracle_graph(&f, f.dom.as_ref(), cfg)?;
            let (holds, _, zero) = aubin_from_graph(&g, 2, cfg)?;
            put("exam2.relative_aubin", Expected::Bool { value: holds });
            put("exam2.zero_slice_trivial", Expected::Bool { value: trivial(&zero, cfg) });
            put("exam2.five_pieces_contribute", Expected::Bool { value: distinct_pieces(&g.cone) >= 5 });
        }
        "indicators" => {
            let delta = fixtures::indicator_rplus();
            let ratio = brute_lip_ratio(&delta, 0.0, &fixtures::c1(), cfg)?;
            put("indicators.scalar_relative_lipschitz", Expected::Bool { value: ratio.limit.is_finite() });
            put("indicators.scalar_relative_constant", Expected::Scalar { value: ratio.limit, tol: 0.05 });
            // Off the domain the difference quotient is infinite, so the
            // classical verdict is read off the singular slice instead.
            let k = oracle_epi_cone(&delta, &fixtures::real_line(), cfg)?;
            put("indicators.scalar_classical_lipschitz", Expected::Bool { value: slice_cone(&k, 1..2, cfg)?.is_zero() });
            let map = fixtures::indicator_map();
            let (rel, _, _) = aubin_from_graph(&oracle_graph(&map, Some(&fixtures::c1()), cfg)?, 1, cfg)?;
            put("indicators.map_relative_aubin", Expected::Bool { value: rel });
            let (cla, _, _) = aubin_from_graph(&oracle_graph(&map, Some(&fixtures::real_line()), cfg)?, 1, cfg)?;
            put("indicators.map_classical_aubin", Expected::Bool { value: cla });
        }
        "scalar" => {
            for (key, f, c) in scalar_cases() {
                let k = oracle_epi_cone(&f, &c, cfg)?;
                let pts = slice(&k, 1..2, &[-1.0], cfg)?.into_iter().map(|p| p[0]).collect();
                put(&format!("scalar.{key}.limiting"), points_value(pts));
            }
            let f2 = fixtures::f2();
            let both = oracle_stationary(&f2, &fixtures::c1(), cfg)? && oracle_stationary(&f2, &fixtures::c2(), cfg)?;
            put("scalar.f2.may_be_minimizer", Expected::Bool { value: both });
            put("scalar.f3.stationary", Expected::Bool { value: oracle_stationary(&fixtures::f3(), &fixtures::c1(), cfg)? });
        }
        other => return Err(Error::Input(format!("unknown fixture `{other}`"))),
    }
    Ok(out)
}

fn selected(only: &[String]) -> Result<Vec<&'static str>> {
    if only.is_empty() {
        return Ok(FIXTURES.to_vec());
    }
    for o in only {
        if !FIXTURES.contains(&o.as_str()) {
            return Err(Error::Input(format!("unknown fixture `{o}`; known: {}", FIXTURES.join(", "))));
        }
    }
    Ok(FIXTURES.iter().copied().filter(|f| only.iter().any(|o| o == f)).collect())
}

/// Recomputes the expectations with the oracles, at default tolerances.
pub fn generate(seed: u64, only: &[String]) -> Result<Expectations> {
    let cfg = ToleranceConfig::default().with_seed(seed);
    let names = selected(only)?;
    let parts: Vec<Result<Vec<(String, Expected)>>> = std::thread::scope(|s| {
        let hs: Vec<_> = names.iter().map(|n| s.spawn(|| oracle(n, &cfg))).collect();
        hs.into_iter().map(|h| h.join().expect("oracle thread")).collect()
    });
    let mut entries = BTreeMap::new();
    for p in parts {
        entries.extend(p?);
    }
    Ok(Expectations { version: EXPECTATIONS_VERSION, seed, entries })
}

/// Whether an observed value matches its expectation, with the measured gap.
fn compare(observed: &Expected, expected: &Expected, cfg: &ToleranceConfig) -> (bool, Value) {
    match (observed, expected) {
        (Expected::Cone { dim, rays }, Expected::Cone { dim: d2, rays: r2 }) if dim == d2 => {
            let a = Cone::from_rays(*dim, rays.clone(), cfg.tol_dir);
            let b = Cone::from_rays(*d2, r2.clone(), cfg.tol_dir);
            let h = a.hausdorff(&b, cfg.tol_dir);
            (h <= 2.0 * cfg.tol_dir, json!({ "hausdorff": h, "allowed": 2.0 * cfg.tol_dir }))
        }
        (Expected::Points { points: a, .. }, Expected::Points { points: b, tol }) => {
            let far = |xs: &[f64], ys: &[f64]| {
                xs.iter().map(|x| ys.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
            };
            let h = if a.is_empty() && b.is_empty() { 0.0 } else { far(a, b).max(far(b, a)) };
            (h <= *tol, json!({ "hausdorff": super::report::num(h), "allowed": tol }))
        }
        (Expected::Scalar { value: a, .. }, Expected::Scalar { value: b, tol }) => {
            let d = (a - b).abs();
            let ok = d <= *tol || (a.is_infinite() && a == b);
            (ok, json!({ "difference": super::report::num(d), "allowed": tol }))
        }
        (Expected::Bool { value: a }, Expected::Bool { value: b }) => (a == b, json!({})),
        _ => (false, json!({ "mismatch": "kinds differ" })),
    }
}

fn expected_json(e: &Expected) -> Value {
    match e {
        Expected::Scalar { value, tol } => json!({ "kind": "scalar", "value": super::report::num(*value), "tol": tol }),
        other => serde_json::to_value(other).expect("serializes"),
    }
}

/// Directions closer than this cannot be resolved by the 2-D direction grid.
fn tight_tolerance_warning(cfg: &ToleranceConfig) -> Option<String> {
    let spacing = grid_spacing(2);
    (2.0 * cfg.tol_dir < spacing).then(|| {
        format!(
            "tol_dir = {} is below the resolution of the direction grid ({:.4} rad in 2-D); cone comparisons are sensitive to the tolerance and failures may reflect discretization only",
            cfg.tol_dir, spacing
        )
    })
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub only: Vec<String>,
    pub expectations: Option<String>,
}

/// Runs the selected fixtures against the expectations. The report lists
/// each check in a fixed order.
pub fn run_suite(flags: &RunFlags, opts: &SuiteOptions) -> Result<Report> {
    let cfg = flags.config(None)?;
    let engine = flags.engine.unwrap_or(Engine::B);
    let exp = Expectations::parse(opts.expectations.as_deref().unwrap_or(BUILTIN_EXPECTATIONS))?;
    let names = selected(&opts.only)?;
    let computed: Vec<Result<Vec<Observed>>> = std::thread::scope(|s| {
        let hs: Vec<_> = names.iter().map(|n| s.spawn(|| compute(n, engine, &cfg))).collect();
        hs.into_iter().map(|h| h.join().expect("fixture thread")).collect()
    });
    let tight = tight_tolerance_warning(&cfg);
    let mut report = Report::new(&cfg);
    if let Some(w) = &tight {
        report.warnings.push(w.clone());
    }
    let mut failed = Vec::new();
    for (name, res) in names.iter().zip(computed) {
        let observed = match res {
            Ok(o) => o,
            Err(e) => {
                failed.push(name.to_string());
                report.results.push(QueryOutcome {
                    id: name.to_string(),
                    op: "fixture".into(),
                    result: Err(e.to_string()),
                    verdict: None,
                    warnings: vec![],
                });
                continue;
            }
        };
        for o in observed {
            let Some(expected) = exp.entries.get(&o.key) else {
                failed.push(o.key.clone());
                report.results.push(QueryOutcome {
                    id: o.key.clone(),
                    op: "check".into(),
                    result: Err("no expectation recorded".into()),
                    verdict: None,
                    warnings: vec![],
                });
                continue;
            };
            let (pass, detail) = compare(&o.value, expected, &cfg);
            let mut warnings = Vec::new();
            if !pass {
                failed.push(o.key.clone());
                if tight.is_some() {
                    warnings.push("tolerance-sensitive: this comparison may pass at the default tol_dir".into());
                }
            }
            let verdict = match o.value {
                Expected::Bool { value } => Some(value),
                _ => None,
            };
            report.results.push(QueryOutcome {
                id: o.key.clone(),
                op: "check".into(),
                result: Ok(json!({
                    "engine": engine_name(o.engine),
                    "observed": expected_json(&o.value),
                    "expected": expected_json(expected),
                    "comparison": detail,
                    "pass": pass,
                })),
                verdict,
                warnings,
            });
        }
    }
    report.extra.insert("fixtures".into(), json!(names));
    report.extra.insert("failed".into(), json!(failed));
    Ok(report)
}

/// Whether a suite report has no failed checks.
pub fn suite_passed(report: &Report) -> bool {
    report.extra.get("failed").and_then(Value::as_array).is_some_and(|f| f.is_empty())
}
