//! Python bindings. Codes are passed as JSON: either a code spec (an object with a
//! "family" key) or a whole table fixture. Structured results come back as JSON strings.

use codedpir::fixtures::{self, Fixture};
use codedpir::harness::{self, AuditMode, ProtocolTag, TableOptions};
use codedpir::optimizer::{optimize_rate, optimize_rate_colluding, OptConfig};
use codedpir::rate::{capacity_asymptotic, capacity_finite, necessary_condition};
use codedpir::{CodeSpec, LinearCode};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::{json, Value};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn specs(text: &str) -> PyResult<(CodeSpec, Option<CodeSpec>)> {
    let v: Value = serde_json::from_str(text).map_err(err)?;
    if v.get("family").is_some() {
        return Ok((serde_json::from_value(v).map_err(err)?, None));
    }
    let fx: Fixture = serde_json::from_value(v).map_err(err)?;
    Ok((fx.code, fx.query_code))
}

fn codes(spec: &str, query: Option<&str>) -> PyResult<(LinearCode, Option<LinearCode>)> {
    let (c, q) = specs(spec)?;
    let q = match query {
        Some(text) => Some(specs(text)?.0),
        None => q,
    };
    Ok((c.build().map_err(err)?, q.map(|q| q.build()).transpose().map_err(err)?))
}

fn protocol(name: &str) -> PyResult<ProtocolTag> {
    match name.to_ascii_lowercase().as_str() {
        "p1" | "1" => Ok(ProtocolTag::P1),
        "p2" | "2" => Ok(ProtocolTag::P2),
        "p3" | "3" => Ok(ProtocolTag::P3),
        other => Err(PyValueError::new_err(format!("unknown protocol {other:?}"))),
    }
}

fn to_json(v: &impl serde::Serialize) -> PyResult<String> {
    serde_json::to_string(v).map_err(err)
}

/// PIR capacity as an exact fraction string: finite-file C_f, or C_∞ when `f` is None.
#[pyfunction]
#[pyo3(signature = (n, k, f=None))]
fn capacity(n: u64, k: u64, f: Option<u32>) -> String {
    match f {
        Some(f) => capacity_finite(n, k, f),
        None => capacity_asymptotic(n, k),
    }
    .to_string()
}

/// Length, dimension, field order, minimum distance, weight hierarchy and the
/// generalized-Hamming-weight test.
#[pyfunction]
fn code_info(spec: &str) -> PyResult<String> {
    let (code, _) = codes(spec, None)?;
    let nc = necessary_condition(&code).ok();
    to_json(&json!({
        "n": code.n(),
        "k": code.k(),
        "q": code.field().order(),
        "d_min": code.min_distance().map_err(err)?,
        "weight_hierarchy": nc.as_ref().map(|r| r.hierarchy.clone()),
        "necessary_condition": nc.as_ref().map(|r| r.pass),
    }))
}

/// Maximize Γ/n over erasure matrices; colluding when a query code is given or the spec
/// is a colluding fixture.
#[pyfunction]
#[pyo3(signature = (spec, query_spec=None, seed=0))]
fn optimize(spec: &str, query_spec: Option<&str>, seed: u64) -> PyResult<String> {
    let (code, cbar) = codes(spec, query_spec)?;
    let cfg = OptConfig { seed, ..Default::default() };
    let r = match &cbar {
        Some(q) => optimize_rate_colluding(&code, q, &cfg),
        None => optimize_rate(&code, &cfg),
    }
    .map_err(err)?;
    to_json(&json!({
        "rate": r.rate().to_string(),
        "gamma": r.gamma,
        "d": r.e.as_ref().map(|e| e.d),
        "beta": r.e.as_ref().map(|e| e.beta),
        "ehat": r.e.as_ref().map(|e| e.ehat.to_strings()),
        "ebar": r.e.as_ref().map(|e| e.ebar.to_strings()),
    }))
}

/// Full retrieval run; returns the transcript.
#[pyfunction]
#[pyo3(signature = (protocol_name, spec, files=2, request=0, ell=1, seed=0, query_spec=None))]
fn simulate(protocol_name: &str, spec: &str, files: usize, request: usize, ell: u32, seed: u64, query_spec: Option<&str>) -> PyResult<String> {
    let (code, cbar) = codes(spec, query_spec)?;
    let cfg = OptConfig { seed, ..Default::default() };
    let scheme = harness::build_scheme(protocol(protocol_name)?, &code, cbar.as_ref(), &cfg).map_err(err)?;
    to_json(&harness::simulate(&scheme, &code, files, request, ell, seed).map_err(err)?)
}

/// Query-privacy audit over every legal collusion set.
#[pyfunction]
#[pyo3(signature = (protocol_name, spec, trials=10_000, files=2, exact=false, seed=0, query_spec=None))]
fn audit_privacy(
    protocol_name: &str,
    spec: &str,
    trials: usize,
    files: usize,
    exact: bool,
    seed: u64,
    query_spec: Option<&str>,
) -> PyResult<String> {
    let (code, cbar) = codes(spec, query_spec)?;
    let cfg = OptConfig { seed, ..Default::default() };
    let scheme = harness::build_scheme(protocol(protocol_name)?, &code, cbar.as_ref(), &cfg).map_err(err)?;
    let mode = if exact { AuditMode::Exact } else { AuditMode::Statistical { trials } };
    let sets = harness::legal_sets(&scheme, code.n());
    to_json(&harness::privacy_audit(&scheme, &code, files, &sets, mode, seed).map_err(err)?)
}

/// The built-in table fixtures, as a JSON list.
#[pyfunction]
fn builtin_fixtures() -> PyResult<String> {
    to_json(&fixtures::builtin().map_err(err)?)
}

/// Reproduce one table row from a fixture.
#[pyfunction]
#[pyo3(signature = (fixture, round_trip=false))]
fn report_row(fixture: &str, round_trip: bool) -> PyResult<String> {
    let fx: Fixture = serde_json::from_str(fixture).map_err(err)?;
    let row = harness::report_row(&fx, &TableOptions { round_trip, ..Default::default() }).map_err(err)?;
    to_json(&json!({
        "id": fx.id,
        "table": fx.table,
        "r_opt": row.r_opt.as_ref().map(|r| r.to_string()),
        "r_non_opt": row.r_non_opt.to_string(),
        "matches": row.matches(),
        "mismatches": row.mismatches,
        "recovered": row.recovered,
        "rendered": row.render(),
    }))
}

#[pymodule]
fn codedpir_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(capacity, m)?)?;
    m.add_function(wrap_pyfunction!(code_info, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(audit_privacy, m)?)?;
    m.add_function(wrap_pyfunction!(builtin_fixtures, m)?)?;
    m.add_function(wrap_pyfunction!(report_row, m)?)?;
    Ok(())
}
