//! JSON documents for states, circuits and reports.
//!
//! Floats are written with 17 significant digits so every double survives
//! a round trip; objects are written with sorted keys.

use crate::gate::{Circuit, Gate};
use crate::linalg::C64;
use crate::oracle::{OracleReport, PatternResult, ProbeReport};
use crate::state::PureState;
use serde_json::{json, Map, Value};
use std::fmt::Write;
use thiserror::Error;

/// Largest deviation of the squared norm from 1 accepted on input.
pub const NORM_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DocumentError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension error: {0}")]
    Dimension(String),
}

fn parse_err(msg: impl Into<String>) -> DocumentError {
    DocumentError::Parse(msg.into())
}

/// A finite double in scientific notation with 17 significant digits;
/// non-finite values become `null`.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => write!(out, "{u}").expect("write to string"),
            (None, Some(i)) => write!(out, "{i}").expect("write to string"),
            _ => out.push_str(&format_number(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            let flat = items.iter().all(|i| !i.is_array() && !i.is_object());
            if items.is_empty() {
                out.push_str("[]");
            } else if flat {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, item, indent);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    write_value(out, item, indent + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                out.push_str(&pad(indent));
                out.push(']');
            }
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Indented JSON text with a trailing newline.
pub fn to_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn num(x: f64) -> Value {
    // keep integral doubles typed as floats
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn state_to_value(state: &PureState) -> Value {
    let amps: Vec<Value> = state.amplitudes().iter().map(|z| Value::Array(vec![num(z.re), num(z.im)])).collect();
    json!({ "qubits": state.qubits(), "amps": amps })
}

fn as_f64(v: &Value, what: &str) -> Result<f64, DocumentError> {
    v.as_f64().ok_or_else(|| parse_err(format!("{what} must be a number")))
}

fn as_index(v: Option<&Value>, what: &str) -> Result<usize, DocumentError> {
    v.and_then(Value::as_u64)
        .map(|u| u as usize)
        .ok_or_else(|| parse_err(format!("{what} must be a nonnegative integer")))
}

pub fn state_from_value(v: &Value) -> Result<PureState, DocumentError> {
    let obj = v.as_object().ok_or_else(|| parse_err("state document must be an object"))?;
    let qubits = as_index(obj.get("qubits"), "qubits")?;
    let amps = obj.get("amps").and_then(Value::as_array).ok_or_else(|| parse_err("amps must be an array"))?;
    let amps: Vec<C64> = amps
        .iter()
        .map(|pair| match pair.as_array().map(Vec::as_slice) {
            Some([re, im]) => Ok(C64::new(as_f64(re, "amplitude")?, as_f64(im, "amplitude")?)),
            _ => Err(parse_err("each amplitude must be a [re, im] pair")),
        })
        .collect::<Result<_, _>>()?;
    if !(2..=3).contains(&qubits) || amps.len() != 1usize << qubits {
        return Err(DocumentError::Dimension(format!(
            "{} amplitudes do not describe {qubits} qubits",
            amps.len()
        )));
    }
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > NORM_SLACK {
        return Err(parse_err(format!("state norm² {norm} differs from 1 by more than {NORM_SLACK}")));
    }
    PureState::from_unnormalized(qubits, amps).map_err(|e| parse_err(e.to_string()))
}

pub fn parse_state(text: &str) -> Result<PureState, DocumentError> {
    let v: Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    state_from_value(&v)
}

pub fn gate_to_value(g: &Gate) -> Value {
    let rot = |name: &str, q: usize, theta: f64| {
        let mut m = Map::new();
        m.insert("g".into(), Value::from(name));
        m.insert("q".into(), Value::from(q));
        m.insert("theta".into(), num(theta));
        Value::Object(m)
    };
    match *g {
        Gate::Rx { qubit, angle } => rot("rx", qubit, angle),
        Gate::Ry { qubit, angle } => rot("ry", qubit, angle),
        Gate::Rz { qubit, angle } => rot("rz", qubit, angle),
        Gate::Phase { qubit, angle } => rot("ph", qubit, angle),
        Gate::Cnot { control, target } => json!({ "g": "cnot", "c": control, "t": target }),
    }
}

pub fn circuit_to_value(c: &Circuit) -> Value {
    json!({
        "gates": c.gates.iter().map(gate_to_value).collect::<Vec<_>>(),
        "cnot_count": c.cnot_count(),
    })
}

fn gate_from_value(v: &Value) -> Result<Gate, DocumentError> {
    let obj = v.as_object().ok_or_else(|| parse_err("gate must be an object"))?;
    let name = obj.get("g").and_then(Value::as_str).ok_or_else(|| parse_err("gate needs a string field g"))?;
    let angle = || as_f64(obj.get("theta").unwrap_or(&Value::Null), "theta");
    let qubit = || as_index(obj.get("q"), "q");
    let gate = match name {
        "rx" => Gate::rx(qubit()?, angle()?),
        "ry" => Gate::ry(qubit()?, angle()?),
        "rz" => Gate::rz(qubit()?, angle()?),
        "ph" => Gate::phase(qubit()?, angle()?),
        "cnot" => Gate::cnot(as_index(obj.get("c"), "c")?, as_index(obj.get("t"), "t")?),
        other => return Err(parse_err(format!("unknown gate {other:?}"))),
    };
    let labels: Vec<usize> = match gate {
        Gate::Cnot { control, target } => vec![control, target],
        _ => vec![gate.max_qubit()],
    };
    if labels.contains(&0) {
        return Err(parse_err("qubit labels start at 1"));
    }
    if let Gate::Cnot { control, target } = gate {
        if control == target {
            return Err(parse_err("CNOT control equals target"));
        }
    }
    Ok(gate)
}

pub fn circuit_from_value(v: &Value) -> Result<Circuit, DocumentError> {
    let obj = v.as_object().ok_or_else(|| parse_err("circuit document must be an object"))?;
    let gates = obj.get("gates").and_then(Value::as_array).ok_or_else(|| parse_err("gates must be an array"))?;
    let circuit = Circuit::from_gates(gates.iter().map(gate_from_value).collect::<Result<_, _>>()?);
    if let Some(count) = obj.get("cnot_count") {
        if count.as_u64() != Some(circuit.cnot_count() as u64) {
            return Err(parse_err("cnot_count does not match the gate list"));
        }
    }
    Ok(circuit)
}

pub fn parse_circuit(text: &str) -> Result<Circuit, DocumentError> {
    let v: Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    circuit_from_value(&v)
}

fn pattern_value(p: &[(usize, usize)]) -> Value {
    Value::Array(p.iter().map(|&(c, t)| json!([c, t])).collect())
}

fn pattern_result_value(r: &PatternResult) -> Value {
    json!({
        "pattern": pattern_value(&r.pattern),
        "best_infidelity": num(r.best_infidelity),
        "best_parameters": r.best_parameters.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "restarts_used": r.restarts_used,
    })
}

pub fn oracle_report_value(r: &OracleReport) -> Value {
    json!({
        "source": state_to_value(&r.source),
        "target": state_to_value(&r.target),
        "per_pattern": r.per_pattern.iter().map(pattern_result_value).collect::<Vec<_>>(),
        "verdict": r.verdict,
        "k_max": r.k_max,
        "threshold": num(r.threshold),
        "seed": r.seed,
        "level_minima": r.level_minima().iter().map(|&(k, f)| json!([k, num(f)])).collect::<Vec<_>>(),
        "note": "numerical evidence from local optimization; a missing level is not a proof of impossibility",
    })
}

pub fn probe_report_value(r: &ProbeReport) -> Value {
    let entries: Vec<Value> = r
        .entries
        .iter()
        .map(|e| {
            json!({
                "source": state_to_value(&e.source),
                "target": state_to_value(&e.target),
                "verdict": e.verdict,
                "level_minima": e.level_minima.iter().map(|&(k, f)| json!([k, num(f)])).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "entries": entries,
        "flagged": r.flagged,
        "max_verdict": r.max_verdict,
        "seed": r.seed,
        "certifying": r.certifying,
        "note": "non-certifying: verdicts come from a multi-start local optimizer and do not settle the maximal distance",
    })
}
