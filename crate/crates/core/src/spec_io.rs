//! JSON documents: switch specs and network topologies in, reports out.
//!
//! Input errors name the offending field by JSON pointer (`/pairs/1/u_tilde`).
//! Complex numbers are written as `[re, im]`; on input an amplitude may also
//! be a plain number or an expression string such as `"1/sqrt(2)"` or
//! `"0.6+0.8i"`.
//!
//! Switch spec:
//!
//! ```json
//! {
//!   "version": 1,
//!   "protocol": "ghz",
//!   "n": 3,
//!   "pairs": [{"u": "pauli_z", "u_tilde": "ry(pi/2)"}, ...],
//!   "input": {"alpha": 0.5},
//!   "control": "even"
//! }
//! ```
//!
//! `protocol` is one of `single`, `bell`, `ghz`, `w`; `n` is required for `ghz`
//! and `w`. `input` may instead be `{"states": [[a0, a1], ...]}` with one
//! normalized qubit per target. `control` defaults to `"even"` and may also be
//! an explicit amplitude list equal to the even superposition up to phase.
//!
//! Topology:
//!
//! ```json
//! {
//!   "version": 1,
//!   "coordinator": "e0",
//!   "coordinator_state": "ghz",
//!   "entanglers": [{"id": "e1", "clients": 3}, ...],
//!   "gates": {"u": "pauli_z", "u_tilde": "ry(pi/2)"},
//!   "alpha": 0.5
//! }
//! ```
//!
//! Entanglers may override `gates` and `alpha`; `link_noise` is accepted only
//! as 0. `coordinator_state` is `ghz` (default) or `product_plus`.

use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::gates::{parse_complex, GateSpec, UnitaryPair};
use crate::netsim::{BranchResult, CoordinatorState, Entangler, Topology};
use crate::qla::{ComplexMatrix, StateVector};
use crate::switch::{even_control, OutcomeEnsemble, Protocol, SwitchSpec};
use crate::verify::{Certificate, ConditionReport};

pub const FORMAT_VERSION: u64 = 1;
const STATE_NORM_TOL: f64 = 1e-10;

fn field(pointer: &str, reason: impl Into<String>) -> Error {
    Error::Field {
        pointer: if pointer.is_empty() { "/".into() } else { pointer.into() },
        reason: reason.into(),
    }
}

fn child(pointer: &str, key: impl std::fmt::Display) -> String {
    format!("{pointer}/{key}")
}

fn object<'a>(v: &'a Value, ptr: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| field(ptr, "expected an object"))
}

fn array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| field(ptr, "expected an array"))
}

fn check_keys(map: &Map<String, Value>, ptr: &str, allowed: &[&str]) -> Result<()> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(field(&child(ptr, k), "unknown field")),
        None => Ok(()),
    }
}

fn required<'a>(map: &'a Map<String, Value>, ptr: &str, key: &str) -> Result<&'a Value> {
    map.get(key).ok_or_else(|| field(&child(ptr, key), "missing field"))
}

fn as_str<'a>(v: &'a Value, ptr: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| field(ptr, "expected a string"))
}

fn as_f64(v: &Value, ptr: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| field(ptr, "expected a number"))
}

fn as_count(v: &Value, ptr: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| field(ptr, "expected a non-negative integer"))
}

fn check_version(map: &Map<String, Value>, ptr: &str) -> Result<()> {
    match map.get("version") {
        None => Ok(()),
        Some(v) if v.as_u64() == Some(FORMAT_VERSION) => Ok(()),
        Some(v) => Err(field(
            &child(ptr, "version"),
            format!("unsupported version {v}; expected {FORMAT_VERSION}"),
        )),
    }
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        input: "<json>".into(),
        reason: e.to_string(),
    })
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_gate(v: &Value, ptr: &str) -> Result<ComplexMatrix> {
    let text = as_str(v, ptr)?;
    text.parse::<GateSpec>()
        .map(|g| g.matrix())
        .map_err(|e| field(ptr, e.to_string()))
}

fn parse_pair(v: &Value, ptr: &str) -> Result<UnitaryPair> {
    let map = object(v, ptr)?;
    check_keys(map, ptr, &["u", "u_tilde"])?;
    let u = parse_gate(required(map, ptr, "u")?, &child(ptr, "u"))?;
    let ut = parse_gate(required(map, ptr, "u_tilde")?, &child(ptr, "u_tilde"))?;
    UnitaryPair::new(u, ut).map_err(|e| field(ptr, e.to_string()))
}

fn parse_amplitude(v: &Value, ptr: &str) -> Result<Complex64> {
    match v {
        Value::Number(_) => Ok(Complex64::new(as_f64(v, ptr)?, 0.0)),
        Value::String(s) => parse_complex(s).map_err(|e| field(ptr, e.to_string())),
        Value::Array(xs) if xs.len() == 2 => Ok(Complex64::new(
            as_f64(&xs[0], &child(ptr, 0))?,
            as_f64(&xs[1], &child(ptr, 1))?,
        )),
        _ => Err(field(ptr, "expected a number, an expression string or [re, im]")),
    }
}

fn parse_amplitudes(v: &Value, ptr: &str) -> Result<StateVector> {
    let amps = array(v, ptr)?
        .iter()
        .enumerate()
        .map(|(i, a)| parse_amplitude(a, &child(ptr, i)))
        .collect::<Result<Vec<_>>>()?;
    let state = StateVector::new(amps).map_err(|e| field(ptr, e.to_string()))?;
    state
        .ensure_normalized(STATE_NORM_TOL)
        .map_err(|e| field(ptr, e.to_string()))?;
    Ok(state)
}

fn parse_alpha(v: &Value, ptr: &str) -> Result<StateVector> {
    StateVector::eta(as_f64(v, ptr)?).map_err(|e| field(ptr, e.to_string()))
}

fn parse_input(v: &Value, ptr: &str, n: usize) -> Result<Vec<StateVector>> {
    let map = object(v, ptr)?;
    check_keys(map, ptr, &["alpha", "states"])?;
    match (map.get("alpha"), map.get("states")) {
        (Some(a), None) => Ok(vec![parse_alpha(a, &child(ptr, "alpha"))?; n]),
        (None, Some(s)) => {
            let sp = child(ptr, "states");
            let states = array(s, &sp)?;
            if states.len() != n {
                return Err(field(&sp, format!("expected {n} states, got {}", states.len())));
            }
            states
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let p = child(&sp, i);
                    let st = parse_amplitudes(s, &p)?;
                    if st.num_qubits() != 1 {
                        return Err(field(&p, "expected a single-qubit state [a0, a1]"));
                    }
                    Ok(st)
                })
                .collect()
        }
        _ => Err(field(ptr, "expected exactly one of `alpha` or `states`")),
    }
}

fn parse_protocol(map: &Map<String, Value>) -> Result<Protocol> {
    let name = as_str(required(map, "", "protocol")?, "/protocol")?;
    let n = map.get("n").map(|v| as_count(v, "/n")).transpose()?;
    let fixed = |expected: usize, p: Protocol| match n {
        Some(k) if k != expected => Err(field("/n", format!("{name} takes n = {expected}"))),
        _ => Ok(p),
    };
    let protocol = match name {
        "single" => fixed(1, Protocol::Single)?,
        "bell" => fixed(2, Protocol::Bell)?,
        "ghz" => Protocol::Ghz(n.ok_or_else(|| field("/n", "missing field"))?),
        "w" => Protocol::W(n.ok_or_else(|| field("/n", "missing field"))?),
        other => {
            return Err(field(
                "/protocol",
                format!("unknown protocol `{other}`; expected single|bell|ghz|w"),
            ))
        }
    };
    protocol.validate().map_err(|e| field("/n", e.to_string()))?;
    Ok(protocol)
}

pub fn switch_spec_from_value(v: &Value) -> Result<SwitchSpec> {
    let map = object(v, "")?;
    check_keys(map, "", &["version", "protocol", "n", "pairs", "input", "control"])?;
    check_version(map, "")?;
    let protocol = parse_protocol(map)?;
    let n = protocol.num_targets();
    let pairs_v = array(required(map, "", "pairs")?, "/pairs")?;
    if pairs_v.len() != n {
        return Err(field("/pairs", format!("expected {n} pairs, got {}", pairs_v.len())));
    }
    let pairs = pairs_v
        .iter()
        .enumerate()
        .map(|(i, p)| parse_pair(p, &child("/pairs", i)))
        .collect::<Result<Vec<_>>>()?;
    let input = parse_input(required(map, "", "input")?, "/input", n)?;
    let control = match map.get("control") {
        None => even_control(protocol),
        Some(Value::String(s)) if s == "even" => even_control(protocol),
        Some(Value::String(s)) => return Err(field("/control", format!("unknown control `{s}`; expected \"even\""))),
        Some(other) => parse_amplitudes(other, "/control")?,
    };
    SwitchSpec::with_control(protocol, pairs, input, control).map_err(|e| field("", e.to_string()))
}

pub fn parse_switch_spec(text: &str) -> Result<SwitchSpec> {
    switch_spec_from_value(&parse_json(text)?)
}

pub fn load_switch_spec(path: &Path) -> Result<SwitchSpec> {
    parse_switch_spec(&read_text(path)?)
}

pub fn complex_value(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn state_value(s: &StateVector) -> Value {
    Value::Array(s.amplitudes().iter().map(|&z| complex_value(z)).collect())
}

fn matrix_literal(m: &ComplexMatrix) -> String {
    GateSpec::Matrix(m.clone()).to_string()
}

fn protocol_fields(p: Protocol) -> (&'static str, usize) {
    match p {
        Protocol::Single => ("single", 1),
        Protocol::Bell => ("bell", 2),
        Protocol::Ghz(n) => ("ghz", n),
        Protocol::W(n) => ("w", n),
    }
}

/// Inverse of [`switch_spec_from_value`]; gates are written as exact matrix literals.
pub fn switch_spec_to_value(spec: &SwitchSpec) -> Value {
    let (name, n) = protocol_fields(spec.protocol());
    json!({
        "version": FORMAT_VERSION,
        "protocol": name,
        "n": n,
        "pairs": spec.pairs().iter().map(|p| json!({
            "u": matrix_literal(p.u()),
            "u_tilde": matrix_literal(p.u_tilde()),
        })).collect::<Vec<_>>(),
        "input": {"states": spec.input().iter().map(state_value).collect::<Vec<_>>()},
        "control": "even",
    })
}

pub fn ensemble_value(spec: &SwitchSpec, ens: &OutcomeEnsemble) -> Value {
    let (name, n) = protocol_fields(spec.protocol());
    json!({
        "protocol": name,
        "n": n,
        "probability_sum": ens.probability_sum(),
        "outcomes": ens.outcomes.iter().map(|o| {
            let mut m = Map::new();
            m.insert("label".into(), json!(o.label));
            m.insert("probability".into(), json!(o.probability));
            m.insert("reachable".into(), json!(o.is_reachable()));
            if let Some(s) = &o.state {
                m.insert("state".into(), state_value(s));
            }
            Value::Object(m)
        }).collect::<Vec<_>>(),
    })
}

pub fn condition_value(r: &ConditionReport) -> Value {
    json!({
        "per_qubit_overlap": r.per_qubit_overlap.iter().map(|&z| complex_value(z)).collect::<Vec<_>>(),
        "all_orthogonal": r.all_orthogonal,
        "any_aligned": r.any_aligned,
        "tol": r.tol,
    })
}

pub fn certificate_value(c: &Certificate) -> Value {
    json!({
        "condition": condition_value(&c.condition),
        "separable": c.separable,
        "outcomes": c.outcomes.iter().map(|o| {
            let mut m = Map::new();
            m.insert("label".into(), json!(o.label));
            m.insert("probability".into(), json!(o.probability));
            m.insert("reachable".into(), json!(o.reachable));
            if let Some((kind, value)) = o.metric {
                m.insert("metric".into(), json!({"kind": kind.to_string(), "value": value}));
            }
            if let Some(class) = o.class {
                m.insert("class".into(), json!(class.to_string()));
            }
            if let Some(f) = o.lu_fidelity {
                m.insert("lu_fidelity".into(), json!(f));
            }
            Value::Object(m)
        }).collect::<Vec<_>>(),
    })
}

fn parse_gates(v: &Value, ptr: &str) -> Result<UnitaryPair> {
    parse_pair(v, ptr)
}

fn parse_coordinator_state(v: &Value, ptr: &str) -> Result<CoordinatorState> {
    match as_str(v, ptr)? {
        "ghz" => Ok(CoordinatorState::Ghz),
        "product_plus" => Ok(CoordinatorState::ProductPlus),
        other => Err(field(
            ptr,
            format!("unknown coordinator state `{other}`; expected ghz|product_plus"),
        )),
    }
}

pub fn topology_from_value(v: &Value) -> Result<Topology> {
    let map = object(v, "")?;
    check_keys(
        map,
        "",
        &[
            "version",
            "coordinator",
            "coordinator_state",
            "entanglers",
            "gates",
            "alpha",
        ],
    )?;
    check_version(map, "")?;
    let coordinator = map
        .get("coordinator")
        .map(|c| as_str(c, "/coordinator"))
        .transpose()?
        .unwrap_or("e0");
    let state = map
        .get("coordinator_state")
        .map(|s| parse_coordinator_state(s, "/coordinator_state"))
        .transpose()?
        .unwrap_or_default();
    let default_pair = map.get("gates").map(|g| parse_gates(g, "/gates")).transpose()?;
    let default_input = map.get("alpha").map(|a| parse_alpha(a, "/alpha")).transpose()?;

    let entanglers = array(required(map, "", "entanglers")?, "/entanglers")?
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let ptr = child("/entanglers", j);
            let m = object(e, &ptr)?;
            check_keys(m, &ptr, &["id", "clients", "gates", "alpha", "link_noise"])?;
            let id = as_str(required(m, &ptr, "id")?, &child(&ptr, "id"))?;
            let clients = as_count(required(m, &ptr, "clients")?, &child(&ptr, "clients"))?;
            if clients < 2 {
                return Err(field(&child(&ptr, "clients"), "an entangler needs at least 2 clients"));
            }
            if let Some(noise) = m.get("link_noise") {
                let np = child(&ptr, "link_noise");
                if as_f64(noise, &np)? != 0.0 {
                    return Err(field(&np, "link noise is not simulated; only 0 is accepted"));
                }
            }
            let pair = match m.get("gates") {
                Some(g) => parse_gates(g, &child(&ptr, "gates"))?,
                None => default_pair
                    .clone()
                    .ok_or_else(|| field(&child(&ptr, "gates"), "missing field (no top-level default)"))?,
            };
            let input = match m.get("alpha") {
                Some(a) => parse_alpha(a, &child(&ptr, "alpha"))?,
                None => default_input
                    .clone()
                    .ok_or_else(|| field(&child(&ptr, "alpha"), "missing field (no top-level default)"))?,
            };
            Entangler::uniform(id, clients, &pair, &input).map_err(|e| field(&ptr, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Topology::new(coordinator, state, entanglers).map_err(|e| field("/entanglers", e.to_string()))
}

pub fn parse_topology(text: &str) -> Result<Topology> {
    topology_from_value(&parse_json(text)?)
}

pub fn load_topology(path: &Path) -> Result<Topology> {
    parse_topology(&read_text(path)?)
}

pub fn branches_value(branches: &[BranchResult]) -> Value {
    Value::Array(
        branches
            .iter()
            .map(|b| {
                let mut m = Map::new();
                m.insert("control_outcome".into(), json!(b.control_outcome));
                m.insert("probability".into(), json!(b.probability));
                m.insert("reachable".into(), json!(b.client_state.is_some()));
                if let Some(f) = b.ghz_fidelity {
                    m.insert("ghz_fidelity".into(), json!(f));
                }
                if let Some(s) = &b.client_state {
                    m.insert("client_state".into(), state_value(s));
                }
                Value::Object(m)
            })
            .collect(),
    )
}

/// Branch count, probability total and worst-case GHZ fidelity.
pub fn branch_summary_value(topo: &Topology, branches: &[BranchResult], threshold: f64) -> Value {
    let min_fidelity = branches
        .iter()
        .filter_map(|b| b.ghz_fidelity)
        .fold(f64::INFINITY, f64::min);
    let reachable = branches.iter().filter(|b| b.client_state.is_some()).count();
    json!({
        "coordinator": topo.coordinator,
        "entanglers": topo.entanglers.iter().map(|e| json!({"id": e.id, "clients": e.clients()})).collect::<Vec<_>>(),
        "clients": topo.num_clients(),
        "branches": branches.len(),
        "reachable_branches": reachable,
        "probability_sum": branches.iter().map(|b| b.probability).sum::<f64>(),
        "min_ghz_fidelity": min_fidelity,
        "every_branch_ghz": min_fidelity >= 1.0 - threshold,
    })
}
