//! JSON structure files.
//!
//! ```json
//! {"signature": {"functions": [{"name": "+", "arity": 2, "lipschitz": "1"}], "relations": []},
//!  "universe": ["0", "1"],
//!  "metric": ["0", "1", "1", "0"],
//!  "functions": {"+": [["0", "1"], ["1", "0"]]},
//!  "relations": {}}
//! ```
//!
//! Metric entries are row-major; function and relation tables are nested
//! arrays indexed by argument, with element ids and rational strings at the
//! leaves. Rationals are always strings.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use super::structure::{Elem, FiniteStructure, StructureError};
use crate::rational::{self, Q};
use crate::syntax::Signature;

#[derive(Debug, thiserror::Error)]
pub enum StructureFileError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed structure file: {0}")]
    Format(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn bad(msg: impl Into<String>) -> StructureFileError {
    StructureFileError::Format(msg.into())
}

fn element_id(v: &Value) -> Result<String, StructureFileError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_u64() || n.is_i64() => Ok(n.to_string()),
        other => Err(bad(format!("element id must be a string, got {other}"))),
    }
}

fn rational_leaf(v: &Value) -> Result<Q, StructureFileError> {
    match v {
        Value::String(s) => rational::parse(s).map_err(|e| bad(e.to_string())),
        other => Err(bad(format!("rationals must be strings like \"1/2\", got {other}"))),
    }
}

/// Flattens a nested table of the given depth in lexicographic order.
fn flatten<'a>(v: &'a Value, depth: usize, n: usize, name: &str, out: &mut Vec<&'a Value>) -> Result<(), StructureFileError> {
    if depth == 0 {
        out.push(v);
        return Ok(());
    }
    let arr = v
        .as_array()
        .ok_or_else(|| bad(format!("table `{name}` must nest {depth} more array level(s)")))?;
    if arr.len() != n {
        return Err(bad(format!("table `{name}` has a row of length {}, expected {n}", arr.len())));
    }
    for item in arr {
        flatten(item, depth - 1, n, name, out)?;
    }
    Ok(())
}

fn nest(leaves: &[Value], depth: usize, n: usize) -> Value {
    if depth == 0 {
        return leaves[0].clone();
    }
    let chunk = leaves.len() / n;
    Value::Array((0..n).map(|i| nest(&leaves[i * chunk..(i + 1) * chunk], depth - 1, n)).collect())
}

pub fn from_json(text: &str) -> Result<FiniteStructure, StructureFileError> {
    let root: Value = serde_json::from_str(text)?;
    let obj = root.as_object().ok_or_else(|| bad("top level must be an object"))?;
    let sig: Signature = serde_json::from_value(obj.get("signature").cloned().unwrap_or(json!({})))?;
    let universe = obj
        .get("universe")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing `universe` array"))?
        .iter()
        .map(element_id)
        .collect::<Result<Vec<_>, _>>()?;
    let n = universe.len();
    let index: BTreeMap<&str, Elem> = universe.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();

    let metric_val = obj.get("metric").ok_or_else(|| bad("missing `metric`"))?;
    let metric_arr = metric_val.as_array().ok_or_else(|| bad("`metric` must be an array"))?;
    let metric = if metric_arr.iter().all(Value::is_array) && !metric_arr.is_empty() {
        let mut leaves = Vec::new();
        flatten(metric_val, 2, n, "metric", &mut leaves)?;
        leaves.into_iter().map(rational_leaf).collect::<Result<Vec<_>, _>>()?
    } else {
        metric_arr.iter().map(rational_leaf).collect::<Result<Vec<_>, _>>()?
    };

    let empty = Map::new();
    let mut functions = BTreeMap::new();
    let fobj = obj.get("functions").and_then(Value::as_object).unwrap_or(&empty);
    for (name, table) in fobj {
        let arity = sig
            .function(name)
            .ok_or_else(|| StructureError::UndeclaredSymbol(name.clone()))?
            .arity;
        let mut leaves = Vec::new();
        flatten(table, arity, n, name, &mut leaves)?;
        let elems = leaves
            .into_iter()
            .map(|v| {
                let id = element_id(v)?;
                index
                    .get(id.as_str())
                    .copied()
                    .ok_or_else(|| StructureFileError::Structure(StructureError::NotClosed { name: name.clone(), value: n }))
            })
            .collect::<Result<Vec<_>, _>>()?;
        functions.insert(name.clone(), elems);
    }
    let mut relations = BTreeMap::new();
    let robj = obj.get("relations").and_then(Value::as_object).unwrap_or(&empty);
    for (name, table) in robj {
        let arity = sig
            .relation(name)
            .ok_or_else(|| StructureError::UndeclaredSymbol(name.clone()))?
            .arity;
        let mut leaves = Vec::new();
        flatten(table, arity, n, name, &mut leaves)?;
        relations.insert(name.clone(), leaves.into_iter().map(rational_leaf).collect::<Result<Vec<_>, _>>()?);
    }
    Ok(FiniteStructure::new(sig, universe, metric, functions, relations)?)
}

pub fn to_value(m: &FiniteStructure) -> Value {
    let n = m.size();
    let mut functions = Map::new();
    for f in m.signature().functions() {
        let table = m.function_table(&f.name).expect("complete");
        let leaves: Vec<Value> = table.iter().map(|&e| Value::String(m.name(e).to_string())).collect();
        functions.insert(f.name.clone(), nest(&leaves, f.arity, n));
    }
    let mut relations = Map::new();
    for r in m.signature().relations() {
        let table = m.relation_table(&r.name).expect("complete");
        let leaves: Vec<Value> = table.iter().map(|q| Value::String(q.to_string())).collect();
        relations.insert(r.name.clone(), nest(&leaves, r.arity, n));
    }
    json!({
        "signature": m.signature(),
        "universe": m.universe(),
        "metric": m.metric_table().iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        "functions": functions,
        "relations": relations,
    })
}

pub fn to_json(m: &FiniteStructure) -> String {
    serde_json::to_string_pretty(&to_value(m)).expect("values serialize")
}

pub fn load(path: &std::path::Path) -> Result<FiniteStructure, StructureFileError> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn save(m: &FiniteStructure, path: &std::path::Path) -> Result<(), StructureFileError> {
    std::fs::write(path, to_json(m) + "\n")?;
    Ok(())
}
