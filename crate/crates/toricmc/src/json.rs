//! JSON and CSV interchange. Reading is permissive (integers, floats or
//! "p/q" strings for rationals; vertex indices or labels for arcs); writing
//! is canonical: keys sorted, floats always in scientific notation with 17
//! significant digits, so equal data always produces identical bytes.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{Map, Number, Value};

use crate::amodel::AModel;
use crate::error::{Error, Result};
use crate::graph::TransitionGraph;
use crate::matrix::IntMatrix;
use crate::reversible::ReversibleParam;
use crate::tmc::TmcParam;

pub fn read_value(path: &std::path::Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn obj<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Input(format!("{} must be a JSON object", what)))
}

fn field<'a>(m: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    m.get(key)
        .ok_or_else(|| Error::Input(format!("missing field \"{}\"", key)))
}

fn arr<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Input(format!("{} must be a JSON array", what)))
}

pub fn parse_rational(v: &Value) -> Result<BigRational> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(BigInt::from(i)))
            } else if let Some(u) = n.as_u64() {
                Ok(BigRational::from_integer(BigInt::from(u)))
            } else {
                let f = n.as_f64().unwrap();
                BigRational::from_float(f)
                    .ok_or_else(|| Error::Input(format!("{} is not a finite number", f)))
            }
        }
        Value::String(s) => {
            let (num, den) = match s.split_once('/') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (s.trim(), "1"),
            };
            let p = BigInt::from_str(num)
                .map_err(|_| Error::Input(format!("bad rational \"{}\"", s)))?;
            let q = BigInt::from_str(den)
                .map_err(|_| Error::Input(format!("bad rational \"{}\"", s)))?;
            if num_traits::Zero::is_zero(&q) {
                return Err(Error::Input(format!("zero denominator in \"{}\"", s)));
            }
            Ok(BigRational::new(p, q))
        }
        _ => Err(Error::Input("rational must be a number or \"p/q\" string".into())),
    }
}

pub fn rational_to_value(r: &BigRational) -> Value {
    use num_traits::One;
    if r.denom().is_one() {
        if let Some(i) = r.numer().to_i64() {
            return Value::Number(Number::from(i));
        }
        return Value::String(r.numer().to_string());
    }
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}

fn parse_bigint(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(Error::Input(format!("{} is not an integer", n)))
            }
        }
        Value::String(s) => BigInt::from_str(s.trim())
            .map_err(|_| Error::Input(format!("bad integer \"{}\"", s))),
        _ => Err(Error::Input("integer expected".into())),
    }
}

fn parse_f64(v: &Value) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| Error::Input("number expected".into()))?;
    if !x.is_finite() {
        return Err(Error::Input("number must be finite".into()));
    }
    Ok(x)
}

pub fn bigint_to_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(i) => Value::Number(Number::from(i)),
        None => Value::String(x.to_string()),
    }
}

pub fn int_rows_from_value(v: &Value) -> Result<Vec<Vec<BigInt>>> {
    arr(v, "matrix")?
        .iter()
        .map(|row| arr(row, "matrix row")?.iter().map(parse_bigint).collect())
        .collect()
}

pub fn int_matrix_from_value(v: &Value) -> Result<IntMatrix> {
    IntMatrix::from_rows(&int_rows_from_value(v)?)
}

pub fn int_rows_to_value(rows: &[Vec<BigInt>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|row| Value::Array(row.iter().map(bigint_to_value).collect()))
            .collect(),
    )
}

pub fn f64_vec_from_value(v: &Value) -> Result<Vec<f64>> {
    arr(v, "vector")?.iter().map(parse_f64).collect()
}

pub fn f64_rows_from_value(v: &Value) -> Result<Vec<Vec<f64>>> {
    arr(v, "matrix")?
        .iter()
        .map(|row| f64_vec_from_value(row))
        .collect()
}

pub fn f64_to_value(x: f64) -> Value {
    // Guaranteed-finite inputs; Number::from_f64 only fails on NaN/inf.
    Value::Number(Number::from_f64(x).expect("finite float"))
}

pub fn f64_vec_to_value(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| f64_to_value(*x)).collect())
}

pub fn f64_rows_to_value(rows: &[Vec<f64>]) -> Value {
    Value::Array(rows.iter().map(|r| f64_vec_to_value(r)).collect())
}

/// Model file: `{"rows": [[int]], "mu": [...], "row_labels": [...],
/// "col_labels": [...]}`; `mu` and the labels are optional, `mu` defaults
/// to uniform weights.
pub fn model_from_value(v: &Value) -> Result<AModel> {
    let m = obj(v, "model")?;
    let matrix = int_matrix_from_value(field(m, "rows")?)?;
    let mu = match m.get("mu") {
        Some(muv) => arr(muv, "mu")?.iter().map(parse_rational).collect::<Result<Vec<_>>>()?,
        None => {
            use num_traits::One;
            vec![BigRational::one(); matrix.cols()]
        }
    };
    let labels = |key: &str| -> Result<Option<Vec<String>>> {
        match m.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(lv) => Ok(Some(
                arr(lv, key)?
                    .iter()
                    .map(|x| {
                        x.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| Error::Input(format!("{} must be strings", key)))
                    })
                    .collect::<Result<Vec<_>>>()?,
            )),
        }
    };
    AModel::with_labels(matrix, mu, labels("row_labels")?, labels("col_labels")?)
}

pub fn model_to_value(model: &AModel) -> Value {
    let mut m = Map::new();
    m.insert("rows".into(), int_rows_to_value(&model.matrix().to_rows()));
    m.insert(
        "mu".into(),
        Value::Array(model.mu().iter().map(rational_to_value).collect()),
    );
    if let Some(labels) = model.row_labels() {
        m.insert(
            "row_labels".into(),
            Value::Array(labels.iter().map(|s| Value::String(s.clone())).collect()),
        );
    }
    if let Some(labels) = model.col_labels() {
        m.insert(
            "col_labels".into(),
            Value::Array(labels.iter().map(|s| Value::String(s.clone())).collect()),
        );
    }
    Value::Object(m)
}

/// Graph file: `{"vertices": ["a", ...], "arcs": [["a","b"], ...],
/// "loops": ["a", ...]}`; arc and loop endpoints may also be indices.
pub fn graph_from_value(v: &Value) -> Result<TransitionGraph> {
    let m = obj(v, "graph")?;
    let labels: Vec<String> = arr(field(m, "vertices")?, "vertices")?
        .iter()
        .map(|x| {
            x.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::Input("vertices must be strings".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let vertex = |x: &Value| -> Result<usize> {
        match x {
            Value::Number(n) => {
                let i = n
                    .as_u64()
                    .ok_or_else(|| Error::Input(format!("bad vertex index {}", n)))?
                    as usize;
                if i >= labels.len() {
                    return Err(Error::Input(format!("vertex index {} out of range", i)));
                }
                Ok(i)
            }
            Value::String(s) => labels
                .iter()
                .position(|l| l == s)
                .ok_or_else(|| Error::Input(format!("unknown vertex \"{}\"", s))),
            _ => Err(Error::Input("vertex must be an index or label".into())),
        }
    };
    let mut arcs = Vec::new();
    if let Some(av) = m.get("arcs") {
        for pair in arr(av, "arcs")? {
            let p = arr(pair, "arc")?;
            if p.len() != 2 {
                return Err(Error::Input("arc must be a pair".into()));
            }
            arcs.push((vertex(&p[0])?, vertex(&p[1])?));
        }
    }
    let mut loops = Vec::new();
    if let Some(lv) = m.get("loops") {
        for x in arr(lv, "loops")? {
            loops.push(vertex(x)?);
        }
    }
    TransitionGraph::new(labels, arcs, loops)
}

pub fn graph_to_value(graph: &TransitionGraph) -> Value {
    let mut m = Map::new();
    m.insert(
        "vertices".into(),
        Value::Array(
            graph
                .labels()
                .iter()
                .map(|s| Value::String(s.clone()))
                .collect(),
        ),
    );
    m.insert(
        "arcs".into(),
        Value::Array(
            graph
                .arcs()
                .iter()
                .map(|&(v, w)| {
                    Value::Array(vec![
                        Value::String(graph.label(v).to_string()),
                        Value::String(graph.label(w).to_string()),
                    ])
                })
                .collect(),
        ),
    );
    m.insert(
        "loops".into(),
        Value::Array(
            graph
                .loops()
                .iter()
                .map(|&v| Value::String(graph.label(v).to_string()))
                .collect(),
        ),
    );
    Value::Object(m)
}

/// Chain parameters: `{"t0": 1.0, "init": [...], "weight": [[...]]}`.
pub fn tmc_param_from_value(graph: &TransitionGraph, v: &Value) -> Result<TmcParam> {
    let m = obj(v, "chain parameters")?;
    let t0 = match m.get("t0") {
        Some(x) => parse_f64(x)?,
        None => 1.0,
    };
    let init = f64_vec_from_value(field(m, "init")?)?;
    let weight = f64_rows_from_value(field(m, "weight")?)?;
    TmcParam::new(graph, t0, init, weight)
}

pub fn tmc_param_to_value(param: &TmcParam) -> Value {
    let mut m = Map::new();
    m.insert("t0".into(), f64_to_value(param.t0()));
    m.insert("init".into(), f64_vec_to_value(param.init()));
    m.insert("weight".into(), f64_rows_to_value(param.weight()));
    Value::Object(m)
}

/// Reversible parameters: `{"s": [[...]], "cuts": [[vertex, ...], ...],
/// "t": [...], "loops": [...]}`; omitted cuts default to singletons.
pub fn reversible_param_from_value(
    graph: &TransitionGraph,
    v: &Value,
) -> Result<ReversibleParam> {
    let m = obj(v, "reversible parameters")?;
    let s = f64_rows_from_value(field(m, "s")?)?;
    let cuts = match m.get("cuts") {
        Some(cv) => arr(cv, "cuts")?
            .iter()
            .map(|cut| {
                arr(cut, "cut")?
                    .iter()
                    .map(|x| match x {
                        Value::Number(n) => n
                            .as_u64()
                            .map(|i| i as usize)
                            .ok_or_else(|| Error::Input("bad cut vertex".into())),
                        Value::String(sv) => graph
                            .index_of(sv)
                            .ok_or_else(|| Error::Input(format!("unknown vertex \"{}\"", sv))),
                        _ => Err(Error::Input("cut vertex must be an index or label".into())),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?,
        None => crate::reversible::default_cuts(graph),
    };
    let t = f64_vec_from_value(field(m, "t")?)?;
    let loops = match m.get("loops") {
        Some(lv) => f64_vec_from_value(lv)?,
        None => vec![0.0; graph.len()],
    };
    ReversibleParam::new(graph, s, cuts, t, loops)
}

pub fn reversible_param_to_value(graph: &TransitionGraph, param: &ReversibleParam) -> Value {
    let mut m = Map::new();
    m.insert("s".into(), f64_rows_to_value(param.s()));
    m.insert(
        "cuts".into(),
        Value::Array(
            param
                .cuts()
                .iter()
                .map(|cut| {
                    Value::Array(
                        cut.iter()
                            .map(|&v| Value::String(graph.label(v).to_string()))
                            .collect(),
                    )
                })
                .collect(),
        ),
    );
    m.insert("t".into(), f64_vec_to_value(param.t()));
    m.insert("loops".into(), f64_vec_to_value(param.loops()));
    Value::Object(m)
}

fn push_canonical(v: &Value, depth: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                // 17 significant digits round-trips every f64.
                out.push_str(&format!("{:.16e}", n.as_f64().unwrap()));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serialization"))
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            let flat = items
                .iter()
                .all(|x| !matches!(x, Value::Array(_) | Value::Object(_)));
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if !flat {
                    out.push('\n');
                    out.push_str(&"  ".repeat(depth + 1));
                }
                push_canonical(item, depth + 1, out);
            }
            if !flat {
                out.push('\n');
                out.push_str(&"  ".repeat(depth));
            }
            out.push(']');
        }
        Value::Object(m) => {
            if m.is_empty() {
                out.push_str("{}");
                return;
            }
            // serde_json's default map is ordered by key already; sort
            // defensively so the writer never depends on build features.
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(depth + 1));
                out.push_str(&serde_json::to_string(key).expect("string serialization"));
                out.push_str(": ");
                push_canonical(&m[key.as_str()], depth + 1, out);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(depth));
            out.push('}');
        }
    }
}

/// Deterministic rendering: sorted keys, indented containers, scalar arrays
/// on one line, floats as `{:.16e}`.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    push_canonical(v, 0, &mut out);
    out.push('\n');
    out
}

pub fn csv_to_int_rows(text: &str) -> Result<Vec<Vec<BigInt>>> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                BigInt::from_str(cell.trim())
                    .map_err(|_| Error::Input(format!("bad integer cell \"{}\"", cell)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Input("empty CSV matrix".into()));
    }
    Ok(rows)
}

pub fn csv_to_f64_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Input(format!("bad number cell \"{}\"", cell)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Input("empty CSV matrix".into()));
    }
    Ok(rows)
}

pub fn int_rows_to_csv(rows: &[Vec<BigInt>]) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn f64_rows_to_csv(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{:.16e}", x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
