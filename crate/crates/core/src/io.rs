//! JSON file formats. Every number is an exact string: `"n"` or `"n/d"`.
//!
//! Cone file:
//!
//! ```text
//! {"n": 2,
//!  "q_basis": {"kind": "monomial", "degree": 2, "nodes": [...]?, "exponents": [[0,0],...]?},
//!  "weights": [["1","0",...], ...],
//!  "degrees": [1, 0],
//!  "p_bases": [{"kind": ..., "degree": ...}, ...]?}
//! ```
//!
//! Lagrange nodes are strings for `n = 1` and arrays of strings otherwise.
//! Missing `p_bases` are graded-lex monomial bases of the listed degrees.

use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::certify::{Certificate, WsosDecomposition};
use crate::error::{Error, Result};
use crate::exactarith::{format_rational, parse_rational, Rational, SymMatrix};
use crate::polybasis::{BasisId, BasisKind, ConeSpec};
use crate::solver::IterationRecord;

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| perr(format!("missing field {key:?}")))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| perr(format!("{what} must be an object")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| perr(format!("{what} must be an array")))
}

fn as_uint(v: &Value, what: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| perr(format!("{what} must be a nonnegative integer")))
}

/// Accepts `"num/den"` strings and JSON integers; rejects floats.
pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
        other => Err(perr(format!("expected an exact rational string, got {other}"))),
    }
}

pub fn rational_to_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn rationals_from_json(v: &Value, what: &str) -> Result<Vec<Rational>> {
    as_array(v, what)?.iter().map(rational_from_json).collect()
}

pub fn rationals_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_to_json).collect())
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| perr(format!("invalid JSON: {e}")))
}

fn basis_from_json(v: &Value, n: usize) -> Result<BasisId> {
    let obj = as_object(v, "basis")?;
    let kind: BasisKind = field(obj, "kind")?
        .as_str()
        .ok_or_else(|| perr("basis kind must be a string"))?
        .parse()?;
    let degree = u32::try_from(as_uint(field(obj, "degree")?, "degree")?)
        .map_err(|_| perr("degree out of range"))?;
    let mut id = match kind {
        BasisKind::Monomial => BasisId::monomial(n, degree),
        BasisKind::Chebyshev => BasisId::chebyshev(n, degree),
        BasisKind::Lagrange => {
            let nodes = as_array(field(obj, "nodes")?, "nodes")?
                .iter()
                .map(|node| match node {
                    Value::Array(_) => rationals_from_json(node, "node"),
                    _ => Ok(vec![rational_from_json(node)?]),
                })
                .collect::<Result<Vec<_>>>()?;
            BasisId::lagrange(n, degree, nodes)
        }
    };
    if let Some(e) = obj.get("exponents") {
        let exps = as_array(e, "exponents")?
            .iter()
            .map(|row| {
                as_array(row, "exponent")?
                    .iter()
                    .map(|k| {
                        u32::try_from(as_uint(k, "exponent")?).map_err(|_| perr("exponent out of range"))
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        id = id.with_exponents(exps);
    }
    Ok(id)
}

fn basis_to_json(id: &BasisId) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), json!(id.kind.as_str()));
    obj.insert("degree".into(), json!(id.degree));
    if let Some(nodes) = &id.nodes {
        let nodes = nodes
            .iter()
            .map(|z| {
                if id.n == 1 {
                    rational_to_json(&z[0])
                } else {
                    rationals_to_json(z)
                }
            })
            .collect();
        obj.insert("nodes".into(), Value::Array(nodes));
    }
    if let Some(exps) = &id.exponents {
        obj.insert("exponents".into(), json!(exps));
    }
    Value::Object(obj)
}

pub fn cone_from_json(v: &Value) -> Result<ConeSpec> {
    let obj = as_object(v, "cone")?;
    let n = usize::try_from(as_uint(field(obj, "n")?, "n")?).map_err(|_| perr("n out of range"))?;
    if n == 0 {
        return Err(perr("n must be positive"));
    }
    let q_basis = basis_from_json(field(obj, "q_basis")?, n)?;
    let weights = as_array(field(obj, "weights")?, "weights")?
        .iter()
        .map(|w| rationals_from_json(w, "weight"))
        .collect::<Result<Vec<_>>>()?;
    let degrees = as_array(field(obj, "degrees")?, "degrees")?
        .iter()
        .map(|d| u32::try_from(as_uint(d, "degree")?).map_err(|_| perr("degree out of range")))
        .collect::<Result<Vec<_>>>()?;
    let p_bases = match obj.get("p_bases") {
        Some(p) => Some(
            as_array(p, "p_bases")?
                .iter()
                .map(|b| basis_from_json(b, n))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    ConeSpec::new(n, q_basis, weights, degrees, p_bases)
}

pub fn cone_to_json(spec: &ConeSpec) -> Value {
    json!({
        "n": spec.n,
        "q_basis": basis_to_json(&spec.q_basis),
        "weights": spec.weights.iter().map(|w| rationals_to_json(w)).collect::<Vec<_>>(),
        "degrees": spec.degrees,
        "p_bases": spec.p_bases.iter().map(basis_to_json).collect::<Vec<_>>(),
    })
}

pub fn parse_cone(text: &str) -> Result<ConeSpec> {
    cone_from_json(&parse_json(text)?)
}

/// SHA-256 of the compact, key-sorted JSON of the normalized cone.
pub fn cone_digest(spec: &ConeSpec) -> String {
    let canonical = serde_json::to_string(&cone_to_json(spec)).expect("serializable");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// `{"coeffs": [...]}` or a bare array.
pub fn parse_poly(text: &str) -> Result<Vec<Rational>> {
    let v = parse_json(text)?;
    match &v {
        Value::Array(_) => rationals_from_json(&v, "polynomial"),
        Value::Object(obj) => rationals_from_json(field(obj, "coeffs")?, "coeffs"),
        _ => Err(perr("polynomial must be an object with \"coeffs\"")),
    }
}

pub fn poly_to_json(coeffs: &[Rational]) -> Value {
    json!({ "coeffs": rationals_to_json(coeffs) })
}

pub fn certificate_to_json(cert: &Certificate) -> Value {
    let mut obj = Map::new();
    obj.insert("cone_digest".into(), json!(cert.cone_digest));
    obj.insert("x".into(), rationals_to_json(&cert.x));
    if let Some(c) = &cert.c {
        obj.insert("c".into(), rational_to_json(c));
    }
    if let Some(n) = &cert.n {
        obj.insert("N".into(), json!(n.to_string()));
    }
    obj.insert("verified".into(), json!(cert.verified));
    Value::Object(obj)
}

pub fn certificate_from_json(v: &Value) -> Result<Certificate> {
    let obj = as_object(v, "certificate")?;
    let cone_digest = field(obj, "cone_digest")?
        .as_str()
        .ok_or_else(|| perr("cone_digest must be a string"))?
        .to_string();
    let x = rationals_from_json(field(obj, "x")?, "x")?;
    let c = obj.get("c").map(rational_from_json).transpose()?;
    let n = match obj.get("N") {
        Some(Value::String(s)) => Some(s.parse::<BigInt>().map_err(|_| perr("N must be an integer"))?),
        Some(Value::Number(k)) if k.is_u64() => Some(BigInt::from(k.as_u64().expect("checked"))),
        Some(_) => return Err(perr("N must be an integer string")),
        None => None,
    };
    let verified = match obj.get("verified") {
        Some(b) => b.as_bool().ok_or_else(|| perr("verified must be a boolean"))?,
        None => false,
    };
    Ok(Certificate {
        cone_digest,
        x,
        c,
        n,
        verified,
    })
}

pub fn parse_certificate(text: &str) -> Result<Certificate> {
    certificate_from_json(&parse_json(text)?)
}

fn matrix_to_json(m: &SymMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| rationals_to_json(r)).collect())
}

fn matrix_from_json(v: &Value) -> Result<SymMatrix> {
    let rows = as_array(v, "matrix")?
        .iter()
        .map(|r| rationals_from_json(r, "matrix row"))
        .collect::<Result<Vec<_>>>()?;
    SymMatrix::from_rows(rows)
}

pub fn decomposition_to_json(dec: &WsosDecomposition) -> Value {
    json!({
        "gram_blocks": dec.gram_blocks.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "psd": dec.psd,
    })
}

/// PSD verdicts are recomputed rather than trusted.
pub fn decomposition_from_json(v: &Value) -> Result<WsosDecomposition> {
    let obj = as_object(v, "decomposition")?;
    let blocks = as_array(field(obj, "gram_blocks")?, "gram_blocks")?
        .iter()
        .map(matrix_from_json)
        .collect::<Result<Vec<_>>>()?;
    Ok(WsosDecomposition::new(blocks))
}

pub fn parse_decomposition(text: &str) -> Result<WsosDecomposition> {
    decomposition_from_json(&parse_json(text)?)
}

pub fn trace_record_to_json(rec: &IterationRecord) -> Value {
    json!({
        "iter": rec.iter,
        "c": rational_to_json(&rec.c),
        "delta_c": rational_to_json(&rec.delta_c),
        "N": rec.n.to_string(),
        "max_bits_x": rec.max_bits_x,
        "verified": rec.verified,
    })
}

pub fn trace_record_from_json(v: &Value) -> Result<IterationRecord> {
    let obj = as_object(v, "trace record")?;
    let n = field(obj, "N")?
        .as_str()
        .ok_or_else(|| perr("N must be a string"))?
        .parse::<BigInt>()
        .map_err(|_| perr("N must be an integer"))?;
    Ok(IterationRecord {
        iter: as_uint(field(obj, "iter")?, "iter")? as usize,
        c: rational_from_json(field(obj, "c")?)?,
        delta_c: rational_from_json(field(obj, "delta_c")?)?,
        n,
        max_bits_x: as_uint(field(obj, "max_bits_x")?, "max_bits_x")?,
        verified: field(obj, "verified")?.as_bool().ok_or_else(|| perr("verified must be a boolean"))?,
    })
}

/// One compact JSON object per line.
pub fn trace_to_jsonl(trace: &[IterationRecord]) -> String {
    trace
        .iter()
        .map(|r| serde_json::to_string(&trace_record_to_json(r)).expect("serializable") + "\n")
        .collect()
}

pub fn parse_trace(text: &str) -> Result<Vec<IterationRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| trace_record_from_json(&parse_json(l)?))
        .collect()
}

pub fn to_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}
