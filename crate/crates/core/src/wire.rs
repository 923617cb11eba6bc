//! JSON encodings. Numbers never travel as JSON floats: rationals are
//! `"a/b"` strings, p-adic numbers are digit arrays, and polynomials in `ℓ`
//! are arrays of coefficients by degree.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::coeffs::{EllPoly, Padic, PadicError, Rational, Scalar};
use crate::forms::{FormError, TropicalOneForm};
use crate::graph::{Graph, GraphError, GraphSpec};
use crate::iint::{CanonicalCorrection, FormMatrix, IintError, TropicalMultiform};
use crate::tate::TateError;
use crate::tensor::{TensorError, TruncatedTensor};
use crate::vologodsky::{BasePath, PeriodTable, VolError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed input at {path}: {msg}")]
pub struct WireError {
    pub path: String,
    pub msg: String,
}

fn bad(path: &str, msg: impl Into<String>) -> WireError {
    WireError {
        path: path.into(),
        msg: msg.into(),
    }
}

/// Every failure the library can report, with a stable code per variant.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Iint(#[from] IintError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Vologodsky(#[from] VolError),
    #[error(transparent)]
    Tate(#[from] TateError),
}

impl Error {
    /// Whether the input failed to parse, as opposed to being rejected by
    /// the mathematics.
    pub fn is_malformed(&self) -> bool {
        matches!(self, Error::Wire(_) | Error::Json(_))
    }

    pub fn code(&self) -> &'static str {
        match self {
            Error::Wire(_) | Error::Json(_) => "MalformedInput",
            Error::Graph(e) => match e {
                GraphError::DuplicateId(_) => "DuplicateId",
                GraphError::DanglingEndpoint { .. } => "DanglingEndpoint",
                GraphError::Disconnected => "Disconnected",
                GraphError::Empty => "EmptyGraph",
                GraphError::InvalidId(_) => "InvalidId",
                GraphError::UnknownVertex(_) => "UnknownVertex",
                GraphError::UnknownEdge(_) => "UnknownEdge",
                GraphError::NotComposable(_) => "NotComposable",
                GraphError::HalfOpenInPath(_) => "HalfOpenEdgeInPath",
                GraphError::EndpointMismatch(_) => "EndpointMismatch",
            },
            Error::Form(e) => match e {
                FormError::WrongLength { .. } => "WrongFormLength",
                FormError::NotHarmonic(_) => "NotHarmonic",
                FormError::HalfOpenEdgeInChain(_) => "HalfOpenEdgeInChain",
                FormError::NotHarmonicAfterPullback(_) => "NotHarmonicAfterPullback",
                FormError::InvalidEmbedding(_) => "InvalidEmbedding",
                FormError::NotABasis => "NotABasis",
            },
            Error::Iint(e) => match e {
                IintError::ShapeMismatch(_) | IintError::RaggedFormMatrix { .. } => "ShapeMismatch",
                IintError::Graph(g) => Error::Graph(g.clone()).code(),
                IintError::Form(f) => Error::Form(f.clone()).code(),
            },
            Error::Tensor(e) => match e {
                TensorError::AlphabetMismatch(..) => "AlphabetMismatch",
                TensorError::LevelMismatch(..) => "LevelMismatch",
                TensorError::NonUnitAugmentation => "NonUnitAugmentation",
                TensorError::NotNilpotent => "NotNilpotent",
                TensorError::InvalidWord(..) => "InvalidWord",
            },
            Error::Padic(e) => padic_code(e),
            Error::Vologodsky(e) => match e {
                VolError::LevelMismatch { .. } | VolError::EntryLevel { .. } => "LevelMismatch",
                VolError::AlphabetMismatch { .. } => "AlphabetMismatch",
                VolError::NonUnitEntry(_) => "NonUnitAugmentation",
                VolError::EllDegree { .. } => "EllDegreeExceeded",
                VolError::UnknownGenerator(_) => "UnknownGenerator",
                VolError::Graph(g) => Error::Graph(g.clone()).code(),
            },
            Error::Tate(e) => match e {
                TateError::ZeroPoint => "ZeroPoint",
                TateError::NoComponents => "NoComponents",
                TateError::PrimeMismatch { .. } => "PrimeMismatch",
                TateError::Padic(p) => padic_code(p),
                TateError::Table(v) => Error::Vologodsky(v.clone()).code(),
            },
        }
    }
}

fn padic_code(e: &PadicError) -> &'static str {
    match e {
        PadicError::NotAUnit(_) => "NotAUnit",
        PadicError::ZeroArgument => "ZeroArgument",
        PadicError::NoPrime(_) => "NoPrime",
        PadicError::InvalidDigits(_) => "InvalidDigits",
        PadicError::NotPrime(_) => "NotPrime",
    }
}

/// Scalars with a JSON encoding.
pub trait WireScalar: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value, path: &str) -> Result<Self, WireError>;
}

pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"a/b"` or `"a"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let r: Rational = match s.split_once('/') {
        Some((n, d)) => {
            let d: num_bigint::BigInt = d.trim().parse().ok()?;
            if num_traits::Zero::is_zero(&d) {
                return None;
            }
            Rational::new(n.trim().parse().ok()?, d)
        }
        None => Rational::from_integer(s.parse().ok()?),
    };
    Some(r)
}

impl WireScalar for Rational {
    fn to_json(&self) -> Value {
        Value::String(rational_to_string(self))
    }

    fn from_json(v: &Value, path: &str) -> Result<Self, WireError> {
        v.as_str()
            .and_then(parse_rational)
            .ok_or_else(|| bad(path, "expected a rational string \"a/b\""))
    }
}

impl WireScalar for Padic {
    fn to_json(&self) -> Value {
        match self.as_exact() {
            Some(r) => r.to_json(),
            None => json!({
                "p": self.prime().expect("approximate"),
                "val": self.valuation().expect("approximate"),
                "digits": self.digits().expect("approximate"),
                "prec": self.precision().expect("approximate"),
            }),
        }
    }

    fn from_json(v: &Value, path: &str) -> Result<Self, WireError> {
        if v.is_string() {
            return Rational::from_json(v, path).map(Padic::exact);
        }
        let o = v
            .as_object()
            .ok_or_else(|| bad(path, "expected a p-adic object or rational string"))?;
        let int = |k: &str| {
            o.get(k)
                .and_then(Value::as_i64)
                .ok_or_else(|| bad(&format!("{path}.{k}"), "expected an integer"))
        };
        let p = int("p")?;
        let val = int("val")?;
        let digits = o
            .get("digits")
            .and_then(Value::as_array)
            .ok_or_else(|| bad(&format!("{path}.digits"), "expected a digit array"))?
            .iter()
            .map(|d| d.as_u64().ok_or_else(|| bad(&format!("{path}.digits"), "expected nonnegative digits")))
            .collect::<Result<Vec<_>, _>>()?;
        let prec = match o.get("prec") {
            Some(_) => int("prec")?,
            None => digits.len() as i64,
        };
        if p < 2 || prec < 0 || prec > u32::MAX as i64 {
            return Err(bad(path, "prime or precision out of range"));
        }
        Padic::from_digits(p as u64, val, &digits, prec as u32).map_err(|e| bad(path, e.to_string()))
    }
}

impl<S: WireScalar> WireScalar for EllPoly<S> {
    fn to_json(&self) -> Value {
        Value::Array(self.coeffs().iter().map(S::to_json).collect())
    }

    /// Accepts a coefficient array, or a bare scalar as a constant.
    fn from_json(v: &Value, path: &str) -> Result<Self, WireError> {
        match v.as_array() {
            Some(cs) => Ok(EllPoly::new(
                cs.iter()
                    .enumerate()
                    .map(|(k, c)| S::from_json(c, &format!("{path}[{k}]")))
                    .collect::<Result<_, _>>()?,
            )),
            None => S::from_json(v, path).map(EllPoly::constant),
        }
    }
}

/// Converts rational scalars to approximate p-adics at `(p, prec)` and
/// passes everything else through.
pub fn localize(x: &Padic, p: u64, prec: u32) -> Result<Padic, PadicError> {
    match x.as_exact() {
        Some(r) => Padic::approx(r, p, prec),
        None => Ok(x.clone()),
    }
}

fn word_key(w: &[usize]) -> String {
    w.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn parse_word_key(k: &str, dim: usize, path: &str) -> Result<Vec<usize>, WireError> {
    if k.is_empty() {
        return Ok(Vec::new());
    }
    k.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(i) if (1..=dim).contains(&i) => Ok(i - 1),
            _ => Err(bad(path, format!("bad word key `{k}`"))),
        })
        .collect()
}

/// `{"n": level, "alphabet": size, "coeffs": {"": c, "1": c, "1,2": c, …}}`
/// with 1-based letters; absent words are zero.
pub fn tensor_to_json<S: WireScalar>(t: &TruncatedTensor<S>) -> Value {
    let coeffs: Map<String, Value> = t.iter().map(|(w, c)| (word_key(&w), c.to_json())).collect();
    json!({ "n": t.level(), "alphabet": t.dim(), "coeffs": coeffs })
}

fn get<'a>(o: &'a Map<String, Value>, k: &str, path: &str) -> Result<&'a Value, WireError> {
    o.get(k).ok_or_else(|| bad(path, format!("missing `{k}`")))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, WireError> {
    v.as_object().ok_or_else(|| bad(path, "expected an object"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize, WireError> {
    v.as_u64()
        .map(|x| x as usize)
        .or_else(|| v.as_str().and_then(|s| s.parse().ok()))
        .ok_or_else(|| bad(path, "expected a nonnegative integer"))
}

fn as_string_list(v: &Value, path: &str) -> Result<Vec<String>, WireError> {
    v.as_array()
        .ok_or_else(|| bad(path, "expected an array of strings"))?
        .iter()
        .map(|s| s.as_str().map(str::to_string).ok_or_else(|| bad(path, "expected a string")))
        .collect()
}

pub fn tensor_from_json<S: WireScalar>(v: &Value, path: &str) -> Result<TruncatedTensor<S>, WireError> {
    let o = as_object(v, path)?;
    let level = as_usize(get(o, "n", path)?, &format!("{path}.n"))?;
    let dim = as_usize(get(o, "alphabet", path)?, &format!("{path}.alphabet"))?;
    let mut t = TruncatedTensor::zero(dim, level);
    for (k, c) in as_object(get(o, "coeffs", path)?, &format!("{path}.coeffs"))? {
        let cpath = format!("{path}.coeffs[\"{k}\"]");
        let w = parse_word_key(k, dim, &cpath)?;
        t.set(&w, S::from_json(c, &cpath)?)
            .map_err(|e| bad(&cpath, e.to_string()))?;
    }
    Ok(t)
}

pub fn graph_from_json(v: &Value) -> Result<Graph, Error> {
    let spec: GraphSpec = serde_json::from_value(v.clone())?;
    Ok(Graph::build(&spec)?)
}

pub fn graph_to_json(g: &Graph) -> Value {
    serde_json::to_value(g.to_spec()).expect("graph specs serialize")
}

/// `{"edge_values": {edge_id: "a/b", …}}`; missing edges are zero.
pub fn form_to_json(g: &Graph, f: &TropicalOneForm) -> Value {
    let vals: Map<String, Value> = (0..g.edge_count())
        .map(|e| (g.edge_id(e).to_string(), f.values()[e].to_json()))
        .collect();
    json!({ "edge_values": vals })
}

pub fn form_from_json(g: &Graph, v: &Value, path: &str) -> Result<TropicalOneForm, Error> {
    let o = as_object(v, path)?;
    let vals = as_object(get(o, "edge_values", path)?, path)?;
    let mut values = vec![Rational::zero(); g.edge_count()];
    for (id, c) in vals {
        values[g.edge(id)?] = Rational::from_json(c, &format!("{path}.edge_values.{id}"))?;
    }
    Ok(TropicalOneForm::new(g, values)?)
}

/// Either a list of forms or `{"forms": [...]}`.
pub fn forms_from_json(g: &Graph, v: &Value) -> Result<Vec<TropicalOneForm>, Error> {
    let list = match v {
        Value::Object(o) => get(o, "forms", "$")?,
        other => other,
    };
    list.as_array()
        .ok_or_else(|| bad("$", "expected an array of forms"))?
        .iter()
        .enumerate()
        .map(|(i, f)| form_from_json(g, f, &format!("$[{i}]")))
        .collect()
}

/// `[{"shape": [r, c], "entries": [[form or 0, …], …]}, …]`.
pub fn multiform_from_json(g: &Graph, v: &Value) -> Result<TropicalMultiform, Error> {
    let layers = v.as_array().ok_or_else(|| bad("$", "expected an array of layers"))?;
    let mut out = Vec::new();
    for (i, l) in layers.iter().enumerate() {
        let path = format!("$[{i}]");
        let o = as_object(l, &path)?;
        let shape = get(o, "shape", &path)?
            .as_array()
            .filter(|s| s.len() == 2)
            .ok_or_else(|| bad(&path, "shape must be [rows, cols]"))?;
        let rows = as_usize(&shape[0], &path)?;
        let cols = as_usize(&shape[1], &path)?;
        let entries = get(o, "entries", &path)?
            .as_array()
            .ok_or_else(|| bad(&path, "entries must be an array of rows"))?;
        if entries.len() != rows {
            return Err(IintError::RaggedFormMatrix {
                got: entries.len(),
                want: rows,
            }
            .into());
        }
        let mut flat = Vec::with_capacity(rows * cols);
        for (r, row) in entries.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| bad(&path, "entries must be an array of rows"))?;
            if row.len() != cols {
                return Err(IintError::RaggedFormMatrix {
                    got: row.len(),
                    want: cols,
                }
                .into());
            }
            for (c, e) in row.iter().enumerate() {
                let epath = format!("{path}.entries[{r}][{c}]");
                flat.push(match e {
                    Value::Number(n) if n.as_u64() == Some(0) => None,
                    Value::String(s) if s.trim() == "0" => None,
                    other => Some(form_from_json(g, other, &epath)?),
                });
            }
        }
        out.push(FormMatrix::new(rows, cols, flat)?);
    }
    Ok(TropicalMultiform::new(out)?)
}

pub fn period_table_to_json<S: WireScalar>(t: &PeriodTable<S>) -> Value {
    let loops: Map<String, Value> = t
        .loops()
        .iter()
        .map(|(k, v)| (k.clone(), tensor_to_json(v)))
        .collect();
    let path = t.path();
    json!({
        "n": t.level(),
        "forms": t.forms(),
        "loops": loops,
        "path": {
            "from": path.from,
            "to": path.to,
            "edges": path.edges,
            "periods": tensor_to_json(&path.periods),
        },
    })
}

pub fn period_table_from_json<S: WireScalar>(v: &Value) -> Result<PeriodTable<S>, Error> {
    let o = as_object(v, "$")?;
    let level = as_usize(get(o, "n", "$")?, "$.n")?;
    let forms = as_string_list(get(o, "forms", "$")?, "$.forms")?;
    let mut loops = BTreeMap::new();
    for (id, t) in as_object(get(o, "loops", "$")?, "$.loops")? {
        loops.insert(id.clone(), tensor_from_json(t, &format!("$.loops.{id}"))?);
    }
    let p = as_object(get(o, "path", "$")?, "$.path")?;
    let s = |k: &str| {
        get(p, k, "$.path")?
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| bad(&format!("$.path.{k}"), "expected a string"))
    };
    let edges = match get(p, "edges", "$.path")? {
        Value::String(s) => s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect(),
        other => as_string_list(other, "$.path.edges")?,
    };
    let path = BasePath {
        from: s("from")?,
        to: s("to")?,
        edges,
        periods: tensor_from_json(get(p, "periods", "$.path")?, "$.path.periods")?,
    };
    Ok(PeriodTable::new(level, forms, loops, path)?)
}

/// Monomial coefficients keyed by loop-id words joined with `*`
/// (`""` for the unit), plus the loops themselves as edge words.
pub fn correction_to_json(g: &Graph, q: &CanonicalCorrection, loop_ids: &[String]) -> Value {
    let coeffs: Map<String, Value> = q
        .coeffs
        .iter()
        .map(|(w, c)| {
            let key = w.iter().map(|&i| loop_ids[i].as_str()).collect::<Vec<_>>().join("*");
            (key, c.to_json())
        })
        .collect();
    let loops: Map<String, Value> = loop_ids
        .iter()
        .zip(&q.loops)
        .map(|(id, l)| (id.clone(), json!(l.format(g))))
        .collect();
    json!({
        "base": g.vertex_id(q.base),
        "n": q.level,
        "loops": loops,
        "coeffs": coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{rat, ratio};
    use crate::graph::tests::theta;

    #[test]
    fn rationals() {
        for r in [rat(0), rat(-3), ratio(7, -21)] {
            assert_eq!(Rational::from_json(&r.to_json(), "$").unwrap(), r);
        }
        assert_eq!(rat(5).to_json(), json!("5/1"));
        assert_eq!(parse_rational(" -4 "), Some(rat(-4)));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn padics() {
        let x = Padic::approx(&ratio(-7, 25), 5, 8).unwrap();
        let v = x.to_json();
        assert_eq!(v["val"], json!(-2));
        assert_eq!(v["prec"], json!(8));
        let y = Padic::from_json(&v, "$").unwrap();
        assert_eq!(y.to_json(), v);
        let z = &x - &x;
        assert_eq!(Padic::from_json(&z.to_json(), "$").unwrap().to_json(), z.to_json());
        assert!(Padic::from_json(&json!({"p": 5, "val": 0, "digits": [7]}), "$").is_err());
        assert_eq!(Padic::from_json(&json!("3/4"), "$").unwrap(), Padic::exact(ratio(3, 4)));
    }

    #[test]
    fn tensors() {
        let mut t = TruncatedTensor::<EllPoly<Rational>>::one(2, 2);
        t.set(&[1, 0], EllPoly::new(vec![rat(1), ratio(1, 2)])).unwrap();
        let v = tensor_to_json(&t);
        assert_eq!(v["coeffs"]["2,1"], json!(["1/1", "1/2"]));
        assert_eq!(v["coeffs"][""], json!(["1/1"]));
        assert_eq!(tensor_from_json::<EllPoly<Rational>>(&v, "$").unwrap(), t);
        let bad_key = json!({"n": 1, "alphabet": 1, "coeffs": {"2": "1"}});
        assert!(tensor_from_json::<Rational>(&bad_key, "$").is_err());
    }

    #[test]
    fn forms_and_multiforms() {
        let g = theta();
        let f = form_from_json(&g, &json!({"edge_values": {"e1": "1", "e2": "-1"}}), "$").unwrap();
        assert_eq!(form_from_json(&g, &form_to_json(&g, &f), "$").unwrap(), f);
        assert!(form_from_json(&g, &json!({"edge_values": {"e1": "1"}}), "$").is_err());
        let mf = json!([{"shape": [1, 2], "entries": [[{"edge_values": {"e1": "1", "e2": "-1"}}, 0]]}]);
        assert_eq!(multiform_from_json(&g, &mf).unwrap().shape(), Some((1, 2)));
        let ragged = json!([{"shape": [1, 2], "entries": [[0]]}]);
        assert_eq!(multiform_from_json(&g, &ragged).unwrap_err().code(), "ShapeMismatch");
    }

    #[test]
    fn error_codes() {
        let e: Error = VolError::UnknownGenerator("x".into()).into();
        assert_eq!(e.code(), "UnknownGenerator");
        assert!(!e.is_malformed());
        let e: Error = bad("$", "x").into();
        assert!(e.is_malformed());
    }
}
