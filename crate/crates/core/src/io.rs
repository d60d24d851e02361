//! JSON interchange: complex numbers as `[re, im]`, matrices as arrays of rows.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::colligation::Colligation;
use crate::error::{Error, Result};
use crate::indefinite::IndefiniteSpace;
use crate::linalg::{self, CMatrix, C64};
use crate::realization::Realization;
use crate::vessel::Vessel;

pub const SCHEMA_VERSION: &str = "1.0";

pub type RawComplex = [f64; 2];
pub type RawMatrix = Vec<Vec<RawComplex>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct VesselRecord {
    #[serde(rename = "A1")]
    pub a1: RawMatrix,
    #[serde(rename = "A2")]
    pub a2: RawMatrix,
    #[serde(rename = "gramState")]
    pub gram: RawMatrix,
    pub phi: RawMatrix,
    pub sigma1: RawMatrix,
    pub sigma2: RawMatrix,
    pub gamma: RawMatrix,
    pub gamma_tilde: RawMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ColligationRecord {
    #[serde(rename = "A")]
    pub a: RawMatrix,
    #[serde(rename = "gramState")]
    pub gram: RawMatrix,
    pub phi: RawMatrix,
    pub sigma: RawMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RealizationRecord {
    #[serde(rename = "A")]
    pub a: RawMatrix,
    #[serde(rename = "B")]
    pub b: RawMatrix,
    #[serde(rename = "C")]
    pub c: RawMatrix,
    #[serde(rename = "D")]
    pub d: RawMatrix,
    #[serde(rename = "gramState")]
    pub state_gram: RawMatrix,
}

/// Input of `realize`: Schur part, Blaschke zeros and signature J.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RealizeInputRecord {
    #[serde(rename = "schurPart")]
    pub schur: RealizationRecord,
    pub zeros: Vec<RawComplex>,
    #[serde(rename = "J")]
    pub j: RawMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Payload {
    Vessel(VesselRecord),
    Colligation(ColligationRecord),
    Realization(RealizationRecord),
    RealizeInput(RealizeInputRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Document {
    pub schema_version: String,
    pub payload: Payload,
    #[serde(default)]
    pub metadata: Map<String, Value>,
}

impl Document {
    pub fn new(payload: Payload) -> Self {
        Self { schema_version: SCHEMA_VERSION.into(), payload, metadata: Map::new() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: Document = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!("unrecognized schemaVersion {:?}", doc.schema_version)));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("documents serialize")
    }

    pub fn vessel(&self) -> Result<Vessel> {
        match &self.payload {
            Payload::Vessel(r) => r.to_vessel(),
            _ => Err(Error::Schema("expected a vessel payload".into())),
        }
    }

    pub fn colligation(&self) -> Result<Colligation> {
        match &self.payload {
            Payload::Colligation(r) => r.to_colligation(),
            _ => Err(Error::Schema("expected a colligation payload".into())),
        }
    }

    pub fn realization(&self) -> Result<Realization> {
        match &self.payload {
            Payload::Realization(r) => r.to_realization(),
            _ => Err(Error::Schema("expected a realization payload".into())),
        }
    }

    pub fn realize_input(&self) -> Result<(Realization, Vec<C64>, CMatrix)> {
        match &self.payload {
            Payload::RealizeInput(r) => {
                let schur = r.schur.to_realization()?;
                let zeros = r.zeros.iter().map(|z| complex_from_raw(*z, "zeros")).collect::<Result<_>>()?;
                let j = matrix_from_raw(&r.j, None, "j")?;
                Ok((schur, zeros, j))
            }
            _ => Err(Error::Schema("expected a realizeInput payload".into())),
        }
    }
}

pub fn complex_from_raw(z: RawComplex, what: &str) -> Result<C64> {
    if !(z[0].is_finite() && z[1].is_finite()) {
        return Err(Error::Schema(format!("non-finite entry in {what}")));
    }
    Ok(C64::new(z[0], z[1]))
}

pub fn complex_to_raw(z: C64) -> RawComplex {
    [z.re, z.im]
}

/// Rows must be rectangular; `cols` fixes the width of a matrix with no rows.
pub fn matrix_from_raw(raw: &RawMatrix, cols: Option<usize>, what: &str) -> Result<CMatrix> {
    let r = raw.len();
    let k = raw.first().map(Vec::len).or(cols).unwrap_or(0);
    if raw.iter().any(|row| row.len() != k) {
        return Err(Error::Schema(format!("{what} is not rectangular")));
    }
    if let Some(c) = cols {
        if r > 0 && k != c {
            return Err(Error::Schema(format!("{what} must have {c} columns, found {k}")));
        }
    }
    let mut m = linalg::zeros(r, k);
    for (i, row) in raw.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            m[(i, j)] = complex_from_raw(*z, what)?;
        }
    }
    Ok(m)
}

pub fn matrix_to_raw(m: &CMatrix) -> RawMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| complex_to_raw(m[(i, j)])).collect()).collect()
}

impl VesselRecord {
    pub fn from_vessel(v: &Vessel) -> Self {
        Self {
            a1: matrix_to_raw(&v.a1),
            a2: matrix_to_raw(&v.a2),
            gram: matrix_to_raw(v.state.gram()),
            phi: matrix_to_raw(&v.phi),
            sigma1: matrix_to_raw(&v.sigma1),
            sigma2: matrix_to_raw(&v.sigma2),
            gamma: matrix_to_raw(&v.gamma),
            gamma_tilde: matrix_to_raw(&v.gamma_tilde),
        }
    }

    pub fn to_vessel(&self) -> Result<Vessel> {
        let n = self.gram.len();
        let m = self.sigma1.len();
        let sq = |raw: &RawMatrix, k: usize, what: &str| matrix_from_raw(raw, Some(k), what);
        let gram = sq(&self.gram, n, "gramState")?;
        Vessel::new(
            sq(&self.a1, n, "A1")?,
            sq(&self.a2, n, "A2")?,
            IndefiniteSpace::new(gram, crate::DEFAULT_TOL)?,
            sq(&self.phi, n, "phi")?,
            sq(&self.sigma1, m, "sigma1")?,
            sq(&self.sigma2, m, "sigma2")?,
            sq(&self.gamma, m, "gamma")?,
            sq(&self.gamma_tilde, m, "gammaTilde")?,
        )
    }
}

impl ColligationRecord {
    pub fn from_colligation(c: &Colligation) -> Self {
        Self {
            a: matrix_to_raw(&c.a),
            gram: matrix_to_raw(c.state.gram()),
            phi: matrix_to_raw(&c.phi),
            sigma: matrix_to_raw(&c.sigma),
        }
    }

    pub fn to_colligation(&self) -> Result<Colligation> {
        let n = self.gram.len();
        let m = self.sigma.len();
        let gram = matrix_from_raw(&self.gram, Some(n), "gramState")?;
        Colligation::new(
            matrix_from_raw(&self.a, Some(n), "A")?,
            IndefiniteSpace::new(gram, crate::DEFAULT_TOL)?,
            matrix_from_raw(&self.phi, Some(n), "phi")?,
            matrix_from_raw(&self.sigma, Some(m), "sigma")?,
        )
    }
}

impl RealizationRecord {
    pub fn from_realization(r: &Realization) -> Self {
        Self {
            a: matrix_to_raw(&r.a),
            b: matrix_to_raw(&r.b),
            c: matrix_to_raw(&r.c),
            d: matrix_to_raw(&r.d),
            state_gram: matrix_to_raw(&r.state_gram),
        }
    }

    pub fn to_realization(&self) -> Result<Realization> {
        let n = self.a.len();
        let m = self.d.len();
        Realization::new(
            matrix_from_raw(&self.a, Some(n), "A")?,
            matrix_from_raw(&self.b, Some(m), "B")?,
            matrix_from_raw(&self.c, Some(n), "C")?,
            matrix_from_raw(&self.d, Some(m), "D")?,
            matrix_from_raw(&self.state_gram, Some(n), "gramState")?,
        )
    }
}

/// Deterministic JSON text: object keys sorted, every float as `{:.16e}`
/// (17 significant digits, exact round trip), integers verbatim.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_canonical(v, &mut out);
    out
}

fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().unwrap_or(0.0);
                out.push_str(&format!("{x:.16e}"));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(x, out);
            }
            out.push(']');
        }
        Value::Object(o) => {
            let mut keys: Vec<&String> = o.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_canonical(&o[k], out);
            }
            out.push('}');
        }
    }
}

/// JSON number for a float; non-finite values become null.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn complex_json(z: C64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

pub fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_json(m[(i, j)])).collect()))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::example_vessel;

    #[test]
    fn vessel_round_trip() {
        let v = example_vessel();
        let doc = Document::new(Payload::Vessel(VesselRecord::from_vessel(&v)));
        let text = canonical_json(&doc.to_json());
        let back = Document::parse(&text).unwrap().vessel().unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = r#"{"schemaVersion":"9","payload":{"kind":"colligation","A":[],"gramState":[],"phi":[],"sigma":[]}}"#;
        assert!(matches!(Document::parse(bad), Err(Error::Schema(_))));
        let ragged = vec![vec![[1.0, 0.0]], vec![]];
        assert!(matrix_from_raw(&ragged, None, "x").is_err());
        assert!(matrix_from_raw(&vec![vec![[f64::NAN, 0.0]]], None, "x").is_err());
        assert!(Document::parse("{\"schemaVersion\":\"1.0\",\"payload\":{\"kind\":\"vessel\",\"A1\":[[[1e999,0]]]}}").is_err());
    }

    #[test]
    fn canonical_sorted_and_fixed() {
        let v: Value = serde_json::json!({"b": 1.5, "a": [2, -0.1]});
        assert_eq!(canonical_json(&v), "{\"a\":[2,-1.0000000000000001e-1],\"b\":1.5000000000000000e0}");
        assert_eq!(canonical_json(&serde_json::json!({})), "{}");
    }
}
