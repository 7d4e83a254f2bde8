use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::algebra::{GradedPoly, Generator, Q};
use crate::error::{Error, Result};
use crate::jet::Signature;

pub const SCHEMA_VERSION: u64 = 1;

/// {"schema": 1, "terms": [[num, den, [[generator, exponent], …]], …]}
pub fn poly_to_json(p: &GradedPoly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(m, c)| {
            let factors: Vec<Value> = m.factors().iter().map(|(g, e)| json!([g.to_string(), e])).collect();
            json!([c.numer().to_string(), c.denom().to_string(), factors])
        })
        .collect();
    json!({ "schema": SCHEMA_VERSION, "terms": terms })
}

pub fn poly_from_json(v: &Value, sig: &Signature) -> Result<GradedPoly> {
    let bad = |msg: &str| Error::Config(format!("malformed polynomial JSON: {msg}"));
    if v.get("schema").and_then(Value::as_u64) != Some(SCHEMA_VERSION) {
        return Err(bad("unsupported schema"));
    }
    let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))?;
    let mut out = GradedPoly::zero();
    for t in terms {
        let parts = t.as_array().filter(|a| a.len() == 3).ok_or_else(|| bad("term shape"))?;
        let int = |x: &Value| -> Result<BigInt> {
            x.as_str().and_then(|s| s.parse().ok()).ok_or_else(|| bad("coefficient"))
        };
        let c = Q::new(int(&parts[0])?, int(&parts[1])?);
        let mut factors: Vec<(Generator, u32)> = Vec::new();
        for f in parts[2].as_array().ok_or_else(|| bad("factors"))? {
            let pair = f.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("factor shape"))?;
            let name = pair[0].as_str().ok_or_else(|| bad("generator id"))?;
            let e = pair[1].as_u64().ok_or_else(|| bad("exponent"))? as u32;
            let g = super::parse(name, sig)?;
            let (m, c1) = g.terms().next().ok_or_else(|| bad("generator id"))?;
            if g.len() != 1 || m.factors().len() != 1 || *c1 != Q::from_integer(1.into()) {
                return Err(bad("generator id is not canonical"));
            }
            factors.push((m.factors()[0].0.clone(), e));
        }
        out += &GradedPoly::product(&factors, c);
    }
    Ok(out)
}
