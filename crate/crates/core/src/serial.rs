//! Canonical JSON forms. Rationals are decimal strings, object keys are
//! sorted, terms are listed in decreasing order, so output is byte-stable.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactring::{
    fmt_rational, parse_rational, LocalizedElement, MasterRing, MinorId, Monomial, Polynomial, Rational,
    VariableRegistry,
};
use crate::flagcomb::{AdmissibleChain, AdmissibleSequence, FlagType};
use crate::flagmatrix::RingMatrix;
use crate::freealg::{gen_id, NCPolynomial, Word};

pub const SCHEMA: &str = "flagforge/1";

/// Wraps a payload object with the schema tag.
pub fn envelope(mut body: Value) -> Value {
    if let Value::Object(map) = &mut body {
        map.insert("schema".into(), Value::String(SCHEMA.into()));
    }
    body
}

pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn bad(what: &str) -> Error {
    Error::Parse(format!("malformed {what} JSON"))
}

pub fn rational_to_json(q: &Rational) -> Value {
    Value::String(fmt_rational(q))
}

fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| bad("rational")),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().expect("checked").into())),
        _ => Err(bad("rational")),
    }
}

fn numer_denom(q: &Rational) -> (Value, Value) {
    (Value::String(q.numer().to_string()), Value::String(q.denom().to_string()))
}

fn monomial_to_json(reg: &VariableRegistry, m: &Monomial) -> Value {
    Value::Array(
        m.exponents().iter().enumerate().filter(|(_, &e)| e > 0).map(|(v, &e)| json!([reg.name(v), e])).collect(),
    )
}

/// `[[num, den, [[var, exp], …]], …]`, leading term first.
pub fn poly_to_json(p: &Polynomial) -> Value {
    Value::Array(
        p.terms()
            .map(|(m, c)| {
                let (n, d) = numer_denom(c);
                json!([n, d, monomial_to_json(p.registry(), m)])
            })
            .collect(),
    )
}

pub fn poly_from_json(v: &Value, reg: &Arc<VariableRegistry>) -> Result<Polynomial> {
    let terms = v.as_array().ok_or_else(|| bad("polynomial"))?;
    let mut out = Polynomial::zero(reg);
    for t in terms {
        let t = t.as_array().filter(|t| t.len() == 3).ok_or_else(|| bad("term"))?;
        let c = rational_from_json(&t[0])? / rational_from_json(&t[1])?;
        let mut exps = vec![0u32; reg.len()];
        for f in t[2].as_array().ok_or_else(|| bad("monomial"))? {
            let f = f.as_array().filter(|f| f.len() == 2).ok_or_else(|| bad("monomial"))?;
            let name = f[0].as_str().ok_or_else(|| bad("monomial"))?;
            let v = reg.index_of(name).ok_or_else(|| Error::Parse(format!("unknown variable `{name}`")))?;
            let e = f[1].as_u64().ok_or_else(|| bad("exponent"))?;
            exps[v] += u32::try_from(e).map_err(|_| bad("exponent"))?;
        }
        out = &out + &Polynomial::from_terms(reg, [(Monomial::from_exponents(&exps), c)]);
    }
    Ok(out)
}

/// `{"numerator": terms, "denominator": [[minor_id, exp], …]}` with 1-based ids.
pub fn localized_to_json(e: &LocalizedElement) -> Value {
    json!({
        "numerator": poly_to_json(e.numerator()),
        "denominator": e.denominator().map(|(k, x)| json!([k.0 + 1, x])).collect::<Vec<_>>(),
    })
}

pub fn localized_from_json(v: &Value, ring: &Arc<MasterRing>) -> Result<LocalizedElement> {
    let num = poly_from_json(v.get("numerator").ok_or_else(|| bad("element"))?, ring.registry())?;
    let mut den = Vec::new();
    if let Some(d) = v.get("denominator") {
        for f in d.as_array().ok_or_else(|| bad("denominator"))? {
            let f = f.as_array().filter(|f| f.len() == 2).ok_or_else(|| bad("denominator"))?;
            let k = f[0].as_u64().filter(|&k| k >= 1).ok_or_else(|| bad("minor id"))?;
            let e = f[1].as_u64().ok_or_else(|| bad("exponent"))?;
            den.push((MinorId(k as usize - 1), u32::try_from(e).map_err(|_| bad("exponent"))?));
        }
    }
    ring.element(num, den)
}

pub fn matrix_to_json(m: &RingMatrix) -> Value {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": m.entries().iter().map(|r| r.iter().map(localized_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

/// `[[num, den, [gen, …]], …]`, leading word first.
pub fn nc_to_json(p: &NCPolynomial) -> Value {
    Value::Array(
        p.terms()
            .map(|(w, c)| {
                let (n, d) = numer_denom(c);
                json!([n, d, p.word_names(w)])
            })
            .collect(),
    )
}

pub fn nc_from_json(v: &Value, ring: &Arc<MasterRing>) -> Result<NCPolynomial> {
    let terms = v.as_array().ok_or_else(|| bad("noncommutative polynomial"))?;
    let mut out = NCPolynomial::zero(ring);
    for t in terms {
        let t = t.as_array().filter(|t| t.len() == 3).ok_or_else(|| bad("term"))?;
        let c = rational_from_json(&t[0])? / rational_from_json(&t[1])?;
        let mut ids = Vec::new();
        for g in t[2].as_array().ok_or_else(|| bad("word"))? {
            let name = g.as_str().ok_or_else(|| bad("word"))?;
            ids.push(gen_id(ring, name).ok_or_else(|| Error::Parse(format!("unknown generator `{name}`")))?);
        }
        out = &out + &NCPolynomial::monomial(ring, Word::from_slice(&ids), c);
    }
    Ok(out)
}

pub fn flag_type_to_json(ft: &FlagType) -> Value {
    json!({ "d": ft.dims(), "n": ft.n(), "name": ft.to_string() })
}

pub fn sequence_to_json(s: &AdmissibleSequence) -> Value {
    json!({ "d": s.flag_type().dims(), "n": s.flag_type().n(), "subsets": s.subsets(), "label": s.label() })
}

pub fn sequence_from_json(v: &Value) -> Result<AdmissibleSequence> {
    let d: Vec<usize> =
        serde_json::from_value(v.get("d").cloned().ok_or_else(|| bad("sequence"))?).map_err(|_| bad("sequence"))?;
    let n: usize =
        serde_json::from_value(v.get("n").cloned().ok_or_else(|| bad("sequence"))?).map_err(|_| bad("sequence"))?;
    let subsets: Vec<Vec<usize>> = serde_json::from_value(v.get("subsets").cloned().ok_or_else(|| bad("sequence"))?)
        .map_err(|_| bad("sequence"))?;
    AdmissibleSequence::new(FlagType::new(d, n)?, subsets)
}

pub fn chain_to_json(c: &AdmissibleChain) -> Value {
    json!({ "sequences": c.sequences().map(sequence_to_json).collect::<Vec<_>>() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_round_trip() {
        let ring = MasterRing::new(&FlagType::grassmannian(2, 4).unwrap());
        let e = ring.parse("(z14 - 3/4*z13*z24)/(z23*(z13*z24 - z14*z23))").unwrap();
        let v = localized_to_json(&e);
        assert_eq!(localized_from_json(&v, &ring).unwrap(), e);
        let nc = NCPolynomial::parse(&ring, "w1*z13 - 2/3*z24*z13").unwrap();
        assert_eq!(nc_from_json(&nc_to_json(&nc), &ring).unwrap(), nc);
        let s = AdmissibleSequence::parse(&FlagType::new(vec![1, 2], 3).unwrap(), "1;1,3").unwrap();
        assert_eq!(sequence_from_json(&sequence_to_json(&s)).unwrap(), s);
    }

    #[test]
    fn canonical_text() {
        let ring = MasterRing::new(&FlagType::grassmannian(2, 4).unwrap());
        let e = ring.parse("-z13/z23").unwrap();
        let s = serde_json::to_string(&envelope(json!({ "value": localized_to_json(&e) }))).unwrap();
        assert_eq!(
            s,
            r#"{"schema":"flagforge/1","value":{"denominator":[[1,1]],"numerator":[["-1","1",[["z13",1]]]]}}"#
        );
    }
}
