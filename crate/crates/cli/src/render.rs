use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Rational64;
use serde::Serialize;
use serde_json::{Number, Value};
use upadic::padic::{PadicScalar, Valuation};

/// Significant digits shown in table output.
pub const TABLE_DIGITS: u32 = 10;

/// An integer of any size as a JSON number.
pub fn big(n: &BigInt) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("integer literal"))
}

pub fn big_matrix(rows: &[Vec<BigInt>]) -> Value {
    Value::Array(rows.iter().map(|r| Value::Array(r.iter().map(big).collect())).collect())
}

pub fn rational(x: Rational64) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// `p^valuation · unit + O(p^(valuation + relprec))`; `valuation` is null
/// only for an exact zero.
#[derive(Serialize)]
pub struct PadicOut {
    pub valuation: Option<i64>,
    pub unit: String,
    pub relprec: u32,
}

impl From<&PadicScalar> for PadicOut {
    fn from(x: &PadicScalar) -> Self {
        PadicOut {
            valuation: match x.valuation() {
                Valuation::Infinite => None,
                Valuation::Finite(v) => Some(v),
            },
            unit: x.unit().to_string(),
            relprec: x.relprec(),
        }
    }
}

pub fn table(x: &PadicScalar) -> String {
    x.to_table_string(TABLE_DIGITS)
}

/// `q + 8528631q^2 + 5×610813q^5 + … + O(q^N)`.
pub fn qexp_line(coeffs: &[PadicScalar]) -> String {
    let mut out = String::new();
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_exact_zero() {
            continue;
        }
        let k = k + 1;
        let text = table(c);
        let coeff = if text == "1" { String::new() } else { text };
        let mono = if k == 1 { "q".to_string() } else { format!("q^{k}") };
        if !out.is_empty() {
            out.push_str(" + ");
        }
        out.push_str(&coeff);
        out.push_str(&mono);
    }
    if !out.is_empty() {
        out.push_str(" + ");
    }
    out.push_str(&format!("O(q^{})", coeffs.len() + 1));
    out
}

pub fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("output serializes");
    s.push('\n');
    s
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}
