//! JSON conventions: integers that fit in i64 are JSON numbers, larger ones
//! are decimal strings; rationals are "p/q" strings.

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::matrix::IntMatrix;
use crate::num::{format_rat, parse_rat, Int, Rat};

pub struct IntJson<'a>(pub &'a Int);

impl Serialize for IntJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match i64::try_from(self.0) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

pub fn int_value(x: &Int) -> Value {
    serde_json::to_value(IntJson(x)).expect("integers serialize")
}

pub fn int_array(xs: &[Int]) -> Value {
    Value::Array(xs.iter().map(int_value).collect())
}

pub fn vector_value(v: &LatticeVector) -> Value {
    int_array(v.coords())
}

pub fn rat_array(xs: &[Rat]) -> Value {
    Value::Array(xs.iter().map(|r| Value::String(format_rat(r))).collect())
}

pub fn matrix_value(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| int_array(r)).collect())
}

/// Integer given as a JSON number or decimal string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub Int);

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::Number(n) => n
                .as_i64()
                .map(|v| JsonInt(Int::from(v)))
                .ok_or_else(|| de::Error::custom(format!("{n} is not an integer"))),
            Value::String(s) => s
                .trim()
                .parse()
                .map(JsonInt)
                .map_err(|_| de::Error::custom(format!("`{s}` is not an integer"))),
            other => Err(de::Error::custom(format!("expected an integer, got {other}"))),
        }
    }
}

/// Rational given as a JSON integer or a "p/q" string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonRat(pub Rat);

impl<'de> Deserialize<'de> for JsonRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::Number(n) => n
                .as_i64()
                .map(|v| JsonRat(Rat::from_integer(Int::from(v))))
                .ok_or_else(|| de::Error::custom(format!("{n} is not exact; use a \"p/q\" string"))),
            Value::String(s) => parse_rat(&s).map(JsonRat).map_err(de::Error::custom),
            other => Err(de::Error::custom(format!("expected a rational, got {other}"))),
        }
    }
}

pub fn ints(v: &[JsonInt]) -> Vec<Int> {
    v.iter().map(|x| x.0.clone()).collect()
}

pub fn rats(v: &[JsonRat]) -> Vec<Rat> {
    v.iter().map(|x| x.0.clone()).collect()
}

pub fn matrix_from_json(rows: &[Vec<JsonInt>]) -> Result<IntMatrix> {
    IntMatrix::from_rows(rows.iter().map(|r| ints(r)).collect())
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
