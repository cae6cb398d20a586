//! Serde adapter writing `+∞` as the string `"inf"` and NaN as `"nan"`,
//! and reading both back.

use serde::{Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if *x == f64::INFINITY {
        s.serialize_str("inf")
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else {
        s.serialize_f64(*x)
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }
    match Repr::deserialize(d)? {
        Repr::Number(x) => Ok(x),
        Repr::Text(s) if s == "inf" => Ok(f64::INFINITY),
        Repr::Text(s) if s == "nan" => Ok(f64::NAN),
        Repr::Text(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
    }
}
