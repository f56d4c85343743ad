//! JSON helpers for arbitrary-size integers.

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub(crate) fn to_number(v: &BigInt) -> serde_json::Number {
    v.to_string().parse().expect("decimal integer is a JSON number")
}

pub fn ser_bigint<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    to_number(v).serialize(s)
}

pub fn de_bigint<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    let n = serde_json::Number::deserialize(d)?;
    n.as_str().parse().map_err(serde::de::Error::custom)
}
