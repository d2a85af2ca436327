//! JSON encodings for arbitrary-precision numbers.
//!
//! Integers are written as JSON numbers while they fit in 64 bits and as
//! decimal strings beyond that; both forms are accepted on input.
//! Rationals are always strings, `"p/q"` or `"p"`.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

pub fn biguint_to_json(v: &BigUint) -> Value {
    match v.to_u64() {
        Some(small) => Value::from(small),
        None => Value::String(v.to_string()),
    }
}

pub fn bigint_to_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(small) => Value::from(small),
        None => Value::String(v.to_string()),
    }
}

pub fn biguint_from_json(v: &Value) -> Result<BigUint, String> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .map(BigUint::from)
            .ok_or_else(|| format!("expected a nonnegative integer, got {n}")),
        Value::String(s) => BigUint::from_str(s).map_err(|e| format!("bad integer {s:?}: {e}")),
        other => Err(format!("expected an integer, got {other}")),
    }
}

pub fn bigint_from_json(v: &Value) -> Result<BigInt, String> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| format!("expected an integer, got {n}")),
        Value::String(s) => BigInt::from_str(s).map_err(|e| format!("bad integer {s:?}: {e}")),
        other => Err(format!("expected an integer, got {other}")),
    }
}

pub fn rational_to_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
            let q = BigInt::from_str(q.trim()).map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
            if q == BigInt::from(0) {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(BigRational::new(p, q))
        }
        None => BigInt::from_str(s).map(BigRational::from_integer).map_err(|e| format!("bad rational {s:?}: {e}")),
    }
}

pub fn rational_from_json(v: &Value) -> Result<BigRational, String> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n
            .as_i64()
            .map(|i| BigRational::from_integer(i.into()))
            .ok_or_else(|| format!("rationals must be integers or \"p/q\" strings, got {n}")),
        other => Err(format!("expected a rational, got {other}")),
    }
}

pub mod biguint {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        biguint_to_json(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        biguint_from_json(&Value::deserialize(d)?).map_err(D::Error::custom)
    }
}

pub mod biguint_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(biguint_to_json).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<Value>::deserialize(d)?
            .iter()
            .map(biguint_from_json)
            .collect::<Result<_, _>>()
            .map_err(D::Error::custom)
    }
}

pub mod biguint_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<BigUint>], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|row| row.iter().map(biguint_to_json).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigUint>>, D::Error> {
        Vec::<Vec<Value>>::deserialize(d)?
            .iter()
            .map(|row| row.iter().map(biguint_from_json).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()
            .map_err(D::Error::custom)
    }
}

pub mod bigint_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(bigint_to_json).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Value>::deserialize(d)?
            .iter()
            .map(bigint_from_json)
            .collect::<Result<_, _>>()
            .map_err(D::Error::custom)
    }
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        rational_from_json(&Value::deserialize(d)?).map_err(D::Error::custom)
    }
}

pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(rational_to_string).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<Value>::deserialize(d)?
            .iter()
            .map(rational_from_json)
            .collect::<Result<_, _>>()
            .map_err(D::Error::custom)
    }
}
