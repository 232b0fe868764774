//! Canonical JSON encoding of generated values.
//!
//! | value  | encoding                                                     |
//! |--------|--------------------------------------------------------------|
//! | int    | `{"t":"int","v":"<decimal>"}`                                |
//! | float  | `{"t":"float","num":"<decimal>","den":"<decimal>"}` or       |
//! |        | `{"t":"float","special":"nan"\|"inf"\|"-inf"\|"-0"}`         |
//! | str    | `{"t":"str","v":"..."}`                                      |
//! | bytes  | `{"t":"bytes","v":[0..255, ...]}`                            |
//! | bool   | `{"t":"bool","v":true}`                                      |
//! | none   | `{"t":"none"}`                                               |
//! | list   | `{"t":"list","v":[...]}`                                     |
//! | tuple  | `{"t":"tuple","v":[...]}`                                    |
//! | map    | `{"t":"map","v":[[k,v], ...]}`                               |
//! | record | `{"t":"record","class":"m.c","fields":{"a":..., ...}}`       |
//!
//! Decoding accepts only the canonical form: decimal strings without sign
//! padding or leading zeros, floats in lowest terms with a positive
//! denominator, and maps without duplicate keys.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::value::{FloatValue, GeneratedValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("decode error at {path}: {message}")]
pub struct WireError {
    pub path: String,
    pub message: String,
}

pub fn to_json(v: &GeneratedValue) -> Value {
    use GeneratedValue as V;
    match v {
        V::Int(i) => json!({"t": "int", "v": i.to_string()}),
        V::Float(f) => match f {
            FloatValue::Rational(r) => {
                json!({"t": "float", "num": r.numer().to_string(), "den": r.denom().to_string()})
            }
            FloatValue::Nan => json!({"t": "float", "special": "nan"}),
            FloatValue::PosInf => json!({"t": "float", "special": "inf"}),
            FloatValue::NegInf => json!({"t": "float", "special": "-inf"}),
            FloatValue::NegZero => json!({"t": "float", "special": "-0"}),
        },
        V::Str(s) => json!({"t": "str", "v": s}),
        V::Bytes(b) => json!({"t": "bytes", "v": b}),
        V::Bool(b) => json!({"t": "bool", "v": b}),
        V::None => json!({"t": "none"}),
        V::List(items) => json!({"t": "list", "v": items.iter().map(to_json).collect::<Vec<_>>()}),
        V::Tuple(items) => json!({"t": "tuple", "v": items.iter().map(to_json).collect::<Vec<_>>()}),
        V::Map(entries) => json!({
            "t": "map",
            "v": entries.iter().map(|(k, v)| json!([to_json(k), to_json(v)])).collect::<Vec<_>>(),
        }),
        V::Record { class, fields } => {
            let fields: Map<String, Value> = fields.iter().map(|(n, v)| (n.clone(), to_json(v))).collect();
            json!({"t": "record", "class": class, "fields": fields})
        }
    }
}

pub fn encode_value(v: &GeneratedValue) -> String {
    to_json(v).to_string()
}

pub fn decode_value(text: &str) -> Result<GeneratedValue, WireError> {
    let value: Value = serde_json::from_str(text).map_err(|e| WireError {
        path: "$".into(),
        message: e.to_string(),
    })?;
    from_json(&value)
}

pub fn from_json(value: &Value) -> Result<GeneratedValue, WireError> {
    decode_at(value, "$")
}

fn fail<T>(path: &str, message: impl Into<String>) -> Result<T, WireError> {
    Err(WireError {
        path: path.to_string(),
        message: message.into(),
    })
}

fn expect_keys(obj: &Map<String, Value>, keys: &[&str], path: &str) -> Result<(), WireError> {
    for k in obj.keys() {
        if !keys.contains(&k.as_str()) {
            return fail(path, format!("unexpected key '{k}'"));
        }
    }
    for k in keys {
        if !obj.contains_key(*k) {
            return fail(path, format!("missing key '{k}'"));
        }
    }
    Ok(())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> &'a Value {
    &obj[key]
}

fn decimal(value: &Value, path: &str) -> Result<BigInt, WireError> {
    let Some(s) = value.as_str() else {
        return fail(path, "expected a decimal string");
    };
    let digits = s.strip_prefix('-').unwrap_or(s);
    let canonical = !digits.is_empty()
        && digits.bytes().all(|b| b.is_ascii_digit())
        && (digits == "0" || !digits.starts_with('0'))
        && s != "-0";
    if !canonical {
        return fail(path, format!("'{s}' is not a canonical decimal integer"));
    }
    Ok(s.parse().expect("validated decimal"))
}

fn array<'a>(value: &'a Value, path: &str) -> Result<&'a Vec<Value>, WireError> {
    value.as_array().map_or_else(|| fail(path, "expected an array"), Ok)
}

fn items(value: &Value, path: &str) -> Result<Vec<GeneratedValue>, WireError> {
    array(value, path)?
        .iter()
        .enumerate()
        .map(|(i, v)| decode_at(v, &format!("{path}[{i}]")))
        .collect()
}

fn decode_at(value: &Value, path: &str) -> Result<GeneratedValue, WireError> {
    use GeneratedValue as V;
    let Some(obj) = value.as_object() else {
        return fail(path, "expected an object");
    };
    let Some(tag) = obj.get("t").and_then(Value::as_str) else {
        return fail(path, "missing string tag 't'");
    };
    let vpath = format!("{path}.v");
    Ok(match tag {
        "int" => {
            expect_keys(obj, &["t", "v"], path)?;
            V::Int(decimal(field(obj, "v"), &vpath)?)
        }
        "float" if obj.contains_key("special") => {
            expect_keys(obj, &["t", "special"], path)?;
            V::Float(match field(obj, "special").as_str() {
                Some("nan") => FloatValue::Nan,
                Some("inf") => FloatValue::PosInf,
                Some("-inf") => FloatValue::NegInf,
                Some("-0") => FloatValue::NegZero,
                _ => return fail(&format!("{path}.special"), "expected one of nan, inf, -inf, -0"),
            })
        }
        "float" => {
            expect_keys(obj, &["t", "num", "den"], path)?;
            let num = decimal(field(obj, "num"), &format!("{path}.num"))?;
            let den = decimal(field(obj, "den"), &format!("{path}.den"))?;
            if !den.is_positive() {
                return fail(&format!("{path}.den"), "denominator must be positive");
            }
            if !num.gcd(&den).is_one() {
                return fail(path, "rational is not in lowest terms");
            }
            V::Float(FloatValue::Rational(BigRational::new_raw(num, den)))
        }
        "str" => {
            expect_keys(obj, &["t", "v"], path)?;
            match field(obj, "v").as_str() {
                Some(s) => V::Str(s.to_string()),
                None => return fail(&vpath, "expected a string"),
            }
        }
        "bytes" => {
            expect_keys(obj, &["t", "v"], path)?;
            let bytes = array(field(obj, "v"), &vpath)?
                .iter()
                .enumerate()
                .map(|(i, b)| match b.as_u64() {
                    Some(b) if b < 256 => Ok(b as u8),
                    _ => fail(&format!("{vpath}[{i}]"), "expected an integer in [0, 255]"),
                })
                .collect::<Result<_, _>>()?;
            V::Bytes(bytes)
        }
        "bool" => {
            expect_keys(obj, &["t", "v"], path)?;
            match field(obj, "v").as_bool() {
                Some(b) => V::Bool(b),
                None => return fail(&vpath, "expected a boolean"),
            }
        }
        "none" => {
            expect_keys(obj, &["t"], path)?;
            V::None
        }
        "list" => {
            expect_keys(obj, &["t", "v"], path)?;
            V::List(items(field(obj, "v"), &vpath)?)
        }
        "tuple" => {
            expect_keys(obj, &["t", "v"], path)?;
            V::Tuple(items(field(obj, "v"), &vpath)?)
        }
        "map" => {
            expect_keys(obj, &["t", "v"], path)?;
            let mut seen = HashSet::new();
            let mut entries = Vec::new();
            for (i, pair) in array(field(obj, "v"), &vpath)?.iter().enumerate() {
                let ppath = format!("{vpath}[{i}]");
                let pair = array(pair, &ppath)?;
                if pair.len() != 2 {
                    return fail(&ppath, "expected a [key, value] pair");
                }
                let key = decode_at(&pair[0], &format!("{ppath}[0]"))?;
                if !seen.insert(key.clone()) {
                    return fail(&ppath, "duplicate map key");
                }
                entries.push((key, decode_at(&pair[1], &format!("{ppath}[1]"))?));
            }
            V::Map(entries)
        }
        "record" => {
            expect_keys(obj, &["t", "class", "fields"], path)?;
            let Some(class) = field(obj, "class").as_str() else {
                return fail(&format!("{path}.class"), "expected a string");
            };
            let Some(fields) = field(obj, "fields").as_object() else {
                return fail(&format!("{path}.fields"), "expected an object");
            };
            let fields = fields
                .iter()
                .map(|(name, v)| Ok((name.clone(), decode_at(v, &format!("{path}.fields.{name}"))?)))
                .collect::<Result<_, WireError>>()?;
            V::Record {
                class: class.to_string(),
                fields,
            }
        }
        other => return fail(&format!("{path}.t"), format!("unknown tag '{other}'")),
    })
}
