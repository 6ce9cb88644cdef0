//! Canonical structured text.
//!
//! All files and digests go through JSON with lexicographically sorted
//! object keys and hex-encoded byte strings. Serializing, parsing and
//! serializing again yields identical bytes.

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::hash::{hash32, Digest32};

#[derive(Debug, Error)]
#[error("codec: {0}")]
pub struct CodecError(#[from] serde_json::Error);

/// Compact canonical form, used for hashing and line-delimited records.
pub fn to_canonical<T: Serialize>(value: &T) -> Result<String, CodecError> {
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string(&v)?)
}

/// Human-readable canonical form used for files. Ends with a newline.
pub fn to_canonical_pretty<T: Serialize>(value: &T) -> Result<String, CodecError> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn from_text<T: DeserializeOwned>(text: &str) -> Result<T, CodecError> {
    Ok(serde_json::from_str(text)?)
}

pub fn canonical_digest<T: Serialize>(domain: &[u8], value: &T) -> Result<Digest32, CodecError> {
    Ok(hash32(domain, &[to_canonical(value)?.as_bytes()]))
}

pub mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        hex::decode(String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

pub mod hex32 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let v = hex::decode(String::deserialize(d)?).map_err(serde::de::Error::custom)?;
        v.try_into()
            .map_err(|_| serde::de::Error::custom("expected 32 bytes"))
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;

    #[test]
    fn keys_are_sorted_regardless_of_insertion_order() {
        let mut a = HashMap::new();
        a.insert("zeta", 1);
        a.insert("alpha", 2);
        a.insert("mid", 3);
        assert_eq!(to_canonical(&a).unwrap(), r#"{"alpha":2,"mid":3,"zeta":1}"#);
    }

    #[test]
    fn pretty_form_is_a_fixed_point() {
        let text =
            to_canonical_pretty(&serde_json::json!({"b": [1, 2], "a": {"y": "x", "c": null}}))
                .unwrap();
        let back: serde_json::Value = from_text(&text).unwrap();
        assert_eq!(to_canonical_pretty(&back).unwrap(), text);
    }
}
