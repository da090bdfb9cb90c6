//! Order-preserving YAML tree.
//!
//! serde_yaml's own `Value` keeps map order too, but silently keeps the last
//! of two duplicate keys. This tree records every entry so duplicates can be
//! reported by name.

use std::fmt;

use serde::de::{self, Deserialize, Deserializer, MapAccess, SeqAccess, Visitor};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Yaml {
    Null,
    Bool(bool),
    Int(i128),
    Float(f64),
    Str(String),
    Seq(Vec<Yaml>),
    Map(Vec<(Yaml, Yaml)>),
}

impl Yaml {
    pub(crate) fn describe(&self) -> &'static str {
        match self {
            Yaml::Null => "null",
            Yaml::Bool(_) => "a boolean",
            Yaml::Int(_) => "an integer",
            Yaml::Float(_) => "a float",
            Yaml::Str(_) => "a string",
            Yaml::Seq(_) => "a sequence",
            Yaml::Map(_) => "a mapping",
        }
    }

    /// Scalar rendered back to text, as used for keys and expression strings.
    pub(crate) fn scalar_text(&self) -> Option<String> {
        match self {
            Yaml::Bool(b) => Some(b.to_string()),
            Yaml::Int(i) => Some(i.to_string()),
            Yaml::Float(x) => Some(crate::value::format_float(*x)),
            Yaml::Str(s) => Some(s.clone()),
            _ => None,
        }
    }
}

impl<'de> Deserialize<'de> for Yaml {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(YamlVisitor)
    }
}

struct YamlVisitor;

impl<'de> Visitor<'de> for YamlVisitor {
    type Value = Yaml;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("any YAML value")
    }

    fn visit_bool<E: de::Error>(self, v: bool) -> Result<Yaml, E> {
        Ok(Yaml::Bool(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Yaml, E> {
        Ok(Yaml::Int(v.into()))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Yaml, E> {
        Ok(Yaml::Int(v.into()))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Yaml, E> {
        Ok(Yaml::Float(v))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Yaml, E> {
        Ok(Yaml::Str(v.to_string()))
    }

    fn visit_string<E: de::Error>(self, v: String) -> Result<Yaml, E> {
        Ok(Yaml::Str(v))
    }

    fn visit_unit<E: de::Error>(self) -> Result<Yaml, E> {
        Ok(Yaml::Null)
    }

    fn visit_none<E: de::Error>(self) -> Result<Yaml, E> {
        Ok(Yaml::Null)
    }

    fn visit_some<D: Deserializer<'de>>(self, d: D) -> Result<Yaml, D::Error> {
        Yaml::deserialize(d)
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Yaml, A::Error> {
        let mut items = Vec::new();
        while let Some(item) = seq.next_element()? {
            items.push(item);
        }
        Ok(Yaml::Seq(items))
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Yaml, A::Error> {
        let mut entries = Vec::new();
        while let Some((k, v)) = map.next_entry()? {
            entries.push((k, v));
        }
        Ok(Yaml::Map(entries))
    }

    fn visit_enum<A: de::EnumAccess<'de>>(self, _data: A) -> Result<Yaml, A::Error> {
        Err(de::Error::custom("YAML tags are not supported"))
    }
}

pub(crate) fn from_str(text: &str) -> Result<Yaml, serde_yaml::Error> {
    serde_yaml::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_order_and_duplicates() {
        let y = from_str("b: 1\na: 2\nb: 3\n");
        // serde_yaml itself rejects duplicate keys in a mapping.
        match y {
            Ok(Yaml::Map(entries)) => {
                let keys: Vec<_> = entries.iter().map(|(k, _)| k.clone()).collect();
                assert_eq!(keys.len(), 3);
            }
            Ok(other) => panic!("unexpected {other:?}"),
            Err(e) => assert!(e.to_string().contains("duplicate"), "{e}"),
        }
        let Yaml::Map(entries) = from_str("z: 1\ny: x\nx: [1, 2.5]\n").unwrap() else {
            panic!()
        };
        let keys: Vec<_> = entries.iter().map(|(k, _)| k.scalar_text().unwrap()).collect();
        assert_eq!(keys, ["z", "y", "x"]);
    }

    #[test]
    fn booleans_in_any_case() {
        for text in ["False", "false", "FALSE"] {
            assert_eq!(from_str(text).unwrap(), Yaml::Bool(false), "{text}");
        }
    }

    #[test]
    fn empty_document_is_null() {
        assert_eq!(from_str("").unwrap(), Yaml::Null);
    }
}
