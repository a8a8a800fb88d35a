use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::value::Value;

/// One table entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    /// Formally infinite quantity.
    Inf,
    /// The point sits on a phase boundary where the quantity is ambiguous.
    Boundary,
    /// Evaluation failed; the message says why.
    Error(String),
    Text(String),
}

impl Cell {
    /// NaN becomes an error cell and infinities the `Inf` marker, so tables
    /// never hold non-finite floats.
    pub fn num(v: f64) -> Self {
        if v.is_nan() {
            Cell::Error("not a number".into())
        } else if v.is_infinite() {
            Cell::Inf
        } else {
            Cell::Num(v)
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self, Cell::Error(_))
    }

    /// CSV spelling: 17 significant digits, or a marker.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Inf => "inf".into(),
            Cell::Boundary => "boundary".into(),
            Cell::Error(_) => "error".into(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<Value> for Cell {
    fn from(v: Value) -> Self {
        match v {
            Value::Finite(x) => Cell::num(x),
            Value::Infinite => Cell::Inf,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Error(m) => write!(f, "error: {m}"),
            other => f.write_str(&other.to_csv()),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Num(v) => s.serialize_f64(*v),
            Cell::Inf => s.serialize_str("inf"),
            Cell::Boundary => s.serialize_str("boundary"),
            Cell::Error(m) => s.serialize_str(&format!("error: {m}")),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

struct CellVisitor;

impl Visitor<'_> for CellVisitor {
    type Value = Cell;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number or a marker string")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Cell, E> {
        Ok(Cell::Num(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cell, E> {
        Ok(Cell::Num(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cell, E> {
        Ok(Cell::Num(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Cell, E> {
        Ok(match v {
            "inf" => Cell::Inf,
            "boundary" => Cell::Boundary,
            _ => match v.strip_prefix("error: ") {
                Some(m) => Cell::Error(m.to_string()),
                None => Cell::Text(v.to_string()),
            },
        })
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(CellVisitor)
    }
}
