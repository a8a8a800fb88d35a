use std::fmt;

use serde::{Deserialize, Serialize};

/// A real quantity that may be formally infinite.
///
/// Used wherever the analytic theory produces a divergence (a vanishing
/// quadrature stiffness, an undefined anisotropy ratio) so that tables never
/// carry floating-point infinities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Finite(f64),
    Infinite,
}

impl Value {
    pub fn finite(self) -> Option<f64> {
        match self {
            Value::Finite(v) => Some(v),
            Value::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Value::Infinite)
    }

    /// Panics on the infinite marker.
    pub fn unwrap(self) -> f64 {
        self.finite().expect("called `Value::unwrap` on an infinite value")
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Finite(v)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Finite(v) => write!(f, "{v}"),
            Value::Infinite => f.write_str("inf"),
        }
    }
}
