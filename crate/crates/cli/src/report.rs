use std::collections::BTreeMap;
use std::path::Path;

use rabiqpt::Value;
use serde_json::{json, Map};

/// JSON number, or `"inf"` / `"-inf"` / `"nan"` for non-finite values.
pub fn num(v: f64) -> serde_json::Value {
    match serde_json::Number::from_f64(v) {
        Some(n) => serde_json::Value::Number(n),
        None if v.is_nan() => json!("nan"),
        None if v > 0.0 => json!("inf"),
        None => json!("-inf"),
    }
}

pub fn value(v: Value) -> serde_json::Value {
    match v {
        Value::Finite(x) => num(x),
        Value::Infinite => json!("inf"),
    }
}

/// Resolved inputs and named outputs of a single-point command.
pub struct Report {
    pub parameters: BTreeMap<String, f64>,
    pub selection: Option<String>,
    pub fields: Vec<(String, serde_json::Value)>,
}

impl Report {
    pub fn new(parameters: BTreeMap<String, f64>) -> Self {
        Self {
            parameters,
            selection: None,
            fields: Vec::new(),
        }
    }

    pub fn push(&mut self, name: &str, v: serde_json::Value) -> &mut Self {
        self.fields.push((name.to_string(), v));
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut params: Map<String, serde_json::Value> =
            self.parameters.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
        if let Some(s) = &self.selection {
            params.insert("selection".into(), json!(s));
        }
        let result: Map<String, serde_json::Value> = self.fields.iter().cloned().collect();
        json!({ "parameters": params, "result": result })
    }

    /// `[parameters]` and `[result]` blocks of `key = value` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::from("[parameters]\n");
        for (k, v) in &self.parameters {
            out.push_str(&format!("{k} = {v}\n"));
        }
        if let Some(s) = &self.selection {
            out.push_str(&format!("selection = {s}\n"));
        }
        out.push_str("\n[result]\n");
        for (k, v) in &self.fields {
            match v {
                serde_json::Value::String(s) => out.push_str(&format!("{k} = {s}\n")),
                other => out.push_str(&format!("{k} = {other}\n")),
            }
        }
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let text = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::to_string_pretty(&self.to_json()).expect("report serializes") + "\n"
        } else {
            self.to_text()
        };
        std::fs::write(path, text)
    }
}
