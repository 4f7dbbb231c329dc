//! Reports render either as `key: value` lines or as JSON with the same fields.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::EXIT_OK;

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub fields: Map<String, Value>,
    pub exit: i32,
}

impl Report {
    pub fn new(summary: impl Into<String>) -> Self {
        let mut fields = Map::new();
        fields.insert("summary".into(), Value::String(summary.into()));
        Self { fields, exit: EXIT_OK }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.fields.insert(key.into(), serde_json::to_value(value).expect("report fields serialize"));
        self
    }

    /// Copies every field of a serializable struct in at the top level.
    pub fn merge(mut self, value: impl Serialize) -> Self {
        if let Value::Object(map) = serde_json::to_value(value).expect("report fields serialize") {
            self.fields.extend(map);
        }
        self
    }

    pub fn exit(mut self, code: i32) -> Self {
        self.exit = self.exit.max(code);
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.fields).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.fields {
            render(k, v, &mut out);
        }
        out
    }
}

fn render(key: &str, value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                render(&format!("{key}.{k}"), v, out);
            }
        }
        Value::Array(items) if !items.is_empty() && items.iter().all(Value::is_string) => {
            out.push_str(&format!("{key}:\n"));
            for item in items {
                out.push_str(&format!("  {}\n", item.as_str().unwrap_or_default()));
            }
        }
        Value::String(s) => out.push_str(&format!("{key}: {s}\n")),
        other => out.push_str(&format!("{key}: {other}\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_mirrors_fields() {
        let r = Report::new("ok").with("value", 0.5).with("lines", ["a", "b"]).with("nested", serde_json::json!({"x": [1, 2]}));
        assert_eq!(r.to_text(), "summary: ok\nvalue: 0.5\nlines:\n  a\n  b\nnested.x: [1,2]\n");
        assert!(r.to_json().contains("\"value\": 0.5"));
    }
}
