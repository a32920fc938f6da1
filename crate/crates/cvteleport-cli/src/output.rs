//! CSV/JSON emission. CSV output is `#`-prefixed descriptive comments, one
//! header line, then one row per point, with floats in shortest round-trip
//! form so identical invocations are byte-identical.

use std::io::Write;
use std::path::Path;

pub struct Table {
    pub comments: Vec<String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (key, value) in self.header.iter().zip(row) {
                    let parsed = value
                        .parse::<f64>()
                        .ok()
                        .and_then(serde_json::Number::from_f64)
                        .map(serde_json::Value::Number)
                        .unwrap_or_else(|| serde_json::Value::String(value.clone()));
                    obj.insert((*key).to_owned(), parsed);
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({ "comments": self.comments, "rows": rows });
        serde_json::to_string_pretty(&doc).expect("table serializes")
    }
}

/// Shortest round-trip float formatting.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    }
}
