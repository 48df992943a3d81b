//! One record type behind both the human and the `--json` output, so the two
//! never disagree.

use serde_json::{Map, Value};
use stabkit::{Extended, Rational};

/// Ordered key/value report.
#[derive(Default)]
pub struct Report {
    fields: Vec<(String, Value)>,
}

pub fn rat(x: &Rational) -> Value {
    Value::String(x.to_string())
}

pub fn ext(x: &Extended<Rational>) -> Value {
    Value::String(x.to_string())
}

pub fn rats(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(rat).collect())
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn put(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    pub fn emit(&self, json: bool) {
        if json {
            let map: Map<String, Value> = self.fields.iter().cloned().collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&Value::Object(map)).expect("serializable")
            );
            return;
        }
        for (k, v) in &self.fields {
            println!("{k}: {}", human(v));
        }
    }
}

fn human(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        Value::Array(xs) => {
            let inner: Vec<String> = xs.iter().map(human).collect();
            format!("[{}]", inner.join(", "))
        }
        Value::Object(m) => {
            let inner: Vec<String> = m.iter().map(|(k, v)| format!("{k}={}", human(v))).collect();
            format!("{{{}}}", inner.join(", "))
        }
        other => other.to_string(),
    }
}
