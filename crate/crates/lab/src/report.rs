//! JSON reports: `{"config": …, "results": …, "metrics": {name: value}}`.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::error::LabResult;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub config: BTreeMap<String, Value>,
    pub results: Value,
    pub metrics: BTreeMap<String, Value>,
}

impl Report {
    pub fn new() -> Self {
        Self { results: Value::Null, ..Self::default() }
    }

    pub fn config(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.config.insert(key.to_string(), value.into());
        self
    }

    pub fn metric(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metrics.insert(key.to_string(), value.into());
        self
    }

    pub fn results(mut self, value: Value) -> Self {
        self.results = value;
        self
    }

    pub fn to_pretty(&self) -> LabResult<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}
