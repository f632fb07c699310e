//! Ordered `name = value` text reports.

use std::fmt;

use crate::error::{GcgError, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends an entry. Keys may repeat; [`get`](Self::get) returns the first.
    pub fn push(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        let value = value.to_string();
        debug_assert!(!value.contains('\n'));
        self.entries.push((key.into(), value));
    }

    /// Floats go through `Debug` so they round-trip exactly.
    pub fn push_f64(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, format!("{value:?}"));
    }

    pub fn push_opt_f64(&mut self, key: impl Into<String>, value: Option<f64>) {
        match value {
            Some(v) => self.push_f64(key, v),
            None => self.push(key, "none"),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn extend(&mut self, other: Report) {
        self.entries.extend(other.entries);
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Self::new();
        for (no, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| GcgError::Parse(format!("report line {}: expected 'name = value'", no + 1)))?;
            out.entries.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(out)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}
