//! Run manifests: flat sorted key=value text, enough to reproduce a run.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;

#[derive(Default)]
pub struct Manifest {
    entries: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn write(&self, path: &Path) -> Result<(), String> {
        let mut text = String::new();
        for (key, value) in &self.entries {
            text.push_str(key);
            text.push('=');
            text.push_str(value);
            text.push('\n');
        }
        std::fs::write(path, text).map_err(|e| format!("manifest: {e}"))
    }
}
