//! JSON config files with flat keys named like the command-line flags.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{Map, Value};

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: Map<String, Value>,
}

fn canonical(key: &str) -> String {
    key.trim_start_matches("--").replace('_', "-")
}

impl ConfigFile {
    /// Loads `path`, or an empty config when `path` is `None`.
    ///
    /// Keys may use `-` or `_`; any key outside `known` is rejected.
    pub fn load(path: Option<&Path>, known: &[&str]) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text, known).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str, known: &[&str]) -> Result<Self> {
        let Value::Object(raw) = serde_json::from_str::<Value>(text)? else {
            bail!("config must be a JSON object");
        };
        let mut values = Map::new();
        for (key, value) in raw {
            let name = canonical(&key);
            if !known.contains(&name.as_str()) {
                bail!("unknown config key `{key}`");
            }
            if values.insert(name, value).is_some() {
                bail!("config key `{key}` given twice");
            }
        }
        Ok(Self { values })
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| v.as_f64().ok_or_else(|| anyhow!("config key `{key}` must be a number")))
            .transpose()
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|v| {
                v.as_u64()
                    .ok_or_else(|| anyhow!("config key `{key}` must be a non-negative integer"))
            })
            .transpose()
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.u64(key)?
            .map(|v| usize::try_from(v).map_err(|_| anyhow!("config key `{key}` is too large")))
            .transpose()
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>> {
        self.get(key)
            .map(|v| {
                v.as_bool()
                    .ok_or_else(|| anyhow!("config key `{key}` must be true or false"))
            })
            .transpose()
    }

    pub fn string(&self, key: &str) -> Result<Option<String>> {
        self.get(key)
            .map(|v| {
                v.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| anyhow!("config key `{key}` must be a string"))
            })
            .transpose()
    }
}
