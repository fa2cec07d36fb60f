//! TOML experiment files merged under command-line flags.
//!
//! Layout: top-level `system`, `seed`, `threads`, `out`, `timing`; an optional
//! `[budget]` table; one table per subcommand (`[rp-test]`, `[complexity]`, ...).
//! Keys may use `-` or `_`. Top-level and budget keys apply to every command
//! that has a field of that name; a command table may only hold that command's fields.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

const TOP_LEVEL: &[&str] = &["system", "seed", "threads", "out", "timing", "budget"];
const BUDGET_KEYS: &[&str] = &["max_points", "max_candidates", "max_n_values", "grid"];
pub const COMMANDS: &[&str] = &[
    "simulate",
    "complexity",
    "rp_test",
    "cube_criterion",
    "ind_check",
    "ip_search",
    "averages",
    "validate_group",
];

fn norm(k: &str) -> String {
    k.replace('-', "_")
}

#[derive(Clone, Debug, Default)]
pub struct ConfigFile {
    top: Map<String, Value>,
    budget: Map<String, Value>,
    sections: Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: toml::Table = text.parse().map_err(|e| Error::Parse(format!("config: {e}")))?;
        let doc = serde_json::to_value(doc).map_err(|e| Error::Parse(format!("config: {e}")))?;
        let mut out = ConfigFile::default();
        for (k, v) in doc.as_object().cloned().unwrap_or_default() {
            let k = norm(&k);
            if k == "budget" {
                for (bk, bv) in v.as_object().cloned().ok_or_else(|| Error::Parse("config: [budget] must be a table".into()))? {
                    let bk = norm(&bk);
                    if !BUDGET_KEYS.contains(&bk.as_str()) {
                        return Err(Error::Parse(format!("config: unknown budget key '{bk}'")));
                    }
                    out.budget.insert(bk, bv);
                }
            } else if COMMANDS.contains(&k.as_str()) {
                if !v.is_object() {
                    return Err(Error::Parse(format!("config: [{k}] must be a table")));
                }
                out.sections.insert(k, v);
            } else if TOP_LEVEL.contains(&k.as_str()) {
                out.top.insert(k, v);
            } else {
                return Err(Error::Parse(format!("config: unknown key '{k}'")));
            }
        }
        Ok(out)
    }

    pub fn top(&self, key: &str) -> Option<&Value> {
        self.top.get(key)
    }

    /// Config values for `command` overlaid with the flags actually given on the command line.
    pub fn merge<T: Serialize + DeserializeOwned + Default>(&self, command: &str, flags: &T) -> Result<T> {
        let known = match serde_json::to_value(T::default()) {
            Ok(Value::Object(m)) => m,
            _ => unreachable!("argument structs serialize to objects"),
        };
        let mut map = Map::new();
        for (k, v) in self.top.iter().chain(self.budget.iter()) {
            if known.contains_key(k) {
                map.insert(k.clone(), v.clone());
            }
        }
        if let Some(Value::Object(sec)) = self.sections.get(&norm(command)) {
            for (k, v) in sec {
                let k = norm(k);
                if !known.contains_key(&k) {
                    return Err(Error::Parse(format!("config: [{command}] has no key '{k}'")));
                }
                map.insert(k, v.clone());
            }
        }
        if let Value::Object(given) = serde_json::to_value(flags).map_err(|e| Error::Parse(e.to_string()))? {
            for (k, v) in given {
                let empty = v.is_null() || v.as_array().is_some_and(|a| a.is_empty()) || v == Value::Bool(false);
                if !empty {
                    map.insert(k, v);
                }
            }
        }
        serde_json::from_value(Value::Object(map)).map_err(|e| Error::Parse(format!("config for {command}: {e}")))
    }
}
