//! Method → business-capability mapping.
//!
//! Two on-disk formats are accepted:
//!
//! * Tabular: one `method_signature,capability` pair per line. Signatures
//!   contain commas between parameter types, so each line is split at its
//!   *last* comma. Blank lines and lines starting with `#` are ignored, as is
//!   an optional `method_signature,capability` header. Repeating a signature
//!   adds another capability to it.
//! * JSON: an object mapping each signature to a capability name or to an
//!   array of names, e.g. `{"A.f(int)": ["Order", "Account"]}`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CapabilityMapError {
    #[error("line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error("invalid capability map JSON: {0}")]
    Json(String),
    #[error("method {0:?} has an empty capability set")]
    EmptyCapabilitySet(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapabilityMap {
    capabilities: BTreeSet<String>,
    method_caps: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl CapabilityMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `capability` to the method's set.
    pub fn insert(&mut self, method: impl Into<String>, capability: impl Into<String>) {
        let capability = capability.into();
        self.capabilities.insert(capability.clone());
        self.method_caps.entry(method.into()).or_default().insert(capability);
    }

    pub fn capabilities(&self) -> &BTreeSet<String> {
        &self.capabilities
    }

    pub fn get(&self, method: &str) -> Option<&BTreeSet<String>> {
        self.method_caps.get(method)
    }

    pub fn methods(&self) -> impl Iterator<Item = (&String, &BTreeSet<String>)> {
        self.method_caps.iter()
    }

    pub fn len(&self) -> usize {
        self.method_caps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.method_caps.is_empty()
    }

    /// Parses either format, picking JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self, CapabilityMapError> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_tabular(text)
        }
    }

    pub fn parse_tabular(text: &str) -> Result<Self, CapabilityMapError> {
        let mut map = Self::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line == "method_signature,capability" {
                continue;
            }
            let Some((method, cap)) = line.rsplit_once(',') else {
                return Err(CapabilityMapError::BadLine {
                    line: idx + 1,
                    reason: "expected method_signature,capability".into(),
                });
            };
            let (method, cap) = (method.trim(), cap.trim());
            if method.is_empty() || cap.is_empty() {
                return Err(CapabilityMapError::BadLine {
                    line: idx + 1,
                    reason: "empty method signature or capability".into(),
                });
            }
            map.insert(method, cap);
        }
        Ok(map)
    }

    pub fn parse_json(text: &str) -> Result<Self, CapabilityMapError> {
        let raw: BTreeMap<String, OneOrMany> =
            serde_json::from_str(text).map_err(|e| CapabilityMapError::Json(e.to_string()))?;
        let mut map = Self::new();
        for (method, caps) in raw {
            let caps = match caps {
                OneOrMany::One(c) => vec![c],
                OneOrMany::Many(cs) => cs,
            };
            if caps.is_empty() || caps.iter().any(|c| c.is_empty()) {
                return Err(CapabilityMapError::EmptyCapabilitySet(method));
            }
            for cap in caps {
                map.insert(method.clone(), cap);
            }
        }
        Ok(map)
    }
}
