//! File formats owned by the command line: decomposition files, plus atomic
//! writes and path-aware reads.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use svcsplit::graph::CallGraph;
use svcsplit::metrics::Decomposition;

use crate::error::{CliError, MethodSetMismatch};

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    let bytes = read_bytes(path)?;
    String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{}: not valid UTF-8", path.display())))
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    let io = |e: std::io::Error| CliError::Internal(anyhow::anyhow!("writing {}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// A decomposition as a list of services.
///
/// ```json
/// {
///   "objective": "mq",
///   "objective_value": 0.41,
///   "services": [
///     { "id": 0, "capability": "Order", "methods": ["OrderService.add()", "..."] },
///     { "id": 1, "classes": ["com.shop.AccountService"] }
///   ]
/// }
/// ```
///
/// `capability` is the majority capability of the service's methods (ties go
/// to the lexicographically smallest name). It is informational and ignored
/// on input. A service may list `classes` instead of, or in addition to,
/// `methods`; each class stands for every graph method declared on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective_value: Option<f64>,
    pub services: Vec<ServiceEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceEntry {
    #[serde(default)]
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capability: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<String>,
}

/// Declaring class of a method signature: everything before the last `.`
/// ahead of the parameter list.
pub fn class_of(signature: &str) -> &str {
    let head = signature.split('(').next().unwrap_or(signature);
    head.rsplit_once('.').map_or(head, |(class, _)| class)
}

/// Most frequent capability among `methods`, lexicographically smallest on ties.
pub fn majority_capability(g: &CallGraph, methods: &[usize]) -> Option<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for &m in methods {
        for &c in g.method_caps(m) {
            *counts.entry(g.capabilities()[c].as_str()).or_default() += 1;
        }
    }
    let top = counts.values().copied().max()?;
    counts.into_iter().find(|&(_, n)| n == top).map(|(c, _)| c.to_string())
}

impl DecompositionFile {
    pub fn from_decomposition(g: &CallGraph, d: &Decomposition) -> Self {
        let services = d
            .compacted()
            .services()
            .into_iter()
            .enumerate()
            .map(|(id, members)| ServiceEntry {
                id,
                capability: majority_capability(g, &members),
                methods: members.iter().map(|&m| g.methods()[m].clone()).collect(),
                classes: Vec::new(),
            })
            .collect();
        Self { objective: None, objective_value: None, services }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("decomposition serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("bad decomposition file: {e}")))
    }

    /// Resolves the listed methods and classes against `g`. Every graph
    /// method must be placed exactly once.
    pub fn to_decomposition(&self, g: &CallGraph) -> Result<Decomposition, CliError> {
        let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (m, sig) in g.methods().iter().enumerate() {
            by_class.entry(class_of(sig)).or_default().push(m);
        }

        let mut assignment: Vec<Option<usize>> = vec![None; g.len()];
        let mut mismatch = MethodSetMismatch::default();
        let mut duplicated = BTreeSet::new();
        for (s, service) in self.services.iter().enumerate() {
            let mut members = Vec::new();
            for sig in &service.methods {
                match g.method_index(sig) {
                    Some(m) => members.push(m),
                    None => mismatch.extra.push(sig.clone()),
                }
            }
            for class in &service.classes {
                match by_class.get(class.as_str()) {
                    Some(ms) => members.extend(ms),
                    None => mismatch.extra.push(class.clone()),
                }
            }
            for m in members {
                match assignment[m] {
                    Some(prev) if prev != s => {
                        duplicated.insert(g.methods()[m].clone());
                    }
                    _ => assignment[m] = Some(s),
                }
            }
        }
        mismatch.duplicated = duplicated.into_iter().collect();
        mismatch.missing = (0..g.len()).filter(|&m| assignment[m].is_none()).map(|m| g.methods()[m].clone()).collect();
        if !mismatch.is_empty() {
            return Err(CliError::MethodSetMismatch(mismatch));
        }
        Ok(Decomposition::new(assignment.into_iter().map(|s| s.expect("checked")).collect()))
    }
}
