use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ModelError, TraceLink, TraceLocation, TraceabilityInformation, WORKSPACE_VERSION};

/// A workspace document that could not be read. `line`/`column` locate
/// JSON syntax errors; `pointer` locates structural ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MalformedDocument {
    pub line: usize,
    pub column: usize,
    pub pointer: Option<String>,
    pub message: String,
}

impl fmt::Display for MalformedDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.pointer {
            Some(p) => write!(f, "malformed workspace at {p}: {}", self.message),
            None => write!(f, "malformed workspace at {}:{}: {}", self.line, self.column, self.message),
        }
    }
}

impl std::error::Error for MalformedDocument {}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    version: u32,
    #[serde(default)]
    locations: Vec<TraceLocation>,
    #[serde(default)]
    links: Vec<TraceLink>,
    #[serde(default)]
    types: BTreeMap<String, String>,
    #[serde(default)]
    revision: u64,
}

impl TraceabilityInformation {
    /// Canonical JSON: keys sorted, locations and links sorted by id.
    pub fn save(&self) -> String {
        let mut locations = self.locations.clone();
        locations.sort_by(|a, b| a.id.cmp(&b.id));
        let mut links = self.links.clone();
        links.sort_by(|a, b| a.id.cmp(&b.id));
        let doc = Document {
            version: WORKSPACE_VERSION,
            locations,
            links,
            types: self.types.clone(),
            revision: self.revision,
        };
        // going through Value sorts object keys
        let value = serde_json::to_value(&doc).expect("workspace serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("workspace serializes");
        s.push('\n');
        s
    }

    pub fn load(text: &str) -> Result<Self, ModelError> {
        let doc: Document = serde_json::from_str(text).map_err(|e| MalformedDocument {
            line: e.line(),
            column: e.column(),
            pointer: None,
            message: e.to_string(),
        })?;
        if doc.version != WORKSPACE_VERSION {
            return Err(MalformedDocument {
                line: 0,
                column: 0,
                pointer: Some("/version".into()),
                message: format!("unsupported version {}", doc.version),
            }
            .into());
        }
        let mut info = TraceabilityInformation {
            locations: doc.locations,
            links: doc.links,
            types: doc.types,
            revision: doc.revision,
        };
        info.locations.sort_by(|a, b| a.id.cmp(&b.id));
        info.links.sort_by(|a, b| a.id.cmp(&b.id));
        info.check().map_err(|(pointer, e)| MalformedDocument {
            line: 0,
            column: 0,
            pointer: Some(pointer),
            message: e.to_string(),
        })?;
        Ok(info)
    }
}
