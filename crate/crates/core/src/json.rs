//! Canonical JSON documents: sorted keys, two-space indent, trailing newline,
//! and a top-level `"schema"` tag.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const API_SCHEMA: &str = "api/1";
pub const USAGES_SCHEMA: &str = "usages/1";
pub const ANNOTATIONS_SCHEMA: &str = "annotations/1";
pub const REPORT_SCHEMA: &str = "report/1";
pub const MIGRATION_SCHEMA: &str = "migration/1";
pub const EXTRACT_REPORT_SCHEMA: &str = "extract-report/1";

/// A value persisted as a schema-tagged JSON file.
pub trait Document: Serialize + DeserializeOwned {
    const SCHEMA: &'static str;

    fn to_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("documents serialize to JSON");
        if let Value::Object(map) = &mut value {
            map.insert("schema".into(), Value::String(Self::SCHEMA.into()));
        }
        to_canonical_string(&value)
    }

    fn from_json(text: &str) -> Result<Self> {
        let mut value: Value = serde_json::from_str(text).map_err(|source| Error::Json {
            what: Self::SCHEMA.into(),
            source,
        })?;
        let found = value
            .as_object_mut()
            .and_then(|m| m.remove("schema"))
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        if found != Self::SCHEMA {
            return Err(Error::Schema { expected: Self::SCHEMA.into(), found });
        }
        serde_json::from_value(value).map_err(|source| Error::Json { what: Self::SCHEMA.into(), source })
    }

    fn read_from(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    fn write_to(&self, path: &Path) -> Result<()> {
        write_file(path, self.to_json().as_bytes())
    }
}

/// Serializes through `serde_json::Value`, whose maps are ordered, so every
/// object comes out with lexicographically sorted keys.
pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("value serializes to JSON");
    let mut text = serde_json::to_string_pretty(&value).expect("JSON values always print");
    text.push('\n');
    text
}

/// Writes through a sibling temporary file and a rename, so readers see
/// either the old or the new content.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = parent.join(format!(".{name}.{}.tmp", std::process::id()));
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Doc {
        zeta: u32,
        alpha: Vec<String>,
    }

    impl Document for Doc {
        const SCHEMA: &'static str = "doc/1";
    }

    #[test]
    fn keys_are_sorted_and_schema_checked() {
        let doc = Doc { zeta: 1, alpha: vec!["x".into()] };
        let text = doc.to_json();
        let a = text.find("\"alpha\"").unwrap();
        let s = text.find("\"schema\"").unwrap();
        let z = text.find("\"zeta\"").unwrap();
        assert!(a < s && s < z);
        assert!(text.ends_with('\n'));
        assert_eq!(Doc::from_json(&text).unwrap(), doc);
        let wrong = text.replace("doc/1", "doc/2");
        assert!(matches!(Doc::from_json(&wrong), Err(Error::Schema { .. })));
    }
}
