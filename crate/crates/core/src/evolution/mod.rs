//! Version-to-version changes: API diffs, deprecation facts and annotation
//! migration.

mod deprecation;
mod diff;
mod migrate;
mod version;

use serde::{Deserialize, Serialize};

pub use deprecation::{extract_deprecations, DeprecationFact, DeprecationRule, UNKNOWN_VERSION};
pub use diff::{diff_api, ApiDiff, ParamSummary, SignatureChange};
pub use migrate::{migrate_annotations, Conflict, ConflictReport, MigrationNote, MigrationOutcome};
pub use version::Version;

use crate::annotations::AnnotationSet;
use crate::json::{Document, MIGRATION_SCHEMA};

/// A diff, optionally with the migrated annotation set and its report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MigrationDocument {
    pub diff: ApiDiff,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<AnnotationSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ConflictReport>,
}

impl Document for MigrationDocument {
    const SCHEMA: &'static str = MIGRATION_SCHEMA;
}

#[cfg(test)]
mod tests;
