//! Reading and writing point-data tables and metadata documents.
//!
//! Two interchangeable codecs are registered: canonical CSV (`csv`) and
//! canonical JSON (`json`). Both carry exactly the same fields; CSV is the
//! interchange form, JSON is meant for programmatic use.

mod codec;
mod metadata;
mod points;
pub mod text;

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, LazyLock};

use thiserror::Error;

pub use codec::{CsvCodec, JsonCodec, TableCodec};
pub use metadata::{metadata_keys, MetadataDocument};
pub use points::{CANONICAL_HEADER, CANONICAL_UNITS, PROVENANCE_COLUMN};

use crate::model::{
    CampaignParts, CompatFinding, MetadataRecord, ModelError, PointRecord, PooledDataset,
};
use crate::registry::Registry;

pub const FORMAT_VERSION: &str = "1.0";

pub const POINTDATA_CSV_EXT: &str = ".pointdata.csv";
pub const POINTDATA_JSON_EXT: &str = ".pointdata.json";
pub const META_CSV_EXT: &str = ".meta.csv";
pub const META_JSON_EXT: &str = ".meta.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormatKind {
    CanonicalCsv,
    CanonicalJson,
}

impl FormatKind {
    /// Registry key of the codec for this format.
    pub fn codec_name(self) -> &'static str {
        match self {
            FormatKind::CanonicalCsv => "csv",
            FormatKind::CanonicalJson => "json",
        }
    }
}

impl FromStr for FormatKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" | "canonicalcsv" => Ok(FormatKind::CanonicalCsv),
            "json" | "canonicaljson" => Ok(FormatKind::CanonicalJson),
            other => Err(format!("unknown dialect {other:?} (expected csv or json)")),
        }
    }
}

impl fmt::Display for FormatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.codec_name())
    }
}

/// Strict parsing rejects permuted or relabelled columns and unknown
/// metadata keys; lenient parsing tolerates them (unknown keys become Info
/// findings).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

/// Serialization settings shared by readers and writers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatDialect {
    kind: FormatKind,
    version: String,
    missing_token: String,
    mode: ParseMode,
}

impl FormatDialect {
    pub fn new(kind: FormatKind) -> Self {
        FormatDialect {
            kind,
            version: FORMAT_VERSION.to_string(),
            missing_token: "--".to_string(),
            mode: ParseMode::Strict,
        }
    }

    pub fn csv() -> Self {
        Self::new(FormatKind::CanonicalCsv)
    }

    pub fn json() -> Self {
        Self::new(FormatKind::CanonicalJson)
    }

    /// Replaces the token that marks an absent metadata value.
    pub fn with_missing_token(mut self, token: &str) -> Result<Self, FormatError> {
        if token.is_empty()
            || token
                .chars()
                .any(|c| matches!(c, ',' | ';' | '"' | '\n' | '\r'))
        {
            return Err(FormatError::InvalidDialect(format!(
                "missing token {token:?} must be non-empty and free of delimiter characters"
            )));
        }
        self.missing_token = token.to_string();
        Ok(self)
    }

    pub fn with_mode(mut self, mode: ParseMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn lenient(self) -> Self {
        self.with_mode(ParseMode::Lenient)
    }

    pub fn kind(&self) -> FormatKind {
        self.kind
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn missing_token(&self) -> &str {
        &self.missing_token
    }

    pub fn mode(&self) -> ParseMode {
        self.mode
    }

    pub fn is_strict(&self) -> bool {
        self.mode == ParseMode::Strict
    }

    pub fn point_extension(&self) -> &'static str {
        match self.kind {
            FormatKind::CanonicalCsv => POINTDATA_CSV_EXT,
            FormatKind::CanonicalJson => POINTDATA_JSON_EXT,
        }
    }

    pub fn meta_extension(&self) -> &'static str {
        match self.kind {
            FormatKind::CanonicalCsv => META_CSV_EXT,
            FormatKind::CanonicalJson => META_JSON_EXT,
        }
    }
}

impl Default for FormatDialect {
    fn default() -> Self {
        Self::csv()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("input is not valid UTF-8: {0}")]
    Utf8(String),
    #[error("header mismatch at column {column}: expected {expected:?}, found {found:?}")]
    HeaderMismatch {
        column: usize,
        expected: String,
        found: String,
    },
    #[error("units mismatch in column {column}: expected {expected:?}, found {found:?}")]
    UnitsMismatch {
        column: String,
        expected: String,
        found: String,
    },
    #[error("line {row}, {column}: cannot parse {token:?}: {reason}")]
    ValueParse {
        row: usize,
        column: String,
        token: String,
        reason: String,
    },
    #[error("line {row}: {source}")]
    InvariantViolation { row: usize, source: ModelError },
    #[error("metadata: {0}")]
    InvalidMetadata(ModelError),
    #[error("line {row}: unknown metadata key {key:?}")]
    UnknownKey { row: usize, key: String },
    #[error("line {row}: metadata field {field} given more than once")]
    DuplicateKey { row: usize, field: String },
    #[error("missing required metadata field {0}")]
    MissingRequired(&'static str),
    #[error("unsupported format version {0:?}")]
    UnsupportedVersion(String),
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("{0}")]
    InvalidDialect(String),
}

pub type Result<T, E = FormatError> = std::result::Result<T, E>;

static CODECS: LazyLock<Registry<dyn TableCodec>> = LazyLock::new(|| {
    let mut reg: Registry<dyn TableCodec> = Registry::new();
    reg.register("csv", Arc::new(CsvCodec));
    reg.register("json", Arc::new(JsonCodec));
    reg
});

/// The built-in codecs keyed by name (`csv`, `json`).
pub fn codecs() -> &'static Registry<dyn TableCodec> {
    &CODECS
}

fn codec_for(dialect: &FormatDialect) -> Arc<dyn TableCodec> {
    codecs()
        .get(dialect.kind().codec_name())
        .expect("built-in codec registered")
}

pub(crate) fn decode_utf8(bytes: &[u8]) -> Result<&str> {
    let text = std::str::from_utf8(bytes).map_err(|e| FormatError::Utf8(e.to_string()))?;
    Ok(text.strip_prefix('\u{feff}').unwrap_or(text))
}

pub fn parse_point_table(bytes: &[u8], dialect: &FormatDialect) -> Result<Vec<PointRecord>> {
    codec_for(dialect).parse_points(bytes, dialect)
}

pub fn write_point_table(points: &[PointRecord], dialect: &FormatDialect) -> Vec<u8> {
    codec_for(dialect).write_points(points, dialect)
}

/// Pooled table: canonical columns plus a trailing `campaign_id` column.
pub fn write_pooled_table(pool: &PooledDataset, dialect: &FormatDialect) -> Vec<u8> {
    codec_for(dialect).write_pooled(pool, dialect)
}

/// Reads a pooled table back as `(point, campaign_id)` pairs.
pub fn parse_pooled_table(
    bytes: &[u8],
    dialect: &FormatDialect,
) -> Result<Vec<(PointRecord, String)>> {
    codec_for(dialect).parse_pooled(bytes, dialect)
}

pub fn parse_metadata(bytes: &[u8], dialect: &FormatDialect) -> Result<MetadataRecord> {
    parse_metadata_document(bytes, dialect).map(|doc| doc.metadata)
}

/// Parses metadata together with the campaign-level keys
/// (`institution`, `campaign_id`, `map_ref`) and any lenient-mode findings.
pub fn parse_metadata_document(bytes: &[u8], dialect: &FormatDialect) -> Result<MetadataDocument> {
    let entries = codec_for(dialect).read_entries(bytes, dialect)?;
    metadata::document_from_entries(&entries, dialect)
}

/// Writes the present fields only; a record with just the required fields
/// becomes a two-entry document.
pub fn write_metadata(meta: &MetadataRecord, dialect: &FormatDialect) -> Vec<u8> {
    write_metadata_document(&MetadataDocument::bare(meta.clone()), dialect)
}

/// Writes every known field, absent ones as the dialect's missing token.
pub fn write_metadata_full(meta: &MetadataRecord, dialect: &FormatDialect) -> Vec<u8> {
    let entries =
        metadata::entries_from_document(&MetadataDocument::bare(meta.clone()), dialect, true);
    codec_for(dialect).write_entries(&entries)
}

pub fn write_metadata_document(doc: &MetadataDocument, dialect: &FormatDialect) -> Vec<u8> {
    let entries = metadata::entries_from_document(doc, dialect, false);
    codec_for(dialect).write_entries(&entries)
}

/// Assembles campaign contents from a point table and a metadata document.
///
/// `campaign_id` and `institution` come from the metadata document, falling
/// back to `fallback_id` and `"unspecified"`. The result is not yet validated;
/// pass it to [`crate::model::Campaign::new`] or
/// [`crate::validation::validate_campaign`]. Lenient-mode findings from the
/// metadata parse are returned alongside.
pub fn parse_campaign_parts(
    points: &[u8],
    meta: &[u8],
    dialect: &FormatDialect,
    fallback_id: &str,
) -> Result<(CampaignParts, Vec<CompatFinding>)> {
    let doc = parse_metadata_document(meta, dialect)?;
    let points = parse_point_table(points, dialect)?;
    let parts = CampaignParts {
        institution: doc.institution.unwrap_or_else(|| "unspecified".to_string()),
        campaign_id: doc.campaign_id.unwrap_or_else(|| fallback_id.to_string()),
        metadata: doc.metadata,
        points,
        map_ref: doc.map_ref,
    };
    Ok((parts, doc.findings))
}
