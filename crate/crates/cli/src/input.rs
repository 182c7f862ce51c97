use std::fs;
use std::path::{Path, PathBuf};

use pointdata::io::{
    parse_metadata_document, parse_point_table, FormatDialect, FormatKind, META_CSV_EXT,
    META_JSON_EXT, POINTDATA_CSV_EXT, POINTDATA_JSON_EXT,
};
use pointdata::model::{Campaign, CampaignParts, CompatFinding, ModelError, PooledDataset};
use pointdata::validation::{pool, PoolError};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report;

/// The two files making up one campaign on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignFiles {
    pub stem: PathBuf,
    pub points: PathBuf,
    pub meta: PathBuf,
    pub dialect: FormatDialect,
}

const SUFFIXES: [(&str, FormatKind); 4] = [
    (POINTDATA_CSV_EXT, FormatKind::CanonicalCsv),
    (POINTDATA_JSON_EXT, FormatKind::CanonicalJson),
    (META_CSV_EXT, FormatKind::CanonicalCsv),
    (META_JSON_EXT, FormatKind::CanonicalJson),
];

/// Dialect implied by a file name, keeping the mode and missing token of `base`.
pub fn dialect_for(path: &Path, base: &FormatDialect) -> FormatDialect {
    let name = path.to_string_lossy().to_ascii_lowercase();
    let kind = if name.ends_with(".json") {
        FormatKind::CanonicalJson
    } else if name.ends_with(".csv") {
        FormatKind::CanonicalCsv
    } else {
        base.kind()
    };
    rebase(kind, base)
}

fn rebase(kind: FormatKind, base: &FormatDialect) -> FormatDialect {
    let d = FormatDialect::new(kind).with_mode(base.mode());
    d.clone()
        .with_missing_token(base.missing_token())
        .unwrap_or(d)
}

/// Resolves a path given as a stem, a point-data file or a metadata file
/// to the pair of sibling files.
pub fn locate(path: &Path, base: &FormatDialect) -> Result<CampaignFiles, CliError> {
    let text = path.to_string_lossy();
    let (stem, kind) = SUFFIXES
        .iter()
        .find_map(|(suffix, kind)| text.strip_suffix(suffix).map(|s| (PathBuf::from(s), *kind)))
        .unwrap_or_else(|| (path.to_path_buf(), base.kind()));
    let dialect = rebase(kind, base);
    let with = |ext: &str| PathBuf::from(format!("{}{ext}", stem.display()));
    let files = CampaignFiles {
        points: with(dialect.point_extension()),
        meta: with(dialect.meta_extension()),
        stem,
        dialect,
    };
    for p in [&files.points, &files.meta] {
        if !p.is_file() {
            return Err(CliError::input(p, "no such file"));
        }
    }
    Ok(files)
}

impl CampaignFiles {
    fn fallback_id(&self) -> String {
        self.stem
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "campaign".into())
    }

    /// Reads and parses both files without validating the campaign.
    pub fn read(&self) -> Result<(CampaignParts, Vec<CompatFinding>), CliError> {
        let points = fs::read(&self.points).map_err(|e| CliError::input(&self.points, e))?;
        let meta = fs::read(&self.meta).map_err(|e| CliError::input(&self.meta, e))?;
        let doc = parse_metadata_document(&meta, &self.dialect)
            .map_err(|e| CliError::input(&self.meta, e))?;
        let points = parse_point_table(&points, &self.dialect)
            .map_err(|e| CliError::input(&self.points, e))?;
        let parts = CampaignParts {
            institution: doc.institution.unwrap_or_else(|| "unspecified".into()),
            campaign_id: doc.campaign_id.unwrap_or_else(|| self.fallback_id()),
            metadata: doc.metadata,
            points,
            map_ref: doc.map_ref,
        };
        Ok((parts, doc.findings))
    }
}

/// Loads and validates every input; Block findings in any campaign are a
/// domain failure.
pub fn load_campaigns(cfg: &RunConfig) -> Result<Vec<Campaign>, CliError> {
    let mut campaigns = Vec::with_capacity(cfg.inputs.len());
    for path in &cfg.inputs {
        let files = locate(path, &cfg.dialect)?;
        let (parts, notes) = files.read()?;
        report::findings(&notes);
        match Campaign::new(parts) {
            Ok(c) => campaigns.push(c),
            Err(ModelError::InvalidCampaign(findings)) => {
                report::findings(&findings);
                return Err(CliError::Domain(format!(
                    "{}: campaign has Block findings",
                    files.stem.display()
                )));
            }
            Err(e) => return Err(CliError::input(&files.points, e)),
        }
    }
    Ok(campaigns)
}

/// Loads the inputs and pools them. A single input is pooled on its own.
pub fn load_pool(cfg: &RunConfig, force: bool) -> Result<PooledDataset, CliError> {
    let campaigns = load_campaigns(cfg)?;
    match pool(campaigns, &cfg.policy, force) {
        Ok(p) => Ok(p),
        Err(PoolError::PoolBlocked(findings)) => {
            report::findings(&findings);
            Err(CliError::Domain(format!(
                "pooling blocked by {} finding(s); pass --force to override",
                findings.len()
            )))
        }
    }
}
