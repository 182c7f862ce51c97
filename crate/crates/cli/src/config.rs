use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use pointdata::io::{FormatDialect, FormatKind, ParseMode};
use pointdata::validation::CompatPolicy;
use serde::Deserialize;

use crate::error::CliError;

/// Flags shared by every command.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Table dialect for stem inputs and for outputs (csv or json).
    #[arg(long, value_name = "DIALECT")]
    pub dialect: Option<FormatKind>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Reject unknown metadata keys and relabelled columns.
    #[arg(long, conflicts_with = "lenient")]
    pub strict: bool,

    /// Accept unknown metadata keys and relabelled columns.
    #[arg(long)]
    pub lenient: bool,

    /// Also write SVG figures.
    #[arg(long)]
    pub figures: bool,

    /// JSON run configuration; flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Relative carrier-frequency tolerance for pooling.
    #[arg(long, value_name = "TOL")]
    pub freq_rel_tol: Option<f64>,

    /// Token marking an absent metadata value.
    #[arg(long, value_name = "TOKEN")]
    pub missing_token: Option<String>,
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    inputs: Vec<PathBuf>,
    dialect: Option<String>,
    freq_rel_tol: Option<f64>,
    strict: Option<bool>,
    out: Option<PathBuf>,
    figures: Option<bool>,
    missing_token: Option<String>,
}

impl ConfigFile {
    fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::input(path, format!("invalid config: {e}")))
    }
}

/// Resolved settings for one command run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub dialect: FormatDialect,
    pub policy: CompatPolicy,
    pub out: PathBuf,
    pub figures: bool,
}

impl RunConfig {
    /// Merges the config file (if any) with the flags, then checks that there
    /// is at least one input and that the output directory exists.
    pub fn resolve(common: &CommonArgs, inputs: &[PathBuf]) -> Result<Self, CliError> {
        let file = match &common.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };

        let kind = match (common.dialect, &file.dialect) {
            (Some(k), _) => k,
            (None, Some(name)) => name.parse().map_err(CliError::Usage)?,
            (None, None) => FormatKind::CanonicalCsv,
        };
        let strict = if common.strict {
            true
        } else if common.lenient {
            false
        } else {
            file.strict.unwrap_or(true)
        };
        let mut dialect = FormatDialect::new(kind).with_mode(if strict {
            ParseMode::Strict
        } else {
            ParseMode::Lenient
        });
        if let Some(token) = common
            .missing_token
            .as_ref()
            .or(file.missing_token.as_ref())
        {
            dialect = dialect
                .with_missing_token(token)
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }

        let mut policy = CompatPolicy::default();
        if let Some(tol) = common.freq_rel_tol.or(file.freq_rel_tol) {
            policy = policy
                .with_freq_rel_tol(tol)
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }

        let inputs = if inputs.is_empty() {
            file.inputs
        } else {
            inputs.to_vec()
        };
        if inputs.is_empty() {
            return Err(CliError::Usage("no input campaigns given".into()));
        }

        let out = common
            .out
            .clone()
            .or(file.out)
            .unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&out).map_err(|source| CliError::Output {
            path: out.clone(),
            source,
        })?;

        Ok(RunConfig {
            inputs,
            dialect,
            policy,
            out,
            figures: common.figures || file.figures.unwrap_or(false),
        })
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.out_path(name);
        fs::write(&path, bytes).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}
