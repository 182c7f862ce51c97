//! Path-loss fits, lognormal statistics and empirical CDFs over point data.
//!
//! Everything here works in `f64`; decimals are converted on the way in.

mod pathloss;
mod stats;

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, LazyLock};

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

pub use pathloss::{fit_abg, fit_ci, fspl_1m, AbgFit, CiFit, CiMoments, FsplMode, SPEED_OF_LIGHT};
pub use stats::{empirical_cdf, lognormal_stats, EmpiricalCdf, LognormalStats};

use crate::model::{to_f64, Column, Decimal, LocCondition, PointRecord, PooledDataset};
use crate::registry::Registry;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("no samples")]
    EmptyInput,
    #[error("frequency must be > 0 GHz, got {0}")]
    NonPositiveFrequency(f64),
    #[error("distance {0} m is not beyond the 1 m reference distance")]
    DistanceBelowReference(f64),
    #[error("design matrix is rank deficient (need two distinct distances and two distinct frequencies)")]
    RankDeficient,
    #[error("sample {0} is not positive")]
    NonPositiveSample(f64),
    #[error("sample {0} is not finite")]
    NonFiniteSample(f64),
    #[error("{0} is not a numeric statistic column")]
    NotNumeric(Column),
}

pub type Result<T, E = AnalysisError> = std::result::Result<T, E>;

/// One path-loss observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossSample {
    pub tr_sep_m: f64,
    pub pl_db: f64,
    pub freq_ghz: f64,
}

impl From<&PointRecord> for PathLossSample {
    fn from(p: &PointRecord) -> Self {
        PathLossSample {
            tr_sep_m: to_f64(p.tr_sep_m),
            pl_db: to_f64(p.pl_db),
            freq_ghz: to_f64(p.freq_ghz),
        }
    }
}

/// Subset of points selected by link condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Los,
    Nlos,
    Both,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Los => "LOS",
            Split::Nlos => "NLOS",
            Split::Both => "both",
        }
    }

    pub fn matches(self, loc: LocCondition) -> bool {
        match self {
            Split::Los => loc == LocCondition::Los,
            Split::Nlos => loc == LocCondition::Nlos,
            Split::Both => true,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "los" => Ok(Split::Los),
            "nlos" => Ok(Split::Nlos),
            "both" | "all" => Ok(Split::Both),
            other => Err(format!(
                "unknown split {other:?} (expected los, nlos or both)"
            )),
        }
    }
}

pub fn path_loss_samples<'a>(
    points: impl IntoIterator<Item = &'a PointRecord>,
    split: Split,
) -> Vec<PathLossSample> {
    points
        .into_iter()
        .filter(|p| split.matches(p.loc_condition))
        .map(PathLossSample::from)
        .collect()
}

/// Values of one numeric column for the points in `split`.
pub fn column_values<'a>(
    points: impl IntoIterator<Item = &'a PointRecord>,
    column: Column,
    split: Split,
) -> Result<Vec<f64>> {
    if !column.is_numeric() {
        return Err(AnalysisError::NotNumeric(column));
    }
    Ok(points
        .into_iter()
        .filter(|p| split.matches(p.loc_condition))
        .filter_map(|p| p.get_f64(column))
        .collect())
}

/// One row of plot data for a path-loss scatter plot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterRow {
    pub tr_sep_m: Decimal,
    pub pl_db: Decimal,
    pub freq_ghz: Decimal,
    pub campaign_id: String,
    pub loc_condition: LocCondition,
}

/// Distance/path-loss pairs in pooled order, tagged with their campaign.
pub fn scatter_data(pool: &PooledDataset, split: Split) -> Result<Vec<ScatterRow>> {
    if pool.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    Ok(pool
        .points()
        .filter(|pp| split.matches(pp.point.loc_condition))
        .map(|pp| ScatterRow {
            tr_sep_m: pp.point.tr_sep_m,
            pl_db: pp.point.pl_db,
            freq_ghz: pp.point.freq_ghz,
            campaign_id: pp.provenance.campaign_id.clone(),
            loc_condition: pp.point.loc_condition,
        })
        .collect())
}

/// Result of any registered path-loss model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelFit {
    Ci(CiFit),
    Abg(AbgFit),
}

impl ModelFit {
    pub fn sigma_db(&self) -> f64 {
        match self {
            ModelFit::Ci(f) => f.sigma_db,
            ModelFit::Abg(f) => f.sigma_db,
        }
    }

    pub fn n_points(&self) -> usize {
        match self {
            ModelFit::Ci(f) => f.n_points,
            ModelFit::Abg(f) => f.n_points,
        }
    }

    /// Prediction at distance `d` (m) and frequency `freq_ghz`.
    pub fn predict(&self, d: f64, freq_ghz: f64) -> f64 {
        match self {
            ModelFit::Ci(f) => f.predict(fspl_1m(freq_ghz).unwrap_or(f.fspl_ref_db), d),
            ModelFit::Abg(f) => f.predict(d, freq_ghz),
        }
    }

    /// JSON object with the model name, parameters and split label.
    pub fn to_json(&self, split: Split) -> Value {
        match self {
            ModelFit::Ci(f) => json!({
                "model": "CI",
                "ple": f.ple,
                "sigma_db": f.sigma_db,
                "fspl_ref_db": f.fspl_ref_db,
                "n_points": f.n_points,
                "split": split.as_str(),
            }),
            ModelFit::Abg(f) => json!({
                "model": "ABG",
                "alpha": f.alpha,
                "beta_db": f.beta_db,
                "gamma": f.gamma,
                "sigma_db": f.sigma_db,
                "n_points": f.n_points,
                "split": split.as_str(),
            }),
        }
    }
}

/// A path-loss model that can be fitted to samples.
pub trait PathLossModel: Send + Sync {
    fn name(&self) -> &'static str;

    fn fit(&self, samples: &[PathLossSample]) -> Result<ModelFit>;
}

/// CI model with a chosen FSPL reference mode.
#[derive(Debug, Clone, Copy, Default)]
pub struct CiModel {
    pub mode: FsplMode,
}

impl PathLossModel for CiModel {
    fn name(&self) -> &'static str {
        "ci"
    }

    fn fit(&self, samples: &[PathLossSample]) -> Result<ModelFit> {
        fit_ci(samples, self.mode).map(ModelFit::Ci)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AbgModel;

impl PathLossModel for AbgModel {
    fn name(&self) -> &'static str {
        "abg"
    }

    fn fit(&self, samples: &[PathLossSample]) -> Result<ModelFit> {
        fit_abg(samples).map(ModelFit::Abg)
    }
}

static MODELS: LazyLock<Registry<dyn PathLossModel>> = LazyLock::new(|| {
    let mut reg: Registry<dyn PathLossModel> = Registry::new();
    reg.register("ci", Arc::new(CiModel::default()));
    reg.register("abg", Arc::new(AbgModel));
    reg
});

/// Path-loss models keyed by name (`ci`, `abg`).
pub fn path_loss_models() -> &'static Registry<dyn PathLossModel> {
    &MODELS
}
