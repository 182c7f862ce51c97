//! Domain types shared by every other module.
//!
//! Every numeric quantity is stored as an exact [`Decimal`] in the unit named
//! by its field (GHz, m, dB, ns, degrees). Construction goes through
//! validating constructors, so a value of any of these types always satisfies
//! its invariants.

mod campaign;
mod finding;
mod metadata;
mod point;

pub use campaign::{Campaign, CampaignParts, PooledDataset, PooledPoint, Provenance};
pub use finding::{CompatFinding, Severity};
pub use metadata::{
    AntennaKind, AntennaType, ArrayGeometry, ArrayKind, AsDefinition, CarrierFrequency, Combine,
    Environment, FrequencyKind, MetadataFields, MetadataRecord, Mobility, Polarization,
    RepetitionInterval, SweepParams, Sync, SyncKind, ThresholdRule, ThresholdSpec, TrajectoryPoint,
    Waveform,
};
pub use point::{Column, LocCondition, PointFields, PointRecord};

pub use rust_decimal::Decimal;

use thiserror::Error;

/// Invariant violations raised by the validating constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{field} must be > 0, got {value}")]
    NonPositive { field: &'static str, value: Decimal },
    #[error("{field} must be >= 0, got {value}")]
    Negative { field: &'static str, value: Decimal },
    #[error("{field} = {value} exceeds the {limit} degree limit")]
    SpreadAboveLimit {
        field: &'static str,
        value: Decimal,
        limit: u32,
    },
    #[error("{field} must not be empty")]
    EmptyLabel { field: &'static str },
    #[error("{field} = {value} is outside the open interval (0, 360) degrees")]
    BeamwidthOutOfRange { field: &'static str, value: Decimal },
    #[error("sidelobe level must be <= 0 dB relative to the main lobe, got {0}")]
    PositiveSidelobe(Decimal),
    #[error("n_elements must be >= 1")]
    ZeroElements,
    #[error("static mobility cannot carry a speed or trajectory")]
    StaticWithMotion,
    #[error("{field}: threshold rule names no floor or gate component")]
    EmptyThresholdRule { field: &'static str },
    #[error("{field}: {message}")]
    Unparseable {
        field: &'static str,
        message: String,
    },
    #[error("campaign is invalid: {}", summarize(.0))]
    InvalidCampaign(Vec<CompatFinding>),
}

fn summarize(findings: &[CompatFinding]) -> String {
    findings
        .iter()
        .map(|f| f.code.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Converts an exact decimal to the nearest `f64`.
///
/// Goes through the shortest decimal string so that the result is correctly
/// rounded (e.g. `53.02` maps to the same double as the literal `53.02`).
pub fn to_f64(value: Decimal) -> f64 {
    value
        .normalize()
        .to_string()
        .parse()
        .expect("decimal display is always a valid float literal")
}

/// Converts a finite `f64` to a decimal rounded to `places` fractional digits.
pub fn from_f64(value: f64, places: u32) -> Option<Decimal> {
    if !value.is_finite() {
        return None;
    }
    let text = format!("{value:.places$}", places = places as usize);
    text.parse::<Decimal>().ok().map(|d| d.normalize())
}

pub(crate) fn require_positive(field: &'static str, value: Decimal) -> Result<(), ModelError> {
    if value > Decimal::ZERO {
        Ok(())
    } else {
        Err(ModelError::NonPositive { field, value })
    }
}

pub(crate) fn require_non_negative(field: &'static str, value: Decimal) -> Result<(), ModelError> {
    if value.is_sign_negative() && !value.is_zero() {
        Err(ModelError::Negative { field, value })
    } else {
        Ok(())
    }
}
