use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::{require_positive, ModelError};
use crate::io::text;

/// Measurement scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Environment {
    UMi,
    UMa,
    RMa,
    InH,
    InF,
}

impl Environment {
    pub const ALL: [Environment; 5] = [
        Environment::UMi,
        Environment::UMa,
        Environment::RMa,
        Environment::InH,
        Environment::InF,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Environment::UMi => "UMi",
            Environment::UMa => "UMa",
            Environment::RMa => "RMa",
            Environment::InH => "InH",
            Environment::InF => "InF",
        }
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Environment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Environment::ALL
            .into_iter()
            .find(|e| e.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!("unknown environment {s:?} (expected UMi, UMa, RMa, InH or InF)")
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mobility {
    Static,
    Mobile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrajectoryPoint {
    pub x: Decimal,
    pub y: Decimal,
    pub t: Decimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrequencyKind {
    Start,
    Center,
}

impl FrequencyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FrequencyKind::Start => "start",
            FrequencyKind::Center => "center",
        }
    }
}

/// Start or center carrier frequency in GHz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CarrierFrequency {
    pub ghz: Decimal,
    pub kind: FrequencyKind,
}

impl CarrierFrequency {
    pub fn center(ghz: Decimal) -> Self {
        CarrierFrequency {
            ghz,
            kind: FrequencyKind::Center,
        }
    }
}

/// How the components of a threshold rule combine into one floor.
///
/// `MaxOf` is the explicit "greater of" form; `AllOf` lists criteria that a
/// bin must pass jointly. For power floors the two produce the same surviving
/// set, but the distinction is kept because it records what the campaign
/// reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Combine {
    MaxOf,
    AllOf,
}

/// Structured delay- or angle-domain thresholding rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ThresholdRule {
    rel_peak_db: Option<Decimal>,
    above_noise_db: Option<Decimal>,
    gate_ns: Option<Decimal>,
    combine: Combine,
}

impl ThresholdRule {
    pub fn new(
        rel_peak_db: Option<Decimal>,
        above_noise_db: Option<Decimal>,
        gate_ns: Option<Decimal>,
        combine: Combine,
    ) -> Result<Self, ModelError> {
        if rel_peak_db.is_none() && above_noise_db.is_none() && gate_ns.is_none() {
            return Err(ModelError::EmptyThresholdRule { field: "threshold" });
        }
        if let Some(gate) = gate_ns {
            require_positive("gate_ns", gate)?;
        }
        let components = [rel_peak_db, above_noise_db, gate_ns]
            .iter()
            .flatten()
            .count();
        // a lone component has nothing to combine with
        let combine = if components <= 1 {
            Combine::MaxOf
        } else {
            combine
        };
        Ok(ThresholdRule {
            rel_peak_db,
            above_noise_db,
            gate_ns,
            combine,
        })
    }

    /// Floor relative to the peak only.
    pub fn below_peak(db: Decimal) -> Self {
        ThresholdRule {
            rel_peak_db: Some(db),
            above_noise_db: None,
            gate_ns: None,
            combine: Combine::MaxOf,
        }
    }

    pub fn rel_peak_db(&self) -> Option<Decimal> {
        self.rel_peak_db
    }

    pub fn above_noise_db(&self) -> Option<Decimal> {
        self.above_noise_db
    }

    pub fn gate_ns(&self) -> Option<Decimal> {
        self.gate_ns
    }

    pub fn combine(&self) -> Combine {
        self.combine
    }

    /// True when the rule mixes a delay gate with a power floor, whose joint
    /// semantics campaigns rarely state.
    pub fn is_gate_and_floor(&self) -> bool {
        self.gate_ns.is_some() && (self.rel_peak_db.is_some() || self.above_noise_db.is_some())
    }
}

/// Threshold as reported (verbatim text) plus its structured reading.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThresholdSpec {
    text: String,
    rule: ThresholdRule,
}

impl ThresholdSpec {
    /// Reads a rule from its reported text, e.g.
    /// `max(25 dB below peak, 5 dB above noise floor)`.
    pub fn parse(field: &'static str, text: &str) -> Result<Self, ModelError> {
        let text = text.trim();
        let rule = text::parse_threshold(text).map_err(|message| match message {
            text::ThresholdTextError::NoComponents => ModelError::EmptyThresholdRule { field },
            text::ThresholdTextError::Invalid(message) => {
                ModelError::Unparseable { field, message }
            }
        })?;
        Ok(ThresholdSpec {
            text: text.to_string(),
            rule,
        })
    }

    pub fn from_rule(rule: ThresholdRule) -> Self {
        ThresholdSpec {
            text: text::describe_threshold(&rule),
            rule,
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn rule(&self) -> &ThresholdRule {
        &self.rule
    }
}

/// Repetition interval or rate, kept in the unit it was reported in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RepetitionInterval {
    pub value: Decimal,
    pub unit: String,
}

/// Sounding waveform description.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Waveform {
    text: String,
    parts: text::WaveformParts,
}

impl Waveform {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let text = text.trim();
        let parts = text::parse_waveform(text).map_err(|message| ModelError::Unparseable {
            field: "waveform",
            message,
        })?;
        Ok(Waveform {
            text: text.to_string(),
            parts,
        })
    }

    pub fn from_parts(
        kind: Option<&str>,
        pn_length_chips: Option<u64>,
        n_avg: Option<u64>,
        papr_db: Option<Decimal>,
        spreading_factor: Option<u64>,
    ) -> Result<Self, ModelError> {
        let parts = text::WaveformParts {
            kind: kind.map(str::to_string),
            pn_length_chips,
            n_avg,
            papr_db,
            spreading_factor,
        };
        Waveform::parse(&text::describe_waveform(&parts))
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn kind(&self) -> Option<&str> {
        self.parts.kind.as_deref()
    }

    pub fn pn_length_chips(&self) -> Option<u64> {
        self.parts.pn_length_chips
    }

    pub fn n_avg(&self) -> Option<u64> {
        self.parts.n_avg
    }

    pub fn papr_db(&self) -> Option<Decimal> {
        self.parts.papr_db
    }

    pub fn spreading_factor(&self) -> Option<u64> {
        self.parts.spreading_factor
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SyncKind {
    ReferenceClock,
    Gps,
    Ptp,
    ExternalTrigger,
    VnaInternal,
}

/// Synchronization method with its free-text description.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sync {
    kind: SyncKind,
    text: String,
}

impl Sync {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let text = text.trim();
        let kind = text::classify_sync(text).ok_or_else(|| ModelError::Unparseable {
            field: "sync",
            message: format!("cannot tell the synchronization method from {text:?}"),
        })?;
        Ok(Sync {
            kind,
            text: text.to_string(),
        })
    }

    pub fn from_kind(kind: SyncKind) -> Self {
        let text = match kind {
            SyncKind::ReferenceClock => "Reference clock",
            SyncKind::Gps => "GPS",
            SyncKind::Ptp => "PTP",
            SyncKind::ExternalTrigger => "External trigger",
            SyncKind::VnaInternal => "VNA Internal",
        };
        Sync {
            kind,
            text: text.to_string(),
        }
    }

    pub fn kind(&self) -> SyncKind {
        self.kind
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

/// Frequency-domain sweep parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SweepParams {
    text: String,
    parts: text::SweepParts,
}

impl SweepParams {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let text = text.trim();
        let parts = text::parse_sweep(text).map_err(|message| ModelError::Unparseable {
            field: "sweep_fd",
            message,
        })?;
        Ok(SweepParams {
            text: text.to_string(),
            parts,
        })
    }

    pub fn from_parts(
        ifbw_khz: Option<Decimal>,
        n_pts: Option<u64>,
        averaging: Option<&str>,
    ) -> Result<Self, ModelError> {
        let parts = text::SweepParts {
            ifbw_khz,
            n_pts,
            averaging: averaging.map(str::to_string),
        };
        SweepParams::parse(&text::describe_sweep(&parts))
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn ifbw_khz(&self) -> Option<Decimal> {
        self.parts.ifbw_khz
    }

    pub fn n_pts(&self) -> Option<u64> {
        self.parts.n_pts
    }

    pub fn averaging(&self) -> Option<&str> {
        self.parts.averaging.as_deref()
    }
}

/// Angular-spread definition a campaign used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AsDefinition {
    Fleury,
    #[serde(rename = "3GPP")]
    Tgpp,
}

impl AsDefinition {
    /// Registry key of the matching spread estimator.
    pub fn key(self) -> &'static str {
        match self {
            AsDefinition::Fleury => "fleury",
            AsDefinition::Tgpp => "3gpp",
        }
    }
}

impl fmt::Display for AsDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AsDefinition::Fleury => "Fleury",
            AsDefinition::Tgpp => "3GPP TR 38.901",
        })
    }
}

impl FromStr for AsDefinition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        if lower.starts_with("fleury") {
            Ok(AsDefinition::Fleury)
        } else if lower.starts_with("3gpp") || lower == "tgpp" || lower.contains("38.901") {
            Ok(AsDefinition::Tgpp)
        } else {
            Err(format!(
                "unknown AS definition {s:?} (expected Fleury or 3GPP)"
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AntennaKind {
    Horn,
    Dipole,
    PatchArray,
}

impl AntennaKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AntennaKind::Horn => "horn",
            AntennaKind::Dipole => "dipole",
            AntennaKind::PatchArray => "patch array",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AntennaType {
    pub kind: AntennaKind,
    pub subtype: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    Linear,
    Circular,
    Dual,
}

impl Polarization {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarization::Linear => "Linear",
            Polarization::Circular => "Circular",
            Polarization::Dual => "Dual",
        }
    }
}

impl FromStr for Polarization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(Polarization::Linear),
            "circular" => Ok(Polarization::Circular),
            "dual" => Ok(Polarization::Dual),
            other => Err(format!("unknown polarization {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArrayKind {
    Ula,
    Upa,
    None,
}

impl ArrayKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ArrayKind::Ula => "ULA",
            ArrayKind::Upa => "UPA",
            ArrayKind::None => "None",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArrayGeometry {
    pub kind: ArrayKind,
    pub spacing_mm: Option<Decimal>,
}

/// Raw metadata values. Validate with [`MetadataRecord::new`].
///
/// `env` and `fc` are required; everything else may be absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetadataFields {
    pub env: Environment,
    pub az_res_deg: Option<Decimal>,
    pub el_res_deg: Option<Decimal>,
    pub mobility: Option<Mobility>,
    pub speed_mps: Option<Decimal>,
    pub trajectory: Vec<TrajectoryPoint>,
    pub fc: CarrierFrequency,
    pub bw_ghz: Option<Decimal>,
    pub ptx_avg_dbm: Option<Decimal>,
    pub dr_max_db: Option<Decimal>,
    pub nf_db: Option<Decimal>,
    pub rx_sens_dbm: Option<Decimal>,
    pub t_pdp: Option<ThresholdSpec>,
    pub t_pas: Option<ThresholdSpec>,
    pub tau_max_ns: Option<Decimal>,
    pub f_rep: Option<RepetitionInterval>,
    pub waveform: Option<Waveform>,
    pub dt_s_ns: Option<Decimal>,
    pub fs_msps: Option<Decimal>,
    pub sync: Option<Sync>,
    pub sweep_fd: Option<SweepParams>,
    pub as_def: Option<AsDefinition>,
    pub ant_model: Option<String>,
    pub f_ant_op_band: Option<String>,
    pub ant_type: Option<AntennaType>,
    pub bw_ant_ghz: Option<Decimal>,
    pub g_tx_dbi: Option<Decimal>,
    pub g_rx_dbi: Option<Decimal>,
    pub hpbw_tx_deg: Option<Decimal>,
    pub hpbw_rx_deg: Option<Decimal>,
    pub sll_db: Option<Decimal>,
    pub fbr_db: Option<Decimal>,
    pub xpd_db: Option<Decimal>,
    pub pol: Option<Polarization>,
    pub array_geometry: Option<ArrayGeometry>,
    pub n_elements: Option<u32>,
    /// Whether tabulated path loss is omnidirectional, best-beam, etc.
    /// `None` reads as "unspecified".
    pub pl_kind: Option<String>,
}

impl MetadataFields {
    /// Only the required fields set.
    pub fn minimal(env: Environment, fc: CarrierFrequency) -> Self {
        MetadataFields {
            env,
            az_res_deg: None,
            el_res_deg: None,
            mobility: None,
            speed_mps: None,
            trajectory: Vec::new(),
            fc,
            bw_ghz: None,
            ptx_avg_dbm: None,
            dr_max_db: None,
            nf_db: None,
            rx_sens_dbm: None,
            t_pdp: None,
            t_pas: None,
            tau_max_ns: None,
            f_rep: None,
            waveform: None,
            dt_s_ns: None,
            fs_msps: None,
            sync: None,
            sweep_fd: None,
            as_def: None,
            ant_model: None,
            f_ant_op_band: None,
            ant_type: None,
            bw_ant_ghz: None,
            g_tx_dbi: None,
            g_rx_dbi: None,
            hpbw_tx_deg: None,
            hpbw_rx_deg: None,
            sll_db: None,
            fbr_db: None,
            xpd_db: None,
            pol: None,
            array_geometry: None,
            n_elements: None,
            pl_kind: None,
        }
    }
}

/// Validated campaign metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetadataRecord(MetadataFields);

impl MetadataRecord {
    pub fn new(fields: MetadataFields) -> Result<Self, ModelError> {
        require_positive("fc", fields.fc.ghz)?;
        if let Some(bw) = fields.bw_ghz {
            require_positive("bw", bw)?;
        }
        for (field, value) in [
            ("hpbw_tx", fields.hpbw_tx_deg),
            ("hpbw_rx", fields.hpbw_rx_deg),
        ] {
            if let Some(v) = value {
                if v <= Decimal::ZERO || v >= Decimal::from(360) {
                    return Err(ModelError::BeamwidthOutOfRange { field, value: v });
                }
            }
        }
        if let Some(sll) = fields.sll_db {
            if sll > Decimal::ZERO {
                return Err(ModelError::PositiveSidelobe(sll));
            }
        }
        if fields.n_elements == Some(0) {
            return Err(ModelError::ZeroElements);
        }
        if fields.mobility == Some(Mobility::Static)
            && (fields.speed_mps.is_some() || !fields.trajectory.is_empty())
        {
            return Err(ModelError::StaticWithMotion);
        }
        if let Some(speed) = fields.speed_mps {
            super::require_non_negative("speed", speed)?;
        }
        for (field, value) in [
            ("az_res", fields.az_res_deg),
            ("el_res", fields.el_res_deg),
            ("tau_max", fields.tau_max_ns),
            ("dt_s", fields.dt_s_ns),
            ("fs", fields.fs_msps),
            ("bw_ant", fields.bw_ant_ghz),
        ] {
            if let Some(v) = value {
                require_positive(field, v)?;
            }
        }
        Ok(MetadataRecord(fields))
    }

    pub fn fields(&self) -> &MetadataFields {
        &self.0
    }

    pub fn into_fields(self) -> MetadataFields {
        self.0
    }

    pub fn pl_kind(&self) -> &str {
        self.0.pl_kind.as_deref().unwrap_or("unspecified")
    }

    pub fn fc_ghz(&self) -> f64 {
        super::to_f64(self.0.fc.ghz)
    }
}

impl Deref for MetadataRecord {
    type Target = MetadataFields;

    fn deref(&self) -> &MetadataFields {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    fn minimal() -> MetadataFields {
        MetadataFields::minimal(Environment::UMi, CarrierFrequency::center(d("142")))
    }

    #[test]
    fn minimal_record_is_valid() {
        let m = MetadataRecord::new(minimal()).unwrap();
        assert_eq!(m.pl_kind(), "unspecified");
        assert_eq!(m.fc_ghz(), 142.0);
    }

    #[test]
    fn rejects_bad_values() {
        let mut f = minimal();
        f.fc.ghz = Decimal::ZERO;
        assert!(matches!(
            MetadataRecord::new(f),
            Err(ModelError::NonPositive { field: "fc", .. })
        ));

        let mut f = minimal();
        f.bw_ghz = Some(d("-1"));
        assert!(matches!(
            MetadataRecord::new(f),
            Err(ModelError::NonPositive { field: "bw", .. })
        ));

        let mut f = minimal();
        f.hpbw_rx_deg = Some(d("360"));
        assert!(matches!(
            MetadataRecord::new(f),
            Err(ModelError::BeamwidthOutOfRange {
                field: "hpbw_rx",
                ..
            })
        ));

        let mut f = minimal();
        f.sll_db = Some(d("3"));
        assert_eq!(
            MetadataRecord::new(f),
            Err(ModelError::PositiveSidelobe(d("3")))
        );

        let mut f = minimal();
        f.n_elements = Some(0);
        assert_eq!(MetadataRecord::new(f), Err(ModelError::ZeroElements));

        let mut f = minimal();
        f.mobility = Some(Mobility::Static);
        f.speed_mps = Some(d("1"));
        assert_eq!(MetadataRecord::new(f), Err(ModelError::StaticWithMotion));
    }

    #[test]
    fn threshold_rule_needs_a_component() {
        assert!(matches!(
            ThresholdRule::new(None, None, None, Combine::MaxOf),
            Err(ModelError::EmptyThresholdRule { .. })
        ));
        assert!(ThresholdRule::new(None, None, Some(d("966.67")), Combine::AllOf).is_ok());
    }

    #[test]
    fn threshold_spec_keeps_text() {
        let text = "max(25 dB below peak, 5 dB above noise floor)";
        let spec = ThresholdSpec::parse("t_pdp", text).unwrap();
        assert_eq!(spec.text(), text);
        assert_eq!(spec.rule().rel_peak_db(), Some(d("25")));
        assert_eq!(spec.rule().above_noise_db(), Some(d("5")));
        assert_eq!(spec.rule().combine(), Combine::MaxOf);
        assert!(matches!(
            ThresholdSpec::parse("t_pas", "whatever feels right"),
            Err(ModelError::EmptyThresholdRule { field: "t_pas" })
        ));
    }

    #[test]
    fn from_rule_text_reparses_to_same_rule() {
        let rule = ThresholdRule::new(
            Some(d("25")),
            Some(d("5")),
            Some(d("966.67")),
            Combine::AllOf,
        )
        .unwrap();
        let spec = ThresholdSpec::from_rule(rule);
        let again = ThresholdSpec::parse("t_pdp", spec.text()).unwrap();
        assert_eq!(again.rule(), &rule);
    }

    #[test]
    fn as_definition_aliases() {
        assert_eq!(
            "3GPP TR 38.901".parse::<AsDefinition>(),
            Ok(AsDefinition::Tgpp)
        );
        assert_eq!("TGPP".parse::<AsDefinition>(), Ok(AsDefinition::Tgpp));
        assert_eq!("Fleury".parse::<AsDefinition>(), Ok(AsDefinition::Fleury));
        assert!("cosine".parse::<AsDefinition>().is_err());
    }
}
