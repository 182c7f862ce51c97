use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::{require_non_negative, require_positive, ModelError};

/// Link condition of a TX-RX location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LocCondition {
    #[serde(rename = "LOS")]
    Los,
    #[serde(rename = "NLOS")]
    Nlos,
}

impl LocCondition {
    pub fn as_str(self) -> &'static str {
        match self {
            LocCondition::Los => "LOS",
            LocCondition::Nlos => "NLOS",
        }
    }
}

impl fmt::Display for LocCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LocCondition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "LOS" => Ok(LocCondition::Los),
            "NLOS" => Ok(LocCondition::Nlos),
            other => Err(format!("expected LOS or NLOS, got {other:?}")),
        }
    }
}

/// The sixteen point-data columns, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Column {
    FreqGhz,
    Tx,
    Rx,
    Loc,
    TrSepM,
    PlDb,
    MeanDirDsNs,
    OmniDsNs,
    MeanLobeAsaDeg,
    OmniAsaDeg,
    MeanLobeAsdDeg,
    OmniAsdDeg,
    MeanLobeZsaDeg,
    OmniZsaDeg,
    MeanLobeZsdDeg,
    OmniZsdDeg,
}

impl Column {
    pub const ALL: [Column; 16] = [
        Column::FreqGhz,
        Column::Tx,
        Column::Rx,
        Column::Loc,
        Column::TrSepM,
        Column::PlDb,
        Column::MeanDirDsNs,
        Column::OmniDsNs,
        Column::MeanLobeAsaDeg,
        Column::OmniAsaDeg,
        Column::MeanLobeAsdDeg,
        Column::OmniAsdDeg,
        Column::MeanLobeZsaDeg,
        Column::OmniZsaDeg,
        Column::MeanLobeZsdDeg,
        Column::OmniZsdDeg,
    ];

    /// Machine name used in the canonical header.
    pub fn name(self) -> &'static str {
        match self {
            Column::FreqGhz => "freq_ghz",
            Column::Tx => "tx",
            Column::Rx => "rx",
            Column::Loc => "loc",
            Column::TrSepM => "tr_sep_m",
            Column::PlDb => "pl_db",
            Column::MeanDirDsNs => "mean_dir_ds_ns",
            Column::OmniDsNs => "omni_ds_ns",
            Column::MeanLobeAsaDeg => "mean_lobe_asa_deg",
            Column::OmniAsaDeg => "omni_asa_deg",
            Column::MeanLobeAsdDeg => "mean_lobe_asd_deg",
            Column::OmniAsdDeg => "omni_asd_deg",
            Column::MeanLobeZsaDeg => "mean_lobe_zsa_deg",
            Column::OmniZsaDeg => "omni_zsa_deg",
            Column::MeanLobeZsdDeg => "mean_lobe_zsd_deg",
            Column::OmniZsdDeg => "omni_zsd_deg",
        }
    }

    /// Human-facing column label as printed in published point-data tables.
    pub fn label(self) -> &'static str {
        match self {
            Column::FreqGhz => "Freq.",
            Column::Tx => "TX",
            Column::Rx => "RX",
            Column::Loc => "Loc.",
            Column::TrSepM => "TR Sep.",
            Column::PlDb => "PL",
            Column::MeanDirDsNs => "Mean Dir. DS",
            Column::OmniDsNs => "Omni DS",
            Column::MeanLobeAsaDeg => "Mean Lobe ASA",
            Column::OmniAsaDeg => "Omni ASA",
            Column::MeanLobeAsdDeg => "Mean Lobe ASD",
            Column::OmniAsdDeg => "Omni ASD",
            Column::MeanLobeZsaDeg => "Mean Lobe ZSA",
            Column::OmniZsaDeg => "Omni ZSA",
            Column::MeanLobeZsdDeg => "Mean Lobe ZSD",
            Column::OmniZsdDeg => "Omni ZSD",
        }
    }

    /// Canonical unit; empty for label columns.
    pub fn unit(self) -> &'static str {
        match self {
            Column::FreqGhz => "GHz",
            Column::Tx | Column::Rx | Column::Loc => "",
            Column::TrSepM => "m",
            Column::PlDb => "dB",
            Column::MeanDirDsNs | Column::OmniDsNs => "ns",
            _ => "deg",
        }
    }

    pub fn is_numeric(self) -> bool {
        !matches!(self, Column::Tx | Column::Rx | Column::Loc)
    }

    pub fn numeric() -> impl Iterator<Item = Column> {
        Column::ALL.into_iter().filter(|c| c.is_numeric())
    }

    pub fn from_name(name: &str) -> Option<Column> {
        Column::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Matches either the machine name or the published label, ignoring case
    /// and surrounding whitespace.
    pub fn from_alias(name: &str) -> Option<Column> {
        let wanted = name.trim();
        Column::ALL.into_iter().find(|c| {
            c.name().eq_ignore_ascii_case(wanted)
                || c.label().eq_ignore_ascii_case(wanted)
                || c.label().trim_end_matches('.').eq_ignore_ascii_case(wanted)
        })
    }

    fn spread_limit(self) -> Option<u32> {
        match self {
            Column::MeanLobeAsaDeg
            | Column::OmniAsaDeg
            | Column::MeanLobeAsdDeg
            | Column::OmniAsdDeg => Some(180),
            Column::MeanLobeZsaDeg
            | Column::OmniZsaDeg
            | Column::MeanLobeZsdDeg
            | Column::OmniZsdDeg => Some(90),
            _ => None,
        }
    }

    pub fn is_angular_spread(self) -> bool {
        self.spread_limit().is_some()
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Raw field values of one point-data row. Validate with [`PointRecord::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointFields {
    pub freq_ghz: Decimal,
    pub tx_id: String,
    pub rx_id: String,
    pub loc_condition: LocCondition,
    pub tr_sep_m: Decimal,
    pub pl_db: Decimal,
    pub mean_dir_ds_ns: Decimal,
    pub omni_ds_ns: Decimal,
    pub mean_lobe_asa_deg: Decimal,
    pub omni_asa_deg: Decimal,
    pub mean_lobe_asd_deg: Decimal,
    pub omni_asd_deg: Decimal,
    pub mean_lobe_zsa_deg: Decimal,
    pub omni_zsa_deg: Decimal,
    pub mean_lobe_zsd_deg: Decimal,
    pub omni_zsd_deg: Decimal,
}

impl PointFields {
    pub fn value(&self, column: Column) -> Option<Decimal> {
        Some(match column {
            Column::FreqGhz => self.freq_ghz,
            Column::Tx | Column::Rx | Column::Loc => return None,
            Column::TrSepM => self.tr_sep_m,
            Column::PlDb => self.pl_db,
            Column::MeanDirDsNs => self.mean_dir_ds_ns,
            Column::OmniDsNs => self.omni_ds_ns,
            Column::MeanLobeAsaDeg => self.mean_lobe_asa_deg,
            Column::OmniAsaDeg => self.omni_asa_deg,
            Column::MeanLobeAsdDeg => self.mean_lobe_asd_deg,
            Column::OmniAsdDeg => self.omni_asd_deg,
            Column::MeanLobeZsaDeg => self.mean_lobe_zsa_deg,
            Column::OmniZsaDeg => self.omni_zsa_deg,
            Column::MeanLobeZsdDeg => self.mean_lobe_zsd_deg,
            Column::OmniZsdDeg => self.omni_zsd_deg,
        })
    }

    pub(crate) fn value_mut(&mut self, column: Column) -> Option<&mut Decimal> {
        Some(match column {
            Column::FreqGhz => &mut self.freq_ghz,
            Column::Tx | Column::Rx | Column::Loc => return None,
            Column::TrSepM => &mut self.tr_sep_m,
            Column::PlDb => &mut self.pl_db,
            Column::MeanDirDsNs => &mut self.mean_dir_ds_ns,
            Column::OmniDsNs => &mut self.omni_ds_ns,
            Column::MeanLobeAsaDeg => &mut self.mean_lobe_asa_deg,
            Column::OmniAsaDeg => &mut self.omni_asa_deg,
            Column::MeanLobeAsdDeg => &mut self.mean_lobe_asd_deg,
            Column::OmniAsdDeg => &mut self.omni_asd_deg,
            Column::MeanLobeZsaDeg => &mut self.mean_lobe_zsa_deg,
            Column::OmniZsaDeg => &mut self.omni_zsa_deg,
            Column::MeanLobeZsdDeg => &mut self.mean_lobe_zsd_deg,
            Column::OmniZsdDeg => &mut self.omni_zsd_deg,
        })
    }

    /// A row with the given identity and every statistic set to zero.
    pub fn zeroed(
        freq_ghz: Decimal,
        tx_id: impl Into<String>,
        rx_id: impl Into<String>,
        loc_condition: LocCondition,
        tr_sep_m: Decimal,
        pl_db: Decimal,
    ) -> Self {
        PointFields {
            freq_ghz,
            tx_id: tx_id.into(),
            rx_id: rx_id.into(),
            loc_condition,
            tr_sep_m,
            pl_db,
            mean_dir_ds_ns: Decimal::ZERO,
            omni_ds_ns: Decimal::ZERO,
            mean_lobe_asa_deg: Decimal::ZERO,
            omni_asa_deg: Decimal::ZERO,
            mean_lobe_asd_deg: Decimal::ZERO,
            omni_asd_deg: Decimal::ZERO,
            mean_lobe_zsa_deg: Decimal::ZERO,
            omni_zsa_deg: Decimal::ZERO,
            mean_lobe_zsd_deg: Decimal::ZERO,
            omni_zsd_deg: Decimal::ZERO,
        }
    }

    pub fn set(&mut self, column: Column, value: Decimal) {
        if let Some(slot) = self.value_mut(column) {
            *slot = value;
        }
    }
}

/// One validated TX-RX measurement row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointRecord(PointFields);

impl PointRecord {
    pub fn new(fields: PointFields) -> Result<Self, ModelError> {
        if fields.tx_id.trim().is_empty() {
            return Err(ModelError::EmptyLabel { field: "tx" });
        }
        if fields.rx_id.trim().is_empty() {
            return Err(ModelError::EmptyLabel { field: "rx" });
        }
        require_positive("freq_ghz", fields.freq_ghz)?;
        require_positive("tr_sep_m", fields.tr_sep_m)?;
        require_positive("pl_db", fields.pl_db)?;
        for column in Column::numeric().skip(3) {
            let value = fields.value(column).expect("numeric column");
            require_non_negative(column.name(), value)?;
            if let Some(limit) = column.spread_limit() {
                if value > Decimal::from(limit) {
                    return Err(ModelError::SpreadAboveLimit {
                        field: column.name(),
                        value,
                        limit,
                    });
                }
            }
        }
        Ok(PointRecord(fields))
    }

    pub fn fields(&self) -> &PointFields {
        &self.0
    }

    pub fn into_fields(self) -> PointFields {
        self.0
    }

    /// Numeric column as `f64`, `None` for label columns.
    pub fn get_f64(&self, column: Column) -> Option<f64> {
        self.0.value(column).map(super::to_f64)
    }
}

impl Deref for PointRecord {
    type Target = PointFields;

    fn deref(&self) -> &PointFields {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    fn sample() -> PointFields {
        let mut f = PointFields::zeroed(
            d("142"),
            "TX1",
            "RX1",
            LocCondition::Los,
            d("24.43"),
            d("102.6"),
        );
        f.omni_ds_ns = d("15.7");
        f
    }

    #[test]
    fn accepts_valid_row() {
        let rec = PointRecord::new(sample()).unwrap();
        assert_eq!(rec.omni_ds_ns, d("15.7"));
        assert_eq!(rec.get_f64(Column::TrSepM), Some(24.43));
        assert_eq!(rec.get_f64(Column::Tx), None);
    }

    #[test]
    fn each_violation_is_distinct() {
        let mut f = sample();
        f.freq_ghz = Decimal::ZERO;
        assert!(matches!(
            PointRecord::new(f),
            Err(ModelError::NonPositive {
                field: "freq_ghz",
                ..
            })
        ));

        let mut f = sample();
        f.tr_sep_m = d("-1");
        assert!(matches!(
            PointRecord::new(f),
            Err(ModelError::NonPositive {
                field: "tr_sep_m",
                ..
            })
        ));

        let mut f = sample();
        f.omni_ds_ns = d("-0.1");
        assert!(matches!(
            PointRecord::new(f),
            Err(ModelError::Negative {
                field: "omni_ds_ns",
                ..
            })
        ));

        let mut f = sample();
        f.omni_asa_deg = d("180.1");
        assert!(matches!(
            PointRecord::new(f),
            Err(ModelError::SpreadAboveLimit {
                field: "omni_asa_deg",
                limit: 180,
                ..
            })
        ));

        let mut f = sample();
        f.omni_zsd_deg = d("90.5");
        assert!(matches!(
            PointRecord::new(f),
            Err(ModelError::SpreadAboveLimit {
                field: "omni_zsd_deg",
                limit: 90,
                ..
            })
        ));

        let mut f = sample();
        f.rx_id = "  ".into();
        assert!(matches!(
            PointRecord::new(f),
            Err(ModelError::EmptyLabel { field: "rx" })
        ));
    }

    #[test]
    fn boundary_spreads_are_allowed() {
        let mut f = sample();
        f.omni_asa_deg = d("180");
        f.omni_zsa_deg = d("90");
        assert!(PointRecord::new(f).is_ok());
    }

    #[test]
    fn equality_is_exact_on_decimal_value() {
        let a = PointRecord::new(sample()).unwrap();
        let mut f = sample();
        f.pl_db = d("102.60");
        assert_eq!(a, PointRecord::new(f).unwrap());
        let mut f = sample();
        f.pl_db = d("102.6000000001");
        assert_ne!(a, PointRecord::new(f).unwrap());
    }

    #[test]
    fn column_aliases() {
        assert_eq!(
            Column::from_alias("Mean Dir. DS"),
            Some(Column::MeanDirDsNs)
        );
        assert_eq!(Column::from_alias("Loc"), Some(Column::Loc));
        assert_eq!(Column::from_alias("omni_zsd_deg"), Some(Column::OmniZsdDeg));
        assert_eq!(Column::from_alias("bogus"), None);
    }
}
