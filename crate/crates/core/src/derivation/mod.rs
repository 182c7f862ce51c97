//! Point statistics from raw directional power delay profiles.
//!
//! The pipeline per TX-RX location: threshold each direction's PDP with
//! `t_pdp`, sum the survivors into an omnidirectional PDP, take delay spreads
//! from both, drop directions below `t_pas`, and compute angular spreads with
//! the metadata's AS definition.

mod profile;
mod spread;

use std::collections::BTreeMap;

use thiserror::Error;

pub use profile::{
    apply_threshold_pdp, dbm_to_mw, mw_to_dbm, parse_profiles, rms_delay_spread, synthesize_omni,
    threshold_floor_dbm, DirectionalPdp, LinkEnd, PowerDelayProfile,
};
pub use spread::{
    angular_spread_3gpp, angular_spread_fleury, circular_variance, definition_for,
    spread_definitions, wrap_azimuth, AngleDomain, Fleury, PowerAngularSpectrum, SpreadDefinition,
    Tgpp,
};

use crate::model::{
    from_f64, to_f64, Column, Decimal, LocCondition, MetadataRecord, ModelError, PointFields,
    PointRecord,
};

/// Decimal places kept for derived statistics.
pub const DERIVED_PLACES: u32 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DerivationError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("no bin survives thresholding")]
    EmptyAfterThreshold,
    #[error("profile carries no power")]
    NoPower,
    #[error("mean direction vector has zero length; the 3GPP spread diverges")]
    DegenerateSpectrum,
    #[error("metadata field {0} is required")]
    MissingMetadata(&'static str),
    #[error("directional profiles do not share one delay grid")]
    GridMismatch,
    #[error("derived value for {field} is not finite")]
    NonFinite { field: &'static str },
    #[error("derived row is invalid: {0}")]
    Invariant(#[from] ModelError),
}

pub type Result<T, E = DerivationError> = std::result::Result<T, E>;

/// `PL = P_TX,avg + G_TX + G_RX − P_RX`, in dB.
pub fn path_loss_from_link_budget(prx_dbm: f64, meta: &MetadataRecord) -> Result<f64> {
    let ptx = meta
        .ptx_avg_dbm
        .ok_or(DerivationError::MissingMetadata("ptx_avg"))?;
    let gtx = meta
        .g_tx_dbi
        .ok_or(DerivationError::MissingMetadata("g_tx"))?;
    let grx = meta
        .g_rx_dbi
        .ok_or(DerivationError::MissingMetadata("g_rx"))?;
    Ok(to_f64(ptx) + to_f64(gtx) + to_f64(grx) - prx_dbm)
}

/// Identity and geometry of one TX-RX location.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub tx_id: String,
    pub rx_id: String,
    pub loc_condition: LocCondition,
    pub tr_sep_m: Decimal,
}

/// Omni and mean-lobe spreads for one link end.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct EndSpreads {
    omni_az: f64,
    omni_zen: f64,
    lobe_az: f64,
    lobe_zen: f64,
}

struct Steered<'a> {
    dir: &'a DirectionalPdp,
    power_mw: f64,
}

fn spectra(dirs: &[&Steered]) -> Result<(PowerAngularSpectrum, PowerAngularSpectrum)> {
    let powers: Vec<f64> = dirs.iter().map(|d| d.power_mw).collect();
    let az = PowerAngularSpectrum::azimuth(
        dirs.iter().map(|d| d.dir.azimuth_deg).collect(),
        powers.clone(),
    )?;
    let zen =
        PowerAngularSpectrum::zenith(dirs.iter().map(|d| d.dir.zenith_deg).collect(), powers)?;
    Ok((az, zen))
}

fn end_spreads(dirs: &[&Steered], def: &dyn SpreadDefinition) -> Result<EndSpreads> {
    if dirs.is_empty() {
        return Ok(EndSpreads::default());
    }
    let (az, zen) = spectra(dirs)?;
    let omni_az = def.spread_deg(&az)?;
    let omni_zen = def.spread_deg(&zen)?;

    let mut lobes: BTreeMap<u32, Vec<&Steered>> = BTreeMap::new();
    for d in dirs {
        if let Some(l) = d.dir.lobe {
            lobes.entry(l).or_default().push(d);
        }
    }
    if lobes.is_empty() {
        return Ok(EndSpreads {
            omni_az,
            omni_zen,
            lobe_az: omni_az,
            lobe_zen: omni_zen,
        });
    }
    let (mut sum_az, mut sum_zen) = (0.0, 0.0);
    for members in lobes.values() {
        let (az, zen) = spectra(members)?;
        sum_az += def.spread_deg(&az)?;
        sum_zen += def.spread_deg(&zen)?;
    }
    let n = lobes.len() as f64;
    Ok(EndSpreads {
        omni_az,
        omni_zen,
        lobe_az: sum_az / n,
        lobe_zen: sum_zen / n,
    })
}

fn rounded(field: &'static str, v: f64) -> Result<Decimal> {
    from_f64(v, DERIVED_PLACES).ok_or(DerivationError::NonFinite { field })
}

/// Derives one point-data row from the directional profiles of a location.
///
/// Requires `t_pdp`, `as_def` and the link-budget fields in `meta`. Directions
/// whose PDP is empty after thresholding are dropped; `t_pas`, when present,
/// removes directions whose total power falls below its floor relative to
/// the strongest direction. Without lobe labels the whole spectrum counts as
/// one lobe. Departure spreads are zero when no TX-end directions are given.
pub fn derive_point(
    dirs: &[DirectionalPdp],
    meta: &MetadataRecord,
    geometry: &Geometry,
) -> Result<PointRecord> {
    let t_pdp = meta
        .t_pdp
        .as_ref()
        .ok_or(DerivationError::MissingMetadata("t_pdp"))?;
    let as_def = meta
        .as_def
        .ok_or(DerivationError::MissingMetadata("as_def"))?;
    path_loss_from_link_budget(0.0, meta)?;

    let mut thresholded = Vec::new();
    for dir in dirs {
        match apply_threshold_pdp(&dir.pdp, t_pdp.rule()) {
            Ok(pdp) => thresholded.push((dir, pdp)),
            Err(DerivationError::EmptyAfterThreshold) => continue,
            Err(e) => return Err(e),
        }
    }
    if thresholded.is_empty() {
        return Err(DerivationError::EmptyAfterThreshold);
    }
    let kept: Vec<DirectionalPdp> = thresholded
        .iter()
        .map(|(dir, pdp)| DirectionalPdp {
            pdp: pdp.clone(),
            ..(*dir).clone()
        })
        .collect();
    let surviving: Vec<Steered> = kept
        .iter()
        .map(|dir| Steered {
            dir,
            power_mw: dir.pdp.total_power_mw(),
        })
        .collect();

    let omni = synthesize_omni(&kept.iter().map(|d| &d.pdp).collect::<Vec<_>>())?;
    let omni_ds = rms_delay_spread(&omni)?;
    let total: f64 = surviving.iter().map(|s| s.power_mw).sum();
    let mut mean_dir_ds = 0.0;
    for s in &surviving {
        mean_dir_ds += s.power_mw * rms_delay_spread(&s.dir.pdp)?;
    }
    mean_dir_ds /= total;
    let pl = path_loss_from_link_budget(mw_to_dbm(total), meta)?;

    let strongest = surviving.iter().map(|s| s.power_mw).fold(0.0, f64::max);
    let in_pas = |s: &&Steered| match &meta.t_pas {
        None => true,
        Some(spec) => {
            let floor = threshold_floor_dbm(
                spec.rule(),
                mw_to_dbm(strongest),
                s.dir.pdp.noise_floor_dbm(),
            );
            floor.is_none_or(|f| mw_to_dbm(s.power_mw) >= f)
        }
    };
    let def = definition_for(as_def);
    let rx: Vec<&Steered> = surviving
        .iter()
        .filter(|s| s.dir.end == LinkEnd::Rx)
        .filter(in_pas)
        .collect();
    let tx: Vec<&Steered> = surviving
        .iter()
        .filter(|s| s.dir.end == LinkEnd::Tx)
        .filter(in_pas)
        .collect();
    let arrival = end_spreads(&rx, def.as_ref())?;
    let departure = end_spreads(&tx, def.as_ref())?;

    let mut fields = PointFields::zeroed(
        meta.fc.ghz,
        geometry.tx_id.clone(),
        geometry.rx_id.clone(),
        geometry.loc_condition,
        geometry.tr_sep_m,
        rounded("pl_db", pl)?,
    );
    for (column, value) in [
        (Column::MeanDirDsNs, mean_dir_ds),
        (Column::OmniDsNs, omni_ds),
        (Column::MeanLobeAsaDeg, arrival.lobe_az),
        (Column::OmniAsaDeg, arrival.omni_az),
        (Column::MeanLobeAsdDeg, departure.lobe_az),
        (Column::OmniAsdDeg, departure.omni_az),
        (Column::MeanLobeZsaDeg, arrival.lobe_zen),
        (Column::OmniZsaDeg, arrival.omni_zen),
        (Column::MeanLobeZsdDeg, departure.lobe_zen),
        (Column::OmniZsdDeg, departure.omni_zen),
    ] {
        fields.set(column, rounded(column.name(), value)?);
    }
    Ok(PointRecord::new(fields)?)
}
