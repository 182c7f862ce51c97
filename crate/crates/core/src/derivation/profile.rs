use serde::Deserialize;

use super::{DerivationError, Result};
use crate::model::{to_f64, Combine, ThresholdRule};

/// Received power versus delay for one pointing direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    delays_ns: Vec<f64>,
    powers_mw: Vec<f64>,
    noise_floor_dbm: f64,
}

impl PowerDelayProfile {
    pub fn new(delays_ns: Vec<f64>, powers_mw: Vec<f64>, noise_floor_dbm: f64) -> Result<Self> {
        if delays_ns.len() != powers_mw.len() {
            return Err(DerivationError::InvalidProfile(format!(
                "{} delays but {} powers",
                delays_ns.len(),
                powers_mw.len()
            )));
        }
        if delays_ns.iter().any(|d| !d.is_finite()) || !noise_floor_dbm.is_finite() {
            return Err(DerivationError::InvalidProfile(
                "non-finite delay or noise floor".into(),
            ));
        }
        if delays_ns.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DerivationError::InvalidProfile(
                "delays must be strictly increasing".into(),
            ));
        }
        if powers_mw.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(DerivationError::InvalidProfile(
                "powers must be finite and >= 0 mW".into(),
            ));
        }
        Ok(PowerDelayProfile {
            delays_ns,
            powers_mw,
            noise_floor_dbm,
        })
    }

    /// Builds a profile from dBm samples; `None` marks a bin with no power.
    pub fn from_dbm(
        delays_ns: Vec<f64>,
        powers_dbm: &[Option<f64>],
        noise_floor_dbm: f64,
    ) -> Result<Self> {
        let powers = powers_dbm
            .iter()
            .map(|p| p.map_or(0.0, dbm_to_mw))
            .collect();
        Self::new(delays_ns, powers, noise_floor_dbm)
    }

    pub fn delays_ns(&self) -> &[f64] {
        &self.delays_ns
    }

    pub fn powers_mw(&self) -> &[f64] {
        &self.powers_mw
    }

    pub fn noise_floor_dbm(&self) -> f64 {
        self.noise_floor_dbm
    }

    pub fn len(&self) -> usize {
        self.delays_ns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays_ns.is_empty()
    }

    pub fn total_power_mw(&self) -> f64 {
        self.powers_mw.iter().sum()
    }

    pub fn peak_mw(&self) -> f64 {
        self.powers_mw.iter().copied().fold(0.0, f64::max)
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Power floor in dBm for a profile whose strongest bin is `peak_dbm`.
///
/// Both combine modes give the same floor (the larger of the two), because a
/// bin passes every criterion exactly when it clears the highest one.
pub fn threshold_floor_dbm(
    rule: &ThresholdRule,
    peak_dbm: f64,
    noise_floor_dbm: f64,
) -> Option<f64> {
    let from_peak = rule.rel_peak_db().map(|db| peak_dbm - to_f64(db));
    let from_noise = rule.above_noise_db().map(|db| noise_floor_dbm + to_f64(db));
    match (from_peak, from_noise, rule.combine()) {
        (Some(a), Some(b), Combine::MaxOf | Combine::AllOf) => Some(a.max(b)),
        (a, b, _) => a.or(b),
    }
}

/// Zeroes every bin below the rule's floor and, with a gate, every bin later
/// than the gate delay. The delay grid is kept.
pub fn apply_threshold_pdp(
    pdp: &PowerDelayProfile,
    rule: &ThresholdRule,
) -> Result<PowerDelayProfile> {
    let peak = pdp.peak_mw();
    if peak <= 0.0 {
        return Err(DerivationError::EmptyAfterThreshold);
    }
    let floor_mw = threshold_floor_dbm(rule, mw_to_dbm(peak), pdp.noise_floor_dbm).map(dbm_to_mw);
    let gate = rule.gate_ns().map(to_f64);
    let powers: Vec<f64> = pdp
        .delays_ns
        .iter()
        .zip(&pdp.powers_mw)
        .map(|(&tau, &p)| {
            let below = floor_mw.is_some_and(|f| p < f);
            let late = gate.is_some_and(|g| tau > g);
            if below || late {
                0.0
            } else {
                p
            }
        })
        .collect();
    if powers.iter().all(|p| *p == 0.0) {
        return Err(DerivationError::EmptyAfterThreshold);
    }
    Ok(PowerDelayProfile {
        delays_ns: pdp.delays_ns.clone(),
        powers_mw: powers,
        noise_floor_dbm: pdp.noise_floor_dbm,
    })
}

/// Square root of the second central moment of the profile, in ns.
pub fn rms_delay_spread(pdp: &PowerDelayProfile) -> Result<f64> {
    let total = pdp.total_power_mw();
    if total.is_nan() || total <= 0.0 {
        return Err(DerivationError::NoPower);
    }
    // measure from the first delay so large absolute offsets do not cost precision
    let origin = pdp.delays_ns.first().copied().unwrap_or_default();
    let mean = pdp
        .delays_ns
        .iter()
        .zip(&pdp.powers_mw)
        .map(|(t, p)| p * (t - origin))
        .sum::<f64>()
        / total;
    let var = pdp
        .delays_ns
        .iter()
        .zip(&pdp.powers_mw)
        .map(|(t, p)| {
            let dev = t - origin - mean;
            p * dev * dev
        })
        .sum::<f64>()
        / total;
    Ok(var.max(0.0).sqrt())
}

/// Omnidirectional profile synthesized from directional ones: linear powers
/// summed per delay bin. All inputs must share one delay grid.
pub fn synthesize_omni(pdps: &[&PowerDelayProfile]) -> Result<PowerDelayProfile> {
    let first = pdps.first().ok_or(DerivationError::EmptyAfterThreshold)?;
    if pdps.iter().any(|p| p.delays_ns != first.delays_ns) {
        return Err(DerivationError::GridMismatch);
    }
    let mut powers = vec![0.0; first.len()];
    for pdp in pdps {
        for (acc, p) in powers.iter_mut().zip(&pdp.powers_mw) {
            *acc += p;
        }
    }
    let noise_mw: f64 = pdps.iter().map(|p| dbm_to_mw(p.noise_floor_dbm)).sum();
    PowerDelayProfile::new(first.delays_ns.clone(), powers, mw_to_dbm(noise_mw))
}

/// Which end of the link was steered for a directional measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkEnd {
    #[default]
    Rx,
    Tx,
}

/// One pointing direction with its measured profile.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalPdp {
    pub pdp: PowerDelayProfile,
    pub azimuth_deg: f64,
    pub zenith_deg: f64,
    pub end: LinkEnd,
    /// Spatial lobe the direction belongs to, when lobes were segmented upstream.
    pub lobe: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDirection {
    delays_ns: Vec<f64>,
    powers_dbm: Vec<Option<f64>>,
    noise_floor_dbm: f64,
    azimuth_deg: f64,
    zenith_deg: f64,
    #[serde(default)]
    end: LinkEnd,
    #[serde(default)]
    lobe: Option<u32>,
}

/// Reads directional profiles from JSON: one direction object, an array of
/// them, or `{"directions": [...]}`. Each object carries `delays_ns`,
/// `powers_dbm` (`null` for an empty bin), `noise_floor_dbm`, `azimuth_deg`,
/// `zenith_deg` and optionally `end` (`"rx"`/`"tx"`) and `lobe`.
pub fn parse_profiles(bytes: &[u8]) -> Result<Vec<DirectionalPdp>> {
    let invalid = |e: serde_json::Error| DerivationError::InvalidProfile(e.to_string());
    let mut doc: serde_json::Value = serde_json::from_slice(bytes).map_err(invalid)?;
    if let Some(directions) = doc.as_object_mut().and_then(|o| o.remove("directions")) {
        doc = directions;
    }
    let raw: Vec<RawDirection> = if doc.is_array() {
        serde_json::from_value(doc).map_err(invalid)?
    } else {
        vec![serde_json::from_value(doc).map_err(invalid)?]
    };
    raw.into_iter()
        .map(|r| {
            Ok(DirectionalPdp {
                pdp: PowerDelayProfile::from_dbm(r.delays_ns, &r.powers_dbm, r.noise_floor_dbm)?,
                azimuth_deg: r.azimuth_deg,
                zenith_deg: r.zenith_deg,
                end: r.end,
                lobe: r.lobe,
            })
        })
        .collect()
}
