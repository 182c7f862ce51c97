use std::sync::{Arc, LazyLock};

use super::{DerivationError, Result};
use crate::model::AsDefinition;
use crate::registry::Registry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AngleDomain {
    Azimuth,
    Zenith,
}

/// Received power versus pointing angle.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAngularSpectrum {
    angles_deg: Vec<f64>,
    powers_mw: Vec<f64>,
    domain: AngleDomain,
}

impl PowerAngularSpectrum {
    /// Azimuths must lie in `[0, 360)`, zeniths in `[0, 180]`.
    pub fn new(angles_deg: Vec<f64>, powers_mw: Vec<f64>, domain: AngleDomain) -> Result<Self> {
        if angles_deg.len() != powers_mw.len() {
            return Err(DerivationError::InvalidProfile(format!(
                "{} angles but {} powers",
                angles_deg.len(),
                powers_mw.len()
            )));
        }
        let in_range = |a: f64| match domain {
            AngleDomain::Azimuth => (0.0..360.0).contains(&a),
            AngleDomain::Zenith => (0.0..=180.0).contains(&a),
        };
        if let Some(a) = angles_deg.iter().find(|a| !in_range(**a)) {
            return Err(DerivationError::InvalidProfile(format!(
                "{domain:?} angle {a} out of range"
            )));
        }
        if powers_mw.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(DerivationError::InvalidProfile(
                "powers must be finite and >= 0 mW".into(),
            ));
        }
        Ok(PowerAngularSpectrum {
            angles_deg,
            powers_mw,
            domain,
        })
    }

    /// Wraps azimuths into `[0, 360)` before validating.
    pub fn azimuth(angles_deg: Vec<f64>, powers_mw: Vec<f64>) -> Result<Self> {
        let wrapped = angles_deg.into_iter().map(wrap_azimuth).collect();
        Self::new(wrapped, powers_mw, AngleDomain::Azimuth)
    }

    pub fn zenith(angles_deg: Vec<f64>, powers_mw: Vec<f64>) -> Result<Self> {
        Self::new(angles_deg, powers_mw, AngleDomain::Zenith)
    }

    pub fn angles_deg(&self) -> &[f64] {
        &self.angles_deg
    }

    pub fn powers_mw(&self) -> &[f64] {
        &self.powers_mw
    }

    pub fn domain(&self) -> AngleDomain {
        self.domain
    }

    pub fn total_power_mw(&self) -> f64 {
        self.powers_mw.iter().sum()
    }
}

pub fn wrap_azimuth(deg: f64) -> f64 {
    let w = deg.rem_euclid(360.0);
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

/// Circular variance `1 - |μ|²` of the spectrum, where μ is the
/// power-weighted mean of `e^{jφ}`.
///
/// Summed over angle pairs as `4 p_i p_j sin²((φ_i − φ_j)/2)`, which depends
/// only on angle differences and stays accurate for very narrow spectra.
pub fn circular_variance(pas: &PowerAngularSpectrum) -> Result<f64> {
    let total = pas.total_power_mw();
    if total.is_nan() || total <= 0.0 {
        return Err(DerivationError::NoPower);
    }
    let w: Vec<f64> = pas.powers_mw.iter().map(|p| p / total).collect();
    let phi: Vec<f64> = pas.angles_deg.iter().map(|a| a.to_radians()).collect();
    let mut v = 0.0;
    for i in 0..phi.len() {
        if w[i] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in i + 1..phi.len() {
            let s = ((phi[i] - phi[j]) / 2.0).sin();
            row += w[j] * s * s;
        }
        v += 4.0 * w[i] * row;
    }
    Ok(v.clamp(0.0, 1.0))
}

/// One definition of angular spread.
pub trait SpreadDefinition: Send + Sync {
    fn name(&self) -> &'static str;

    fn spread_deg(&self, pas: &PowerAngularSpectrum) -> Result<f64>;
}

/// `sqrt(Σ|e^{jφ} − μ|² p / Σp)`, in degrees. Always within `[0, 57.3]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Fleury;

impl SpreadDefinition for Fleury {
    fn name(&self) -> &'static str {
        "fleury"
    }

    fn spread_deg(&self, pas: &PowerAngularSpectrum) -> Result<f64> {
        Ok(circular_variance(pas)?.sqrt().to_degrees())
    }
}

/// Below this `|μ|²` the logarithm is treated as divergent.
const DEGENERATE_RESULTANT_SQ: f64 = 1e-12;

/// `sqrt(−2 ln|μ|)`, in degrees.
#[derive(Debug, Clone, Copy, Default)]
pub struct Tgpp;

impl SpreadDefinition for Tgpp {
    fn name(&self) -> &'static str {
        "3gpp"
    }

    fn spread_deg(&self, pas: &PowerAngularSpectrum) -> Result<f64> {
        let v = circular_variance(pas)?;
        if 1.0 - v < DEGENERATE_RESULTANT_SQ {
            return Err(DerivationError::DegenerateSpectrum);
        }
        // -2 ln|μ| = -ln(1 - v)
        Ok((-(-v).ln_1p()).max(0.0).sqrt().to_degrees())
    }
}

static DEFINITIONS: LazyLock<Registry<dyn SpreadDefinition>> = LazyLock::new(|| {
    let mut reg: Registry<dyn SpreadDefinition> = Registry::new();
    reg.register("fleury", Arc::new(Fleury));
    reg.register("3gpp", Arc::new(Tgpp));
    reg
});

/// Angular-spread definitions keyed by name (`fleury`, `3gpp`).
pub fn spread_definitions() -> &'static Registry<dyn SpreadDefinition> {
    &DEFINITIONS
}

pub fn definition_for(as_def: AsDefinition) -> Arc<dyn SpreadDefinition> {
    spread_definitions()
        .get(as_def.key())
        .expect("built-in definition registered")
}

pub fn angular_spread_fleury(pas: &PowerAngularSpectrum) -> Result<f64> {
    Fleury.spread_deg(pas)
}

pub fn angular_spread_3gpp(pas: &PowerAngularSpectrum) -> Result<f64> {
    Tgpp.spread_deg(pas)
}
