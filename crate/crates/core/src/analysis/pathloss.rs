use serde::Serialize;

use super::{AnalysisError, PathLossSample, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Free-space path loss at 1 m, `20 log10(4π f / c)` in dB.
pub fn fspl_1m(freq_ghz: f64) -> Result<f64> {
    if !(freq_ghz > 0.0 && freq_ghz.is_finite()) {
        return Err(AnalysisError::NonPositiveFrequency(freq_ghz));
    }
    Ok(20.0 * (4.0 * std::f64::consts::PI * freq_ghz * 1e9 / SPEED_OF_LIGHT).log10())
}

/// Frequency used for the free-space reference of a CI fit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum FsplMode {
    /// Each point referenced to FSPL at its own frequency.
    #[default]
    PerPoint,
    /// All points referenced to one frequency, in GHz.
    Common(f64),
}

/// Close-in reference model `PL(d) = FSPL(1 m) + 10 n log10(d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CiFit {
    pub ple: f64,
    pub sigma_db: f64,
    pub fspl_ref_db: f64,
    pub n_points: usize,
    /// Reference frequency; in per-point mode the mean point frequency.
    pub freq_ghz_ref: f64,
}

/// Alpha-beta-gamma model `PL = 10α log10(d) + β + 10γ log10(f/1 GHz)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbgFit {
    pub alpha: f64,
    pub beta_db: f64,
    pub gamma: f64,
    pub sigma_db: f64,
    pub n_points: usize,
}

fn sorted(points: &[PathLossSample]) -> Vec<PathLossSample> {
    let mut v = points.to_vec();
    v.sort_by(|a, b| {
        a.tr_sep_m
            .total_cmp(&b.tr_sep_m)
            .then(a.pl_db.total_cmp(&b.pl_db))
            .then(a.freq_ghz.total_cmp(&b.freq_ghz))
    });
    v
}

/// `(A, B)` pairs of the CI regression: `A = PL − FSPL`, `B = 10 log10(d)`.
fn ci_terms(points: &[PathLossSample], mode: FsplMode) -> Result<Vec<(f64, f64)>> {
    let common = match mode {
        FsplMode::Common(f) => Some(fspl_1m(f)?),
        FsplMode::PerPoint => None,
    };
    points
        .iter()
        .map(|p| {
            if p.tr_sep_m.is_nan() || p.tr_sep_m <= 1.0 {
                return Err(AnalysisError::DistanceBelowReference(p.tr_sep_m));
            }
            let fspl = match common {
                Some(v) => v,
                None => fspl_1m(p.freq_ghz)?,
            };
            Ok((p.pl_db - fspl, 10.0 * p.tr_sep_m.log10()))
        })
        .collect()
}

/// Sufficient statistics of a CI fit. Moments of disjoint sets add, so the
/// fit over a union follows from the summed moments.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CiMoments {
    pub sum_ab: f64,
    pub sum_bb: f64,
    pub sum_aa: f64,
    pub sum_freq: f64,
    pub n: usize,
}

impl CiMoments {
    pub fn from_points(points: &[PathLossSample], mode: FsplMode) -> Result<Self> {
        let pts = sorted(points);
        let terms = ci_terms(&pts, mode)?;
        let mut m = CiMoments::default();
        for ((a, b), p) in terms.iter().zip(&pts) {
            m.sum_ab += a * b;
            m.sum_bb += b * b;
            m.sum_aa += a * a;
            m.sum_freq += p.freq_ghz;
        }
        m.n = pts.len();
        Ok(m)
    }

    pub fn merge(&self, other: &CiMoments) -> CiMoments {
        CiMoments {
            sum_ab: self.sum_ab + other.sum_ab,
            sum_bb: self.sum_bb + other.sum_bb,
            sum_aa: self.sum_aa + other.sum_aa,
            sum_freq: self.sum_freq + other.sum_freq,
            n: self.n + other.n,
        }
    }

    /// `n = ΣAB / ΣB²`.
    pub fn ple(&self) -> Result<f64> {
        if self.n == 0 {
            return Err(AnalysisError::EmptyInput);
        }
        Ok(self.sum_ab / self.sum_bb)
    }

    /// `σ² = (ΣA² − (ΣAB)²/ΣB²) / N`, clamped at zero.
    pub fn sigma_db(&self) -> Result<f64> {
        let ple = self.ple()?;
        Ok(((self.sum_aa - ple * self.sum_ab) / self.n as f64)
            .max(0.0)
            .sqrt())
    }
}

/// Least-squares CI fit. `σ` is the population RMS of the residuals.
pub fn fit_ci(points: &[PathLossSample], mode: FsplMode) -> Result<CiFit> {
    if points.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let pts = sorted(points);
    let moments = CiMoments::from_points(&pts, mode)?;
    let ple = moments.ple()?;
    let terms = ci_terms(&pts, mode)?;
    let ss: f64 = terms.iter().map(|(a, b)| (a - ple * b).powi(2)).sum();
    let n = pts.len();
    let freq_ghz_ref = match mode {
        FsplMode::Common(f) => f,
        FsplMode::PerPoint => moments.sum_freq / n as f64,
    };
    Ok(CiFit {
        ple,
        sigma_db: (ss / n as f64).sqrt(),
        fspl_ref_db: fspl_1m(freq_ghz_ref)?,
        n_points: n,
        freq_ghz_ref,
    })
}

impl CiFit {
    /// Model prediction at distance `d` (m) for reference FSPL `fspl_db`.
    pub fn predict(&self, fspl_db: f64, d: f64) -> f64 {
        fspl_db + 10.0 * self.ple * d.log10()
    }
}

impl AbgFit {
    pub fn predict(&self, d: f64, freq_ghz: f64) -> f64 {
        10.0 * self.alpha * d.log10() + self.beta_db + 10.0 * self.gamma * freq_ghz.log10()
    }
}

fn distinct(values: impl Iterator<Item = f64>) -> usize {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// Least-squares ABG fit through the normal equations.
///
/// The intercept is eliminated by centring, leaving a 2x2 system in α and γ.
/// Needs at least three points, two distinct distances and two distinct
/// frequencies.
pub fn fit_abg(points: &[PathLossSample]) -> Result<AbgFit> {
    if points.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    for p in points {
        if p.tr_sep_m.is_nan() || p.tr_sep_m <= 0.0 {
            return Err(AnalysisError::DistanceBelowReference(p.tr_sep_m));
        }
        if p.freq_ghz.is_nan() || p.freq_ghz <= 0.0 {
            return Err(AnalysisError::NonPositiveFrequency(p.freq_ghz));
        }
    }
    let pts = sorted(points);
    let n = pts.len();
    if n < 3
        || distinct(pts.iter().map(|p| p.tr_sep_m)) < 2
        || distinct(pts.iter().map(|p| p.freq_ghz)) < 2
    {
        return Err(AnalysisError::RankDeficient);
    }
    let rows: Vec<(f64, f64, f64)> = pts
        .iter()
        .map(|p| {
            (
                10.0 * p.tr_sep_m.log10(),
                10.0 * p.freq_ghz.log10(),
                p.pl_db,
            )
        })
        .collect();
    let nf = n as f64;
    let (m1, m2, my) = rows
        .iter()
        .fold((0.0, 0.0, 0.0), |(a, b, c), r| (a + r.0, b + r.1, c + r.2));
    let (m1, m2, my) = (m1 / nf, m2 / nf, my / nf);
    let (mut s11, mut s12, mut s22, mut s1y, mut s2y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x1, x2, y) in &rows {
        let (u, v, w) = (x1 - m1, x2 - m2, y - my);
        s11 += u * u;
        s12 += u * v;
        s22 += v * v;
        s1y += u * w;
        s2y += v * w;
    }
    let det = s11 * s22 - s12 * s12;
    if det.is_nan() || det <= 1e-12 * s11 * s22 {
        return Err(AnalysisError::RankDeficient);
    }
    let alpha = (s1y * s22 - s2y * s12) / det;
    let gamma = (s2y * s11 - s1y * s12) / det;
    let beta_db = my - alpha * m1 - gamma * m2;
    let ss: f64 = rows
        .iter()
        .map(|(x1, x2, y)| (y - (alpha * x1 + beta_db + gamma * x2)).powi(2))
        .sum();
    Ok(AbgFit {
        alpha,
        beta_db,
        gamma,
        sigma_db: (ss / nf).sqrt(),
        n_points: n,
    })
}
