use serde::Serialize;

use super::{AnalysisError, Result};

/// Moments of the natural log of a positive sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LognormalStats {
    pub mu_ln: f64,
    /// Population standard deviation of `ln x`.
    pub sigma_ln: f64,
    /// `exp(mu_ln + sigma_ln² / 2)`, in the unit of the samples.
    pub mean_linear: f64,
    pub n_points: usize,
}

impl LognormalStats {
    pub fn geometric_mean(&self) -> f64 {
        self.mu_ln.exp()
    }
}

pub fn lognormal_stats(samples: &[f64]) -> Result<LognormalStats> {
    if samples.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    if let Some(&bad) = samples.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(AnalysisError::NonPositiveSample(bad));
    }
    let mut logs: Vec<f64> = samples.iter().map(|x| x.ln()).collect();
    logs.sort_by(f64::total_cmp);
    let n = logs.len() as f64;
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / n;
    let sigma = var.sqrt();
    Ok(LognormalStats {
        mu_ln: mu,
        sigma_ln: sigma,
        mean_linear: (mu + var / 2.0).exp(),
        n_points: logs.len(),
    })
}

/// Step CDF with plotting positions `i/N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalCdf {
    pub sorted_values: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn len(&self) -> usize {
        self.sorted_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.sorted_values
            .iter()
            .copied()
            .zip(self.probabilities.iter().copied())
    }
}

pub fn empirical_cdf(samples: &[f64]) -> Result<EmpiricalCdf> {
    if samples.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    if let Some(&bad) = samples.iter().find(|x| !x.is_finite()) {
        return Err(AnalysisError::NonFiniteSample(bad));
    }
    let mut sorted_values = samples.to_vec();
    sorted_values.sort_by(f64::total_cmp);
    let n = sorted_values.len();
    let probabilities = (1..=n).map(|i| i as f64 / n as f64).collect();
    Ok(EmpiricalCdf {
        sorted_values,
        probabilities,
    })
}
