//! Campaign checks and cross-campaign pooling compatibility.
//!
//! Every check produces [`CompatFinding`]s with stable codes:
//!
//! | code | severity | raised by |
//! |------|----------|-----------|
//! | `DUP_PAIR` | Block | [`validate_campaign`] |
//! | `FREQ_MISMATCH` | Block | [`validate_campaign`] |
//! | `MISSING_AS_DEF` | Block | [`validate_campaign`] |
//! | `EMPTY_ID` | Block | [`validate_campaign`] |
//! | `THRESHOLD_COMPOSITION_AMBIGUOUS` | Info | [`validate_campaign`] |
//! | `ENV_MISMATCH` | Block or Warn | [`assess_pooling`] |
//! | `FREQ_NEAR` / `FREQ_OUT_OF_TOLERANCE` | Info / Block | [`assess_pooling`] |
//! | `AS_DEF_MISMATCH` | Warn | [`assess_pooling`] |
//! | `HPBW_RATIO` | Warn | [`assess_pooling`] |
//! | `THRESHOLD_RULE_DIFFERS` | Warn | [`assess_pooling`] |
//! | `THRESHOLD_MISSING` | Block or Info | [`assess_pooling`] |
//! | `BW_DIFFERS` | Warn | [`assess_pooling`] |
//! | `DUP_CAMPAIGN` | Block | [`pool`] |

use std::collections::HashSet;

use thiserror::Error;

use crate::model::{
    to_f64, Campaign, CampaignParts, Column, CompatFinding, MetadataRecord, PooledDataset,
    Severity, ThresholdSpec,
};

/// Relative tolerance between point frequencies and the campaign carrier.
const CAMPAIGN_FREQ_TOL: f64 = 0.01;

/// Thresholds that decide the severity of pooling findings. The defaults are
/// policy choices, not physical limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompatPolicy {
    freq_rel_tol: f64,
    require_same_env: bool,
    warn_on_as_def_mismatch: bool,
    warn_on_hpbw_ratio_gt: f64,
    block_on_missing_threshold: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("freq_rel_tol must lie in [0, 1], got {0}")]
    FreqTolerance(f64),
    #[error("warn_on_hpbw_ratio_gt must be >= 1, got {0}")]
    HpbwRatio(f64),
}

impl CompatPolicy {
    pub fn new(
        freq_rel_tol: f64,
        require_same_env: bool,
        warn_on_as_def_mismatch: bool,
        warn_on_hpbw_ratio_gt: f64,
        block_on_missing_threshold: bool,
    ) -> Result<Self, PolicyError> {
        if !(0.0..=1.0).contains(&freq_rel_tol) {
            return Err(PolicyError::FreqTolerance(freq_rel_tol));
        }
        if warn_on_hpbw_ratio_gt.is_nan() || warn_on_hpbw_ratio_gt < 1.0 {
            return Err(PolicyError::HpbwRatio(warn_on_hpbw_ratio_gt));
        }
        Ok(CompatPolicy {
            freq_rel_tol,
            require_same_env,
            warn_on_as_def_mismatch,
            warn_on_hpbw_ratio_gt,
            block_on_missing_threshold,
        })
    }

    pub fn with_freq_rel_tol(self, tol: f64) -> Result<Self, PolicyError> {
        Self::new(
            tol,
            self.require_same_env,
            self.warn_on_as_def_mismatch,
            self.warn_on_hpbw_ratio_gt,
            self.block_on_missing_threshold,
        )
    }

    pub fn with_require_same_env(mut self, on: bool) -> Self {
        self.require_same_env = on;
        self
    }

    pub fn with_block_on_missing_threshold(mut self, on: bool) -> Self {
        self.block_on_missing_threshold = on;
        self
    }

    pub fn freq_rel_tol(&self) -> f64 {
        self.freq_rel_tol
    }

    pub fn require_same_env(&self) -> bool {
        self.require_same_env
    }

    pub fn warn_on_as_def_mismatch(&self) -> bool {
        self.warn_on_as_def_mismatch
    }

    pub fn warn_on_hpbw_ratio_gt(&self) -> f64 {
        self.warn_on_hpbw_ratio_gt
    }

    pub fn block_on_missing_threshold(&self) -> bool {
        self.block_on_missing_threshold
    }
}

impl Default for CompatPolicy {
    fn default() -> Self {
        CompatPolicy {
            freq_rel_tol: 0.05,
            require_same_env: true,
            warn_on_as_def_mismatch: true,
            warn_on_hpbw_ratio_gt: 2.0,
            block_on_missing_threshold: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoolError {
    #[error("pooling blocked by {} finding(s): {}", .0.len(), codes(.0))]
    PoolBlocked(Vec<CompatFinding>),
}

fn codes(findings: &[CompatFinding]) -> String {
    findings
        .iter()
        .map(|f| f.code.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Checks one campaign: unique TX-RX pairs, point frequencies within 1% of the
/// carrier, an AS definition whenever angular spreads are populated, and
/// non-empty identifiers. Point and metadata invariants already hold by
/// construction of their types.
pub fn validate_campaign(c: &CampaignParts) -> Vec<CompatFinding> {
    let id = c.campaign_id.as_str();
    let mut findings = Vec::new();

    if c.campaign_id.trim().is_empty() {
        findings.push(CompatFinding::block(
            "EMPTY_ID",
            "campaign_id",
            "campaign_id must not be empty",
        ));
    }
    if c.institution.trim().is_empty() {
        findings.push(CompatFinding::block(
            "EMPTY_ID",
            "institution",
            "institution must not be empty",
        ));
    }

    let mut seen = HashSet::new();
    for (row, p) in c.points.iter().enumerate() {
        if !seen.insert((p.tx_id.as_str(), p.rx_id.as_str())) {
            findings.push(CompatFinding::block(
                "DUP_PAIR",
                "tx,rx",
                format!(
                    "row {}: pair ({}, {}) already present",
                    row + 1,
                    p.tx_id,
                    p.rx_id
                ),
            ));
        }
    }

    let fc = c.metadata.fc_ghz();
    for (row, p) in c.points.iter().enumerate() {
        let f = to_f64(p.freq_ghz);
        let rel = (f - fc).abs() / fc;
        if rel > CAMPAIGN_FREQ_TOL {
            findings.push(CompatFinding::block(
                "FREQ_MISMATCH",
                "freq_ghz",
                format!(
                    "row {}: point frequency {} GHz is {:.2}% from carrier {} GHz (limit 1%)",
                    row + 1,
                    p.freq_ghz,
                    rel * 100.0,
                    c.metadata.fc.ghz
                ),
            ));
        }
    }

    if c.metadata.as_def.is_none() {
        let angular = c.points.iter().any(|p| {
            Column::numeric()
                .filter(|col| col.is_angular_spread())
                .any(|col| !p.value(col).unwrap_or_default().is_zero())
        });
        if angular {
            findings.push(CompatFinding::block(
                "MISSING_AS_DEF",
                "as_def",
                "angular spreads are populated but the AS definition is absent",
            ));
        }
    }

    for (field, spec) in [("t_pdp", &c.metadata.t_pdp), ("t_pas", &c.metadata.t_pas)] {
        if let Some(spec) = spec {
            if spec.rule().is_gate_and_floor() {
                findings.push(CompatFinding::info(
                    "THRESHOLD_COMPOSITION_AMBIGUOUS",
                    field,
                    format!(
                        "{:?} combines a delay gate with a power floor; whether both must hold is not stated",
                        spec.text()
                    ),
                ));
            }
        }
    }

    for f in &mut findings {
        f.campaigns = vec![id.to_string()];
    }
    findings
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

fn threshold_findings(
    field: &str,
    a: Option<&ThresholdSpec>,
    b: Option<&ThresholdSpec>,
    policy: &CompatPolicy,
    out: &mut Vec<CompatFinding>,
) {
    match (a, b) {
        (Some(ta), Some(tb)) => {
            if ta.rule() != tb.rule() {
                out.push(CompatFinding::warn(
                    "THRESHOLD_RULE_DIFFERS",
                    field,
                    format!("{:?} vs {:?}", ta.text(), tb.text()),
                ));
            }
        }
        (None, None) => {}
        _ => {
            let severity = if policy.block_on_missing_threshold {
                Severity::Block
            } else {
                Severity::Info
            };
            out.push(CompatFinding::new(
                severity,
                "THRESHOLD_MISSING",
                field,
                "only one campaign states this threshold",
            ));
        }
    }
}

/// Compares two campaigns' metadata. Findings depend only on the unordered
/// pair, so `assess_pooling(a, b)` and `assess_pooling(b, a)` agree on codes
/// and severities.
pub fn assess_pooling(a: &Campaign, b: &Campaign, policy: &CompatPolicy) -> Vec<CompatFinding> {
    assess_metadata(a.metadata(), b.metadata(), policy)
        .into_iter()
        .map(|f| f.with_campaigns([a.id(), b.id()]))
        .collect()
}

fn assess_metadata(
    ma: &MetadataRecord,
    mb: &MetadataRecord,
    policy: &CompatPolicy,
) -> Vec<CompatFinding> {
    let mut out = Vec::new();

    if ma.env != mb.env {
        let severity = if policy.require_same_env {
            Severity::Block
        } else {
            Severity::Warn
        };
        out.push(CompatFinding::new(
            severity,
            "ENV_MISMATCH",
            "env",
            format!("{} vs {}", ma.env, mb.env),
        ));
    }

    let (fa, fb) = (ma.fc_ghz(), mb.fc_ghz());
    let rel = rel_diff(fa, fb);
    if rel > policy.freq_rel_tol {
        out.push(CompatFinding::block(
            "FREQ_OUT_OF_TOLERANCE",
            "fc",
            format!(
                "{} vs {} GHz differ by {:.2}% (tolerance {:.2}%)",
                ma.fc.ghz,
                mb.fc.ghz,
                rel * 100.0,
                policy.freq_rel_tol * 100.0
            ),
        ));
    } else if rel > 0.0 {
        out.push(CompatFinding::info(
            "FREQ_NEAR",
            "fc",
            format!(
                "{} vs {} GHz differ by {:.2}% (within {:.2}%)",
                ma.fc.ghz,
                mb.fc.ghz,
                rel * 100.0,
                policy.freq_rel_tol * 100.0
            ),
        ));
    }

    if policy.warn_on_as_def_mismatch {
        if let (Some(x), Some(y)) = (ma.as_def, mb.as_def) {
            if x != y {
                out.push(CompatFinding::warn(
                    "AS_DEF_MISMATCH",
                    "as_def",
                    format!("angular spreads use {x} vs {y}; values are not directly comparable"),
                ));
            }
        }
    }

    for (field, x, y) in [
        ("hpbw_tx", ma.hpbw_tx_deg, mb.hpbw_tx_deg),
        ("hpbw_rx", ma.hpbw_rx_deg, mb.hpbw_rx_deg),
    ] {
        if let (Some(x), Some(y)) = (x, y) {
            let (x, y) = (to_f64(x), to_f64(y));
            let ratio = x.max(y) / x.min(y);
            if ratio > policy.warn_on_hpbw_ratio_gt {
                out.push(CompatFinding::warn(
                    "HPBW_RATIO",
                    field,
                    format!(
                        "beamwidth ratio {ratio:.3} exceeds {}",
                        policy.warn_on_hpbw_ratio_gt
                    ),
                ));
            }
        }
    }

    threshold_findings(
        "t_pdp",
        ma.t_pdp.as_ref(),
        mb.t_pdp.as_ref(),
        policy,
        &mut out,
    );
    threshold_findings(
        "t_pas",
        ma.t_pas.as_ref(),
        mb.t_pas.as_ref(),
        policy,
        &mut out,
    );

    if let (Some(x), Some(y)) = (ma.bw_ghz, mb.bw_ghz) {
        if x != y {
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            out.push(CompatFinding::warn(
                "BW_DIFFERS",
                "bw",
                format!("bandwidths {lo} and {hi} GHz give different delay resolution"),
            ));
        }
    }

    out
}

/// Concatenates campaigns after checking every pair. With `force`, Block
/// findings are kept in the report instead of failing.
pub fn pool(
    campaigns: Vec<Campaign>,
    policy: &CompatPolicy,
    force: bool,
) -> Result<PooledDataset, PoolError> {
    let mut report = Vec::new();

    let mut ids = HashSet::new();
    for c in &campaigns {
        if !ids.insert(c.id()) {
            report.push(
                CompatFinding::block(
                    "DUP_CAMPAIGN",
                    "campaign_id",
                    format!("campaign {:?} appears more than once", c.id()),
                )
                .with_campaigns([c.id()]),
            );
        }
    }

    for (i, a) in campaigns.iter().enumerate() {
        for b in &campaigns[i + 1..] {
            report.extend(assess_pooling(a, b, policy));
        }
    }

    let blocking: Vec<CompatFinding> = report.iter().filter(|f| f.is_block()).cloned().collect();
    if !blocking.is_empty() && !force {
        return Err(PoolError::PoolBlocked(blocking));
    }
    Ok(PooledDataset::from_campaigns(campaigns, report))
}

/// Highest severity among `findings`, if any.
pub fn worst(findings: &[CompatFinding]) -> Option<Severity> {
    findings.iter().map(|f| f.severity).max()
}
