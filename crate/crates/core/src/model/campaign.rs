use super::{CompatFinding, MetadataRecord, ModelError, PointRecord};

/// Unchecked campaign contents, as read from disk or assembled by a caller.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignParts {
    pub institution: String,
    pub campaign_id: String,
    pub metadata: MetadataRecord,
    pub points: Vec<PointRecord>,
    pub map_ref: Option<String>,
}

/// Metadata plus the ordered point rows of one measurement campaign.
///
/// Constructed only through [`Campaign::new`], which rejects any Block-level
/// finding from [`crate::validation::validate_campaign`].
#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    parts: CampaignParts,
}

impl Campaign {
    pub fn new(parts: CampaignParts) -> Result<Self, ModelError> {
        let blocking: Vec<CompatFinding> = crate::validation::validate_campaign(&parts)
            .into_iter()
            .filter(CompatFinding::is_block)
            .collect();
        if blocking.is_empty() {
            Ok(Campaign { parts })
        } else {
            Err(ModelError::InvalidCampaign(blocking))
        }
    }

    pub fn institution(&self) -> &str {
        &self.parts.institution
    }

    pub fn id(&self) -> &str {
        &self.parts.campaign_id
    }

    pub fn metadata(&self) -> &MetadataRecord {
        &self.parts.metadata
    }

    pub fn points(&self) -> &[PointRecord] {
        &self.parts.points
    }

    pub fn map_ref(&self) -> Option<&str> {
        self.parts.map_ref.as_deref()
    }

    pub fn parts(&self) -> &CampaignParts {
        &self.parts
    }

    pub fn into_parts(self) -> CampaignParts {
        self.parts
    }
}

/// Back-reference from a pooled point to its source row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Provenance {
    /// Position of the source campaign in [`PooledDataset::campaigns`].
    pub campaign_index: usize,
    pub campaign_id: String,
    /// Zero-based row within the source campaign.
    pub row: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct PooledPoint<'a> {
    pub point: &'a PointRecord,
    pub provenance: &'a Provenance,
}

/// Concatenation of several campaigns with per-point provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledDataset {
    campaigns: Vec<Campaign>,
    provenance: Vec<Provenance>,
    compat_report: Vec<CompatFinding>,
}

impl PooledDataset {
    pub(crate) fn from_campaigns(
        campaigns: Vec<Campaign>,
        compat_report: Vec<CompatFinding>,
    ) -> Self {
        let provenance = campaigns
            .iter()
            .enumerate()
            .flat_map(|(campaign_index, c)| {
                (0..c.points().len()).map(move |row| Provenance {
                    campaign_index,
                    campaign_id: c.id().to_string(),
                    row,
                })
            })
            .collect();
        PooledDataset {
            campaigns,
            provenance,
            compat_report,
        }
    }

    pub fn campaigns(&self) -> &[Campaign] {
        &self.campaigns
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn compat_report(&self) -> &[CompatFinding] {
        &self.compat_report
    }

    pub fn len(&self) -> usize {
        self.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.provenance.is_empty()
    }

    /// Points in pooled order: campaign by campaign, rows in source order.
    pub fn points(&self) -> impl Iterator<Item = PooledPoint<'_>> + '_ {
        self.provenance.iter().map(move |p| PooledPoint {
            point: &self.campaigns[p.campaign_index].points()[p.row],
            provenance: p,
        })
    }
}
