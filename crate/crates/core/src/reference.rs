//! Published example campaigns bundled with the crate.
//!
//! Two 140 GHz-band urban-microcell campaigns: six rows each of point data
//! (NYU WIRELESS at 142 GHz, USC at 145 GHz) and their measurement-summary
//! metadata, in canonical CSV form. The `*_TABLE_META_CSV` documents carry
//! the same metadata written with the published row labels.

use crate::io::{parse_campaign_parts, FormatDialect};
use crate::model::{Campaign, PointRecord};

pub const NYU_POINTS_CSV: &str = include_str!("../fixtures/nyu_umi_142.pointdata.csv");
pub const NYU_META_CSV: &str = include_str!("../fixtures/nyu_umi_142.meta.csv");
pub const NYU_TABLE_META_CSV: &str = include_str!("../fixtures/nyu_umi_142.table.meta.csv");
pub const USC_POINTS_CSV: &str = include_str!("../fixtures/usc_umi_145.pointdata.csv");
pub const USC_META_CSV: &str = include_str!("../fixtures/usc_umi_145.meta.csv");
pub const USC_TABLE_META_CSV: &str = include_str!("../fixtures/usc_umi_145.table.meta.csv");

/// Published pooled-dataset results (53 locations, of which only the 12
/// rows above are public). Kept as reference targets; they cannot be
/// recomputed from the bundled rows.
pub mod published {
    pub const POOLED_LOCATIONS: usize = 53;
    pub const POOLED_LOS_PLE: f64 = 1.93;
    pub const POOLED_LOS_SIGMA_DB: f64 = 2.07;
    pub const POOLED_NLOS_PLE: f64 = 2.87;
    pub const POOLED_NLOS_SIGMA_DB: f64 = 7.25;
    pub const POOLED_NLOS_OMNI_DS_MEAN_NS: f64 = 47.3;
}

fn load(points: &str, meta: &str, id: &str) -> Campaign {
    let (parts, _) = parse_campaign_parts(
        points.as_bytes(),
        meta.as_bytes(),
        &FormatDialect::csv(),
        id,
    )
    .expect("bundled fixture parses");
    Campaign::new(parts).expect("bundled fixture is valid")
}

pub fn nyu_campaign() -> Campaign {
    load(NYU_POINTS_CSV, NYU_META_CSV, "nyu-umi-142")
}

pub fn usc_campaign() -> Campaign {
    load(USC_POINTS_CSV, USC_META_CSV, "usc-umi-145")
}

/// The twelve bundled rows, NYU first.
pub fn fixture_points() -> Vec<PointRecord> {
    nyu_campaign()
        .points()
        .iter()
        .chain(usc_campaign().points())
        .cloned()
        .collect()
}
