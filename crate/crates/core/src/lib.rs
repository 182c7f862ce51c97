//! Standardized point-data format for wireless propagation measurements.
//!
//! A campaign is a metadata document plus a table of per-location rows
//! (path loss, delay spreads, angular spreads). This crate parses and writes
//! both in canonical CSV or JSON, validates campaigns, pools campaigns from
//! several institutions with provenance, derives rows from raw directional
//! power delay profiles and fits path-loss and delay-spread statistics.
//!
//! ```
//! use pointdata::{analysis, reference, validation};
//!
//! let pool = validation::pool(
//!     vec![reference::nyu_campaign(), reference::usc_campaign()],
//!     &validation::CompatPolicy::default(),
//!     false,
//! )
//! .unwrap();
//! let los = analysis::path_loss_samples(pool.points().map(|p| p.point), analysis::Split::Los);
//! let fit = analysis::fit_ci(&los, analysis::FsplMode::PerPoint).unwrap();
//! assert_eq!(fit.n_points, 6);
//! ```

pub mod analysis;
pub mod derivation;
pub mod io;
pub mod model;
pub mod reference;
pub mod registry;
pub mod validation;
