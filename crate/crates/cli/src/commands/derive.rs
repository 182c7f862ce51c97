use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use pointdata::derivation::{
    derive_point, parse_profiles, path_loss_from_link_budget, DerivationError, Geometry,
};
use pointdata::io::{parse_metadata, write_point_table};
use pointdata::model::{Decimal, LocCondition, MetadataRecord};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, Outcome};
use crate::input::dialect_for;
use crate::report;

#[derive(Debug, Clone, Args)]
pub struct DeriveArgs {
    /// Directory of `<tx>_<rx>.json` directional profile files.
    #[arg(long, value_name = "DIR")]
    pub profiles: PathBuf,

    /// Campaign metadata file (`.meta.csv` or `.meta.json`).
    #[arg(long, value_name = "FILE")]
    pub meta: PathBuf,

    /// CSV with columns tx, rx, loc, tr_sep_m; one row per location.
    #[arg(long, value_name = "FILE")]
    pub geometry: PathBuf,

    /// Stem of the derived point-data file.
    #[arg(long, default_value = "derived")]
    pub name: String,
}

pub fn read_geometry(path: &Path) -> Result<Vec<Geometry>, CliError> {
    let bad = |msg: String| CliError::input(path, msg);
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let index = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| bad(format!("missing column {name:?}")))
    };
    let (tx, rx, loc, sep) = (
        index("tx")?,
        index("rx")?,
        index("loc")?,
        index("tr_sep_m")?,
    );

    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or_default();
        let loc_condition: LocCondition = field(loc)
            .parse()
            .map_err(|e| bad(format!("line {line}: {e}")))?;
        let tr_sep_m: Decimal = field(sep)
            .parse()
            .map_err(|e| bad(format!("line {line}: tr_sep_m {:?}: {e}", field(sep))))?;
        if field(tx).is_empty() || field(rx).is_empty() {
            return Err(bad(format!("line {line}: empty tx or rx")));
        }
        out.push(Geometry {
            tx_id: field(tx).to_string(),
            rx_id: field(rx).to_string(),
            loc_condition,
            tr_sep_m,
        });
    }
    Ok(out)
}

fn check_metadata(meta: &MetadataRecord, path: &Path) -> Result<(), CliError> {
    let missing = |field: &str| {
        CliError::input(
            path,
            format!("MissingRequired: metadata field {field} is required"),
        )
    };
    if meta.as_def.is_none() {
        return Err(missing("as_def"));
    }
    if meta.t_pdp.is_none() {
        return Err(missing("t_pdp"));
    }
    match path_loss_from_link_budget(0.0, meta) {
        Err(DerivationError::MissingMetadata(field)) => Err(missing(field)),
        _ => Ok(()),
    }
}

/// Derives one point-data row per geometry entry from raw directional profiles.
pub fn run(cfg: &RunConfig, args: &DeriveArgs) -> Result<Outcome, CliError> {
    let meta_dialect = dialect_for(&args.meta, &cfg.dialect);
    let bytes = fs::read(&args.meta).map_err(|e| CliError::input(&args.meta, e))?;
    let meta = parse_metadata(&bytes, &meta_dialect).map_err(|e| CliError::input(&args.meta, e))?;
    check_metadata(&meta, &args.meta)?;
    let geometry = read_geometry(&args.geometry)?;

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut failed = false;
    for g in &geometry {
        let label = format!("{}_{}", g.tx_id, g.rx_id);
        let path = args.profiles.join(format!("{label}.json"));
        let raw = fs::read(&path).map_err(|e| CliError::input(&path, e))?;
        let dirs = parse_profiles(&raw).map_err(|e| CliError::input(&path, e))?;
        match derive_point(&dirs, &meta, g) {
            Ok(p) => rows.push(p),
            Err(DerivationError::EmptyAfterThreshold) => {
                report::warn(format!(
                    "{label}: no power survives thresholding; location skipped"
                ));
                skipped.push(json!({"location": label, "reason": "EmptyAfterThreshold"}));
            }
            Err(e) => {
                failed = true;
                report::error(format!("{label}: {e}"));
                skipped.push(json!({"location": label, "reason": report::kind_of(&e), "message": e.to_string()}));
            }
        }
    }

    let name = format!("{}{}", args.name, cfg.dialect.point_extension());
    let written = cfg.write(&name, &write_point_table(&rows, &cfg.dialect))?;
    report::json_line(&json!({
        "output": written.display().to_string(),
        "rows": rows.len(),
        "skipped": skipped,
    }));
    Ok(Outcome::failed_if(failed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_columns_by_name() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        fs::write(
            &path,
            "rx, tx, tr_sep_m, loc\nRX1, TX1, 24.43, LOS\nRX2,TX1,40,NLOS\n",
        )
        .unwrap();
        let g = read_geometry(&path).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!((g[0].tx_id.as_str(), g[0].rx_id.as_str()), ("TX1", "RX1"));
        assert_eq!(g[1].loc_condition, LocCondition::Nlos);
        assert_eq!(g[0].tr_sep_m.to_string(), "24.43");

        fs::write(&path, "tx,rx,loc\nTX1,RX1,LOS\n").unwrap();
        assert!(read_geometry(&path)
            .unwrap_err()
            .to_string()
            .contains("tr_sep_m"));
        fs::write(&path, "tx,rx,loc,tr_sep_m\nTX1,RX1,OLOS,3\n").unwrap();
        assert!(read_geometry(&path).is_err());
    }
}
