use clap::Args;
use pointdata::analysis::{column_values, empirical_cdf, lognormal_stats, EmpiricalCdf, Split};
use pointdata::model::{Column, PointRecord};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, Outcome};
use crate::input::load_pool;
use crate::report;
use crate::svg::{Axis, Figure, Series, SeriesKind};

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    /// Numeric point-data column, e.g. omni_ds_ns.
    #[arg(long)]
    pub column: String,

    /// los, nlos or both (every point).
    #[arg(long, default_value = "both")]
    pub split: Split,

    /// Pool even when Block findings are raised.
    #[arg(long)]
    pub force: bool,
}

fn resolve_column(name: &str) -> Result<Column, CliError> {
    match Column::from_alias(name) {
        Some(c) if c.is_numeric() => Ok(c),
        _ => {
            let valid: Vec<&str> = Column::numeric().map(Column::name).collect();
            Err(CliError::Usage(format!(
                "unknown column {name:?}; valid columns: {}",
                valid.join(", ")
            )))
        }
    }
}

fn cdf_csv(cdf: &EmpiricalCdf) -> Vec<u8> {
    let mut out = String::from("value,probability\n");
    for (v, p) in cdf.iter() {
        out.push_str(&format!("{v},{p}\n"));
    }
    out.into_bytes()
}

/// Lognormal statistics and the empirical CDF of one column.
pub fn run(cfg: &RunConfig, args: &StatsArgs) -> Result<Outcome, CliError> {
    let column = resolve_column(&args.column)?;
    let pooled = load_pool(cfg, args.force)?;
    let points: Vec<PointRecord> = pooled.points().map(|p| p.point.clone()).collect();
    let values =
        column_values(&points, column, args.split).map_err(|e| CliError::Usage(e.to_string()))?;
    let tag = format!(
        "{}_{}",
        column.name(),
        args.split.as_str().to_ascii_lowercase()
    );

    let cdf = empirical_cdf(&values)
        .map_err(|e| CliError::Domain(format!("{column} ({}): {e}", args.split)))?;
    cfg.write(&format!("cdf_{tag}.csv"), &cdf_csv(&cdf))?;

    let mut doc = json!({
        "column": column.name(),
        "split": args.split.as_str(),
        "n_points": values.len(),
        "min": cdf.sorted_values.first(),
        "max": cdf.sorted_values.last(),
    });
    match lognormal_stats(&values) {
        Ok(s) => {
            doc["lognormal"] = json!({
                "mu_ln": s.mu_ln,
                "sigma_ln": s.sigma_ln,
                "mean_linear": s.mean_linear,
                "geometric_mean": s.geometric_mean(),
            });
        }
        Err(e) => {
            report::warn(format!("lognormal statistics omitted: {e}"));
            doc["lognormal"] = Value::Null;
            doc["lognormal_omitted"] = json!(report::kind_of(&e));
        }
    }
    report::json_line(&doc);
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("stats serialize");
    bytes.push(b'\n');
    cfg.write(&format!("stats_{tag}.json"), &bytes)?;

    if cfg.figures {
        let fig = Figure {
            title: format!("CDF of {} ({})", column.name(), args.split),
            x: Axis::linear(&format!("{} ({})", column.label(), column.unit())),
            y: Axis::linear("P(X <= x)"),
            series: vec![Series {
                label: format!("{} points", values.len()),
                points: cdf.iter().collect(),
                kind: SeriesKind::Steps,
                style: 0,
            }],
        };
        cfg.write(&format!("cdf_{tag}.svg"), fig.render().as_bytes())?;
    }
    Ok(Outcome::Clean)
}
