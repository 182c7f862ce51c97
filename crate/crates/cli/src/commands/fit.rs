use clap::{Args, ValueEnum};
use pointdata::analysis::{
    path_loss_models, path_loss_samples, scatter_data, CiModel, FsplMode, ModelFit, PathLossModel,
    ScatterRow, Split,
};
use pointdata::model::{LocCondition, PointRecord};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, Outcome};
use crate::input::load_pool;
use crate::report;
use crate::svg::{Axis, Figure, Series, SeriesKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    Los,
    Nlos,
    /// Separate LOS and NLOS fits.
    Both,
    /// One fit over every point.
    All,
}

impl SplitArg {
    pub fn splits(self) -> Vec<Split> {
        match self {
            SplitArg::Los => vec![Split::Los],
            SplitArg::Nlos => vec![Split::Nlos],
            SplitArg::Both => vec![Split::Los, Split::Nlos],
            SplitArg::All => vec![Split::Both],
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Path-loss model.
    #[arg(long, default_value = "ci")]
    pub model: String,

    #[arg(long, value_enum, default_value = "both")]
    pub split: SplitArg,

    /// CI only: reference every point to FSPL at this frequency instead of its own.
    #[arg(long, value_name = "GHZ")]
    pub fspl_ghz: Option<f64>,

    /// Pool even when Block findings are raised.
    #[arg(long)]
    pub force: bool,
}

fn model_for(args: &FitArgs) -> Result<std::sync::Arc<dyn PathLossModel>, CliError> {
    let registry = path_loss_models();
    let model = registry.get(&args.model).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown model {:?}; available: {}",
            args.model,
            registry.names().join(", ")
        ))
    })?;
    match args.fspl_ghz {
        None => Ok(model),
        Some(f) if model.name() == "ci" => Ok(std::sync::Arc::new(CiModel {
            mode: FsplMode::Common(f),
        })),
        Some(_) => Err(CliError::Usage(
            "--fspl-ghz applies to the ci model only".into(),
        )),
    }
}

fn scatter_csv(rows: &[ScatterRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Domain(format!("scatter data: {e}"));
    w.write_record(["tr_sep_m", "pl_db", "freq_ghz", "campaign_id", "loc"])
        .map_err(fail)?;
    for r in rows {
        w.write_record([
            r.tr_sep_m.normalize().to_string(),
            r.pl_db.normalize().to_string(),
            r.freq_ghz.normalize().to_string(),
            r.campaign_id.clone(),
            r.loc_condition.to_string(),
        ])
        .map_err(fail)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Domain(format!("scatter data: {e}")))
}

fn figure(model: &str, rows: &[ScatterRow], fits: &[(Split, ModelFit, f64)]) -> String {
    let mut campaigns: Vec<&str> = rows.iter().map(|r| r.campaign_id.as_str()).collect();
    campaigns.dedup();
    let mut series = Vec::new();
    for (i, id) in campaigns.iter().enumerate() {
        for loc in [LocCondition::Los, LocCondition::Nlos] {
            let points: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.campaign_id == *id && r.loc_condition == loc)
                .map(|r| {
                    (
                        pointdata::model::to_f64(r.tr_sep_m),
                        pointdata::model::to_f64(r.pl_db),
                    )
                })
                .collect();
            if !points.is_empty() {
                series.push(Series {
                    label: format!("{id} {loc}"),
                    points,
                    kind: SeriesKind::Markers,
                    style: 2 * i + usize::from(loc == LocCondition::Nlos),
                });
            }
        }
    }
    let (d_lo, d_hi) = rows
        .iter()
        .map(|r| pointdata::model::to_f64(r.tr_sep_m))
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| {
            (lo.min(d), hi.max(d))
        });
    for (i, (split, fit, freq)) in fits.iter().enumerate() {
        let points = (0..=40)
            .map(|k| d_lo * (d_hi / d_lo).powf(k as f64 / 40.0))
            .map(|d| (d, fit.predict(d, *freq)))
            .collect();
        series.push(Series {
            label: format!(
                "{} fit ({split}), sigma {:.2} dB",
                model.to_uppercase(),
                fit.sigma_db()
            ),
            points,
            kind: SeriesKind::Line,
            style: i,
        });
    }
    Figure {
        title: format!("{} path loss", model.to_uppercase()),
        x: Axis::log("T-R separation (m)"),
        y: Axis::linear("path loss (dB)"),
        series,
    }
    .render()
}

/// Fits the chosen model per split. A split that cannot be fitted is
/// reported and the others are still computed.
pub fn run(cfg: &RunConfig, args: &FitArgs) -> Result<Outcome, CliError> {
    let model = model_for(args)?;
    let pooled = load_pool(cfg, args.force)?;
    let points: Vec<PointRecord> = pooled.points().map(|p| p.point.clone()).collect();

    let mut results: Vec<Value> = Vec::new();
    let mut fitted = Vec::new();
    let mut failed = false;
    for split in args.split.splits() {
        let samples = path_loss_samples(&points, split);
        match model.fit(&samples) {
            Ok(fit) => {
                let plot_freq = match fit {
                    ModelFit::Ci(ci) => ci.freq_ghz_ref,
                    ModelFit::Abg(_) => {
                        samples.iter().map(|s| s.freq_ghz).sum::<f64>() / samples.len() as f64
                    }
                };
                results.push(fit.to_json(split));
                fitted.push((split, fit, plot_freq));
            }
            Err(e) => {
                failed = true;
                report::error(format!("{split}: {e}"));
                results.push(json!({
                    "model": model.name().to_uppercase(),
                    "split": split.as_str(),
                    "error": crate::report::kind_of(&e),
                    "message": e.to_string(),
                }));
            }
        }
    }
    for r in &results {
        report::json_line(r);
    }
    let mut doc = serde_json::to_vec_pretty(&Value::Array(results)).expect("fit results serialize");
    doc.push(b'\n');
    cfg.write(&format!("fit_{}.json", model.name()), &doc)?;

    let rows = scatter_data(&pooled, Split::Both).map_err(|e| CliError::Domain(e.to_string()))?;
    cfg.write("scatter.csv", &scatter_csv(&rows)?)?;
    if cfg.figures {
        cfg.write(
            &format!("fit_{}.svg", model.name()),
            figure(model.name(), &rows, &fitted).as_bytes(),
        )?;
    }
    Ok(Outcome::failed_if(failed))
}
