use clap::Args;
use pointdata::io::write_pooled_table;
use pointdata::model::CompatFinding;
use pointdata::validation::{pool, PoolError};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, Outcome};
use crate::input::load_campaigns;
use crate::report;

#[derive(Debug, Clone, Args)]
pub struct MergeArgs {
    /// Pool even when Block findings are raised; they stay in the report.
    #[arg(long)]
    pub force: bool,

    /// Stem of the pooled output file.
    #[arg(long, default_value = "pooled")]
    pub name: String,
}

fn compat_json(ids: &[String], findings: &[CompatFinding], blocked: bool) -> Vec<u8> {
    let doc = json!({
        "campaigns": ids,
        "blocked": blocked,
        "findings": findings,
    });
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("report serializes");
    bytes.push(b'\n');
    bytes
}

/// Pools two or more campaigns into one table with a provenance column,
/// plus a `compat.json` report.
pub fn run(cfg: &RunConfig, args: &MergeArgs) -> Result<Outcome, CliError> {
    if cfg.inputs.len() < 2 {
        return Err(CliError::Usage("merge needs at least two campaigns".into()));
    }
    let campaigns = load_campaigns(cfg)?;
    let ids: Vec<String> = campaigns.iter().map(|c| c.id().to_string()).collect();
    match pool(campaigns, &cfg.policy, args.force) {
        Ok(pooled) => {
            let report_findings = pooled.compat_report();
            let blocked = report_findings.iter().any(CompatFinding::is_block);
            cfg.write("compat.json", &compat_json(&ids, report_findings, blocked))?;
            let name = format!("{}{}", args.name, cfg.dialect.point_extension());
            cfg.write(&name, &write_pooled_table(&pooled, &cfg.dialect))?;
            report::findings(report_findings);
            if blocked {
                report::warn("Block findings overridden by --force");
            }
            eprintln!(
                "pooled {} points from {} campaigns into {}",
                pooled.len(),
                ids.len(),
                name
            );
            Ok(Outcome::Clean)
        }
        Err(PoolError::PoolBlocked(findings)) => {
            cfg.write("compat.json", &compat_json(&ids, &findings, true))?;
            report::findings(&findings);
            report::error("pooling blocked; pass --force to override");
            Ok(Outcome::Failed)
        }
    }
}
