use pointdata::model::CompatFinding;
use pointdata::validation::validate_campaign;

use crate::config::RunConfig;
use crate::error::{CliError, Outcome};
use crate::input::locate;
use crate::report;

/// Parses and checks each campaign, printing every finding.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut all: Vec<CompatFinding> = Vec::new();
    for path in &cfg.inputs {
        let files = locate(path, &cfg.dialect)?;
        let (parts, notes) = files.read()?;
        all.extend(notes);
        all.extend(validate_campaign(&parts));
    }
    report::findings(&all);
    Ok(Outcome::failed_if(all.iter().any(CompatFinding::is_block)))
}
