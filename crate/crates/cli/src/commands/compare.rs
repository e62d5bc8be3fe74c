use std::collections::BTreeMap;
use std::path::Path;

use memefuse_core::eval::{comparison_report, ComparisonReport};
use memefuse_core::fusion::train::evaluate;
use memefuse_core::fusion::Topology;

use super::pipeline;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult, Context};
use crate::io;

pub const REPORT_JSON: &str = "comparison.json";
pub const REPORT_TEXT: &str = "comparison.txt";

/// Parses a comma-separated topology list such as `concat,early,late,mfas`.
pub fn parse_topologies(list: &str) -> CliResult<Vec<Topology>> {
    let mut out = Vec::new();
    for tag in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let t: Topology = tag.parse().context("--topologies")?;
        if !out.contains(&t) {
            out.push(t);
        }
    }
    if out.is_empty() {
        return Err(CliError::usage(
            "--topologies is empty; valid tags: Concat, Early, Late, MFAS",
        ));
    }
    Ok(out)
}

/// Trains every topology with the shared training settings and reports
/// test-partition metrics side by side.
pub fn compare(config: &Path, topologies: &[Topology]) -> CliResult<ComparisonReport> {
    let cfg = RunConfig::load(config)?;
    cfg.require_inputs(true)?;
    pipeline::prepare_output_dir(&cfg.output_dir)?;
    let splits = pipeline::load_splits(&cfg, true)?;
    let test = splits.test.as_deref().unwrap_or_default();
    if test.is_empty() {
        return Err(CliError::usage("test split is empty"));
    }
    let mut results = BTreeMap::new();
    for &topology in topologies {
        let outcome = pipeline::fit(&cfg, topology, &splits)?;
        let stem = topology.tag().to_ascii_lowercase();
        pipeline::write_outcome(
            &outcome,
            &cfg.output_dir.join(format!("{stem}.mfnet")),
            &cfg.output_dir.join(format!("history_{stem}.json")),
        )?;
        let (_, metrics) =
            evaluate(&outcome.model, test, &cfg.training.loss, cfg.training.threshold).map_err(CliError::internal)?;
        log::info!("{topology}: test micro F1 {:.4}", metrics.micro_f1);
        results.insert(topology, metrics);
    }
    let report = comparison_report(results).map_err(CliError::internal)?;
    io::write_bytes(&cfg.output_dir.join(REPORT_TEXT), report.to_text().as_bytes())?;
    io::write_json(&cfg.output_dir.join(REPORT_JSON), &report.to_json_map())?;
    Ok(report)
}

pub fn run(config: &Path, topologies: &[Topology]) -> CliResult<()> {
    let report = compare(config, topologies)?;
    print!("{}", report.to_text());
    Ok(())
}
