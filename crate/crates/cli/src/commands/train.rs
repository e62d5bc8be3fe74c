use std::path::Path;

use crate::config::RunConfig;
use crate::error::CliResult;

use super::pipeline;

pub const CHECKPOINT_FILE: &str = "model.mfnet";
pub const HISTORY_FILE: &str = "history.json";

/// Trains the configured topology and writes the best checkpoint and the
/// per-epoch history to the output directory.
pub fn run(config: &Path) -> CliResult<()> {
    let cfg = RunConfig::load(config)?;
    cfg.require_inputs(false)?;
    pipeline::prepare_output_dir(&cfg.output_dir)?;
    let splits = pipeline::load_splits(&cfg, false)?;
    let outcome = pipeline::fit(&cfg, cfg.training.topology, &splits)?;
    let ckpt = cfg.output_dir.join(CHECKPOINT_FILE);
    pipeline::write_outcome(&outcome, &ckpt, &cfg.output_dir.join(HISTORY_FILE))?;
    log::info!("best epoch {} written to {}", outcome.best_epoch, ckpt.display());
    Ok(())
}
