use std::path::PathBuf;

use memefuse_core::text::{preprocess, ContractionDict, Lexicon, PreprocessConfig, TextResources};
use memefuse_core::LabelVocabulary;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult, Context};
use crate::io;

#[derive(Debug, Clone)]
pub struct PreprocessArgs {
    pub dataset: PathBuf,
    pub dict: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
}

/// Copies the dataset with a `clean_text` field added to every record.
/// Other fields are kept as they are.
pub fn run(args: &PreprocessArgs) -> CliResult<()> {
    let config = match &args.config {
        Some(p) => RunConfig::load(p)?.preprocess,
        None => PreprocessConfig::default(),
    };
    let mut resources = TextResources::shipped();
    if let Some(p) = &args.dict {
        resources.contractions =
            ContractionDict::parse(&io::read_text(p)?).context(format!("contraction dictionary {}", p.display()))?;
    }
    if let Some(p) = &args.lexicon {
        resources.lexicon = Lexicon::parse(&io::read_text(p)?);
        if resources.lexicon.is_empty() {
            return Err(CliError::usage(format!("lexicon {} has no words", p.display())));
        }
    }

    let text = io::read_text(&args.dataset)?;
    let records = memefuse_core::dataset::parse_dataset(&text, &LabelVocabulary::canonical())
        .context(format!("dataset {}", args.dataset.display()))?;
    let mut raw: Vec<Value> = serde_json::from_str(&text).map_err(CliError::internal)?;
    for (value, record) in raw.iter_mut().zip(&records) {
        let clean = preprocess(&record.text, &config, &resources);
        let obj = value
            .as_object_mut()
            .ok_or_else(|| CliError::internal(format!("record {} is not an object", record.id)))?;
        obj.insert("clean_text".into(), Value::String(clean));
    }
    io::write_json(&args.out, &raw)?;
    log::info!("preprocessed {} records into {}", records.len(), args.out.display());
    Ok(())
}
