//! Versioned JSON persistence for trained models.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TrainedModel;
use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "tennis-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope {
    format: String,
    version: u32,
    feature_names: Vec<String>,
    model: TrainedModel,
}

pub fn save_model(path: &Path, model: &TrainedModel, feature_names: &[String]) -> Result<()> {
    let env = Envelope {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        feature_names: feature_names.to_vec(),
        model: model.clone(),
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &env)?;
    w.flush()?;
    Ok(())
}

/// Returns the model and the feature names it was trained on.
pub fn load_model(path: &Path) -> Result<(TrainedModel, Vec<String>)> {
    let env: Envelope = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    if env.format != MODEL_FORMAT || env.version != MODEL_VERSION {
        return Err(Error::Data(format!(
            "{}: unsupported model file (format `{}`, version {})",
            path.display(),
            env.format,
            env.version
        )));
    }
    if env.feature_names.len() != env.model.n_features() {
        return Err(Error::Dimension { expected: env.model.n_features(), got: env.feature_names.len() });
    }
    Ok((env.model, env.feature_names))
}
