//! Collects a run's outputs and writes them with a manifest of digests.

use crate::Format;
use isograph::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

pub struct Outputs {
    format: Option<Format>,
    files: Vec<(String, Format, String)>,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub seed: u64,
    pub version: String,
    /// SHA-256 of each output file.
    pub outputs: BTreeMap<String, String>,
}

impl Outputs {
    pub fn new(format: Option<Format>) -> Self {
        Outputs { format, files: Vec::new() }
    }

    pub fn json(&mut self, name: &str, value: &serde_json::Value) {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.files.push((name.into(), Format::Json, text));
    }

    pub fn text(&mut self, name: &str, format: Format, text: String) {
        self.files.push((name.into(), format, text));
    }

    pub fn finish(self, dir: Option<&Path>, subcommand: &str, parameters: serde_json::Value, seed: u64) -> Result<()> {
        let Some(dir) = dir else {
            let want = self.format.unwrap_or(Format::Json);
            let (_, _, text) = self
                .files
                .iter()
                .find(|(_, f, _)| *f == want)
                .ok_or_else(|| Error::Input(format!("this subcommand has no {want:?} output")))?;
            print!("{text}");
            return Ok(());
        };
        let io = |e: std::io::Error| Error::Input(format!("cannot write to {}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        let mut outputs = BTreeMap::new();
        for (name, _, text) in &self.files {
            std::fs::write(dir.join(name), text).map_err(io)?;
            outputs.insert(name.clone(), format!("{:x}", Sha256::digest(text.as_bytes())));
        }
        let manifest = RunManifest {
            subcommand: subcommand.into(),
            parameters,
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
            outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("serializable");
        text.push('\n');
        std::fs::write(dir.join("manifest.json"), text).map_err(io)?;
        Ok(())
    }
}
