use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::args::Command;
use crate::error::{CliError, CliResult};

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestBody {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub base_seed: Option<u64>,
    pub params: Command,
}

/// [`ManifestBody`] plus the wall-clock time of the original run.
///
/// Data files embed only the body, so identical invocations give identical
/// files; the timestamped manifest lives in a `.manifest.json` sidecar.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    #[serde(flatten)]
    pub body: ManifestBody,
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn new(params: &Command, timestamp_unix: Option<u64>) -> Self {
        let now = || {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        };
        Self {
            body: ManifestBody {
                tool: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
                subcommand: params.name().into(),
                base_seed: params.base_seed(),
                params: params.clone(),
            },
            timestamp_unix: timestamp_unix.unwrap_or_else(now),
        }
    }

    /// Comment lines for embedding in CSV outputs.
    pub fn comments(&self, title: &str) -> Vec<String> {
        vec![
            format!("fracdim {title}"),
            format!(
                "manifest: {}",
                serde_json::to_string(&self.body).expect("manifest serializes")
            ),
            crate::csvio::ENCODING_NOTE.to_string(),
        ]
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut json = serde_json::to_string_pretty(self).expect("manifest serializes");
        json.push('\n');
        fs::write(path, json)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Parse(format!("{}: invalid manifest: {e}", path.display())))
    }
}

/// `<file>.manifest.json` next to `file`.
pub fn sidecar_for(file: &Path) -> PathBuf {
    let mut name = file.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    file.with_file_name(name)
}
