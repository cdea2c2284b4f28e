//! Run metadata sidecars. Every artifact the CLI writes gets a
//! `<file>.meta.json` companion carrying the command line, seeds, tool
//! version and wall time, so the artifact itself stays byte-reproducible
//! while the volatile context lives next to it.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunMeta {
    pub command: String,
    pub seed: u64,
    pub version: String,
    pub wall_time_s: f64,
    pub config: serde_json::Value,
}

pub struct MetaWriter {
    command: String,
    seed: u64,
    started: Instant,
}

impl MetaWriter {
    pub fn new(seed: u64) -> Self {
        let command = std::env::args().collect::<Vec<_>>().join(" ");
        MetaWriter { command, seed, started: Instant::now() }
    }

    fn sidecar_path(artifact: &Path) -> PathBuf {
        let mut name = artifact.file_name().unwrap_or_default().to_os_string();
        name.push(".meta.json");
        artifact.with_file_name(name)
    }

    /// Writes the sidecar for `artifact`, echoing the subcommand config.
    pub fn emit(&self, artifact: &Path, config: serde_json::Value) -> anyhow::Result<()> {
        let meta = RunMeta {
            command: self.command.clone(),
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: self.started.elapsed().as_secs_f64(),
            config,
        };
        let path = Self::sidecar_path(artifact);
        std::fs::write(&path, serde_json::to_string_pretty(&meta)? + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_path_appends_suffix() {
        let p = MetaWriter::sidecar_path(Path::new("/tmp/x/inst.json"));
        assert_eq!(p, Path::new("/tmp/x/inst.json.meta.json"));
    }
}
