use std::fs;
use std::io::Write;
use std::path::Path;

use dpcomb::instances::format::{parse_instance, Instance};
use sha2::{Digest, Sha256};

use crate::{CliResult, Failure};

pub fn read_instance(path: &Path) -> CliResult<Instance> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

/// First 16 hex digits of the SHA-256 of the canonical document.
pub fn instance_hash(instance: &Instance) -> String {
    let digest = Sha256::digest(instance.to_text().as_bytes());
    hex::encode(&digest[..8])
}

pub fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::config(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::config(format!("stdout: {e}")))
        }
    }
}

pub fn parse_list(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::config(format!("bad number `{s}` in list")))
        })
        .collect()
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
