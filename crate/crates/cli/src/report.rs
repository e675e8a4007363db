//! Report assembly. Every report starts with a reproducibility header: tool
//! and library versions plus a SHA-256 of the canonical job configuration
//! (knobs and input file contents, not paths). Nothing time- or
//! host-dependent is written.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::Format;

/// Versioned CSV layouts; the version is bumped whenever columns change.
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub struct Body {
    pub text: String,
    /// `(schema name, rows including the column header)`.
    pub csv: (&'static str, String),
    pub json: Value,
}

pub struct Job {
    pub command: &'static str,
    pub config: Value,
}

impl Job {
    pub fn new(command: &'static str) -> Self {
        Job {
            command,
            config: json!({ "command": command }),
        }
    }

    pub fn knob(&mut self, name: &str, v: impl serde::Serialize) {
        self.config[name] = serde_json::to_value(v).expect("knob serialises");
    }

    /// Records the digest of an input file's bytes under `role`.
    pub fn input(&mut self, role: &str, bytes: &[u8]) {
        self.config["inputs"][role] = Value::String(sha256_hex(bytes));
    }

    pub fn hash(&self) -> String {
        // serde_json maps are ordered by key, so this rendering is canonical.
        sha256_hex(self.config.to_string().as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn render(job: &Job, body: &Body, format: Format) -> String {
    let tool = env!("CARGO_PKG_VERSION");
    let core = l2tors::VERSION;
    let hash = job.hash();
    match format {
        Format::Text => format!(
            "# l2tors {tool} (l2tors-core {core})\n# command: {}\n# config-sha256: {hash}\n{}",
            job.command, body.text
        ),
        Format::Csv => format!(
            "# l2tors {tool} (l2tors-core {core})\n# command: {}\n# config-sha256: {hash}\n# csv-schema: {} v{CSV_SCHEMA_VERSION}\n{}",
            job.command, body.csv.0, body.csv.1
        ),
        Format::Json => {
            let doc = json!({
                "header": {
                    "tool": "l2tors",
                    "version": tool,
                    "core_version": core,
                    "command": job.command,
                    "config_sha256": hash,
                    "config": job.config,
                },
                "result": body.json,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("report serialises");
            s.push('\n');
            s
        }
    }
}

/// Shortest round-trip rendering, used in CSV cells.
pub fn num(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_insertion_order() {
        let mut a = Job::new("betti");
        a.knob("x", 1);
        a.knob("y", 2);
        let mut b = Job::new("betti");
        b.knob("y", 2);
        b.knob("x", 1);
        assert_eq!(a.hash(), b.hash());
        b.input("complex", b"{}");
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
