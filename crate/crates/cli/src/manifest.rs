//! Run manifests: a JSON sidecar per primary output recording the command,
//! parameters, input hashes and produced files, so reruns are verifiable.
//! Everything except `wall_time_ms` is deterministic for equal parameters.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

pub const FORMAT_VERSION: u32 = 1;

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

pub fn hash_file(path: &Path) -> io::Result<String> {
    Ok(format!("{:016x}", fnv1a64(&fs::read(path)?)))
}

pub struct Manifest {
    pub command: String,
    pub parameters: Vec<(String, String)>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub shards: Option<usize>,
    pub wall_time_ms: u128,
}

impl Manifest {
    /// Serialize; key order is fixed so reruns differ only in wall time.
    pub fn to_json(&self) -> io::Result<String> {
        let mut params = serde_json::Map::new();
        for (k, v) in &self.parameters {
            params.insert(k.clone(), serde_json::Value::String(v.clone()));
        }
        let mut input_hashes = serde_json::Map::new();
        for path in &self.inputs {
            input_hashes.insert(
                path.display().to_string(),
                serde_json::Value::String(hash_file(path)?),
            );
        }
        let value = serde_json::json!({
            "format_version": FORMAT_VERSION,
            "command": self.command,
            "parameters": params,
            "input_hashes": input_hashes,
            "outputs": self.outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "shards": self.shards,
            "wall_time_ms": self.wall_time_ms,
        });
        Ok(serde_json::to_string_pretty(&value).expect("manifest serialization"))
    }

    /// Write next to the first output as `<output>.manifest.json`.
    pub fn write(&self) -> io::Result<PathBuf> {
        let first = self.outputs.first().expect("manifest without outputs");
        let path = PathBuf::from(format!("{}.manifest.json", first.display()));
        fs::write(&path, self.to_json()?)?;
        Ok(path)
    }
}
