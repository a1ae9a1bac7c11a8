//! Resumable run state: versioned header, config hash, completed-chunk
//! bitmap and the finished chunk results.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::report::ChunkResult;
use super::HarnessError;

pub const CHECKPOINT_FORMAT: &str = "esforge-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointFile {
    format: String,
    #[serde(with = "crate::decimal")]
    version: u32,
    config_hash: String,
    #[serde(with = "crate::decimal")]
    total_chunks: u64,
    /// One bit per chunk, least significant bit first, hex encoded.
    completed_bitmap: String,
    content_hash: String,
    chunks: Vec<ChunkResult>,
}

/// In-memory progress of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointState {
    pub config_hash: String,
    pub total_chunks: u64,
    pub completed: BTreeMap<u64, ChunkResult>,
}

impl CheckpointState {
    pub fn fresh(config_hash: String, total_chunks: u64) -> Self {
        CheckpointState {
            config_hash,
            total_chunks,
            completed: BTreeMap::new(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.completed.len() as u64 == self.total_chunks
    }

    fn bitmap(&self) -> Vec<u8> {
        let mut bits = vec![0u8; self.total_chunks.div_ceil(8) as usize];
        for &i in self.completed.keys() {
            bits[(i / 8) as usize] |= 1 << (i % 8);
        }
        bits
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub(crate) fn hash_config<T: Serialize>(key: &T) -> String {
    sha256_hex(&serde_json::to_vec(key).expect("config serializes"))
}

/// Writes the state atomically (temp file + rename).
pub fn checkpoint_save(path: &Path, state: &CheckpointState) -> Result<(), HarnessError> {
    let chunks: Vec<ChunkResult> = state.completed.values().cloned().collect();
    let content = serde_json::to_vec(&chunks).expect("chunks serialize");
    let file = CheckpointFile {
        format: CHECKPOINT_FORMAT.to_owned(),
        version: CHECKPOINT_VERSION,
        config_hash: state.config_hash.clone(),
        total_chunks: state.total_chunks,
        completed_bitmap: hex::encode(state.bitmap()),
        content_hash: sha256_hex(&content),
        chunks,
    };
    let bytes = serde_json::to_vec(&file).expect("checkpoint serializes");
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Loads a checkpoint for a run with the given config hash and chunk count.
/// A missing or empty file yields a fresh state.
pub fn checkpoint_resume(
    path: &Path,
    config_hash: &str,
    total_chunks: u64,
) -> Result<CheckpointState, HarnessError> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(CheckpointState::fresh(config_hash.to_owned(), total_chunks));
    }
    let corrupt = |m: String| Err(HarnessError::CorruptCheckpoint(m));
    let file: CheckpointFile = match serde_json::from_slice(&bytes) {
        Ok(f) => f,
        Err(e) => return corrupt(format!("unparseable: {e}")),
    };
    if file.format != CHECKPOINT_FORMAT || file.version != CHECKPOINT_VERSION {
        return corrupt(format!(
            "unsupported format {} v{}",
            file.format, file.version
        ));
    }
    if file.config_hash != config_hash {
        return corrupt("configuration hash mismatch".into());
    }
    if file.total_chunks != total_chunks {
        return corrupt("chunk count mismatch".into());
    }
    let content = serde_json::to_vec(&file.chunks).expect("chunks serialize");
    if sha256_hex(&content) != file.content_hash {
        return corrupt("content hash mismatch".into());
    }
    let mut state = CheckpointState::fresh(file.config_hash, total_chunks);
    for chunk in file.chunks {
        if chunk.index >= total_chunks || state.completed.contains_key(&chunk.index) {
            return corrupt(format!("bad chunk index {}", chunk.index));
        }
        state.completed.insert(chunk.index, chunk);
    }
    if hex::encode(state.bitmap()) != file.completed_bitmap {
        return corrupt("completed-chunk bitmap disagrees with stored chunks".into());
    }
    Ok(state)
}
