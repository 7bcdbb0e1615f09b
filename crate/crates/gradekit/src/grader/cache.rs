//! Append-only, content-addressed response cache.
//!
//! One JSON record per line in `responses.jsonl` under the cache
//! directory, keyed by prompt hash. Appends are serialized through a
//! single writer; later records for the same hash win on load, matching
//! append-only overlay semantics.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const CACHE_FILE: &str = "responses.jsonl";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub prompt_hash: String,
    pub model_id: String,
    pub temperature: f64,
    pub completion: String,
    pub retrieved_at: String,
}

pub struct ResponseCache {
    path: PathBuf,
    inner: Mutex<Inner>,
}

struct Inner {
    index: HashMap<String, CacheRecord>,
    writer: Option<File>,
}

impl ResponseCache {
    /// Open (creating the directory if needed) and load the index.
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join(CACHE_FILE);
        let mut index = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (lineno, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: CacheRecord =
                    serde_json::from_str(&line).map_err(|e| Error::Parse {
                        path: format!("{}:{}", path.display(), lineno + 1),
                        message: e.to_string(),
                    })?;
                index.insert(record.prompt_hash.clone(), record);
            }
        }
        Ok(ResponseCache {
            path,
            inner: Mutex::new(Inner {
                index,
                writer: None,
            }),
        })
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache lock").index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, prompt_hash: &str) -> Option<CacheRecord> {
        self.inner
            .lock()
            .expect("cache lock")
            .index
            .get(prompt_hash)
            .cloned()
    }

    /// Append a record and update the in-memory index.
    pub fn put(&self, record: CacheRecord) -> Result<()> {
        let mut inner = self.inner.lock().expect("cache lock");
        if inner.writer.is_none() {
            inner.writer = Some(
                OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(&self.path)?,
            );
        }
        let line = serde_json::to_string(&record).expect("serializable record");
        let w = inner.writer.as_mut().expect("writer just set");
        writeln!(w, "{line}")?;
        w.flush()?;
        inner.index.insert(record.prompt_hash.clone(), record);
        Ok(())
    }
}
