//! Append-only response cache, one JSON record per line.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::request::Usage;
use super::GatewayError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedResponse {
    pub text: String,
    pub usage: Usage,
}

#[derive(Serialize, Deserialize)]
struct CacheRecord {
    key: String,
    timestamp: u64,
    response: CachedResponse,
}

#[derive(Debug)]
pub struct ResponseCache {
    path: Option<PathBuf>,
    entries: Mutex<HashMap<String, CachedResponse>>,
    file: Mutex<Option<File>>,
}

fn io_err(path: &Path, e: std::io::Error) -> GatewayError {
    GatewayError::Cache(format!("{}: {e}", path.display()))
}

impl ResponseCache {
    pub fn in_memory() -> Self {
        ResponseCache { path: None, entries: Mutex::default(), file: Mutex::new(None) }
    }

    /// Opens or creates a cache file. A torn final line from an interrupted
    /// write is dropped; any other unreadable line is an error.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, GatewayError> {
        let path = path.as_ref().to_path_buf();
        let bytes = if path.exists() { std::fs::read(&path).map_err(|e| io_err(&path, e))? } else { Vec::new() };
        let mut entries = HashMap::new();
        let mut keep = bytes.len();
        let mut needs_newline = false;
        let mut offset = 0;
        for (lineno, line) in bytes.split(|b| *b == b'\n').enumerate() {
            let terminated = offset + line.len() < bytes.len();
            if !line.iter().all(u8::is_ascii_whitespace) {
                match serde_json::from_slice::<CacheRecord>(line) {
                    Ok(rec) => {
                        entries.insert(rec.key, rec.response);
                        needs_newline = !terminated;
                    }
                    Err(_) if !terminated => keep = offset,
                    Err(e) => {
                        return Err(GatewayError::Cache(format!("{} line {}: {e}", path.display(), lineno + 1)));
                    }
                }
            }
            offset += line.len() + 1;
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&path).map_err(|e| io_err(&path, e))?;
        if keep < bytes.len() {
            file.set_len(keep as u64).map_err(|e| io_err(&path, e))?;
        }
        if needs_newline {
            file.write_all(b"\n").map_err(|e| io_err(&path, e))?;
        }
        Ok(ResponseCache { path: Some(path), entries: Mutex::new(entries), file: Mutex::new(Some(file)) })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: &str) -> Option<CachedResponse> {
        self.entries.lock().expect("cache lock").get(key).cloned()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stores a response and appends its record to the file, flushed.
    pub fn put(&self, key: &str, response: CachedResponse) -> Result<(), GatewayError> {
        let mut file = self.file.lock().expect("cache file lock");
        if let (Some(f), Some(path)) = (file.as_mut(), &self.path) {
            let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            let rec = CacheRecord { key: key.to_string(), timestamp, response: response.clone() };
            let mut line = serde_json::to_vec(&rec).map_err(|e| GatewayError::Cache(e.to_string()))?;
            line.push(b'\n');
            f.write_all(&line).and_then(|_| f.flush()).map_err(|e| io_err(path, e))?;
        }
        self.entries.lock().expect("cache lock").insert(key.to_string(), response);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resp(t: &str) -> CachedResponse {
        CachedResponse { text: t.into(), usage: Usage::default() }
    }

    #[test]
    fn persists_across_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        {
            let c = ResponseCache::open(&path).unwrap();
            c.put("k1", resp("one")).unwrap();
            c.put("k2", resp("two")).unwrap();
        }
        let c = ResponseCache::open(&path).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.get("k2").unwrap().text, "two");
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
    }

    #[test]
    fn torn_tail_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        ResponseCache::open(&path).unwrap().put("k1", resp("one")).unwrap();
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"key\":\"k2\",\"timest").unwrap();
        drop(f);
        let c = ResponseCache::open(&path).unwrap();
        assert_eq!(c.len(), 1);
        c.put("k3", resp("three")).unwrap();
        let reopened = ResponseCache::open(&path).unwrap();
        assert_eq!(reopened.len(), 2);
    }

    #[test]
    fn corrupt_middle_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        std::fs::write(&path, "garbage\n{\"key\":\"k\",\"timestamp\":0,\"response\":{\"text\":\"t\",\"usage\":{\"prompt_tokens\":0,\"completion_tokens\":0,\"total_tokens\":0}}}\n").unwrap();
        assert!(matches!(ResponseCache::open(&path), Err(GatewayError::Cache(_))));
    }
}
