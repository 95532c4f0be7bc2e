use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use super::HarnessError;
use crate::answer_eval::EvalRecord;

/// Append-only run ledger, one JSON record per line.
pub struct Ledger {
    path: PathBuf,
    file: File,
    records: Vec<EvalRecord>,
}

impl Ledger {
    /// Opens a ledger, loading existing records. A torn final line left by
    /// a crash is cut off.
    pub fn open(path: &Path) -> Result<Self, HarnessError> {
        let bytes =
            if path.exists() { std::fs::read(path).map_err(|e| HarnessError::io(path, e))? } else { Vec::new() };
        let mut records = Vec::new();
        let mut keep = 0usize;
        let mut offset = 0usize;
        for (i, line) in bytes.split(|b| *b == b'\n').enumerate() {
            if offset + line.len() >= bytes.len() {
                // unterminated tail: empty, or a torn write
                break;
            }
            if !line.is_empty() {
                let r = serde_json::from_slice(line).map_err(|e| HarnessError::schema(path, Some(i), e.to_string()))?;
                records.push(r);
            }
            offset += line.len() + 1;
            keep = offset;
        }
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(|e| HarnessError::io(path, e))?;
        if keep < bytes.len() {
            log::warn!("{}: dropping {} bytes of a torn record", path.display(), bytes.len() - keep);
            file.set_len(keep as u64).map_err(|e| HarnessError::io(path, e))?;
        }
        Ok(Ledger { path: path.to_path_buf(), file, records })
    }

    pub fn records(&self) -> &[EvalRecord] {
        &self.records
    }

    pub fn completed_ids(&self) -> HashSet<&str> {
        self.records.iter().map(|r| r.sample_id.as_str()).collect()
    }

    pub fn append(&mut self, record: EvalRecord) -> Result<(), HarnessError> {
        let mut line = serde_json::to_vec(&record).map_err(|e| HarnessError::io(&self.path, e))?;
        line.push(b'\n');
        self.file.write_all(&line).and_then(|_| self.file.flush()).map_err(|e| HarnessError::io(&self.path, e))?;
        self.records.push(record);
        Ok(())
    }
}
