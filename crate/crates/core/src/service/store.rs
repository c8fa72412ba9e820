use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use uuid::Uuid;

use super::session::SessionRecord;

/// All sessions in one JSON file, rewritten atomically (temp file + rename)
/// on every change.
pub struct Store {
    path: PathBuf,
    records: Mutex<BTreeMap<Uuid, SessionRecord>>,
}

impl Store {
    pub const FILE: &'static str = "sessions.json";

    pub fn open(dir: impl AsRef<Path>) -> std::io::Result<Self> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let path = dir.join(Self::FILE);
        let records = match fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes).map_err(std::io::Error::other)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e),
        };
        Ok(Self { path, records: Mutex::new(records) })
    }

    pub fn records(&self) -> Vec<SessionRecord> {
        self.records.lock().unwrap().values().cloned().collect()
    }

    pub fn put(&self, record: SessionRecord) -> std::io::Result<()> {
        let mut records = self.records.lock().unwrap();
        records.insert(record.id, record);
        let bytes = serde_json::to_vec_pretty(&*records).map_err(std::io::Error::other)?;
        let tmp = self.path.with_extension("json.tmp");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, &self.path)
    }
}
