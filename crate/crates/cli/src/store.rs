use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use modunits::units::ExpansionStore;
use sha2::{Digest, Sha256};

/// Expansions stored as `<sha256 of key>.json` in one directory.
pub struct DiskStore {
    dir: PathBuf,
}

impl DiskStore {
    pub fn open(dir: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(dir)?;
        let probe = dir.join(".write-test");
        fs::write(&probe, b"")?;
        fs::remove_file(&probe)?;
        Ok(DiskStore { dir: dir.to_path_buf() })
    }

    fn path(&self, key: &str) -> PathBuf {
        let digest = Sha256::digest(key.as_bytes());
        self.dir.join(format!("{}.json", hex::encode(digest)))
    }
}

impl ExpansionStore for DiskStore {
    fn load(&self, key: &str) -> Option<String> {
        fs::read_to_string(self.path(key)).ok()
    }

    fn save(&self, key: &str, value: &str) {
        let path = self.path(key);
        // write to a temporary name first so readers never see half a file
        let result = tempfile_in(&self.dir).and_then(|(tmp, mut f)| {
            f.write_all(value.as_bytes())?;
            f.sync_all()?;
            fs::rename(&tmp, &path)
        });
        if let Err(e) = result {
            log::warn!("could not write cache entry {}: {e}", path.display());
        }
    }
}

fn tempfile_in(dir: &Path) -> std::io::Result<(PathBuf, fs::File)> {
    let name = format!(".tmp-{}-{:?}", std::process::id(), std::thread::current().id());
    let path = dir.join(name.replace(['(', ')'], ""));
    let f = fs::File::create(&path)?;
    Ok((path, f))
}
