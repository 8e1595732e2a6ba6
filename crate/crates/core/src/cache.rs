//! Persistent store of exact counts.
//!
//! `counts.csv` holds rows `s,d,N,kind,h_or_delta,count` and is append-only.
//! `counts.idx` maps each key to its row number; it is rebuilt from the CSV
//! whenever the two disagree.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{LabError, Result};
use crate::fmt_f64;

pub const CSV_NAME: &str = "counts.csv";
pub const INDEX_NAME: &str = "counts.idx";
pub const HEADER: &str = "s,d,N,kind,h_or_delta,count";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CacheKey {
    pub s: u32,
    pub d: usize,
    pub n: u64,
    /// "homogeneous", "inhomogeneous" or "box".
    pub kind: String,
    /// `h` joined by ';', the delta in round-trip form, or empty.
    pub arg: String,
}

impl CacheKey {
    pub fn homogeneous(s: u32, d: usize, n: u64) -> Self {
        CacheKey {
            s,
            d,
            n,
            kind: "homogeneous".into(),
            arg: String::new(),
        }
    }

    pub fn inhomogeneous(s: u32, d: usize, n: u64, h: &[i128]) -> Self {
        let arg = h.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";");
        CacheKey {
            s,
            d,
            n,
            kind: "inhomogeneous".into(),
            arg,
        }
    }

    pub fn boxed(s: u32, d: usize, n: u64, delta: f64) -> Self {
        CacheKey {
            s,
            d,
            n,
            kind: "box".into(),
            arg: fmt_f64(delta),
        }
    }

    fn id(&self) -> String {
        format!("{},{},{},{},{}", self.s, self.d, self.n, self.kind, self.arg)
    }
}

pub struct CountCache {
    dir: PathBuf,
    entries: BTreeMap<CacheKey, (usize, u128)>,
    rows: usize,
}

fn bad(path: &Path, line: usize, what: &str) -> LabError {
    LabError::Io(format!("{}:{line}: {what}", path.display()))
}

impl CountCache {
    /// Opens (creating if needed) the cache in `dir`.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let csv = dir.join(CSV_NAME);
        if !csv.exists() {
            fs::write(&csv, format!("{HEADER}\n"))?;
        }
        let text = fs::read_to_string(&csv)?;
        let mut lines = text.lines();
        if lines.next() != Some(HEADER) {
            return Err(bad(&csv, 1, "unexpected header"));
        }
        let mut entries = BTreeMap::new();
        let mut rows = 0;
        for (i, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad(&csv, i + 2, "expected 6 fields"));
            }
            let num = |k: usize| f[k].parse::<u64>().map_err(|_| bad(&csv, i + 2, "bad integer"));
            let key = CacheKey {
                s: num(0)? as u32,
                d: num(1)? as usize,
                n: num(2)?,
                kind: f[3].to_string(),
                arg: f[4].to_string(),
            };
            let count = f[5].parse::<u128>().map_err(|_| bad(&csv, i + 2, "bad count"))?;
            if let Some(&(_, old)) = entries.get(&key) {
                if old != count {
                    return Err(LabError::HardIdentity(format!(
                        "cache holds two counts for {}: {old} and {count}",
                        key.id()
                    )));
                }
            } else {
                entries.insert(key, (i, count));
            }
            rows += 1;
        }
        let cache = CountCache { dir, entries, rows };
        if cache.read_index().as_deref() != Some(cache.render_index().as_str()) {
            cache.write_index()?;
        }
        Ok(cache)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &CacheKey) -> Option<u128> {
        self.entries.get(key).map(|e| e.1)
    }

    /// Records a count. A second insert of the same key must agree.
    pub fn insert(&mut self, key: CacheKey, count: u128) -> Result<()> {
        if let Some(old) = self.get(&key) {
            if old != count {
                return Err(LabError::HardIdentity(format!(
                    "recomputed {} = {count} but the cache holds {old}",
                    key.id()
                )));
            }
            return Ok(());
        }
        let mut f = OpenOptions::new().append(true).open(self.dir.join(CSV_NAME))?;
        writeln!(f, "{},{count}", key.id())?;
        self.entries.insert(key, (self.rows, count));
        self.rows += 1;
        self.write_index()
    }

    /// Cached value, or compute, store and return it.
    pub fn get_or_compute<F>(&mut self, key: CacheKey, f: F) -> Result<(u128, bool)>
    where
        F: FnOnce() -> Result<u128>,
    {
        if let Some(c) = self.get(&key) {
            return Ok((c, true));
        }
        let c = f()?;
        self.insert(key, c)?;
        Ok((c, false))
    }

    fn render_index(&self) -> String {
        let mut out = String::new();
        for (k, (row, _)) in &self.entries {
            out.push_str(&format!("{}\t{row}\n", k.id()));
        }
        out
    }

    fn read_index(&self) -> Option<String> {
        fs::read_to_string(self.dir.join(INDEX_NAME)).ok()
    }

    fn write_index(&self) -> Result<()> {
        fs::write(self.dir.join(INDEX_NAME), self.render_index())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_coherence() {
        let tmp = tempfile::tempdir().unwrap();
        let mut c = CountCache::open(tmp.path()).unwrap();
        let k = CacheKey::homogeneous(2, 2, 100);
        let (v, hit) = c.get_or_compute(k.clone(), || Ok(19900)).unwrap();
        assert_eq!((v, hit), (19900, false));
        let (v, hit) = c.get_or_compute(k.clone(), || panic!("should hit")).unwrap();
        assert_eq!((v, hit), (19900, true));
        c.insert(CacheKey::boxed(2, 2, 8, 0.2), 1234).unwrap();
        c.insert(CacheKey::inhomogeneous(1, 2, 5, &[1, -3]), 2).unwrap();
        assert!(matches!(c.insert(k.clone(), 1), Err(LabError::HardIdentity(_))));

        let before = fs::read(tmp.path().join(CSV_NAME)).unwrap();
        fs::remove_file(tmp.path().join(INDEX_NAME)).unwrap();
        let c2 = CountCache::open(tmp.path()).unwrap();
        assert_eq!(c2.len(), 3);
        assert_eq!(c2.get(&CacheKey::boxed(2, 2, 8, 0.2)), Some(1234));
        assert_eq!(c2.get(&CacheKey::inhomogeneous(1, 2, 5, &[1, -3])), Some(2));
        assert_eq!(fs::read(tmp.path().join(CSV_NAME)).unwrap(), before);
        assert!(tmp.path().join(INDEX_NAME).exists());
    }

    #[test]
    fn rejects_garbage() {
        let tmp = tempfile::tempdir().unwrap();
        fs::write(tmp.path().join(CSV_NAME), "nope\n").unwrap();
        assert!(CountCache::open(tmp.path()).is_err());
    }
}
