//! Append-only session cache: one JSON line per family member analysed.
//!
//! A resumed run recomputes its family, checks every member already in the
//! cache against the new values, and appends only the members it adds.

use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Val;
use crate::plateau::DefectReport;

pub const CACHE_ENV: &str = "VALDEF_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub input_hash: String,
    pub stage: usize,
    pub rho: usize,
    pub q: String,
    pub gamma: Val,
    pub j: Vec<usize>,
    pub nu_coeffs: Vec<Val>,
    pub b: Val,
    pub defect_degree: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SyncStats {
    pub verified: usize,
    pub appended: usize,
}

#[derive(Debug)]
pub struct SessionCache {
    path: PathBuf,
    records: Vec<CacheRecord>,
}

/// `VALDEF_CACHE_DIR`, else the configured path, else `<out>/cache`.
pub fn cache_dir(configured: Option<&Path>, out: &Path) -> PathBuf {
    match std::env::var_os(CACHE_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => configured.map_or_else(|| out.join("cache"), Path::to_path_buf),
    }
}

fn io(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

impl SessionCache {
    pub fn file_for(dir: &Path, input_hash: &str) -> PathBuf {
        dir.join(format!("{input_hash}.jsonl"))
    }

    /// Opens a cache file, empty if it does not exist yet.
    pub fn open(path: &Path) -> Result<SessionCache> {
        if !path.exists() {
            return Ok(SessionCache { path: path.to_path_buf(), records: Vec::new() });
        }
        Self::read(path)
    }

    /// Opens a cache file that must already exist.
    pub fn open_existing(path: &Path) -> Result<SessionCache> {
        if !path.exists() {
            return Err(Error::CacheMissing(path.display().to_string()));
        }
        Self::read(path)
    }

    fn read(path: &Path) -> Result<SessionCache> {
        let file = fs::File::open(path).map_err(|e| io(path, e))?;
        let mut records = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: CacheRecord = serde_json::from_str(&line)
                .map_err(|e| Error::CacheMismatch(format!("{} line {}: {e}", path.display(), i + 1)))?;
            records.push(rec);
        }
        Ok(SessionCache { path: path.to_path_buf(), records })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn records(&self) -> &[CacheRecord] {
        &self.records
    }

    pub fn lookup(&self, stage: usize, rho: usize) -> Option<&CacheRecord> {
        self.records.iter().find(|r| r.stage == stage && r.rho == rho)
    }

    /// Highest cached member index of a stage.
    pub fn depth(&self, stage: usize) -> Option<usize> {
        self.records.iter().filter(|r| r.stage == stage).map(|r| r.rho).max()
    }

    /// Verifies the report against the cached members and appends the rest.
    pub fn sync(&mut self, input_hash: &str, report: &DefectReport) -> Result<SyncStats> {
        let mut stats = SyncStats::default();
        let mut fresh = Vec::new();
        for pl in &report.plateaus {
            for r in &pl.rhos {
                let rec = CacheRecord {
                    input_hash: input_hash.to_string(),
                    stage: pl.stage,
                    rho: r.rho,
                    q: r.q.clone(),
                    gamma: r.gamma.clone(),
                    j: r.j.clone(),
                    nu_coeffs: r.nu_coeffs.clone(),
                    b: pl.stats.b.clone(),
                    defect_degree: pl.stats.defect_degree,
                };
                match self.lookup(pl.stage, r.rho) {
                    Some(old) if *old == rec => stats.verified += 1,
                    Some(old) => {
                        return Err(Error::CacheMismatch(format!(
                            "stage {} rho {}: cached gamma {} J {:?}, computed gamma {} J {:?}",
                            pl.stage, r.rho, old.gamma, old.j, rec.gamma, rec.j
                        )))
                    }
                    None => fresh.push(rec),
                }
            }
        }
        if fresh.is_empty() {
            return Ok(stats);
        }
        if let Some(dir) = self.path.parent() {
            fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        }
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path).map_err(|e| io(&self.path, e))?;
        for rec in fresh {
            let line = serde_json::to_string(&rec).expect("record serializes");
            writeln!(f, "{line}").map_err(|e| io(&self.path, e))?;
            self.records.push(rec);
            stats.appended += 1;
        }
        Ok(stats)
    }
}
