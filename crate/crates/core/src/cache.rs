//! On-disk cache of moment sums and joint count tables.
//!
//! One JSON file per `(ensemble, n, artifact version, method, kind)`. All
//! integers are stored as decimal strings and the payload carries a SHA-256
//! digest; a record that fails to parse or to verify is treated as absent
//! and rewritten. Writes go to a temporary file that is then renamed into
//! place, so readers never observe a partial record.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::count_tables::JointCountTable;
use crate::ensemble::Ensemble;
use crate::statistics::{Engine, Method, MomentSums, StatsError};

pub const CACHE_DIR_ENV: &str = "COMPCOV_CACHE_DIR";

/// Bumped whenever cached values could change meaning.
pub const ARTIFACT_VERSION: &str = concat!("compcov-", env!("CARGO_PKG_VERSION"), "-r1");

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache I/O on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    MomentSums,
    Table,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::MomentSums => "moment-sums",
            Kind::Table => "table",
        }
    }
}

/// Result of a cache read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lookup<T> {
    Hit(T),
    Miss,
    Corrupt,
}

#[derive(Serialize, Deserialize)]
struct Record {
    ensemble: String,
    n: usize,
    version: String,
    method: Method,
    kind: Kind,
    values: Vec<Vec<String>>,
    sha256: String,
}

fn digest(values: &[Vec<String>]) -> String {
    let mut h = Sha256::new();
    for row in values {
        for v in row {
            h.update(v.as_bytes());
            h.update(b",");
        }
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn decimal(v: &BigInt) -> String {
    v.to_string()
}

fn parse_row(row: &[String]) -> Option<Vec<BigInt>> {
    row.iter().map(|s| s.parse().ok()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// The flag wins over the environment; `None` disables caching.
    pub fn from_flag_or_env(flag: Option<&Path>) -> Option<Self> {
        flag.map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .map(Cache::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, ensemble: Ensemble, n: usize, method: Method, kind: Kind) -> PathBuf {
        self.dir.join(format!(
            "{}-{}-n{n}-{}-{}.json",
            kind.name(),
            ensemble.name(),
            method_name(method),
            ARTIFACT_VERSION
        ))
    }

    fn read(&self, ensemble: Ensemble, n: usize, method: Method, kind: Kind) -> Lookup<Vec<Vec<BigInt>>> {
        let path = self.path(ensemble, n, method, kind);
        let Ok(bytes) = fs::read(&path) else {
            return Lookup::Miss;
        };
        let Ok(rec) = serde_json::from_slice::<Record>(&bytes) else {
            return Lookup::Corrupt;
        };
        let key_ok = rec.ensemble == ensemble.name()
            && rec.n == n
            && rec.version == ARTIFACT_VERSION
            && rec.method == method
            && rec.kind == kind;
        if !key_ok || digest(&rec.values) != rec.sha256 {
            return Lookup::Corrupt;
        }
        match rec.values.iter().map(|r| parse_row(r)).collect::<Option<Vec<_>>>() {
            Some(rows) => Lookup::Hit(rows),
            None => Lookup::Corrupt,
        }
    }

    fn write(
        &self,
        ensemble: Ensemble,
        n: usize,
        method: Method,
        kind: Kind,
        rows: Vec<Vec<String>>,
    ) -> Result<(), CacheError> {
        static COUNTER: AtomicU64 = AtomicU64::new(0);
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CacheError::Io { path, source }
        };
        fs::create_dir_all(&self.dir).map_err(io(&self.dir))?;
        let rec = Record {
            ensemble: ensemble.name().to_string(),
            n,
            version: ARTIFACT_VERSION.to_string(),
            method,
            kind,
            sha256: digest(&rows),
            values: rows,
        };
        let target = self.path(ensemble, n, method, kind);
        let tmp = self.dir.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        let body = serde_json::to_vec(&rec).expect("record serialises");
        let mut file = fs::File::create(&tmp).map_err(io(&tmp))?;
        file.write_all(&body).map_err(io(&tmp))?;
        file.sync_all().map_err(io(&tmp))?;
        fs::rename(&tmp, &target).map_err(io(&target))
    }

    pub fn load_moment_sums(&self, ensemble: Ensemble, n: usize, method: Method) -> Lookup<MomentSums> {
        match self.read(ensemble, n, method, Kind::MomentSums) {
            Lookup::Hit(rows) => match rows.as_slice() {
                [row] if row.len() == 6 => Lookup::Hit(MomentSums {
                    n,
                    total: row[0].clone(),
                    sum_ones: row[1].clone(),
                    sum_ones_sq: row[2].clone(),
                    sum_run: row[3].clone(),
                    sum_run_sq: row[4].clone(),
                    sum_ones_run: row[5].clone(),
                }),
                _ => Lookup::Corrupt,
            },
            Lookup::Miss => Lookup::Miss,
            Lookup::Corrupt => Lookup::Corrupt,
        }
    }

    pub fn store_moment_sums(&self, ensemble: Ensemble, method: Method, s: &MomentSums) -> Result<(), CacheError> {
        let row = [&s.total, &s.sum_ones, &s.sum_ones_sq, &s.sum_run, &s.sum_run_sq, &s.sum_ones_run]
            .iter()
            .map(|v| decimal(v))
            .collect();
        self.write(ensemble, s.n, method, Kind::MomentSums, vec![row])
    }

    pub fn load_table(&self, ensemble: Ensemble, n: usize, method: Method) -> Lookup<JointCountTable> {
        match self.read(ensemble, n, method, Kind::Table) {
            Lookup::Hit(rows) => match JointCountTable::from_rows(ensemble, n, rows) {
                Some(t) => Lookup::Hit(t),
                None => Lookup::Corrupt,
            },
            Lookup::Miss => Lookup::Miss,
            Lookup::Corrupt => Lookup::Corrupt,
        }
    }

    pub fn store_table(&self, method: Method, table: &JointCountTable) -> Result<(), CacheError> {
        let rows = (0..=table.n()).map(|x| table.row(x).iter().map(decimal).collect()).collect();
        self.write(table.ensemble(), table.n(), method, Kind::Table, rows)
    }

    /// Moment sums for `ns` in the given order, computing and storing
    /// whatever is missing or corrupt.
    pub fn moment_sums_many(
        &self,
        engine: &Engine,
        ensemble: Ensemble,
        ns: &[usize],
    ) -> Result<Vec<MomentSums>, CacheError> {
        let mut found: Vec<Option<MomentSums>> = ns
            .iter()
            .map(|&n| match self.load_moment_sums(ensemble, n, engine.resolve(n)) {
                Lookup::Hit(s) => Some(s),
                _ => None,
            })
            .collect();
        let missing: Vec<usize> = ns.iter().zip(&found).filter(|(_, f)| f.is_none()).map(|(&n, _)| n).collect();
        if !missing.is_empty() {
            let computed = engine.moment_sums_many(ensemble, &missing)?;
            for s in computed {
                self.store_moment_sums(ensemble, engine.resolve(s.n), &s)?;
                for (slot, &n) in found.iter_mut().zip(ns) {
                    if n == s.n && slot.is_none() {
                        *slot = Some(s.clone());
                    }
                }
            }
        }
        Ok(found.into_iter().map(|s| s.expect("filled")).collect())
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Recursion => "recursion",
        Method::Gap => "gap",
        Method::Auto => "auto",
    }
}

/// Moment sums through the cache when one is configured.
pub fn moment_sums_many(
    cache: Option<&Cache>,
    engine: &Engine,
    ensemble: Ensemble,
    ns: &[usize],
) -> Result<Vec<MomentSums>, CacheError> {
    match cache {
        Some(c) => c.moment_sums_many(engine, ensemble, ns),
        None => Ok(engine.moment_sums_many(ensemble, ns)?),
    }
}
