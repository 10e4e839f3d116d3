//! On-disk cache of exact U-matrices as versioned JSON.
//!
//! Files are written deterministically, so recomputing a cached matrix
//! reproduces the file byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::prime::Prime;
use crate::uoperator::{self, Radius, UMatrix};

pub const SCHEMA: &str = "upadic.umatrix/1";
pub const CACHE_DIR_ENV: &str = "UPADIC_CACHE_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache i/o on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed cache file {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },
    #[error(transparent)]
    Matrix(#[from] uoperator::UMatrixError),
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    schema: String,
    p: u32,
    n: usize,
    radius: Radius,
    qprec_used: i64,
    entries: Vec<Vec<String>>,
}

/// A directory of cached matrices.
#[derive(Clone, Debug)]
pub struct MatrixCache {
    dir: PathBuf,
}

impl MatrixCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        MatrixCache { dir: dir.into() }
    }

    /// The directory named by `UPADIC_CACHE_DIR`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, p: Prime, n: usize, r: Radius) -> PathBuf {
        let r = r.value();
        self.dir.join(format!("umatrix-p{}-n{}-r{}_{}.json", p, n, r.numer(), r.denom()))
    }

    pub fn save(&self, u: &UMatrix) -> Result<PathBuf, CacheError> {
        let path = self.path_for(u.prime(), u.size(), u.radius());
        fs::create_dir_all(&self.dir).map_err(|source| CacheError::Io { path: self.dir.clone(), source })?;
        let text = to_json(u);
        fs::write(&path, text).map_err(|source| CacheError::Io { path: path.clone(), source })?;
        Ok(path)
    }

    pub fn load(&self, p: Prime, n: usize, r: Radius) -> Result<Option<UMatrix>, CacheError> {
        let path = self.path_for(p, n, r);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(|source| CacheError::Io { path: path.clone(), source })?;
        let u = from_json(&text).map_err(|reason| CacheError::Malformed { path: path.clone(), reason })?;
        if u.prime() != p || u.size() != n || u.radius() != r {
            return Err(CacheError::Malformed { path, reason: "header does not match file name".into() });
        }
        Ok(Some(u))
    }

    /// Loads the radius-`r` matrix, computing and storing it on a miss.
    pub fn get_or_compute(&self, p: Prime, n: usize, r: Radius) -> Result<UMatrix, CacheError> {
        if let Some(u) = self.load(p, n, r)? {
            return Ok(u);
        }
        let u0 = match self.load(p, n, Radius::ZERO)? {
            Some(u) => u,
            None => {
                let u = uoperator::u_direct(p, n);
                self.save(&u)?;
                u
            }
        };
        if r.is_zero() {
            return Ok(u0);
        }
        let u = uoperator::rescale(&u0, r)?;
        self.save(&u)?;
        Ok(u)
    }
}

/// Serializes with every entry as `"num/den"`.
pub fn to_json(u: &UMatrix) -> String {
    let file = CacheFile {
        schema: SCHEMA.to_string(),
        p: u.prime().get(),
        n: u.size(),
        radius: u.radius(),
        qprec_used: u.qprec_used(),
        entries: u.rows().iter().map(|r| r.iter().map(arith::format_ratio).collect()).collect(),
    };
    let mut s = serde_json::to_string(&file).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<UMatrix, String> {
    let file: CacheFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if file.schema != SCHEMA {
        return Err(format!("unknown schema `{}`", file.schema));
    }
    let p = Prime::new(file.p).map_err(|e| e.to_string())?;
    if file.entries.len() != file.n || file.entries.iter().any(|r| r.len() != file.n) {
        return Err("entries are not n × n".into());
    }
    let entries: Vec<Vec<BigRational>> = file
        .entries
        .iter()
        .map(|row| row.iter().map(|s| arith::parse_rational(s).ok_or_else(|| format!("bad entry `{s}`"))).collect())
        .collect::<Result<_, _>>()?;
    Ok(UMatrix::from_entries(p, entries, file.radius, file.qprec_used))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_determinism() {
        let dir = tempfile::tempdir().unwrap();
        let cache = MatrixCache::new(dir.path());
        let p = Prime::new(3).unwrap();
        let r = Radius::new(1, 2);
        let u = cache.get_or_compute(p, 6, r).unwrap();
        assert_eq!(u, uoperator::rescale(&uoperator::u_direct(p, 6), r).unwrap());
        let path = cache.path_for(p, 6, r);
        let first = fs::read(&path).unwrap();
        assert_eq!(cache.load(p, 6, r).unwrap().unwrap(), u);
        fs::remove_file(&path).unwrap();
        cache.get_or_compute(p, 6, r).unwrap();
        assert_eq!(fs::read(&path).unwrap(), first);
        let text = String::from_utf8(first).unwrap();
        assert!(text.starts_with("{\"schema\":\"upadic.umatrix/1\""));
        assert!(text.contains("\"90/1\""));
    }

    #[test]
    fn rejects_bad_files() {
        assert!(from_json("{}").is_err());
        let u = uoperator::u_direct(Prime::new(2).unwrap(), 2);
        let good = to_json(&u);
        assert_eq!(from_json(&good).unwrap(), u);
        assert!(from_json(&good.replace("upadic.umatrix/1", "other/9")).is_err());
        assert!(from_json(&good.replace("\"24/1\"", "\"x\"")).is_err());
    }
}
