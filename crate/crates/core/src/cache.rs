//! On-disk cache of Cayley balls keyed by (spec hash, radius).

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::marked::{make_marked, GroupSpec};
use crate::topology::{build_ball, LabeledBall};

pub const CACHE_DIR_ENV: &str = "MGL_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".mgl-cache";

#[derive(Clone, Debug)]
pub struct BallCache {
    dir: PathBuf,
}

fn collect_csv_paths<'a>(spec: &'a GroupSpec, out: &mut Vec<&'a Path>) {
    match spec {
        GroupSpec::Table { csv: Some(p), .. } => out.push(p),
        GroupSpec::Product { factors, .. } => factors.iter().for_each(|f| collect_csv_paths(f, out)),
        _ => {}
    }
}

impl BallCache {
    pub fn new(dir: impl Into<PathBuf>) -> BallCache {
        BallCache { dir: dir.into() }
    }

    /// Directory from `MGL_CACHE_DIR`, defaulting to `./.mgl-cache`.
    pub fn from_env() -> BallCache {
        let dir = std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| DEFAULT_CACHE_DIR.into());
        BallCache { dir }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Hash of the spec, including the contents of any CSV table it names.
    pub fn spec_hash(spec: &GroupSpec) -> Result<String> {
        let mut h = Sha256::new();
        h.update(spec.to_json().as_bytes());
        let mut paths = Vec::new();
        collect_csv_paths(spec, &mut paths);
        for p in paths {
            let bytes = std::fs::read(p).map_err(|source| Error::Io { path: p.to_path_buf(), source })?;
            h.update(&bytes);
        }
        Ok(hex::encode(h.finalize()))
    }

    pub fn path_for(&self, spec: &GroupSpec, radius: usize) -> Result<PathBuf> {
        Ok(self.dir.join(format!("{}-r{radius}.json", Self::spec_hash(spec)?)))
    }

    /// Cached ball if present and readable, otherwise builds and stores it.
    pub fn ball(&self, spec: &GroupSpec, radius: usize, cap: u64) -> Result<LabeledBall> {
        let path = self.path_for(spec, radius)?;
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(ball) = serde_json::from_str::<LabeledBall>(&text) {
                return Ok(ball);
            }
        }
        let ball = build_ball(&make_marked(spec)?, radius, cap)?;
        let io = |source| Error::Io { path: path.clone(), source };
        std::fs::create_dir_all(&self.dir).map_err(io)?;
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_vec(&ball)?).map_err(|source| Error::Io { path: tmp.clone(), source })?;
        std::fs::rename(&tmp, &path).map_err(io)?;
        Ok(ball)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marked::catalog;

    #[test]
    fn round_trip_and_invalidation() {
        let dir = tempfile::tempdir().unwrap();
        let cache = BallCache::new(dir.path());
        let spec = catalog::q8_spec();
        let a = cache.ball(&spec, 2, 1000).unwrap();
        assert!(cache.path_for(&spec, 2).unwrap().exists());
        let b = cache.ball(&spec, 2, 1000).unwrap();
        assert_eq!(a, b);
        let other = catalog::cyclic_spec(5);
        assert_ne!(cache.path_for(&spec, 2).unwrap(), cache.path_for(&other, 2).unwrap());
        assert_ne!(cache.path_for(&spec, 2).unwrap(), cache.path_for(&spec, 3).unwrap());
    }
}
