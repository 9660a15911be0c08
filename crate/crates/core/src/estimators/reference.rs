use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::collocation::slsc_estimate;
use super::grid_family::{CostModel, GridFamily};
use super::model::Model;
use crate::Result;

#[derive(Debug, Serialize, Deserialize)]
struct CachedReference {
    key: String,
    value: f64,
    /// Bit pattern of `value`, authoritative on reload.
    bits: String,
}

fn cache_key(model: &dyn Model, grids: &GridFamily, level: usize, grid_level: usize) -> String {
    format!(
        "{}|{}|h={:e}|L={}",
        model.fingerprint(),
        grids.fingerprint(),
        model.mesh_width(level),
        grid_level
    )
}

/// Cache file for a reference computation inside `dir`.
pub fn reference_path(dir: &Path, model: &dyn Model, grids: &GridFamily, level: usize, grid_level: usize) -> PathBuf {
    let digest = Sha256::digest(cache_key(model, grids, level, grid_level).as_bytes());
    dir.join(format!("ref-{}.json", hex::encode(&digest[..12])))
}

/// Single-level collocation value at mesh level `level` and grid level
/// `grid_level`, read from or written to `cache_dir` when given.
pub fn reference_value(
    model: &dyn Model,
    grids: &GridFamily,
    level: usize,
    grid_level: usize,
    cache_dir: Option<&Path>,
) -> Result<f64> {
    let key = cache_key(model, grids, level, grid_level);
    let path = cache_dir.map(|d| reference_path(d, model, grids, level, grid_level));
    if let Some(p) = path.as_ref().filter(|p| p.exists()) {
        let cached: CachedReference = serde_json::from_str(&std::fs::read_to_string(p)?)?;
        if cached.key == key {
            if let Ok(bits) = u64::from_str_radix(&cached.bits, 16) {
                log::debug!("reference cache hit {}", p.display());
                return Ok(f64::from_bits(bits));
            }
        }
        log::warn!("ignoring stale reference cache {}", p.display());
    }
    let value = slsc_estimate(model, grids, level, grid_level, &CostModel::for_dim(model.spatial_dim()))?.value;
    if let Some(p) = path {
        if let Some(dir) = p.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let entry = CachedReference {
            key,
            value,
            bits: format!("{:016x}", value.to_bits()),
        };
        std::fs::write(&p, serde_json::to_string_pretty(&entry)?)?;
    }
    Ok(value)
}
