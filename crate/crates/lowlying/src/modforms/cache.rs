//! On-disk cache of Victor Miller bases.
//!
//! One file per weight and precision, named `vm-k<k>-n<nmax>.v<version>.txt`.
//! The first line is a JSON header with the format version, weight, `nmax`,
//! dimension and the SHA-256 of the body; each following line is one basis
//! form as comma-separated decimal coefficients `0..=nmax`. Files are never
//! rewritten: a different version simply has a different name.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::qseries::QSeries;
use super::space::{victor_miller_basis, CuspSpace};
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

/// Environment variable that overrides the cache directory in the CLI.
pub const CACHE_DIR_ENV: &str = "LOWLYING_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CacheHeader {
    pub format_version: u32,
    pub k: u32,
    pub nmax: usize,
    pub dim: usize,
    pub checksum: String,
}

pub fn cache_path(dir: &Path, k: u32, nmax: usize) -> PathBuf {
    dir.join(format!("vm-k{k}-n{nmax}.v{FORMAT_VERSION}.txt"))
}

fn body_of(space: &CuspSpace) -> String {
    let mut body = String::new();
    for b in space.basis() {
        let row: Vec<String> = b.coefficients().iter().map(|c| c.to_string()).collect();
        body.push_str(&row.join(","));
        body.push('\n');
    }
    body
}

fn digest(body: &str) -> String {
    Sha256::digest(body.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Cache(format!("{}: {e}", path.display()))
}

pub fn write_space(dir: &Path, space: &CuspSpace) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let body = body_of(space);
    let header = CacheHeader {
        format_version: FORMAT_VERSION,
        k: space.weight(),
        nmax: space.nmax(),
        dim: space.dim(),
        checksum: digest(&body),
    };
    let path = cache_path(dir, space.weight(), space.nmax());
    // Write to a temporary name first so a partial file is never picked up.
    let tmp = path.with_extension("partial");
    let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
    let head = serde_json::to_string(&header).map_err(|e| io_err(&tmp, e))?;
    writeln!(f, "{head}").map_err(|e| io_err(&tmp, e))?;
    f.write_all(body.as_bytes()).map_err(|e| io_err(&tmp, e))?;
    f.sync_all().map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, &path).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

pub fn read_space(path: &Path) -> Result<CuspSpace> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let (head, body) = text.split_once('\n').ok_or_else(|| io_err(path, "missing header"))?;
    let header: CacheHeader = serde_json::from_str(head).map_err(|e| io_err(path, e))?;
    if header.format_version != FORMAT_VERSION {
        return Err(io_err(
            path,
            format!("format version {} is not {FORMAT_VERSION}", header.format_version),
        ));
    }
    if digest(body) != header.checksum {
        return Err(io_err(path, "checksum mismatch"));
    }
    let mut basis = Vec::with_capacity(header.dim);
    for line in body.lines() {
        let row = line
            .split(',')
            .map(|t| t.parse::<BigInt>().map_err(|e| io_err(path, e)))
            .collect::<Result<Vec<_>>>()?;
        basis.push(QSeries::from_coefficients(row));
    }
    if basis.len() != header.dim {
        return Err(io_err(path, "row count differs from header"));
    }
    CuspSpace::from_parts(header.k, basis, header.nmax + 1)
}

/// Cached files for weight `k` of the current version with at least `nmax`
/// coefficients, smallest first.
fn candidates(dir: &Path, k: u32, nmax: usize) -> Vec<(usize, PathBuf)> {
    let prefix = format!("vm-k{k}-n");
    let suffix = format!(".v{FORMAT_VERSION}.txt");
    let Ok(entries) = fs::read_dir(dir) else {
        return Vec::new();
    };
    let mut out: Vec<(usize, PathBuf)> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let name = e.file_name().into_string().ok()?;
            let n: usize = name.strip_prefix(&prefix)?.strip_suffix(&suffix)?.parse().ok()?;
            (n >= nmax).then(|| (n, e.path()))
        })
        .collect();
    out.sort();
    out
}

/// Load the basis from `dir` if a large enough cached copy exists, otherwise
/// build and store it. A corrupt cached file is an error, not a rebuild.
pub fn load_or_build(dir: &Path, k: u32, nmax: usize) -> Result<CuspSpace> {
    if let Some((_, path)) = candidates(dir, k, nmax).into_iter().next() {
        let space = read_space(&path)?;
        if space.weight() != k {
            return Err(io_err(&path, "weight differs from file name"));
        }
        return space.truncated(nmax);
    }
    let space = victor_miller_basis(k, nmax)?;
    write_space(dir, &space)?;
    Ok(space)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scratch(name: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("lowlying-cache-{name}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn round_trip_and_reuse() {
        let dir = scratch("rt");
        let built = load_or_build(&dir, 24, 60).unwrap();
        assert_eq!(built, victor_miller_basis(24, 60).unwrap());
        let again = load_or_build(&dir, 24, 40).unwrap();
        assert_eq!(again, built.truncated(40).unwrap());
        assert_eq!(candidates(&dir, 24, 0).len(), 1);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn corruption_is_detected() {
        let dir = scratch("bad");
        let path = write_space(&dir, &victor_miller_basis(12, 20).unwrap()).unwrap();
        let text = fs::read_to_string(&path).unwrap().replacen("-24", "-25", 1);
        fs::write(&path, text).unwrap();
        let err = load_or_build(&dir, 12, 20).unwrap_err();
        assert!(err.to_string().contains("checksum"), "{err}");
        fs::remove_dir_all(&dir).unwrap();
    }
}
