//! On-disk cache of coloured weight tables.
//!
//! One file per (group spec, bound) pair, holding a versioned header line
//! `ppcache v1 <group-spec> <bound>` followed by the canonical series JSON.
//! Writes go through a temporary file and an atomic rename; reads validate
//! the header and fall back to recomputation on any mismatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::mpoly::TruncatedSeries;

pub const CACHE_VERSION: &str = "ppcache v1";

/// File name for a cache entry; the group spec is sanitised for the
/// filesystem.
pub fn cache_file_name(group_spec: &str, bound: i64) -> String {
    let safe: String = group_spec
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    format!("{}_{}.ppcache", safe, bound)
}

/// Reads a cached series, returning `None` when the file is missing or its
/// header does not match.
pub fn read_cache(dir: &Path, group_spec: &str, bound: i64) -> Option<TruncatedSeries> {
    let path = dir.join(cache_file_name(group_spec, bound));
    let content = fs::read_to_string(path).ok()?;
    let (header, body) = content.split_once('\n')?;
    let expected = format!("{} {} {}", CACHE_VERSION, group_spec, bound);
    if header.trim() != expected {
        return None;
    }
    TruncatedSeries::from_json_str(body).ok()
}

/// Writes a series to the cache atomically (temp file, then rename).
pub fn write_cache(
    dir: &Path,
    group_spec: &str,
    bound: i64,
    series: &TruncatedSeries,
) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(cache_file_name(group_spec, bound));
    let tmp = dir.join(format!("{}.tmp.{}", cache_file_name(group_spec, bound), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        writeln!(f, "{} {} {}", CACHE_VERSION, group_spec, bound)?;
        f.write_all(series.to_json_string().as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn roundtrip_and_header_validation() {
        let dir = std::env::temp_dir().join(format!("ppcache-test-{}", std::process::id()));
        let series = TruncatedSeries::from_terms(
            2,
            4,
            [(vec![0, 0], BigInt::from(1)), (vec![1, 2], BigInt::from(-7))],
        );
        write_cache(&dir, "cyclic:2:1,1", 4, &series).unwrap();
        let back = read_cache(&dir, "cyclic:2:1,1", 4).unwrap();
        assert_eq!(back, series);
        // wrong bound or spec misses
        assert!(read_cache(&dir, "cyclic:2:1,1", 5).is_none());
        assert!(read_cache(&dir, "cyclic:3:1,1,1", 4).is_none());
        // corrupt header is rejected
        let path = dir.join(cache_file_name("cyclic:2:1,1", 4));
        let content = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, content.replace("ppcache v1", "ppcache v0")).unwrap();
        assert!(read_cache(&dir, "cyclic:2:1,1", 4).is_none());
        std::fs::remove_dir_all(&dir).ok();
    }
}
