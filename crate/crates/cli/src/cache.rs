//! On-disk coefficient cache: a header line and sorted `a`/`c` records.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use c2bordism_core::formal_group::{b_table, FglContext};
use c2bordism_core::kernel::F2Poly;
use thiserror::Error;

/// The one check skipped on load: it fails for every correct table.
pub const SKIPPED_CHECK: &str = "c(i,l) = 0 for negative l != -i-1";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported cache version `{0}` (expected v1)")]
    Version(String),
    #[error("cache line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cached tables fail validation: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] c2bordism_core::Error),
}

/// Canonical text of the tables.
pub fn serialize(fgl: &FglContext) -> String {
    let window = fgl.c_window().unwrap_or(fgl.n() as i32);
    let mut out = format!("cobordism-cache v1 N={} window={}\n", fgl.n(), window);
    for (&(i, j), p) in fgl.a_table() {
        out.push_str(&format!("a {i} {j} = {p}\n"));
    }
    for (&(i, j), p) in fgl.c_table() {
        out.push_str(&format!("c {i} {j} = {p}\n"));
    }
    out
}

fn parse_header(line: &str) -> Result<(u32, i32), CacheError> {
    let bad = |m: &str| CacheError::Parse {
        line: 1,
        message: m.to_string(),
    };
    let mut words = line.split_whitespace();
    if words.next() != Some("cobordism-cache") {
        return Err(bad("missing `cobordism-cache` header"));
    }
    let version = words.next().ok_or_else(|| bad("missing version"))?;
    if version != "v1" {
        return Err(CacheError::Version(version.to_string()));
    }
    let field = |w: Option<&str>, key: &str| -> Result<i64, CacheError> {
        w.and_then(|w| w.strip_prefix(key))
            .and_then(|v| v.parse::<i64>().ok())
            .ok_or_else(|| bad(&format!("expected `{key}<int>`")))
    };
    let n = field(words.next(), "N=")?;
    let window = field(words.next(), "window=")?;
    if words.next().is_some() {
        return Err(bad("trailing header fields"));
    }
    let n = u32::try_from(n).map_err(|_| bad("N out of range"))?;
    let window = i32::try_from(window).map_err(|_| bad("window out of range"))?;
    Ok((n, window))
}

/// Parses the tables without validating them.
pub fn deserialize_unchecked(text: &str) -> Result<FglContext, CacheError> {
    let mut lines = text.lines();
    let (n, window) = parse_header(lines.next().unwrap_or(""))?;
    let b = b_table(n);
    let mut a = BTreeMap::new();
    let mut c = BTreeMap::new();
    for (k, line) in lines.enumerate() {
        let lineno = k + 2;
        let bad = |m: String| CacheError::Parse {
            line: lineno,
            message: m,
        };
        let (head, poly) = line
            .split_once(" = ")
            .ok_or_else(|| bad("expected `<kind> <i> <j> = <poly>`".into()))?;
        let mut w = head.split_whitespace();
        let kind = w.next().unwrap_or("");
        let i: u32 = w
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad index i".into()))?;
        let j: i32 = w
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad index j".into()))?;
        if w.next().is_some() {
            return Err(bad("trailing fields".into()));
        }
        let p = F2Poly::parse(poly, &b).map_err(|e| bad(e.to_string()))?;
        let duplicate = match kind {
            "a" => {
                let j = u32::try_from(j).map_err(|_| bad("negative index in a-record".into()))?;
                a.insert((i, j), p).is_some()
            }
            "c" => c.insert((i, j), p).is_some(),
            _ => return Err(bad(format!("unknown record kind `{kind}`"))),
        };
        if duplicate {
            return Err(bad(format!("duplicate record {kind} {i} {j}")));
        }
    }
    Ok(FglContext::from_tables(n, a, c, window)?)
}

/// Failed checks among the load-time invariants.
pub fn validation_failures(fgl: &FglContext) -> Result<Vec<String>, CacheError> {
    let mut report = fgl.validate_fgl()?;
    report.extend(fgl.validate_c_table()?);
    Ok(report
        .checks
        .into_iter()
        .filter(|c| !c.passed && c.name != SKIPPED_CHECK)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect())
}

pub fn deserialize(text: &str) -> Result<FglContext, CacheError> {
    let fgl = deserialize_unchecked(text)?;
    let failures = validation_failures(&fgl)?;
    if !failures.is_empty() {
        return Err(CacheError::Invalid(failures.join("; ")));
    }
    Ok(fgl)
}

/// Writes to a temporary file beside `path`, then renames it into place.
pub fn save(fgl: &FglContext, path: &Path) -> Result<(), CacheError> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(serialize(fgl).as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

pub fn load(path: &Path) -> Result<FglContext, CacheError> {
    deserialize(&fs::read_to_string(path)?)
}

pub fn load_unchecked(path: &Path) -> Result<FglContext, CacheError> {
    deserialize_unchecked(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let fgl = FglContext::build_fgl(5).unwrap().with_c_table(7).unwrap();
        let text = serialize(&fgl);
        assert!(text.starts_with("cobordism-cache v1 N=5 window=7\n"));
        let back = deserialize(&text).unwrap();
        assert_eq!(serialize(&back), text);
        assert_eq!(back.a_table(), fgl.a_table());
        assert_eq!(back.c_table(), fgl.c_table());
    }

    #[test]
    fn rejects_other_versions() {
        let err = deserialize("cobordism-cache v0 N=4 window=6\n").unwrap_err();
        assert!(matches!(err, CacheError::Version(v) if v == "v0"));
    }

    #[test]
    fn rejects_corrupted_records() {
        let fgl = FglContext::build(4).unwrap();
        let text = serialize(&fgl).replace("a 1 2 = b2", "a 1 2 = b1^2");
        assert!(matches!(deserialize(&text), Err(CacheError::Invalid(_))));
        let garbled = serialize(&fgl).replace("a 1 2 = b2", "a 1 = b2");
        assert!(matches!(
            deserialize(&garbled),
            Err(CacheError::Parse { .. })
        ));
    }
}
