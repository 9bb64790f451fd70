//! Persistent store for `p(alpha)` values.
//!
//! The file format is plain text:
//!
//! ```text
//! VPCACHE v1
//! 1\t1
//! 2\t2
//! 1,2\t4
//! ```
//!
//! Keys are canonical tuples in strictly increasing `Alpha` order (length,
//! then lexicographic), so equal maps always render to identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::vpart::{Alpha, PCounter};
use crate::BigNat;

pub const HEADER: &str = "VPCACHE v1";

/// Default number of entries re-derived by [`verify_sample`].
pub const SAMPLE_SIZE: usize = 100;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CacheFile {
    entries: BTreeMap<Alpha, BigNat>,
}

impl CacheFile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &BTreeMap<Alpha, BigNat> {
        &self.entries
    }

    pub fn into_entries(self) -> BTreeMap<Alpha, BigNat> {
        self.entries
    }

    pub fn get(&self, alpha: &Alpha) -> Option<&BigNat> {
        self.entries.get(alpha)
    }

    /// Adds an entry; an existing different value for the key is a conflict.
    pub fn insert(&mut self, alpha: Alpha, value: BigNat) -> Result<()> {
        if value.is_zero() {
            return Err(Error::InvalidInput(format!("p({alpha}) cannot be 0")));
        }
        match self.entries.get(&alpha) {
            Some(old) if *old != value => Err(Error::Conflict {
                key: alpha,
                left: old.clone(),
                right: value,
            }),
            Some(_) => Ok(()),
            None => {
                self.entries.insert(alpha, value);
                Ok(())
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Everything the counter has memoized so far.
    pub fn from_counter(counter: &PCounter) -> Self {
        CacheFile {
            entries: counter.snapshot(),
        }
    }

    /// Pre-loads the counter's memo with every entry.
    pub fn seed(&self, counter: &PCounter) {
        for (k, v) in &self.entries {
            counter.insert(k.clone(), v.clone());
        }
    }
}

/// Serializes to the on-disk text form.
pub fn render(cache: &CacheFile) -> String {
    let mut out = String::with_capacity(16 + cache.len() * 16);
    out.push_str(HEADER);
    out.push('\n');
    for (k, v) in &cache.entries {
        out.push_str(&k.to_string());
        out.push('\t');
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

/// Parses the text form. `path` is only used in error messages.
pub fn parse(text: &str, path: Option<&Path>) -> Result<CacheFile> {
    let err = |line: usize, reason: String| Error::Parse {
        path: path.map(Path::to_path_buf),
        line,
        reason,
    };
    let mut lines = text.split('\n');
    let header = lines.next().unwrap_or("");
    if header != HEADER {
        if header.starts_with("VPCACHE ") {
            return Err(Error::VersionMismatch {
                found: header.to_string(),
            });
        }
        return Err(err(
            1,
            format!("expected header {HEADER:?}, found {header:?}"),
        ));
    }
    let body: Vec<&str> = lines.collect();
    let mut cache = CacheFile::new();
    let mut previous: Option<Alpha> = None;
    for (i, line) in body.iter().enumerate() {
        let lineno = i + 2;
        if line.is_empty() {
            if i + 1 == body.len() {
                break;
            }
            return Err(err(lineno, "empty line".into()));
        }
        let (key, value) = line
            .split_once('\t')
            .ok_or_else(|| err(lineno, "expected <alpha>TAB<value>".into()))?;
        let alpha: Alpha = key
            .parse()
            .map_err(|e: Error| err(lineno, format!("bad key {key:?}: {e}")))?;
        let valid_digits = !value.is_empty()
            && value.bytes().all(|b| b.is_ascii_digit())
            && !(value.len() > 1 && value.starts_with('0'));
        if !valid_digits {
            return Err(err(lineno, format!("bad value {value:?}")));
        }
        let v: BigNat = value
            .parse()
            .map_err(|_| err(lineno, format!("bad value {value:?}")))?;
        if v.is_zero() {
            return Err(err(lineno, "value must be at least 1".into()));
        }
        if let Some(prev) = &previous {
            if alpha <= *prev {
                let what = if alpha == *prev {
                    "duplicate key"
                } else {
                    "keys out of order"
                };
                return Err(err(lineno, format!("{what}: ({alpha}) after ({prev})")));
            }
        }
        previous = Some(alpha.clone());
        cache.entries.insert(alpha, v);
    }
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(err(body.len() + 1, "missing final newline".into()));
    }
    Ok(cache)
}

pub fn load(path: impl AsRef<Path>) -> Result<CacheFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse(&text, Some(path))
}

/// Writes to a sibling temporary file and renames it into place.
pub fn store(cache: &CacheFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidInput(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp: PathBuf = dir.join(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(render(cache).as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// Union of two caches; a key with two different values is an error.
pub fn merge(a: &CacheFile, b: &CacheFile) -> Result<CacheFile> {
    let mut out = a.clone();
    for (k, v) in &b.entries {
        out.insert(k.clone(), v.clone())?;
    }
    Ok(out)
}

/// Recomputes up to `sample` randomly chosen entries from scratch and
/// reports the first disagreement as a conflict (cached value on the left).
pub fn verify_sample(
    cache: &CacheFile,
    sample: usize,
    seed: u64,
    state_budget: usize,
) -> Result<usize> {
    let keys: Vec<&Alpha> = cache.entries.keys().collect();
    let mut rng = StdRng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, keys.len(), sample.min(keys.len()));
    let mut indices = picked.into_vec();
    indices.sort_unstable();
    let fresh = PCounter::with_state_budget(state_budget);
    for &i in &indices {
        let key = keys[i];
        let value = fresh.count(key)?;
        let cached = &cache.entries[key];
        if *cached != value {
            return Err(Error::Conflict {
                key: key.clone(),
                left: cached.clone(),
                right: value,
            });
        }
    }
    Ok(indices.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Alpha {
        s.parse().unwrap()
    }

    fn sample() -> CacheFile {
        let mut c = CacheFile::new();
        for (k, v) in [("1,2", 4u32), ("1", 1), ("2", 2), ("1,1,1", 5)] {
            c.insert(a(k), BigNat::from(v)).unwrap();
        }
        c
    }

    #[test]
    fn render_is_sorted_and_parses_back() {
        let c = sample();
        let text = render(&c);
        assert_eq!(text, "VPCACHE v1\n1\t1\n2\t2\n1,2\t4\n1,1,1\t5\n");
        assert_eq!(parse(&text, None).unwrap(), c);
    }

    #[test]
    fn load_examples() {
        assert!(parse("VPCACHE v1\n", None).unwrap().is_empty());
        assert!(parse("VPCACHE v1", None).is_err());
        let c = parse("VPCACHE v1\n1,2\t4\n", None).unwrap();
        assert_eq!(c.get(&a("1,2")), Some(&BigNat::from(4u32)));
    }

    #[test]
    fn malformed_input_reports_line_numbers() {
        let cases = [
            ("VPCACHE v1\n1,2\t4\n1,2\t4\n", 3),
            ("VPCACHE v1\n1,2\t4\n2\t2\n", 3),
            ("VPCACHE v1\n2,1\t4\n", 2),
            ("VPCACHE v1\n1\t01\n", 2),
            ("VPCACHE v1\n1\t0\n", 2),
            ("VPCACHE v1\n1 1\n", 2),
            ("VPCACHE v1\n\n1\t1\n", 2),
            ("VPCACHE v1\n1\t1", 2),
            ("", 1),
            ("hello\n", 1),
        ];
        for (text, want) in cases {
            match parse(text, None) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(matches!(
            parse("VPCACHE v2\n", None),
            Err(Error::VersionMismatch { .. })
        ));
    }

    #[test]
    fn merge_rules() {
        let c = sample();
        assert_eq!(merge(&c, &CacheFile::new()).unwrap(), c);
        let mut d = CacheFile::new();
        d.insert(a("3"), BigNat::from(3u32)).unwrap();
        let m = merge(&c, &d).unwrap();
        assert_eq!(m.len(), 5);
        let mut bad = CacheFile::new();
        bad.insert(a("1,2"), BigNat::from(5u32)).unwrap();
        assert!(matches!(merge(&c, &bad), Err(Error::Conflict { .. })));
    }

    #[test]
    fn store_is_atomic_and_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.vpc");
        let p2 = dir.path().join("b.vpc");
        let c = sample();
        store(&c, &p1).unwrap();
        store(&c, &p2).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
        assert_eq!(load(&p1).unwrap(), c);
        let leftovers = fs::read_dir(dir.path()).unwrap().count();
        assert_eq!(leftovers, 2);
    }

    #[test]
    fn sampled_recomputation() {
        let c = sample();
        assert_eq!(verify_sample(&c, 100, 7, 1_000_000).unwrap(), 4);
        let mut bad = c.clone();
        bad.entries.insert(a("2,2"), BigNat::from(8u32));
        assert!(matches!(
            verify_sample(&bad, 100, 7, 1_000_000),
            Err(Error::Conflict { .. })
        ));
    }

    #[test]
    fn counter_round_trip() {
        let counter = PCounter::new();
        counter.count(&a("2,2")).unwrap();
        let c = CacheFile::from_counter(&counter);
        let fresh = PCounter::new();
        c.seed(&fresh);
        assert_eq!(fresh.get(&a("2,2")), Some(BigNat::from(9u32)));
    }
}
