//! Content-addressed on-disk store for built complexes and their homology.
//!
//! Each blob is stored as `sha256 <hex digest of payload>\n<payload>`. A file
//! whose digest line does not match its payload is treated as a miss and
//! rebuilt.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{Context, Result};
use buildings_core::builders::{build, build_primed, BuildOptions};
use buildings_core::homology::{boundary_squared_vanishes, reduced_homology, RankReport};
use buildings_core::tits::{build_oriented_tits, build_tits};
use buildings_core::{ComplexKind, Header, PrimeContext, SimplicialComplex};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "BUILDINGS_LAB_CACHE";
const DEFAULT_DIR: &str = ".buildings-lab-cache";

/// Bumped whenever a stored format changes.
const FORMAT: &str = "v1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// What to build: a complex over a residue field, identified by its header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexRequest {
    pub kind: ComplexKind,
    pub n: usize,
    pub m: usize,
    pub max_dim: Option<usize>,
    pub cap: u64,
}

impl ComplexRequest {
    pub fn new(kind: ComplexKind, n: usize, m: usize) -> Self {
        ComplexRequest {
            kind,
            n,
            m,
            max_dim: None,
            cap: buildings_core::builders::DEFAULT_SIMPLEX_CAP,
        }
    }

    pub fn max_dim(mut self, d: Option<usize>) -> Self {
        self.max_dim = d;
        self
    }

    pub fn cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn header(&self, ctx: &PrimeContext) -> Header {
        Header {
            kind: self.kind,
            ring: Some(ctx.ring()),
            p: Some(ctx.p().to_string()),
            q: ctx.q(),
            n: self.n,
            m: if matches!(self.kind, ComplexKind::Tits | ComplexKind::OrientedTits) { 0 } else { self.m },
            max_dim: self.max_dim,
        }
    }

    pub fn build(&self, ctx: &PrimeContext) -> buildings_core::Result<SimplicialComplex> {
        let opts = BuildOptions {
            cap: self.cap,
            max_dim: self.max_dim,
            parallel: true,
        };
        match self.kind {
            ComplexKind::Tits => build_tits(ctx, self.n, self.cap),
            ComplexKind::OrientedTits => build_oriented_tits(ctx, self.n, self.cap),
            ComplexKind::PrimedBD => build_primed(&build(ctx, ComplexKind::BD, self.n, self.m, &opts)?, ctx),
            ComplexKind::PrimedBDA => build_primed(&build(ctx, ComplexKind::BDA, self.n, self.m, &opts)?, ctx),
            kind => build(ctx, kind, self.n, self.m, &opts),
        }
    }

    pub fn label(&self, ctx: &PrimeContext) -> String {
        let mut s = format!("{}_{}", self.kind, self.n);
        if !matches!(self.kind, ComplexKind::Tits | ComplexKind::OrientedTits) {
            s.push_str(&format!(",{}", self.m));
        }
        if let Some(d) = self.max_dim {
            s.push_str(&format!(" ({d}-skeleton)"));
        }
        format!("{s} over {} mod {}", ctx.ring().name(), ctx.p())
    }
}

/// Homology of a built complex together with the infrastructure checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexSummary {
    pub header: Header,
    pub homology: RankReport,
    pub boundary_squared_zero: bool,
    pub euler_consistent: bool,
}

impl ComplexSummary {
    pub fn compute(c: &SimplicialComplex) -> buildings_core::Result<Self> {
        let homology = reduced_homology(c)?;
        Ok(ComplexSummary {
            header: c.header().clone(),
            euler_consistent: buildings_core::homology::euler_consistent(c, &homology),
            boundary_squared_zero: boundary_squared_vanishes(c),
            homology,
        })
    }
}

pub struct Cache {
    dir: PathBuf,
    touched: Mutex<BTreeSet<String>>,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache {
            dir: dir.into(),
            touched: Mutex::new(BTreeSet::new()),
        }
    }

    /// The explicit directory, else `$BUILDINGS_LAB_CACHE`, else `./.buildings-lab-cache`.
    pub fn resolve(flag: Option<&Path>) -> Self {
        let dir = flag
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_DIR));
        Cache::new(dir)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// SHA-256 of the canonical header and the operation name.
    pub fn key(header: &Header, op: &str) -> String {
        sha256_hex(format!("{FORMAT}\nop {op}\n{}", header.canonical()).as_bytes())
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(&key[..2]).join(key)
    }

    /// Keys read or written so far, sorted.
    pub fn touched(&self) -> Vec<String> {
        self.touched.lock().unwrap().iter().cloned().collect()
    }

    fn touch(&self, key: &str) {
        self.touched.lock().unwrap().insert(key.to_string());
    }

    /// The stored payload, or `None` when absent or corrupt.
    pub fn get(&self, key: &str) -> Result<Option<Vec<u8>>> {
        self.touch(key);
        let path = self.path(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e).with_context(|| format!("reading cache entry {}", path.display())),
        };
        let Some(nl) = bytes.iter().position(|&b| b == b'\n') else {
            return Ok(None);
        };
        let (head, payload) = (&bytes[..nl], &bytes[nl + 1..]);
        let expected = format!("sha256 {}", sha256_hex(payload));
        Ok((head == expected.as_bytes()).then(|| payload.to_vec()))
    }

    /// Store `blob` atomically: write a temporary file, then rename it into place.
    pub fn put(&self, key: &str, blob: &[u8]) -> Result<()> {
        self.touch(key);
        let path = self.path(key);
        let parent = path.parent().expect("entry has a parent");
        fs::create_dir_all(parent).with_context(|| format!("creating cache directory {}", parent.display()))?;
        let tmp = parent.join(format!(".{key}.{}.tmp", std::process::id()));
        let write = || -> std::io::Result<()> {
            let mut f = fs::File::create(&tmp)?;
            writeln!(f, "sha256 {}", sha256_hex(blob))?;
            f.write_all(blob)?;
            f.sync_all()?;
            fs::rename(&tmp, &path)
        };
        write().with_context(|| format!("writing cache entry {}", path.display()))
    }

    fn get_json<T: for<'de> Deserialize<'de>>(&self, key: &str) -> Result<Option<T>> {
        Ok(self.get(key)?.and_then(|b| serde_json::from_slice(&b).ok()))
    }

    fn put_json<T: Serialize>(&self, key: &str, value: &T) -> Result<()> {
        self.put(key, &serde_json::to_vec(value)?)
    }

    /// Load a complex from the cache, building and storing it on a miss.
    pub fn complex(&self, ctx: &PrimeContext, req: &ComplexRequest) -> Result<SimplicialComplex> {
        let key = Cache::key(&req.header(ctx), "complex");
        if let Some(blob) = self.get(&key)? {
            if let Ok(c) = SimplicialComplex::from_text(&String::from_utf8_lossy(&blob)) {
                return Ok(c);
            }
        }
        let c = req.build(ctx)?;
        self.put(&key, c.to_text().as_bytes())?;
        Ok(c)
    }

    /// Homology and infrastructure checks of a complex, building it only on a miss.
    /// The complex itself is not stored.
    pub fn summary(&self, ctx: &PrimeContext, req: &ComplexRequest) -> Result<ComplexSummary> {
        let key = Cache::key(&req.header(ctx), "summary");
        if let Some(s) = self.get_json(&key)? {
            return Ok(s);
        }
        let c = req.build(ctx)?;
        let s = ComplexSummary::compute(&c)?;
        self.put_json(&key, &s)?;
        Ok(s)
    }

    /// Summary of an already built complex, cached by its header.
    pub fn summary_of(&self, c: &SimplicialComplex) -> Result<ComplexSummary> {
        let key = Cache::key(c.header(), "summary");
        if c.kind() != ComplexKind::Custom {
            if let Some(s) = self.get_json(&key)? {
                return Ok(s);
            }
        }
        let s = ComplexSummary::compute(c)?;
        if c.kind() != ComplexKind::Custom {
            self.put_json(&key, &s)?;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use buildings_core::{RingElement, RingId};

    #[test]
    fn put_get_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let key = sha256_hex(b"k");
        assert!(cache.get(&key).unwrap().is_none());
        cache.put(&key, b"hello\nworld").unwrap();
        assert_eq!(cache.get(&key).unwrap().as_deref(), Some(&b"hello\nworld"[..]));
        let mut bytes = fs::read(cache.path(&key)).unwrap();
        *bytes.last_mut().unwrap() = b'X';
        fs::write(cache.path(&key), bytes).unwrap();
        assert!(cache.get(&key).unwrap().is_none());
        assert_eq!(cache.touched(), vec![key]);
    }

    #[test]
    fn corrupt_complex_is_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let ctx = PrimeContext::new(RingId::Integers, RingElement::from_i64(RingId::Integers, 3, 0)).unwrap();
        let req = ComplexRequest::new(ComplexKind::BD, 2, 0);
        let a = cache.complex(&ctx, &req).unwrap();
        let key = Cache::key(&req.header(&ctx), "complex");
        fs::write(cache.path(&key), "sha256 00\ngarbage").unwrap();
        let b = cache.complex(&ctx, &req).unwrap();
        assert_eq!(a, b);
        assert!(cache.get(&key).unwrap().is_some());
    }

    #[test]
    fn request_header_matches_built_header() {
        let ctx = PrimeContext::new(RingId::Gaussian, RingElement::from_i64(RingId::Gaussian, 3, 0)).unwrap();
        for req in [
            ComplexRequest::new(ComplexKind::BDA, 2, 1).max_dim(Some(1)),
            ComplexRequest::new(ComplexKind::OrientedTits, 2, 0),
            ComplexRequest::new(ComplexKind::B, 1, 1),
        ] {
            assert_eq!(req.build(&ctx).unwrap().header(), &req.header(&ctx));
        }
    }
}
