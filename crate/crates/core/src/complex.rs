//! Finite simplicial complexes over an indexed vertex table, with a
//! line-oriented text serialization.
//!
//! Simplices of each dimension are stored as one flat `Vec<u32>` of sorted
//! vertex tuples, itself sorted lexicographically, so membership is a binary
//! search and the k-th simplex of dimension d is a slice.

use std::cmp::Ordering;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::RingId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ComplexKind {
    B,
    BD,
    BA,
    BDA,
    PrimedBD,
    PrimedBDA,
    Tits,
    OrientedTits,
    Custom,
}

impl ComplexKind {
    pub fn name(self) -> &'static str {
        match self {
            ComplexKind::B => "B",
            ComplexKind::BD => "BD",
            ComplexKind::BA => "BA",
            ComplexKind::BDA => "BDA",
            ComplexKind::PrimedBD => "BD'",
            ComplexKind::PrimedBDA => "BDA'",
            ComplexKind::Tits => "T",
            ComplexKind::OrientedTits => "TU",
            ComplexKind::Custom => "custom",
        }
    }
}

impl fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ComplexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let k = match s.trim().to_ascii_lowercase().as_str() {
            "b" => ComplexKind::B,
            "bd" => ComplexKind::BD,
            "ba" => ComplexKind::BA,
            "bda" => ComplexKind::BDA,
            "bd'" | "primed-bd" => ComplexKind::PrimedBD,
            "bda'" | "primed-bda" => ComplexKind::PrimedBDA,
            "t" | "tits" => ComplexKind::Tits,
            "tu" | "oriented-tits" => ComplexKind::OrientedTits,
            "custom" => ComplexKind::Custom,
            _ => {
                return Err(Error::Parse {
                    input: s.to_string(),
                    reason: "unknown complex kind".into(),
                })
            }
        };
        Ok(k)
    }
}

/// Classification of a simplex of an augmented complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SimplexLabel {
    Standard,
    InternallyAdditive,
    ExternallyAdditive,
}

impl SimplexLabel {
    fn code(self) -> char {
        match self {
            SimplexLabel::Standard => 's',
            SimplexLabel::InternallyAdditive => 'i',
            SimplexLabel::ExternallyAdditive => 'e',
        }
    }

    fn from_code(c: &str) -> Option<Self> {
        match c {
            "s" => Some(SimplexLabel::Standard),
            "i" => Some(SimplexLabel::InternallyAdditive),
            "e" => Some(SimplexLabel::ExternallyAdditive),
            _ => None,
        }
    }
}

/// Build-identifying metadata of a complex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Header {
    pub kind: ComplexKind,
    pub ring: Option<RingId>,
    pub p: Option<String>,
    pub q: usize,
    pub n: usize,
    pub m: usize,
    /// Highest dimension built, when only a skeleton was requested.
    pub max_dim: Option<usize>,
}

impl Header {
    pub fn custom() -> Self {
        Header {
            kind: ComplexKind::Custom,
            ring: None,
            p: None,
            q: 0,
            n: 0,
            m: 0,
            max_dim: None,
        }
    }

    /// Canonical text used for cache keys: one `key value` pair per line.
    pub fn canonical(&self) -> String {
        let ring = self.ring.map_or("-".to_string(), |r| r.name().to_string());
        let p = self.p.clone().unwrap_or_else(|| "-".into());
        let max_dim = self.max_dim.map_or("full".to_string(), |d| d.to_string());
        format!(
            "kind {}\nring {}\np {}\nq {}\nn {}\nm {}\nmax_dim {}\n",
            self.kind, ring, p, self.q, self.n, self.m, max_dim
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    header: Header,
    vertices: Vec<Vec<u32>>,
    levels: Vec<Vec<u32>>,
    labels: Option<Vec<Vec<SimplexLabel>>>,
}

/// Sort fixed-width tuples lexicographically, carrying optional labels along,
/// and drop duplicates (keeping the first label seen in sorted order).
pub fn sort_tuples(data: Vec<u32>, width: usize, labels: Option<Vec<SimplexLabel>>) -> (Vec<u32>, Option<Vec<SimplexLabel>>) {
    assert!(width > 0 && data.len().is_multiple_of(width));
    let count = data.len() / width;
    let mut order: Vec<u32> = (0..count as u32).collect();
    let key = |i: u32| &data[i as usize * width..(i as usize + 1) * width];
    order.sort_unstable_by(|&x, &y| key(x).cmp(key(y)).then(x.cmp(&y)));
    let mut out = Vec::with_capacity(data.len());
    let mut out_labels = labels.as_ref().map(|_| Vec::with_capacity(count));
    let mut last: Option<u32> = None;
    for i in order {
        if let Some(l) = last {
            if key(l) == key(i) {
                continue;
            }
        }
        out.extend_from_slice(key(i));
        if let (Some(ol), Some(ls)) = (out_labels.as_mut(), labels.as_ref()) {
            ol.push(ls[i as usize]);
        }
        last = Some(i);
    }
    (out, out_labels)
}

impl SimplicialComplex {
    /// Assemble from per-dimension sorted, deduplicated tuple lists.
    ///
    /// `levels[k]` holds the k-simplices flattened with stride `k + 1`.
    pub fn from_levels(
        header: Header,
        vertices: Vec<Vec<u32>>,
        mut levels: Vec<Vec<u32>>,
        labels: Option<Vec<Vec<SimplexLabel>>>,
    ) -> Self {
        while levels.last().is_some_and(Vec::is_empty) {
            levels.pop();
        }
        let labels = labels.map(|mut ls| {
            ls.truncate(levels.len());
            ls
        });
        let c = SimplicialComplex {
            header,
            vertices,
            levels,
            labels,
        };
        debug_assert!(c.is_sorted());
        c
    }

    /// The downward closure of a list of simplices on vertices `0..vertex_count`.
    pub fn from_facets(vertex_count: usize, facets: &[Vec<u32>]) -> Self {
        let mut by_dim: Vec<Vec<u32>> = vec![(0..vertex_count as u32).collect()];
        for f in facets {
            let mut f = f.clone();
            f.sort_unstable();
            f.dedup();
            assert!(f.iter().all(|&v| (v as usize) < vertex_count), "facet vertex out of range");
            let k = f.len();
            for mask in 1u64..(1u64 << k) {
                let face: Vec<u32> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                let d = face.len() - 1;
                if d == 0 {
                    continue;
                }
                if by_dim.len() <= d {
                    by_dim.resize(d + 1, Vec::new());
                }
                by_dim[d].extend(face);
            }
        }
        let levels = by_dim
            .into_iter()
            .enumerate()
            .map(|(d, data)| sort_tuples(data, d + 1, None).0)
            .collect();
        let vertices = (0..vertex_count as u32).map(|v| vec![v]).collect();
        SimplicialComplex::from_levels(Header::custom(), vertices, levels, None)
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    pub fn kind(&self) -> ComplexKind {
        self.header.kind
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, v: usize) -> &[u32] {
        &self.vertices[v]
    }

    pub fn vertices(&self) -> &[Vec<u32>] {
        &self.vertices
    }

    /// Top dimension present, or `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        if self.vertices.is_empty() {
            None
        } else {
            Some(self.levels.len().saturating_sub(1))
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Number of d-simplices.
    pub fn count(&self, d: usize) -> usize {
        self.levels.get(d).map_or(0, |l| l.len() / (d + 1))
    }

    /// Simplex counts by dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..self.levels.len()).map(|d| self.count(d)).collect()
    }

    pub fn total_simplices(&self) -> usize {
        self.f_vector().iter().sum()
    }

    pub fn simplex(&self, d: usize, i: usize) -> &[u32] {
        &self.levels[d][i * (d + 1)..(i + 1) * (d + 1)]
    }

    pub fn simplices(&self, d: usize) -> impl ExactSizeIterator<Item = &[u32]> {
        let data: &[u32] = self.levels.get(d).map_or(&[], |v| v.as_slice());
        data.chunks_exact(d + 1)
    }

    pub fn level(&self, d: usize) -> &[u32] {
        self.levels.get(d).map_or(&[], |v| v.as_slice())
    }

    pub fn label(&self, d: usize, i: usize) -> Option<SimplexLabel> {
        self.labels.as_ref().and_then(|l| l.get(d)).map(|l| l[i])
    }

    pub fn has_labels(&self) -> bool {
        self.labels.is_some()
    }

    /// Position of a sorted tuple among the d-simplices.
    pub fn index_of(&self, simplex: &[u32]) -> Option<usize> {
        let d = simplex.len().checked_sub(1)?;
        if d == 0 {
            let v = simplex[0] as usize;
            return (v < self.vertices.len()).then_some(v);
        }
        let level = self.levels.get(d)?;
        let w = d + 1;
        let (mut lo, mut hi) = (0usize, level.len() / w);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match level[mid * w..(mid + 1) * w].cmp(simplex) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains(&self, simplex: &[u32]) -> bool {
        self.index_of(simplex).is_some()
    }

    /// `Σ (−1)^k f_k`.
    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    fn is_sorted(&self) -> bool {
        self.levels.iter().enumerate().all(|(d, l)| {
            let w = d + 1;
            l.chunks_exact(w).all(|s| s.windows(2).all(|p| p[0] < p[1]))
                && l.chunks_exact(w).zip(l.chunks_exact(w).skip(1)).all(|(a, b)| a < b)
        })
    }

    /// Every facet of every simplex is present (exhaustive).
    pub fn is_downward_closed(&self) -> bool {
        if !self.is_sorted() {
            return false;
        }
        if self.levels.first().is_some_and(|l| l.len() != self.vertices.len()) {
            return false;
        }
        let mut face = Vec::new();
        for d in 1..self.levels.len() {
            for s in self.simplices(d) {
                for skip in 0..=d {
                    face.clear();
                    face.extend(s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
                    if !self.contains(&face) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The subcomplex of simplices of dimension at most `d`.
    pub fn skeleton(&self, d: usize) -> SimplicialComplex {
        let mut header = self.header.clone();
        header.max_dim = Some(self.header.max_dim.map_or(d, |m| m.min(d)));
        let levels = self.levels.iter().take(d + 1).cloned().collect();
        let labels = self.labels.as_ref().map(|ls| ls.iter().take(d + 1).cloned().collect());
        SimplicialComplex::from_levels(header, self.vertices.clone(), levels, labels)
    }

    /// Keep the simplices accepted by `keep`; the caller guarantees the result is downward closed.
    pub fn filter(&self, kind: ComplexKind, mut keep: impl FnMut(usize, &[u32]) -> bool) -> SimplicialComplex {
        let mut header = self.header.clone();
        header.kind = kind;
        let mut levels = Vec::new();
        let mut labels = self.labels.as_ref().map(|_| Vec::new());
        for d in 0..self.levels.len() {
            let mut l = Vec::new();
            let mut lab = Vec::new();
            for (i, s) in self.simplices(d).enumerate() {
                if d == 0 || keep(d, s) {
                    l.extend_from_slice(s);
                    if let Some(x) = self.label(d, i) {
                        lab.push(x);
                    }
                }
            }
            levels.push(l);
            if let Some(ls) = labels.as_mut() {
                ls.push(lab);
            }
        }
        SimplicialComplex::from_levels(header, self.vertices.clone(), levels, labels)
    }

    /// Vertex-to-vertex adjacency lists (sorted).
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for e in self.simplices(1) {
            adj[e[0] as usize].push(e[1]);
            adj[e[1] as usize].push(e[0]);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        adj
    }

    /// Serialize in the line-oriented text format.
    ///
    /// ```text
    /// complex v1
    /// kind BDA
    /// ring eisenstein
    /// p 1+4*w
    /// q 13
    /// n 2
    /// m 0
    /// max_dim full
    /// counts 28 182 364
    /// vertices 28
    /// <payload tokens>
    /// ...
    /// dim 1 182
    /// <vertex ids> [s|i|e]
    /// ...
    /// end
    /// ```
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "complex v1")?;
        w.write_all(self.header.canonical().as_bytes())?;
        let counts: Vec<String> = self.f_vector().iter().map(|c| c.to_string()).collect();
        writeln!(w, "counts {}", counts.join(" "))?;
        writeln!(w, "labels {}", if self.labels.is_some() { "yes" } else { "no" })?;
        writeln!(w, "vertices {}", self.vertices.len())?;
        let mut line = String::new();
        for v in &self.vertices {
            line.clear();
            for (i, x) in v.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(&x.to_string());
            }
            writeln!(w, "{line}")?;
        }
        for d in 1..self.levels.len() {
            writeln!(w, "dim {} {}", d, self.count(d))?;
            for (i, s) in self.simplices(d).enumerate() {
                line.clear();
                for (j, x) in s.iter().enumerate() {
                    if j > 0 {
                        line.push(' ');
                    }
                    line.push_str(&x.to_string());
                }
                if let Some(l) = self.label(d, i) {
                    line.push(' ');
                    line.push(l.code());
                }
                writeln!(w, "{line}")?;
            }
        }
        writeln!(w, "end")
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("text format is ascii")
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<SimplicialComplex> {
        let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, Ok(l))) => Ok((i, l)),
                Some((i, Err(e))) => Err(Error::Format { line: i, reason: e.to_string() }),
                None => Err(Error::Format { line: 0, reason: format!("unexpected end of input, expected {what}") }),
            }
        };
        let bad = |line: usize, reason: &str| Error::Format { line, reason: reason.to_string() };
        let (ln, magic) = next("magic")?;
        if magic.trim() != "complex v1" {
            return Err(bad(ln, "missing `complex v1` header"));
        }
        let mut field = |name: &str| -> Result<(usize, String)> {
            let (ln, l) = next(name)?;
            let rest = l
                .strip_prefix(name)
                .and_then(|r| r.strip_prefix(' '))
                .ok_or_else(|| bad(ln, &format!("expected `{name}`")))?;
            Ok((ln, rest.trim().to_string()))
        };
        let num = |(ln, s): (usize, String)| -> Result<usize> { s.parse().map_err(|_| bad(ln, "expected an integer")) };
        let (_, kind) = field("kind")?;
        let kind: ComplexKind = kind.parse()?;
        let (_, ring) = field("ring")?;
        let ring = if ring == "-" { None } else { Some(ring.parse()?) };
        let (_, p) = field("p")?;
        let p = if p == "-" { None } else { Some(p) };
        let q = num(field("q")?)?;
        let n = num(field("n")?)?;
        let m = num(field("m")?)?;
        let (ln, md) = field("max_dim")?;
        let max_dim = if md == "full" { None } else { Some(num((ln, md))?) };
        let (ln, counts) = field("counts")?;
        let counts: Vec<usize> = counts
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(ln, "bad count")))
            .collect::<Result<_>>()?;
        let (_, has_labels) = field("labels")?;
        let has_labels = has_labels == "yes";
        let nv = num(field("vertices")?)?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = next("vertex payload")?;
            let payload: Vec<u32> = l
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad(ln, "bad vertex payload")))
                .collect::<Result<_>>()?;
            vertices.push(payload);
        }
        let mut levels: Vec<Vec<u32>> = vec![(0..nv as u32).collect()];
        let mut labels: Vec<Vec<SimplexLabel>> = vec![vec![SimplexLabel::Standard; if has_labels { nv } else { 0 }]];
        loop {
            let (ln, l) = next("`dim` or `end`")?;
            if l.trim() == "end" {
                break;
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 3 || toks[0] != "dim" {
                return Err(bad(ln, "expected `dim <d> <count>`"));
            }
            let d: usize = toks[1].parse().map_err(|_| bad(ln, "bad dimension"))?;
            let c: usize = toks[2].parse().map_err(|_| bad(ln, "bad count"))?;
            if d != levels.len() {
                return Err(bad(ln, "dimensions must be listed in order"));
            }
            let mut data = Vec::with_capacity(c * (d + 1));
            let mut lab = Vec::new();
            for _ in 0..c {
                let (ln, l) = next("simplex")?;
                let mut toks: Vec<&str> = l.split_whitespace().collect();
                if has_labels {
                    let code = toks.pop().ok_or_else(|| bad(ln, "missing label"))?;
                    lab.push(SimplexLabel::from_code(code).ok_or_else(|| bad(ln, "bad label"))?);
                }
                if toks.len() != d + 1 {
                    return Err(bad(ln, "wrong simplex width"));
                }
                for t in toks {
                    let v: u32 = t.parse().map_err(|_| bad(ln, "bad vertex id"))?;
                    if v as usize >= nv {
                        return Err(bad(ln, "vertex id out of range"));
                    }
                    data.push(v);
                }
            }
            levels.push(data);
            labels.push(lab);
        }
        let header = Header { kind, ring, p, q, n, m, max_dim };
        let c = SimplicialComplex::from_levels(header, vertices, levels, has_labels.then_some(labels));
        if c.f_vector() != counts && !(counts.is_empty() && c.is_empty()) {
            return Err(bad(0, "simplex counts disagree with the header"));
        }
        if !c.is_sorted() {
            return Err(bad(0, "simplices are not sorted"));
        }
        Ok(c)
    }

    pub fn from_text(s: &str) -> Result<SimplicialComplex> {
        SimplicialComplex::read_text(s.as_bytes())
    }
}
