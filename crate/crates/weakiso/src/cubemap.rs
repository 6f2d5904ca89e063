//! Dense-table bijections of the cube and their distance-preservation spectra.
//!
//! Every map of the crate, however it was constructed, materializes to a
//! [`CubeMap`]: a full lookup table over the 2^n words. Equality of maps is
//! equality of tables, which turns uniqueness claims into decidable checks.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bitword::{words_of_weight, CoordPermutation, Dimension, Word};
use crate::{Error, Result};

/// A bijection of the n-cube stored as a dense image table.
///
/// `table[v]` is the numeric value of the image of the word with numeric
/// value `v`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CubeMap {
    n: Dimension,
    table: Vec<u32>,
}

impl CubeMap {
    /// Validate an image table: correct size, in-range entries, bijective.
    pub fn from_table(n: Dimension, table: Vec<u32>) -> Result<Self> {
        if table.len() != n.word_count() {
            return Err(Error::TableSize {
                n: n.get(),
                len: table.len(),
            });
        }
        let mut seen = vec![false; table.len()];
        for &v in &table {
            if v & !n.mask() != 0 {
                return Err(Error::ValueOutOfRange { n: n.get(), value: v });
            }
            if seen[v as usize] {
                return Err(Error::NotABijection { value: v });
            }
            seen[v as usize] = true;
        }
        Ok(CubeMap { n, table })
    }

    /// Build from a function on raw word values.
    pub fn from_fn(n: Dimension, mut f: impl FnMut(u32) -> u32) -> Result<Self> {
        let table: Vec<u32> = (0..n.word_count() as u32).map(&mut f).collect();
        CubeMap::from_table(n, table)
    }

    /// Extend images of the n unit words to a linear map and validate it.
    ///
    /// `basis[b]` is the image value of the word `1 << b` (the unit word of
    /// coordinate n - b). The extension sends a sum of units to the sum of
    /// their images.
    pub fn from_linear_basis(n: Dimension, basis: &[u32]) -> Result<Self> {
        assert_eq!(basis.len(), n.get());
        let mut table = vec![0u32; n.word_count()];
        for v in 1..n.word_count() {
            table[v] = table[v & (v - 1)] ^ basis[v.trailing_zeros() as usize];
        }
        CubeMap::from_table(n, table)
    }

    pub fn identity(n: Dimension) -> Self {
        CubeMap {
            n,
            table: (0..n.word_count() as u32).collect(),
        }
    }

    /// The translation x -> x + a.
    pub fn translation(a: Word) -> Self {
        let n = a.dimension();
        CubeMap {
            n,
            table: (0..n.word_count() as u32).map(|v| v ^ a.value()).collect(),
        }
    }

    /// The map induced by a coordinate permutation.
    pub fn coord_permutation(pi: &CoordPermutation) -> Self {
        let n = pi.dimension();
        CubeMap {
            n,
            table: (0..n.word_count() as u32).map(|v| pi.apply_raw(v)).collect(),
        }
    }

    /// A uniformly random bijection (Fisher-Yates over the identity table).
    pub fn random<R: rand::Rng>(n: Dimension, rng: &mut R) -> Self {
        let mut table: Vec<u32> = (0..n.word_count() as u32).collect();
        for k in (1..table.len()).rev() {
            let j = rng.gen_range(0..=k);
            table.swap(k, j);
        }
        CubeMap { n, table }
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    /// Image of a raw word value.
    ///
    /// The value must fit in n bits; the table lookup panics otherwise.
    #[inline]
    pub fn apply_raw(&self, v: u32) -> u32 {
        self.table[v as usize]
    }

    pub fn apply(&self, w: Word) -> Result<Word> {
        if w.dimension() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n.get(),
                right: w.dimension().get(),
            });
        }
        Word::new(self.n, self.table[w.value() as usize])
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(v, &img)| v as u32 == img)
    }

    /// Composition: the map x -> self(inner(x)).
    pub fn compose(&self, inner: &CubeMap) -> Result<CubeMap> {
        if self.n != inner.n {
            return Err(Error::DimensionMismatch {
                left: self.n.get(),
                right: inner.n.get(),
            });
        }
        Ok(CubeMap {
            n: self.n,
            table: inner.table.iter().map(|&v| self.table[v as usize]).collect(),
        })
    }

    pub fn inverse(&self) -> CubeMap {
        let mut table = vec![0u32; self.table.len()];
        for (v, &img) in self.table.iter().enumerate() {
            table[img as usize] = v as u32;
        }
        CubeMap { n: self.n, table }
    }

    /// True iff every pair at distance p maps to a pair at distance p.
    ///
    /// Scans each unordered pair exactly once: for a difference word z, the
    /// pair {x, x + z} is visited at the member with a zero in z's leading
    /// coordinate.
    pub fn is_p_isometry(&self, p: u32) -> bool {
        let n = self.n.get() as u32;
        assert!(p >= 1 && p <= n, "distance {p} out of range 1..={n}");
        let size = self.table.len();
        let mask = size - 1;
        let tbl = &self.table[..];
        // dist_is_p[v] = 1 iff a pair differing by v is at distance p.
        let dist_is_p: Vec<u8> = (0..size as u32)
            .map(|v| u8::from(v.count_ones() == p))
            .collect();
        for z in words_of_weight(self.n, p) {
            let z = z.value() as usize;
            let block = 1usize << (usize::BITS - 1 - z.leading_zeros());
            let mut ok = 1u8;
            let mut base = 0usize;
            while base < size {
                for lo in 0..block {
                    let x = base + lo;
                    let img_x = tbl[x & mask] as usize;
                    let img_y = tbl[(x ^ z) & mask] as usize;
                    ok &= dist_is_p[(img_x ^ img_y) & mask];
                }
                if ok == 0 {
                    return false;
                }
                base += block << 1;
            }
        }
        true
    }

    /// True iff every distance in P is preserved. Vacuously true for empty P.
    pub fn is_set_isometry(&self, p_set: &PreservedSet) -> bool {
        p_set.distances().into_iter().all(|d| self.is_p_isometry(d as u32))
    }

    /// The full spectrum D(f) under the default guard (n <= 14, one worker).
    pub fn preserved_distances(&self) -> Result<PreservedSet> {
        self.preserved_distances_with(&SpectrumOptions::default())
    }

    /// The full spectrum D(f): every d in 1..=n such that all pairs at
    /// distance d map to pairs at distance d.
    ///
    /// The pair scan may be split across workers; the result is a union of
    /// per-worker verdicts and is identical for every worker count.
    pub fn preserved_distances_with(&self, options: &SpectrumOptions) -> Result<PreservedSet> {
        let n = self.n.get();
        if n > options.max_n {
            return Err(Error::ResourceGuard {
                what: "pairwise distance scan",
                n,
                limit: options.max_n,
            });
        }
        let size = self.table.len();
        let workers = options.threads.max(1).min(size);
        let broken = if workers == 1 {
            broken_distances(&self.table, 0, 1)
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = (0..workers)
                    .map(|tid| scope.spawn(move || broken_distances(&self.table, tid, workers)))
                    .collect();
                handles.into_iter().map(|h| h.join().unwrap()).fold(0, |a, b| a | b)
            })
        };
        let full = ((1u64 << (n + 1)) - 2) as u32; // bits 1..=n
        Ok(PreservedSet {
            n: self.n,
            mask: full & !broken,
        })
    }

    /// Text form: a header line `n=<k>`, then one `<input> <output>` line per
    /// word in increasing numeric input order.
    pub fn to_text(&self) -> String {
        let n = self.n;
        let mut out = format!("n={}\n", n.get());
        for (v, &img) in self.table.iter().enumerate() {
            let x = Word::new(n, v as u32).unwrap();
            let y = Word::new(n, img).unwrap();
            out.push_str(&format!("{x} {y}\n"));
        }
        out
    }

    /// Parse the text form. The input column must enumerate all words in
    /// increasing numeric order; the output column must be a bijection.
    pub fn from_text(s: &str) -> Result<CubeMap> {
        let mut lines = s.lines();
        let map = parse_one_text(&mut lines)?;
        for rest in lines {
            if !rest.trim().is_empty() {
                return Err(Error::Parse(format!("unexpected trailing line {rest:?}")));
            }
        }
        Ok(map)
    }

    /// Parse a concatenation of text-form maps (e.g. an emitted generator
    /// file). Blank lines between maps are permitted.
    pub fn read_many_text(s: &str) -> Result<Vec<CubeMap>> {
        let mut maps = Vec::new();
        let mut lines = s.lines().peekable();
        loop {
            while lines.peek().is_some_and(|l| l.trim().is_empty()) {
                lines.next();
            }
            if lines.peek().is_none() {
                return Ok(maps);
            }
            maps.push(parse_one_text(&mut lines)?);
        }
    }

    /// JSON form: `{"n":k,"table":[...output words as strings...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("map serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<CubeMap> {
        Ok(serde_json::from_str(s)?)
    }
}

impl fmt::Debug for CubeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CubeMap(n={}, [", self.n.get())?;
        for (v, &img) in self.table.iter().enumerate() {
            if v > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{img}")?;
        }
        f.write_str("])")
    }
}

/// Distances d whose pairs are not all preserved, as a bitmask over bit d.
///
/// Scans pairs (x, y) with x < y and x ≡ tid (mod workers): a partition of
/// all pairs, so OR-merging worker results is order-independent.
#[allow(clippy::needless_range_loop)] // triangular pair scan; ranges mirror the x < y condition
fn broken_distances(table: &[u32], tid: usize, workers: usize) -> u32 {
    let size = table.len();
    let mut broken = 0u32;
    let mut x = tid;
    while x < size {
        let fx = table[x];
        for y in x + 1..size {
            let d_in = (x as u32 ^ y as u32).count_ones();
            let d_out = (fx ^ table[y]).count_ones();
            if d_in != d_out {
                broken |= 1 << d_in;
            }
        }
        x += workers;
    }
    broken
}

fn parse_one_text<'a, I>(lines: &mut I) -> Result<CubeMap>
where
    I: Iterator<Item = &'a str>,
{
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing header line n=<k>".into()))?
        .trim();
    let k: usize = header
        .strip_prefix("n=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Parse(format!("expected header n=<k>, got {header:?}")))?;
    let n = Dimension::new(k)?;
    let mut table = Vec::with_capacity(n.word_count());
    for expect in 0..n.word_count() as u32 {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("map truncated after {expect} entries")))?;
        let mut fields = line.split_whitespace();
        let (input, output) = match (fields.next(), fields.next(), fields.next()) {
            (Some(i), Some(o), None) => (i, o),
            _ => {
                return Err(Error::Parse(format!(
                    "expected \"<input> <output>\", got {line:?}"
                )))
            }
        };
        let input: Word = input.parse()?;
        let output: Word = output.parse()?;
        if input.dimension() != n || output.dimension() != n {
            return Err(Error::Parse(format!(
                "word length mismatch on line {line:?}: expected {k} bits"
            )));
        }
        if input.value() != expect {
            return Err(Error::Parse(format!(
                "inputs must appear in increasing numeric order: expected value {expect}, got {input}"
            )));
        }
        table.push(output.value());
    }
    CubeMap::from_table(n, table)
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    n: usize,
    table: Vec<String>,
}

impl Serialize for CubeMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.n;
        MapJson {
            n: n.get(),
            table: self
                .table
                .iter()
                .map(|&v| Word::new(n, v).unwrap().to_string())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CubeMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<CubeMap, D::Error> {
        let raw = MapJson::deserialize(d)?;
        let n = Dimension::new(raw.n).map_err(D::Error::custom)?;
        let mut table = Vec::with_capacity(raw.table.len());
        for s in &raw.table {
            let w: Word = s.parse().map_err(D::Error::custom)?;
            if w.dimension() != n {
                return Err(D::Error::custom(format!(
                    "word {s:?} does not have {} bits",
                    n.get()
                )));
            }
            table.push(w.value());
        }
        CubeMap::from_table(n, table).map_err(D::Error::custom)
    }
}

/// A subset of the distances 1..=n, stored as a bitmask over bit d.
///
/// Distance 0 is preserved by any bijection and is not stored.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PreservedSet {
    n: Dimension,
    mask: u32,
}

impl PreservedSet {
    pub fn empty(n: Dimension) -> Self {
        PreservedSet { n, mask: 0 }
    }

    pub fn full(n: Dimension) -> Self {
        PreservedSet {
            n,
            mask: ((1u64 << (n.get() + 1)) - 2) as u32,
        }
    }

    pub fn from_distances(n: Dimension, distances: &[usize]) -> Result<Self> {
        let mut set = PreservedSet::empty(n);
        for &d in distances {
            set.insert(d)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, d: usize) -> Result<()> {
        if d == 0 || d > self.n.get() {
            return Err(Error::CoordOutOfRange {
                n: self.n.get(),
                coord: d,
            });
        }
        self.mask |= 1 << d;
        Ok(())
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    pub fn contains(&self, d: usize) -> bool {
        d <= self.n.get() && self.mask >> d & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_full(&self) -> bool {
        *self == PreservedSet::full(self.n)
    }

    /// True iff every even distance 2, 4, ..., <= n is present.
    pub fn contains_all_even(&self) -> bool {
        (2..=self.n.get()).step_by(2).all(|d| self.contains(d))
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_subset_of(&self, other: &PreservedSet) -> bool {
        self.n == other.n && self.mask & !other.mask == 0
    }

    /// Member distances in increasing order.
    pub fn distances(&self) -> Vec<usize> {
        (1..=self.n.get()).filter(|&d| self.contains(d)).collect()
    }
}

impl fmt::Display for PreservedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, d) in self.distances().into_iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for PreservedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PreservedSet(n={}, {self})", self.n.get())
    }
}

impl Serialize for PreservedSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.distances())
    }
}

/// Guard and worker configuration for spectrum scans.
#[derive(Debug, Clone)]
pub struct SpectrumOptions {
    /// Largest n the all-pairs scan accepts.
    pub max_n: usize,
    /// Worker count for the scan; the result never depends on it.
    pub threads: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { max_n: 14, threads: 1 }
    }
}
