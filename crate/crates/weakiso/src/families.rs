//! Constructors, parameter spaces, and enumerators for the classified
//! families of weak isometries.
//!
//! Each family is a parametrized recipe that always produces a bijection of
//! the cube preserving a specific distance set:
//!
//! * `Isometry`: `f(x) = pi(x) + a`, preserves every distance.
//! * `NIsometry`: an arbitrary permutation of complement pairs together with
//!   arbitrary flips inside pairs; preserves distance n.
//! * `EvenIsometry`: one translated coordinate permutation on even-weight
//!   words and an independent one on odd-weight words, with translation
//!   weights of equal parity; preserves all even distances.
//! * `SigmaIJ`: the linear map sending unit `e_k` to `e_{sigma(k)}` for
//!   `k != i` and `e_i` to the all-ones word; for odd n it preserves
//!   distance (n+1)/2.
//! * `Krasin`: the one-parameter `SigmaIJ` specialization with `i = j` and
//!   the identity on the remaining coordinates.
//! * `HalfCase1` (n = 2 mod 4): `f(c) = pi(c) + [pair(c) meets S] * ones + t`
//!   with S a set of complement-pair representatives; preserves n/2 and n.
//! * `HalfCase2` (n = 0 mod 4): independent translated permutations with
//!   pair flips on the two parity classes; preserves n/2 and n.
//! * `MidPlus` (odd n): the (n+1)/2-preserving maps; for n = 1 mod 4 these
//!   are translates of isometries and `SigmaIJ` maps, for n = 3 mod 4 the
//!   even and odd parts decouple.
//! * `Triple` (n = 3 mod 4): maps preserving (n-1)/2, (n+1)/2, and n; built
//!   from a single `SigmaIJ` map acting plainly on even words and composed
//!   with a fixed translation on odd words.
//!
//! `param_space_size` reports the number of *distinct* maps each family
//! contains (not the number of raw parameter tuples, which may overcount at
//! small n), and `enumerate_family` streams exactly that many maps.

use std::collections::BTreeSet;
use std::convert::TryFrom;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bitword::{CoordPermutation, Dimension, Parity, Word};
use crate::cubemap::{CubeMap, PreservedSet};
use crate::{Error, Result};

/// Default ceiling on the number of maps `enumerate_family` will stream.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 5_000_000;

/// Tags for the classified families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Isometry,
    NIsometry,
    EvenIsometry,
    SigmaIJ,
    Krasin,
    HalfCase1,
    HalfCase2,
    MidPlus,
    Triple,
}

impl Family {
    /// All tags, in declaration order.
    pub const ALL: [Family; 9] = [
        Family::Isometry,
        Family::NIsometry,
        Family::EvenIsometry,
        Family::SigmaIJ,
        Family::Krasin,
        Family::HalfCase1,
        Family::HalfCase2,
        Family::MidPlus,
        Family::Triple,
    ];

    /// Stable lowercase tag used in files and on the command line.
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Isometry => "isometry",
            Family::NIsometry => "n_isometry",
            Family::EvenIsometry => "even_isometry",
            Family::SigmaIJ => "sigma_ij",
            Family::Krasin => "krasin",
            Family::HalfCase1 => "half_case1",
            Family::HalfCase2 => "half_case2",
            Family::MidPlus => "mid_plus",
            Family::Triple => "triple",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family tag {s:?}")))
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Family, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// The distance set every member of a family is guaranteed to preserve.
pub fn required_distances(family: Family, n: Dimension) -> Result<PreservedSet> {
    let nn = n.get();
    match family {
        Family::Isometry => Ok(PreservedSet::full(n)),
        Family::NIsometry => PreservedSet::from_distances(n, &[nn]),
        Family::EvenIsometry => {
            let evens: Vec<usize> = (1..=nn).filter(|d| d % 2 == 0).collect();
            PreservedSet::from_distances(n, &evens)
        }
        Family::SigmaIJ | Family::Krasin | Family::MidPlus => {
            require_odd(nn)?;
            PreservedSet::from_distances(n, &[(nn + 1) / 2])
        }
        Family::HalfCase1 => {
            require_residue(nn, 2)?;
            PreservedSet::from_distances(n, &[nn / 2, nn])
        }
        Family::HalfCase2 => {
            require_residue(nn, 0)?;
            PreservedSet::from_distances(n, &[nn / 2, nn])
        }
        Family::Triple => {
            require_residue(nn, 3)?;
            PreservedSet::from_distances(n, &[(nn - 1) / 2, (nn + 1) / 2, nn])
        }
    }
}

fn require_odd(nn: usize) -> Result<()> {
    if nn % 2 == 1 {
        Ok(())
    } else {
        Err(Error::WrongResidue { expected: "odd n", n: nn })
    }
}

fn require_residue(nn: usize, r: usize) -> Result<()> {
    if nn % 4 == r {
        return Ok(());
    }
    let expected = match r {
        0 => "n = 0 (mod 4)",
        2 => "n = 2 (mod 4)",
        3 => "n = 3 (mod 4)",
        _ => "n = 1 (mod 4)",
    };
    Err(Error::WrongResidue { expected, n: nn })
}

// ---------------------------------------------------------------------------
// Half-cube transversal
// ---------------------------------------------------------------------------

/// Whether `v` lies in the canonical transversal X of the complement pairs
/// for even n: weight below n/2, or weight exactly n/2 with coordinate 1
/// equal to zero.
fn in_transversal_raw(nn: usize, v: u32) -> bool {
    let twice = 2 * v.count_ones() as usize;
    twice < nn || (twice == nn && (v >> (nn - 1)) & 1 == 0)
}

/// X-member of the complement pair of `v` (even n only).
fn transversal_rep_raw(nn: usize, mask: u32, v: u32) -> u32 {
    if in_transversal_raw(nn, v) {
        v
    } else {
        v ^ mask
    }
}

/// The transversal X for even n, one word per complement pair, increasing.
pub fn half_transversal(n: Dimension) -> Result<Vec<Word>> {
    let nn = n.get();
    if nn % 2 != 0 {
        return Err(Error::WrongResidue { expected: "even n", n: nn });
    }
    Ok((0..n.word_count() as u32)
        .filter(|&v| in_transversal_raw(nn, v))
        .map(|v| Word::new(n, v).expect("value below 2^n"))
        .collect())
}

/// The even-weight members of X, increasing.
pub fn half_transversal_even(n: Dimension) -> Result<Vec<Word>> {
    Ok(half_transversal(n)?
        .into_iter()
        .filter(|w| w.parity() == Parity::Even)
        .collect())
}

/// X-member of the complement pair of `w` (even n only).
pub fn half_representative(w: Word) -> Result<Word> {
    let n = w.dimension();
    if n.get() % 2 != 0 {
        return Err(Error::WrongResidue { expected: "even n", n: n.get() });
    }
    Ok(if in_transversal_raw(n.get(), w.value()) {
        w
    } else {
        w.complement()
    })
}

// ---------------------------------------------------------------------------
// Parameter types
// ---------------------------------------------------------------------------

/// Parameters of a full isometry `f(x) = pi(x) + a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsometryParams {
    pub a: Word,
    pub pi: CoordPermutation,
}

impl IsometryParams {
    pub fn validate(&self) -> Result<()> {
        dim_eq(self.a.dimension(), self.pi.dimension())
    }
}

/// Parameters of an n-distance preserver: a permutation of the complement
/// pair representatives `0..2^{n-1}` plus a flip bit per pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NIsometryParams {
    pub n: Dimension,
    pub pair_perm: Vec<u32>,
    pub flips: Vec<bool>,
}

impl NIsometryParams {
    pub fn validate(&self) -> Result<()> {
        let half = 1usize << (self.n.get() - 1);
        if self.pair_perm.len() != half || self.flips.len() != half {
            return Err(Error::InvalidParams(format!(
                "pair tables must have 2^{} = {} entries",
                self.n.get() - 1,
                half
            )));
        }
        let mut seen = vec![false; half];
        for &r in &self.pair_perm {
            if r as usize >= half || seen[r as usize] {
                return Err(Error::NotAPermutation(format!(
                    "pair_perm is not a permutation of 0..{half}"
                )));
            }
            seen[r as usize] = true;
        }
        Ok(())
    }
}

/// Parameters of an even-distance preserver: `pi(x) + a` on even-weight
/// words and `sigma(x) + b` on odd-weight words, with `wt(a) = wt(b) (mod 2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvenIsometryParams {
    pub a: Word,
    pub pi: CoordPermutation,
    pub b: Word,
    pub sigma: CoordPermutation,
}

impl EvenIsometryParams {
    pub fn validate(&self) -> Result<()> {
        dim_eq(self.a.dimension(), self.pi.dimension())?;
        dim_eq(self.a.dimension(), self.b.dimension())?;
        dim_eq(self.a.dimension(), self.sigma.dimension())?;
        if self.a.parity() != self.b.parity() {
            return Err(Error::ParityViolation);
        }
        Ok(())
    }
}

/// Parameters of the linear map sending `e_k` to `e_{sigma(k)}` for `k != i`
/// and `e_i` to the all-ones word.
///
/// `sigma` is a bijection from `{1..n} \ {i}` onto `{1..n} \ {j}`; it is
/// stored as the extended coordinate permutation with `i` mapped to `j`.
/// `i = j` is allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaIJParams {
    i: usize,
    j: usize,
    sigma_hat: CoordPermutation,
}

impl SigmaIJParams {
    /// Build from the restriction `sigma` given as (source, target) pairs
    /// covering `{1..n} \ {i}` and `{1..n} \ {j}` exactly.
    pub fn new(n: Dimension, i: usize, j: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let nn = n.get();
        check_coord(nn, i)?;
        check_coord(nn, j)?;
        let mut images = vec![0usize; nn];
        images[i - 1] = j;
        for &(src, tgt) in pairs {
            check_coord(nn, src)?;
            check_coord(nn, tgt)?;
            if src == i {
                return Err(Error::InvalidParams(format!(
                    "coordinate {i} is reserved for the all-ones image"
                )));
            }
            if tgt == j {
                return Err(Error::InvalidParams(format!(
                    "coordinate {j} is reserved as the image of {i}"
                )));
            }
            if images[src - 1] != 0 {
                return Err(Error::InvalidParams(format!("duplicate source {src}")));
            }
            images[src - 1] = tgt;
        }
        if images.contains(&0) {
            return Err(Error::InvalidParams(
                "the restriction must cover every coordinate other than i".into(),
            ));
        }
        let sigma_hat = CoordPermutation::from_images(n, &images)?;
        Ok(SigmaIJParams { i, j, sigma_hat })
    }

    /// Build from an already-extended permutation with `sigma_hat(i) = j`.
    pub fn from_extended(i: usize, j: usize, sigma_hat: CoordPermutation) -> Result<Self> {
        let nn = sigma_hat.dimension().get();
        check_coord(nn, i)?;
        check_coord(nn, j)?;
        if sigma_hat.image(i) != j {
            return Err(Error::InvalidParams(format!(
                "extended permutation must send {i} to {j}"
            )));
        }
        Ok(SigmaIJParams { i, j, sigma_hat })
    }

    /// The unique parameter set whose restriction is order preserving.
    pub fn order_preserving(n: Dimension, i: usize, j: usize) -> Result<Self> {
        let nn = n.get();
        check_coord(nn, i)?;
        check_coord(nn, j)?;
        let sources: Vec<usize> = (1..=nn).filter(|&k| k != i).collect();
        let targets: Vec<usize> = (1..=nn).filter(|&k| k != j).collect();
        let pairs: Vec<(usize, usize)> = sources.into_iter().zip(targets).collect();
        SigmaIJParams::new(n, i, j, &pairs)
    }

    /// Uniformly random parameters.
    pub fn random<R: Rng>(n: Dimension, rng: &mut R) -> Self {
        let nn = n.get();
        let i = rng.gen_range(1..=nn);
        let j = rng.gen_range(1..=nn);
        let sources: Vec<usize> = (1..=nn).filter(|&k| k != i).collect();
        let mut targets: Vec<usize> = (1..=nn).filter(|&k| k != j).collect();
        targets.shuffle(rng);
        let pairs: Vec<(usize, usize)> = sources.into_iter().zip(targets).collect();
        SigmaIJParams::new(n, i, j, &pairs).expect("ranges are disjoint and complete")
    }

    pub fn dimension(&self) -> Dimension {
        self.sigma_hat.dimension()
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    /// The extended coordinate permutation (with `i` mapped to `j`).
    pub fn extended(&self) -> &CoordPermutation {
        &self.sigma_hat
    }

    /// The restriction as (source, target) pairs, sources increasing.
    pub fn restriction_pairs(&self) -> Vec<(usize, usize)> {
        (1..=self.dimension().get())
            .filter(|&k| k != self.i)
            .map(|k| (k, self.sigma_hat.image(k)))
            .collect()
    }
}

/// Parameters for n = 2 (mod 4): `f(c) = pi(c) + [rep(c) in S] * ones + shift`
/// where `rep(c)` is the X-member of the complement pair of `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfCase1Params {
    pub pi: CoordPermutation,
    pub s: Vec<Word>,
    pub shift: Word,
}

impl HalfCase1Params {
    pub fn validate(&self) -> Result<()> {
        let n = self.pi.dimension();
        require_residue(n.get(), 2)?;
        dim_eq(n, self.shift.dimension())?;
        check_subset_of(&self.s, n, |v| in_transversal_raw(n.get(), v), "X")
    }
}

/// Parameters for n = 0 (mod 4): independent pair-flipped translated
/// permutations on the two parity classes, with odd-weight `a` and `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfCase2Params {
    pub pi1: CoordPermutation,
    pub pi2: CoordPermutation,
    pub s1: Vec<Word>,
    pub s2: Vec<Word>,
    pub a: Word,
    pub b: Word,
    pub shift: Word,
}

impl HalfCase2Params {
    pub fn validate(&self) -> Result<()> {
        let n = self.a.dimension();
        require_residue(n.get(), 0)?;
        dim_eq(n, self.pi1.dimension())?;
        dim_eq(n, self.pi2.dimension())?;
        dim_eq(n, self.b.dimension())?;
        dim_eq(n, self.shift.dimension())?;
        if self.a.parity() != Parity::Odd || self.b.parity() != Parity::Odd {
            return Err(Error::InvalidParams(
                "translation words a and b must have odd weight".into(),
            ));
        }
        let nn = n.get();
        let in_ex = |v: u32| in_transversal_raw(nn, v) && v.count_ones() % 2 == 0;
        check_subset_of(&self.s1, n, in_ex, "the even part of X")?;
        check_subset_of(&self.s2, n, in_ex, "the even part of X")
    }
}

/// One parity-class action inside `MidPlusParams`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartMap {
    /// Restriction of `x -> pi(x) + a`.
    Even { a: Word, pi: CoordPermutation },
    /// Restriction of `x -> tau(x) + shift` for a `SigmaIJ` map `tau`.
    Sigma { tau: SigmaIJParams, shift: Word },
}

impl PartMap {
    pub fn dimension(&self) -> Dimension {
        match self {
            PartMap::Even { a, .. } => a.dimension(),
            PartMap::Sigma { tau, .. } => tau.dimension(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            PartMap::Even { a, pi } => dim_eq(a.dimension(), pi.dimension()),
            PartMap::Sigma { tau, shift } => dim_eq(tau.dimension(), shift.dimension()),
        }
    }

    /// Whole-cube table of the part map (the part only reads one parity).
    fn full_table(&self) -> Vec<u32> {
        match self {
            PartMap::Even { a, pi } => {
                let n = a.dimension();
                let av = a.value();
                (0..n.word_count() as u32).map(|v| pi.apply_raw(v) ^ av).collect()
            }
            PartMap::Sigma { tau, shift } => {
                let sv = shift.value();
                let m = build_sigma_ij(tau);
                m.table().iter().map(|&t| t ^ sv).collect()
            }
        }
    }
}

/// Parameters of an (n+1)/2-preserver for odd n.
///
/// For n = 1 (mod 4) the parts are not independent: both must carry the same
/// `SigmaIJ` map with zero part shifts, so the whole map is a translate of a
/// single `SigmaIJ` map. For n = 3 (mod 4) the parts are independent; a
/// sigma shift on the odd part must have even weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MidPlusParams {
    pub even_part: PartMap,
    pub odd_part: PartMap,
    pub outer_shift: Word,
}

impl MidPlusParams {
    pub fn validate(&self) -> Result<()> {
        let n = self.outer_shift.dimension();
        let nn = n.get();
        require_odd(nn)?;
        self.even_part.validate()?;
        self.odd_part.validate()?;
        dim_eq(n, self.even_part.dimension())?;
        dim_eq(n, self.odd_part.dimension())?;
        if nn % 4 == 1 {
            match (&self.even_part, &self.odd_part) {
                (
                    PartMap::Sigma { tau: t1, shift: s1 },
                    PartMap::Sigma { tau: t2, shift: s2 },
                ) if t1 == t2 && s1.value() == 0 && s2.value() == 0 => Ok(()),
                _ => Err(Error::IllegalCombination(
                    "for n = 1 (mod 4) both parts must carry the same sigma map \
                     with zero part shifts"
                        .into(),
                )),
            }
        } else {
            if let PartMap::Sigma { shift, .. } = &self.odd_part {
                if shift.parity() == Parity::Odd {
                    return Err(Error::IllegalCombination(
                        "the sigma shift on the odd part must have even weight".into(),
                    ));
                }
            }
            Ok(())
        }
    }
}

/// Parameters of a {(n-1)/2, (n+1)/2, n}-preserver for n = 3 (mod 4):
/// `tau` on even words, `tau` followed by translation by the all-ones word
/// with coordinate j cleared on odd words, then a global shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleParams {
    pub tau: SigmaIJParams,
    pub outer_shift: Word,
}

impl TripleParams {
    pub fn validate(&self) -> Result<()> {
        let n = self.tau.dimension();
        require_residue(n.get(), 3)?;
        dim_eq(n, self.outer_shift.dimension())
    }
}

fn dim_eq(left: Dimension, right: Dimension) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: left.get(), right: right.get() })
    }
}

fn check_coord(nn: usize, k: usize) -> Result<()> {
    if k >= 1 && k <= nn {
        Ok(())
    } else {
        Err(Error::CoordOutOfRange { n: nn, coord: k })
    }
}

fn check_subset_of(
    words: &[Word],
    n: Dimension,
    allowed: impl Fn(u32) -> bool,
    set_name: &str,
) -> Result<()> {
    let mut seen = BTreeSet::new();
    for w in words {
        dim_eq(n, w.dimension())?;
        if !allowed(w.value()) {
            return Err(Error::InvalidParams(format!("{w} does not lie in {set_name}")));
        }
        if !seen.insert(w.value()) {
            return Err(Error::InvalidParams(format!("duplicate word {w}")));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// `f(x) = pi(x) + a`.
pub fn build_isometry(p: &IsometryParams) -> Result<CubeMap> {
    p.validate()?;
    let a = p.a.value();
    Ok(CubeMap::from_fn(p.a.dimension(), |v| p.pi.apply_raw(v) ^ a)
        .expect("a translated coordinate permutation is bijective"))
}

/// Permute complement pairs by `pair_perm` and flip inside pairs by `flips`.
pub fn build_n_isometry(p: &NIsometryParams) -> Result<CubeMap> {
    p.validate()?;
    let mask = p.n.mask();
    let half = 1u32 << (p.n.get() - 1);
    Ok(CubeMap::from_fn(p.n, |v| {
        let upper = v >= half;
        let r = if upper { v ^ mask } else { v } as usize;
        let mut img = p.pair_perm[r];
        if p.flips[r] {
            img ^= mask;
        }
        if upper {
            img ^= mask;
        }
        img
    })
    .expect("pair relabelling is bijective"))
}

/// `pi(x) + a` on even-weight words, `sigma(x) + b` on odd-weight words.
pub fn build_even_isometry(p: &EvenIsometryParams) -> Result<CubeMap> {
    p.validate()?;
    let (a, b) = (p.a.value(), p.b.value());
    Ok(CubeMap::from_fn(p.a.dimension(), |v| {
        if v.count_ones() % 2 == 0 {
            p.pi.apply_raw(v) ^ a
        } else {
            p.sigma.apply_raw(v) ^ b
        }
    })
    .expect("parity-coherent translations assemble to a bijection"))
}

/// The linear map with `e_k -> e_{sigma(k)}` for `k != i` and `e_i -> ones`.
pub fn build_sigma_ij(p: &SigmaIJParams) -> CubeMap {
    let n = p.dimension();
    let nn = n.get();
    let mask = n.mask();
    let mut basis = vec![0u32; nn];
    for k in 1..=nn {
        basis[nn - k] = if k == p.i { mask } else { 1 << (nn - p.sigma_hat.image(k)) };
    }
    CubeMap::from_linear_basis(n, &basis)
        .expect("units off i plus the all-ones word form an invertible basis")
}

/// The `SigmaIJ` map with `i = j` and the identity elsewhere (odd n).
pub fn build_krasin_example(n: Dimension, i: usize) -> Result<CubeMap> {
    require_odd(n.get())?;
    let tau = SigmaIJParams::order_preserving(n, i, i)?;
    Ok(build_sigma_ij(&tau))
}

/// `f(c) = pi(c) + [rep(c) in S] * ones + shift` for n = 2 (mod 4).
pub fn build_half_case1(p: &HalfCase1Params) -> Result<CubeMap> {
    p.validate()?;
    let n = p.pi.dimension();
    let nn = n.get();
    let mask = n.mask();
    let mut in_s = vec![false; n.word_count()];
    for w in &p.s {
        in_s[w.value() as usize] = true;
    }
    let shift = p.shift.value();
    Ok(CubeMap::from_fn(n, |v| {
        let mut img = p.pi.apply_raw(v);
        if in_s[transversal_rep_raw(nn, mask, v) as usize] {
            img ^= mask;
        }
        img ^ shift
    })
    .expect("complement flips of whole pairs preserve bijectivity"))
}

/// Independent parity-class actions for n = 0 (mod 4): even words map by
/// `pi1` with S1-flips, odd words by `b + pi2(c + a)` with S2-flips, then a
/// global shift.
pub fn build_half_case2(p: &HalfCase2Params) -> Result<CubeMap> {
    p.validate()?;
    let n = p.a.dimension();
    let nn = n.get();
    let mask = n.mask();
    let mut in_s1 = vec![false; n.word_count()];
    for w in &p.s1 {
        in_s1[w.value() as usize] = true;
    }
    let mut in_s2 = vec![false; n.word_count()];
    for w in &p.s2 {
        in_s2[w.value() as usize] = true;
    }
    let (a, b, shift) = (p.a.value(), p.b.value(), p.shift.value());
    Ok(CubeMap::from_fn(n, |v| {
        let img = if v.count_ones() % 2 == 0 {
            let mut t = p.pi1.apply_raw(v);
            if in_s1[transversal_rep_raw(nn, mask, v) as usize] {
                t ^= mask;
            }
            t
        } else {
            let u = v ^ a;
            let mut t = p.pi2.apply_raw(u) ^ b;
            if in_s2[transversal_rep_raw(nn, mask, u) as usize] {
                t ^= mask;
            }
            t
        };
        img ^ shift
    })
    .expect("the two parity parts are separately bijective"))
}

/// Assemble an (n+1)/2-preserver from its parity parts (odd n).
pub fn build_mid_plus(p: &MidPlusParams) -> Result<CubeMap> {
    p.validate()?;
    let n = p.outer_shift.dimension();
    let outer = p.outer_shift.value();
    if n.get() % 4 == 1 {
        // validate() has pinned both parts to one shared sigma map
        let tau = match &p.even_part {
            PartMap::Sigma { tau, .. } => build_sigma_ij(tau),
            PartMap::Even { .. } => unreachable!("rejected by validate"),
        };
        return Ok(CubeMap::from_fn(n, |v| tau.apply_raw(v) ^ outer)
            .expect("a translated sigma map is bijective"));
    }
    let even_table = p.even_part.full_table();
    let odd_table = p.odd_part.full_table();
    CubeMap::from_fn(n, |v| {
        let img = if v.count_ones() % 2 == 0 {
            even_table[v as usize]
        } else {
            odd_table[v as usize]
        };
        img ^ outer
    })
}

/// `tau` on even words, `tau` plus the fixed even translation on odd words,
/// then a global shift (n = 3 mod 4).
pub fn build_triple(p: &TripleParams) -> Result<CubeMap> {
    p.validate()?;
    let n = p.tau.dimension();
    let tau = build_sigma_ij(&p.tau);
    let odd_shift = Word::ones_except(n, p.tau.j())
        .expect("j was validated as a coordinate")
        .value();
    let outer = p.outer_shift.value();
    Ok(CubeMap::from_fn(n, |v| {
        let mut img = tau.apply_raw(v);
        if v.count_ones() % 2 == 1 {
            img ^= odd_shift;
        }
        img ^ outer
    })
    .expect("an even translation of one parity class keeps the map bijective"))
}

// ---------------------------------------------------------------------------
// Tagged parameter sets and their wire format
// ---------------------------------------------------------------------------

/// A family tag together with matching parameters; serializes to the
/// `{"family": tag, "n": k, ...}` JSON shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyParams {
    Isometry(IsometryParams),
    NIsometry(NIsometryParams),
    EvenIsometry(EvenIsometryParams),
    SigmaIJ(SigmaIJParams),
    Krasin { n: Dimension, i: usize },
    HalfCase1(HalfCase1Params),
    HalfCase2(HalfCase2Params),
    MidPlus(MidPlusParams),
    Triple(TripleParams),
}

impl FamilyParams {
    pub fn family(&self) -> Family {
        match self {
            FamilyParams::Isometry(_) => Family::Isometry,
            FamilyParams::NIsometry(_) => Family::NIsometry,
            FamilyParams::EvenIsometry(_) => Family::EvenIsometry,
            FamilyParams::SigmaIJ(_) => Family::SigmaIJ,
            FamilyParams::Krasin { .. } => Family::Krasin,
            FamilyParams::HalfCase1(_) => Family::HalfCase1,
            FamilyParams::HalfCase2(_) => Family::HalfCase2,
            FamilyParams::MidPlus(_) => Family::MidPlus,
            FamilyParams::Triple(_) => Family::Triple,
        }
    }

    pub fn dimension(&self) -> Dimension {
        match self {
            FamilyParams::Isometry(p) => p.a.dimension(),
            FamilyParams::NIsometry(p) => p.n,
            FamilyParams::EvenIsometry(p) => p.a.dimension(),
            FamilyParams::SigmaIJ(p) => p.dimension(),
            FamilyParams::Krasin { n, .. } => *n,
            FamilyParams::HalfCase1(p) => p.pi.dimension(),
            FamilyParams::HalfCase2(p) => p.a.dimension(),
            FamilyParams::MidPlus(p) => p.outer_shift.dimension(),
            FamilyParams::Triple(p) => p.outer_shift.dimension(),
        }
    }

    /// Build the map these parameters describe.
    pub fn build(&self) -> Result<CubeMap> {
        match self {
            FamilyParams::Isometry(p) => build_isometry(p),
            FamilyParams::NIsometry(p) => build_n_isometry(p),
            FamilyParams::EvenIsometry(p) => build_even_isometry(p),
            FamilyParams::SigmaIJ(p) => Ok(build_sigma_ij(p)),
            FamilyParams::Krasin { n, i } => build_krasin_example(*n, *i),
            FamilyParams::HalfCase1(p) => build_half_case1(p),
            FamilyParams::HalfCase2(p) => build_half_case2(p),
            FamilyParams::MidPlus(p) => build_mid_plus(p),
            FamilyParams::Triple(p) => build_triple(p),
        }
    }

    /// Structural validation without building the table.
    pub fn validate(&self) -> Result<()> {
        match self {
            FamilyParams::Isometry(p) => p.validate(),
            FamilyParams::NIsometry(p) => p.validate(),
            FamilyParams::EvenIsometry(p) => p.validate(),
            FamilyParams::SigmaIJ(_) => Ok(()),
            FamilyParams::Krasin { n, i } => {
                require_odd(n.get())?;
                check_coord(n.get(), *i)
            }
            FamilyParams::HalfCase1(p) => p.validate(),
            FamilyParams::HalfCase2(p) => p.validate(),
            FamilyParams::MidPlus(p) => p.validate(),
            FamilyParams::Triple(p) => p.validate(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("parameter serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<FamilyParams> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
enum Wire {
    Isometry {
        n: usize,
        a: Word,
        pi: CoordPermutation,
    },
    NIsometry {
        n: usize,
        pair_perm: Vec<u32>,
        flips: Vec<bool>,
    },
    EvenIsometry {
        n: usize,
        a: Word,
        pi: CoordPermutation,
        b: Word,
        sigma: CoordPermutation,
    },
    SigmaIj {
        n: usize,
        i: usize,
        j: usize,
        sigma: CoordPermutation,
    },
    Krasin {
        n: usize,
        i: usize,
    },
    HalfCase1 {
        n: usize,
        pi: CoordPermutation,
        s: Vec<Word>,
        shift: Word,
    },
    HalfCase2 {
        n: usize,
        pi1: CoordPermutation,
        pi2: CoordPermutation,
        s1: Vec<Word>,
        s2: Vec<Word>,
        a: Word,
        b: Word,
        shift: Word,
    },
    MidPlus {
        n: usize,
        even_part: WirePart,
        odd_part: WirePart,
        outer_shift: Word,
    },
    Triple {
        n: usize,
        i: usize,
        j: usize,
        sigma: CoordPermutation,
        outer_shift: Word,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum WirePart {
    Even {
        a: Word,
        pi: CoordPermutation,
    },
    Sigma {
        i: usize,
        j: usize,
        sigma: CoordPermutation,
        shift: Word,
    },
}

impl From<&PartMap> for WirePart {
    fn from(p: &PartMap) -> WirePart {
        match p {
            PartMap::Even { a, pi } => WirePart::Even { a: *a, pi: pi.clone() },
            PartMap::Sigma { tau, shift } => WirePart::Sigma {
                i: tau.i(),
                j: tau.j(),
                sigma: tau.extended().clone(),
                shift: *shift,
            },
        }
    }
}

impl From<&FamilyParams> for Wire {
    fn from(p: &FamilyParams) -> Wire {
        let n = p.dimension().get();
        match p {
            FamilyParams::Isometry(p) => Wire::Isometry { n, a: p.a, pi: p.pi.clone() },
            FamilyParams::NIsometry(p) => Wire::NIsometry {
                n,
                pair_perm: p.pair_perm.clone(),
                flips: p.flips.clone(),
            },
            FamilyParams::EvenIsometry(p) => Wire::EvenIsometry {
                n,
                a: p.a,
                pi: p.pi.clone(),
                b: p.b,
                sigma: p.sigma.clone(),
            },
            FamilyParams::SigmaIJ(p) => Wire::SigmaIj {
                n,
                i: p.i(),
                j: p.j(),
                sigma: p.extended().clone(),
            },
            FamilyParams::Krasin { i, .. } => Wire::Krasin { n, i: *i },
            FamilyParams::HalfCase1(p) => Wire::HalfCase1 {
                n,
                pi: p.pi.clone(),
                s: p.s.clone(),
                shift: p.shift,
            },
            FamilyParams::HalfCase2(p) => Wire::HalfCase2 {
                n,
                pi1: p.pi1.clone(),
                pi2: p.pi2.clone(),
                s1: p.s1.clone(),
                s2: p.s2.clone(),
                a: p.a,
                b: p.b,
                shift: p.shift,
            },
            FamilyParams::MidPlus(p) => Wire::MidPlus {
                n,
                even_part: WirePart::from(&p.even_part),
                odd_part: WirePart::from(&p.odd_part),
                outer_shift: p.outer_shift,
            },
            FamilyParams::Triple(p) => Wire::Triple {
                n,
                i: p.tau.i(),
                j: p.tau.j(),
                sigma: p.tau.extended().clone(),
                outer_shift: p.outer_shift,
            },
        }
    }
}

fn part_from_wire(n: Dimension, w: WirePart) -> Result<PartMap> {
    match w {
        WirePart::Even { a, pi } => {
            dim_eq(n, a.dimension())?;
            dim_eq(n, pi.dimension())?;
            Ok(PartMap::Even { a, pi })
        }
        WirePart::Sigma { i, j, sigma, shift } => {
            dim_eq(n, sigma.dimension())?;
            dim_eq(n, shift.dimension())?;
            Ok(PartMap::Sigma { tau: SigmaIJParams::from_extended(i, j, sigma)?, shift })
        }
    }
}

impl TryFrom<Wire> for FamilyParams {
    type Error = Error;

    fn try_from(w: Wire) -> Result<FamilyParams> {
        let params = match w {
            Wire::Isometry { n, a, pi } => {
                let n = Dimension::new(n)?;
                dim_eq(n, a.dimension())?;
                dim_eq(n, pi.dimension())?;
                FamilyParams::Isometry(IsometryParams { a, pi })
            }
            Wire::NIsometry { n, pair_perm, flips } => {
                let n = Dimension::new(n)?;
                FamilyParams::NIsometry(NIsometryParams { n, pair_perm, flips })
            }
            Wire::EvenIsometry { n, a, pi, b, sigma } => {
                let n = Dimension::new(n)?;
                dim_eq(n, a.dimension())?;
                dim_eq(n, pi.dimension())?;
                dim_eq(n, b.dimension())?;
                dim_eq(n, sigma.dimension())?;
                FamilyParams::EvenIsometry(EvenIsometryParams { a, pi, b, sigma })
            }
            Wire::SigmaIj { n, i, j, sigma } => {
                let n = Dimension::new(n)?;
                dim_eq(n, sigma.dimension())?;
                FamilyParams::SigmaIJ(SigmaIJParams::from_extended(i, j, sigma)?)
            }
            Wire::Krasin { n, i } => {
                let n = Dimension::new(n)?;
                check_coord(n.get(), i)?;
                FamilyParams::Krasin { n, i }
            }
            Wire::HalfCase1 { n, pi, s, shift } => {
                let n = Dimension::new(n)?;
                dim_eq(n, pi.dimension())?;
                dim_eq(n, shift.dimension())?;
                FamilyParams::HalfCase1(HalfCase1Params { pi, s, shift })
            }
            Wire::HalfCase2 { n, pi1, pi2, s1, s2, a, b, shift } => {
                let n = Dimension::new(n)?;
                dim_eq(n, a.dimension())?;
                FamilyParams::HalfCase2(HalfCase2Params { pi1, pi2, s1, s2, a, b, shift })
            }
            Wire::MidPlus { n, even_part, odd_part, outer_shift } => {
                let n = Dimension::new(n)?;
                dim_eq(n, outer_shift.dimension())?;
                FamilyParams::MidPlus(MidPlusParams {
                    even_part: part_from_wire(n, even_part)?,
                    odd_part: part_from_wire(n, odd_part)?,
                    outer_shift,
                })
            }
            Wire::Triple { n, i, j, sigma, outer_shift } => {
                let n = Dimension::new(n)?;
                dim_eq(n, sigma.dimension())?;
                dim_eq(n, outer_shift.dimension())?;
                FamilyParams::Triple(TripleParams {
                    tau: SigmaIJParams::from_extended(i, j, sigma)?,
                    outer_shift,
                })
            }
        };
        params.validate()?;
        Ok(params)
    }
}

impl Serialize for FamilyParams {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Wire::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FamilyParams {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<FamilyParams, D::Error> {
        let w = Wire::deserialize(d)?;
        FamilyParams::try_from(w).map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Parameter space sizes
// ---------------------------------------------------------------------------

fn factorial(k: usize) -> BigUint {
    let mut out = BigUint::one();
    for f in 2..=k {
        out *= BigUint::from(f);
    }
    out
}

fn pow2(e: usize) -> BigUint {
    BigUint::one() << e
}

/// Number of distinct maps in the family at dimension n.
///
/// Counts maps, not parameter tuples: at the smallest admissible dimensions
/// several parameter tuples can describe the same map, and the counts below
/// are the deduplicated ones.
pub fn param_space_size(family: Family, n: Dimension) -> Result<BigUint> {
    let nn = n.get();
    let size = match family {
        Family::Isometry => pow2(nn) * factorial(nn),
        Family::NIsometry => {
            let half = 1usize << (nn - 1);
            factorial(half) * pow2(half)
        }
        Family::EvenIsometry => match nn {
            1 => BigUint::from(2u32),
            2 => BigUint::from(8u32),
            4 => BigUint::from(294_912u32),
            _ => pow2(2 * nn - 1) * factorial(nn) * factorial(nn),
        },
        Family::SigmaIJ => BigUint::from(nn) * factorial(nn),
        Family::Krasin => {
            require_odd(nn)?;
            BigUint::from(nn)
        }
        Family::HalfCase1 => {
            require_residue(nn, 2)?;
            if nn == 2 {
                BigUint::from(8u32)
            } else {
                factorial(nn) * pow2((1usize << (nn - 1)) + nn - 1)
            }
        }
        Family::HalfCase2 => {
            require_residue(nn, 0)?;
            if nn == 4 {
                BigUint::from(294_912u32)
            } else {
                factorial(nn) * factorial(nn) * pow2((1usize << (nn - 1)) + 2 * nn - 3)
            }
        }
        Family::MidPlus => {
            require_odd(nn)?;
            match nn {
                1 => BigUint::from(2u32),
                3 => BigUint::from(1152u32),
                _ if nn % 4 == 1 => pow2(nn) * factorial(nn) * BigUint::from(nn + 1),
                _ => {
                    pow2(2 * nn - 1)
                        * factorial(nn)
                        * factorial(nn)
                        * BigUint::from((nn + 1) * (nn + 1))
                }
            }
        }
        Family::Triple => {
            require_residue(nn, 3)?;
            if nn == 3 {
                BigUint::from(48u32)
            } else {
                pow2(nn) * factorial(nn) * BigUint::from(nn + 1)
            }
        }
    };
    Ok(size)
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// Lexicographic permutations of a sorted item vector.
pub(crate) struct LexPerms<T> {
    next: Option<Vec<T>>,
}

impl<T: Ord + Clone> LexPerms<T> {
    pub(crate) fn new(mut items: Vec<T>) -> Self {
        items.sort();
        LexPerms { next: Some(items) }
    }
}

impl<T: Ord + Clone> Iterator for LexPerms<T> {
    type Item = Vec<T>;

    fn next(&mut self) -> Option<Vec<T>> {
        let current = self.next.clone()?;
        let v = self.next.as_mut().expect("present: just cloned");
        let mut i = v.len();
        while i >= 2 && v[i - 2] >= v[i - 1] {
            i -= 1;
        }
        if i >= 2 {
            let pivot = i - 2;
            let mut j = v.len() - 1;
            while v[j] <= v[pivot] {
                j -= 1;
            }
            v.swap(pivot, j);
            v[pivot + 1..].reverse();
        } else {
            self.next = None;
        }
        Some(current)
    }
}

fn dedup_maps(n: Dimension, maps: impl Iterator<Item = CubeMap>) -> Vec<CubeMap> {
    let tables: BTreeSet<Vec<u32>> = maps.map(|m| m.table().to_vec()).collect();
    tables
        .into_iter()
        .map(|t| CubeMap::from_table(n, t).expect("tables come from valid maps"))
        .collect()
}

fn isometry_iter(n: Dimension) -> impl Iterator<Item = CubeMap> {
    let wc = n.word_count() as u32;
    (0..wc).flat_map(move |a| {
        CoordPermutation::all(n).map(move |pi| {
            CubeMap::from_fn(n, |v| pi.apply_raw(v) ^ a).expect("isometries are bijective")
        })
    })
}

fn n_isometry_iter(n: Dimension) -> impl Iterator<Item = CubeMap> {
    let half = 1usize << (n.get() - 1);
    let flip_count = 1u64
        .checked_shl(half as u32)
        .expect("half >= 64 is excluded by the enumeration limit");
    LexPerms::new((0..half as u32).collect::<Vec<_>>()).flat_map(move |perm| {
        (0..flip_count).map(move |flip_bits| {
            let p = NIsometryParams {
                n,
                pair_perm: perm.clone(),
                flips: (0..half).map(|r| flip_bits >> r & 1 == 1).collect(),
            };
            build_n_isometry(&p).expect("constructed parameters are valid")
        })
    })
}

fn even_tuple_iter(n: Dimension) -> impl Iterator<Item = CubeMap> {
    let wc = n.word_count() as u32;
    (0..wc).flat_map(move |a| {
        let a_par = a.count_ones() & 1;
        CoordPermutation::all(n).flat_map(move |pi| {
            (0..wc).filter(move |b| b.count_ones() & 1 == a_par).flat_map(move |b| {
                let pi = pi.clone();
                CoordPermutation::all(n).map(move |sigma| {
                    CubeMap::from_fn(n, |v| {
                        if v.count_ones() & 1 == 0 {
                            pi.apply_raw(v) ^ a
                        } else {
                            sigma.apply_raw(v) ^ b
                        }
                    })
                    .expect("parity-coherent parts assemble to a bijection")
                })
            })
        })
    })
}

/// All even-distance preservers of the 4-cube, by parity-class structure.
///
/// At n = 4 the distance-2 graph on each parity class is the complete
/// multipartite graph on the four complement pairs, whose symmetries are pair
/// permutations combined with arbitrary within-pair flips (384 per class);
/// a parity swap composes with translation by a fixed odd word. The tuple
/// parametrization reaches only a quarter of these maps, so enumeration goes
/// through the class structure instead.
fn even4_class_iter() -> impl Iterator<Item = CubeMap> {
    // numerically least member of each complement pair, per parity class
    const E_REPS: [u32; 4] = [0b0000, 0b0011, 0b0101, 0b0110];
    const O_REPS: [u32; 4] = [0b0001, 0b0010, 0b0100, 0b0111];
    fn pair_slot(reps: &[u32; 4], v: u32) -> (usize, bool) {
        let r = v.min(v ^ 0xF);
        let p = reps.iter().position(|&x| x == r).expect("every word lies in one pair");
        (p, v != r)
    }
    let n = Dimension::new(4).expect("4 is a valid dimension");
    let perms: Vec<Vec<usize>> = LexPerms::new(vec![0usize, 1, 2, 3]).collect();
    [false, true].into_iter().flat_map(move |swap| {
        let perms = perms.clone();
        perms.clone().into_iter().flat_map(move |pe| {
            let perms = perms.clone();
            (0..16u32).flat_map(move |fe| {
                let pe = pe.clone();
                let perms = perms.clone();
                perms.into_iter().flat_map(move |po| {
                    let pe = pe.clone();
                    (0..16u32).map(move |fo| {
                        let pe = pe.clone();
                        let po = po.clone();
                        CubeMap::from_fn(n, |v| {
                            let (reps, perm, flips) = if v.count_ones() & 1 == 0 {
                                (&E_REPS, &pe, fe)
                            } else {
                                (&O_REPS, &po, fo)
                            };
                            let (p, upper) = pair_slot(reps, v);
                            let mut img = reps[perm[p]];
                            if flips >> p & 1 == 1 {
                                img ^= 0xF;
                            }
                            if upper {
                                img ^= 0xF;
                            }
                            if swap {
                                img ^= 0b0001;
                            }
                            img
                        })
                        .expect("pair relabellings of each parity class are bijective")
                    })
                })
            })
        })
    })
}

fn sigma_param_iter(n: Dimension) -> impl Iterator<Item = SigmaIJParams> {
    let nn = n.get();
    (1..=nn).flat_map(move |i| {
        (1..=nn).flat_map(move |j| {
            let sources: Vec<usize> = (1..=nn).filter(|&k| k != i).collect();
            let targets: Vec<usize> = (1..=nn).filter(|&k| k != j).collect();
            LexPerms::new(targets).map(move |tp| {
                let pairs: Vec<(usize, usize)> = sources.iter().copied().zip(tp).collect();
                SigmaIJParams::new(n, i, j, &pairs).expect("ranges are disjoint and complete")
            })
        })
    })
}

fn translated_sigma_iter(n: Dimension) -> impl Iterator<Item = CubeMap> {
    let wc = n.word_count() as u32;
    sigma_param_iter(n).flat_map(move |tau| {
        let m = build_sigma_ij(&tau);
        (0..wc).map(move |c| {
            CubeMap::from_fn(n, |v| m.apply_raw(v) ^ c).expect("translate of a bijection")
        })
    })
}

/// All half-case-1 parameter tuples, including redundant ones (n = 2 only).
fn half1_tuple_iter(n: Dimension) -> impl Iterator<Item = CubeMap> {
    half1_iter_over(n, half_transversal(n).expect("even n checked by caller"))
}

/// Canonical half-case-1 members: S avoids the pair of the zero word, so
/// every map appears exactly once (n >= 6).
fn half1_canonical_iter(n: Dimension) -> impl Iterator<Item = CubeMap> {
    let base = half_transversal(n)
        .expect("even n checked by caller")
        .into_iter()
        .filter(|w| w.value() != 0)
        .collect();
    half1_iter_over(n, base)
}

fn half1_iter_over(n: Dimension, base: Vec<Word>) -> impl Iterator<Item = CubeMap> {
    let wc = n.word_count() as u32;
    let subset_count = 1u64
        .checked_shl(base.len() as u32)
        .expect("subset spaces beyond 2^63 are excluded by the enumeration limit");
    CoordPermutation::all(n).flat_map(move |pi| {
        let base = base.clone();
        (0..subset_count).flat_map(move |smask| {
            let s: Vec<Word> = base
                .iter()
                .enumerate()
                .filter(|&(t, _)| smask >> t & 1 == 1)
                .map(|(_, &w)| w)
                .collect();
            let pi = pi.clone();
            (0..wc).map(move |t| {
                build_half_case1(&HalfCase1Params {
                    pi: pi.clone(),
                    s: s.clone(),
                    shift: Word::new(n, t).expect("value below 2^n"),
                })
                .expect("constructed parameters are valid")
            })
        })
    })
}

fn triple_tuple_iter(n: Dimension) -> impl Iterator<Item = CubeMap> {
    let wc = n.word_count() as u32;
    sigma_param_iter(n).flat_map(move |tau| {
        (0..wc).map(move |t| {
            build_triple(&TripleParams {
                tau: tau.clone(),
                outer_shift: Word::new(n, t).expect("value below 2^n"),
            })
            .expect("constructed parameters are valid")
        })
    })
}

/// Canonical members for n = 3 (mod 4), n >= 7: an even-side action fixing
/// the zero word (a coordinate permutation or sigma map), an independent
/// odd-side action (either kind, translated by any even word), and an
/// arbitrary outer shift.
fn mid_plus_mod3_iter(n: Dimension) -> impl Iterator<Item = CubeMap> {
    let wc = n.word_count() as u32;
    let even_parts = move || {
        CoordPermutation::all(n)
            .map(move |pi| PartMap::Even { a: Word::zero(n), pi })
            .chain(
                sigma_param_iter(n).map(move |tau| PartMap::Sigma { tau, shift: Word::zero(n) }),
            )
    };
    let even_words = move || (0..wc).filter(|v| v.count_ones() & 1 == 0);
    let odd_parts = move || {
        even_words()
            .flat_map(move |b| {
                CoordPermutation::all(n).map(move |pi| PartMap::Even {
                    a: Word::new(n, b).expect("value below 2^n"),
                    pi,
                })
            })
            .chain(even_words().flat_map(move |s| {
                sigma_param_iter(n).map(move |tau| PartMap::Sigma {
                    tau,
                    shift: Word::new(n, s).expect("value below 2^n"),
                })
            }))
    };
    even_parts().flat_map(move |ep| {
        odd_parts().flat_map(move |op| {
            let ep = ep.clone();
            (0..wc).map(move |t| {
                build_mid_plus(&MidPlusParams {
                    even_part: ep.clone(),
                    odd_part: op.clone(),
                    outer_shift: Word::new(n, t).expect("value below 2^n"),
                })
                .expect("canonical parts assemble to a bijection")
            })
        })
    })
}

/// Stream every distinct member of the family at dimension n, refusing when
/// the family holds more than `DEFAULT_ENUMERATION_LIMIT` maps.
pub fn enumerate_family(
    family: Family,
    n: Dimension,
) -> Result<Box<dyn Iterator<Item = CubeMap>>> {
    enumerate_family_with_limit(family, n, DEFAULT_ENUMERATION_LIMIT)
}

/// `enumerate_family` with an explicit ceiling.
pub fn enumerate_family_with_limit(
    family: Family,
    n: Dimension,
    limit: u64,
) -> Result<Box<dyn Iterator<Item = CubeMap>>> {
    let size = param_space_size(family, n)?;
    if size > BigUint::from(limit) {
        return Err(Error::EnumerationTooLarge { size: size.to_string(), limit });
    }
    let nn = n.get();
    Ok(match family {
        Family::Isometry => Box::new(isometry_iter(n)),
        Family::NIsometry => Box::new(n_isometry_iter(n)),
        Family::EvenIsometry => match nn {
            4 => Box::new(even4_class_iter()),
            1 | 2 => Box::new(dedup_maps(n, even_tuple_iter(n)).into_iter()),
            _ => Box::new(even_tuple_iter(n)),
        },
        Family::SigmaIJ => Box::new(sigma_param_iter(n).map(|p| build_sigma_ij(&p))),
        Family::Krasin => {
            Box::new((1..=nn).map(move |i| {
                build_krasin_example(n, i).expect("odd n checked by the size guard")
            }))
        }
        Family::HalfCase1 => match nn {
            2 => Box::new(dedup_maps(n, half1_tuple_iter(n)).into_iter()),
            _ => Box::new(half1_canonical_iter(n)),
        },
        Family::HalfCase2 => match nn {
            4 => Box::new(even4_class_iter()),
            _ => unreachable!("beyond n = 4 the family size exceeds any u64 limit"),
        },
        Family::MidPlus => match nn {
            1 => Box::new(
                dedup_maps(n, isometry_iter(n).chain(translated_sigma_iter(n))).into_iter(),
            ),
            3 => Box::new(even_tuple_iter(n)),
            _ if nn % 4 == 1 => Box::new(isometry_iter(n).chain(translated_sigma_iter(n))),
            _ => Box::new(mid_plus_mod3_iter(n)),
        },
        Family::Triple => match nn {
            3 => Box::new(dedup_maps(n, triple_tuple_iter(n)).into_iter()),
            _ => Box::new(isometry_iter(n).chain(triple_tuple_iter(n))),
        },
    })
}

// ---------------------------------------------------------------------------
// Random parameters
// ---------------------------------------------------------------------------

fn random_word<R: Rng>(n: Dimension, rng: &mut R) -> Word {
    Word::new(n, rng.gen_range(0..n.word_count() as u32)).expect("value below 2^n")
}

fn random_word_of_parity<R: Rng>(n: Dimension, parity: Parity, rng: &mut R) -> Word {
    let mut v = rng.gen_range(0..n.word_count() as u32);
    if Parity::of_weight(v.count_ones()) != parity {
        // flipping the last coordinate flips the weight parity
        v ^= 1;
    }
    Word::new(n, v).expect("value below 2^n")
}

fn random_subset<R: Rng>(pool: &[Word], rng: &mut R) -> Vec<Word> {
    pool.iter().copied().filter(|_| rng.gen::<bool>()).collect()
}

/// Draw a uniformly random parameter tuple for the family (not necessarily a
/// uniformly random member: at small n distinct tuples can coincide as maps).
pub fn sample_params<R: Rng>(family: Family, n: Dimension, rng: &mut R) -> Result<FamilyParams> {
    let nn = n.get();
    let params = match family {
        Family::Isometry => FamilyParams::Isometry(IsometryParams {
            a: random_word(n, rng),
            pi: CoordPermutation::random(n, rng),
        }),
        Family::NIsometry => {
            let half = 1usize << (nn - 1);
            let mut pair_perm: Vec<u32> = (0..half as u32).collect();
            pair_perm.shuffle(rng);
            let flips = (0..half).map(|_| rng.gen::<bool>()).collect();
            FamilyParams::NIsometry(NIsometryParams { n, pair_perm, flips })
        }
        Family::EvenIsometry => {
            let a = random_word(n, rng);
            let b = random_word_of_parity(n, a.parity(), rng);
            FamilyParams::EvenIsometry(EvenIsometryParams {
                a,
                pi: CoordPermutation::random(n, rng),
                b,
                sigma: CoordPermutation::random(n, rng),
            })
        }
        Family::SigmaIJ => FamilyParams::SigmaIJ(SigmaIJParams::random(n, rng)),
        Family::Krasin => {
            require_odd(nn)?;
            FamilyParams::Krasin { n, i: rng.gen_range(1..=nn) }
        }
        Family::HalfCase1 => {
            require_residue(nn, 2)?;
            FamilyParams::HalfCase1(HalfCase1Params {
                pi: CoordPermutation::random(n, rng),
                s: random_subset(&half_transversal(n)?, rng),
                shift: random_word(n, rng),
            })
        }
        Family::HalfCase2 => {
            require_residue(nn, 0)?;
            let pool = half_transversal_even(n)?;
            FamilyParams::HalfCase2(HalfCase2Params {
                pi1: CoordPermutation::random(n, rng),
                pi2: CoordPermutation::random(n, rng),
                s1: random_subset(&pool, rng),
                s2: random_subset(&pool, rng),
                a: random_word_of_parity(n, Parity::Odd, rng),
                b: random_word_of_parity(n, Parity::Odd, rng),
                shift: random_word(n, rng),
            })
        }
        Family::MidPlus => {
            require_odd(nn)?;
            if nn % 4 == 1 {
                let tau = SigmaIJParams::random(n, rng);
                FamilyParams::MidPlus(MidPlusParams {
                    even_part: PartMap::Sigma { tau: tau.clone(), shift: Word::zero(n) },
                    odd_part: PartMap::Sigma { tau, shift: Word::zero(n) },
                    outer_shift: random_word(n, rng),
                })
            } else {
                let part = |rng: &mut R| {
                    if rng.gen::<bool>() {
                        PartMap::Even {
                            a: random_word_of_parity(n, Parity::Even, rng),
                            pi: CoordPermutation::random(n, rng),
                        }
                    } else {
                        PartMap::Sigma {
                            tau: SigmaIJParams::random(n, rng),
                            shift: random_word_of_parity(n, Parity::Even, rng),
                        }
                    }
                };
                FamilyParams::MidPlus(MidPlusParams {
                    even_part: part(rng),
                    odd_part: part(rng),
                    outer_shift: random_word(n, rng),
                })
            }
        }
        Family::Triple => {
            require_residue(nn, 3)?;
            FamilyParams::Triple(TripleParams {
                tau: SigmaIJParams::random(n, rng),
                outer_shift: random_word(n, rng),
            })
        }
    };
    Ok(params)
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn word(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn spectrum(m: &CubeMap) -> PreservedSet {
        m.preserved_distances().unwrap()
    }

    fn tables(maps: impl Iterator<Item = CubeMap>) -> BTreeSet<Vec<u32>> {
        maps.map(|m| m.table().to_vec()).collect()
    }

    fn enumerate_tables(family: Family, n: usize) -> BTreeSet<Vec<u32>> {
        tables(enumerate_family(family, dim(n)).unwrap())
    }

    /// Every bijection of C_n preserving all the listed distances, by
    /// exhaustive search over all (2^n)! permutation tables.
    fn brute_preservers(n: usize, required: &[usize]) -> BTreeSet<Vec<u32>> {
        let wc = dim(n).word_count();
        LexPerms::new((0..wc as u32).collect::<Vec<_>>())
            .filter(|table| {
                (0..wc).all(|x| {
                    (x + 1..wc).all(|y| {
                        let din = ((x ^ y) as u32).count_ones() as usize;
                        !required.contains(&din)
                            || (table[x] ^ table[y]).count_ones() as usize == din
                    })
                })
            })
            .collect()
    }

    /// A 16-entry table of 4-bit values packs exactly into a u64.
    fn pack16(m: &CubeMap) -> u64 {
        m.table()
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &v)| acc | (v as u64) << (4 * k))
    }

    #[test]
    fn lex_perms_cover_everything_in_order() {
        let all: Vec<Vec<u32>> = LexPerms::new(vec![2u32, 0, 1, 3]).collect();
        assert_eq!(all.len(), 24);
        assert_eq!(all[0], vec![0, 1, 2, 3]);
        assert_eq!(all[23], vec![3, 2, 1, 0]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(LexPerms::new(Vec::<u32>::new()).count(), 1);
    }

    #[test]
    fn isometry_builder_matches_component_maps() {
        let p = IsometryParams {
            a: word("101"),
            pi: CoordPermutation::transposition(dim(3), 1, 2).unwrap(),
        };
        let m = build_isometry(&p).unwrap();
        assert_eq!(m.apply(word("100")).unwrap(), word("111"));
        assert_eq!(m.apply(word("000")).unwrap(), word("101"));
        assert!(spectrum(&m).is_full());

        let id = build_isometry(&IsometryParams {
            a: Word::zero(dim(3)),
            pi: CoordPermutation::identity(dim(3)),
        })
        .unwrap();
        assert!(id.is_identity());

        let bad = IsometryParams { a: word("10"), pi: CoordPermutation::identity(dim(3)) };
        assert!(matches!(build_isometry(&bad), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn n_isometry_builder_edges() {
        let n = dim(3);
        let id = build_n_isometry(&NIsometryParams {
            n,
            pair_perm: vec![0, 1, 2, 3],
            flips: vec![false; 4],
        })
        .unwrap();
        assert!(id.is_identity());

        let comp = build_n_isometry(&NIsometryParams {
            n,
            pair_perm: vec![0, 1, 2, 3],
            flips: vec![true; 4],
        })
        .unwrap();
        assert_eq!(comp, CubeMap::translation(Word::ones(n)));

        let bad = NIsometryParams { n, pair_perm: vec![0, 0, 2, 3], flips: vec![false; 4] };
        assert!(matches!(build_n_isometry(&bad), Err(Error::NotAPermutation(_))));
        let short = NIsometryParams { n, pair_perm: vec![0, 1], flips: vec![false; 2] };
        assert!(matches!(build_n_isometry(&short), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn n_isometry_samples_preserve_top_distance() {
        let mut rg = rng(1);
        for nn in 3..=6 {
            for _ in 0..10 {
                let p = sample_params(Family::NIsometry, dim(nn), &mut rg).unwrap();
                assert!(spectrum(&p.build().unwrap()).contains(nn));
            }
        }
    }

    #[test]
    fn even_isometry_builder_and_parity_rule() {
        let n = dim(4);
        let p = EvenIsometryParams {
            a: Word::zero(n),
            pi: CoordPermutation::identity(n),
            b: Word::zero(n),
            sigma: CoordPermutation::transposition(n, 1, 2).unwrap(),
        };
        let m = build_even_isometry(&p).unwrap();
        assert_eq!(spectrum(&m), PreservedSet::from_distances(n, &[2, 4]).unwrap());

        let bad = EvenIsometryParams {
            a: word("1000"),
            pi: CoordPermutation::identity(n),
            b: Word::zero(n),
            sigma: CoordPermutation::identity(n),
        };
        assert!(matches!(build_even_isometry(&bad), Err(Error::ParityViolation)));
    }

    #[test]
    fn even_isometry_samples_preserve_even_distances() {
        let mut rg = rng(2);
        for nn in 3..=7 {
            for _ in 0..10 {
                let p = sample_params(Family::EvenIsometry, dim(nn), &mut rg).unwrap();
                assert!(spectrum(&p.build().unwrap()).contains_all_even());
            }
        }
    }

    #[test]
    fn small_dimension_families_match_exhaustive_search() {
        // n = 3: full bijection sweep, 40320 candidates per call
        let iso3 = brute_preservers(3, &[1, 2, 3]);
        assert_eq!(iso3.len(), 48);
        assert_eq!(enumerate_tables(Family::Isometry, 3), iso3);

        let even3 = brute_preservers(3, &[2]);
        assert_eq!(even3.len(), 1152);
        assert_eq!(enumerate_tables(Family::EvenIsometry, 3), even3);

        let top3 = brute_preservers(3, &[3]);
        assert_eq!(top3.len(), 384);
        assert_eq!(enumerate_tables(Family::NIsometry, 3), top3);

        // preserving {2, 3} already forces a full isometry at n = 3
        assert_eq!(brute_preservers(3, &[2, 3]), iso3);

        // n = 2: everything collapses onto the 8 isometries
        let iso2 = brute_preservers(2, &[1]);
        assert_eq!(iso2.len(), 8);
        assert_eq!(enumerate_tables(Family::Isometry, 2), iso2);
        assert_eq!(enumerate_tables(Family::NIsometry, 2), brute_preservers(2, &[2]));
        assert_eq!(enumerate_tables(Family::EvenIsometry, 2), brute_preservers(2, &[2]));
        assert_eq!(enumerate_tables(Family::HalfCase1, 2), brute_preservers(2, &[1, 2]));
    }

    #[test]
    fn even4_enumeration_is_complete_and_strictly_larger_than_tuples() {
        let class: HashSet<u64> = enumerate_family(Family::EvenIsometry, dim(4))
            .unwrap()
            .map(|m| pack16(&m))
            .collect();
        assert_eq!(class.len(), 294_912);

        let tuples: HashSet<u64> = even_tuple_iter(dim(4)).map(|m| pack16(&m)).collect();
        assert_eq!(tuples.len(), 73_728);
        assert!(tuples.is_subset(&class));

        for (k, m) in enumerate_family(Family::EvenIsometry, dim(4)).unwrap().enumerate() {
            if k % 9973 == 0 {
                let d = spectrum(&m);
                assert!(d.contains(2) && d.contains(4));
            }
        }
    }

    #[test]
    fn sigma_ij_linear_form_matches_branch_definition() {
        /// Direct two-branch transcription: coordinate j of the image copies
        /// coordinate i, every other target coordinate k copies the source
        /// coordinate mapped onto it, complemented when coordinate i is set.
        fn branch_reference(p: &SigmaIJParams) -> CubeMap {
            let n = p.dimension();
            let nn = n.get();
            let inv = p.extended().inverse();
            CubeMap::from_fn(n, |c| {
                let ci = c >> (nn - p.i()) & 1;
                let mut d = 0u32;
                for k in 1..=nn {
                    let bit = if k == p.j() {
                        ci
                    } else {
                        (c >> (nn - inv.image(k)) & 1) ^ ci
                    };
                    d |= bit << (nn - k);
                }
                d
            })
            .unwrap()
        }

        let mut rg = rng(5);
        for nn in 2..=6 {
            for i in 1..=nn {
                for j in 1..=nn {
                    let sources: Vec<usize> = (1..=nn).filter(|&k| k != i).collect();
                    let mut targets: Vec<usize> = (1..=nn).filter(|&k| k != j).collect();
                    targets.shuffle(&mut rg);
                    let pairs: Vec<_> = sources.into_iter().zip(targets).collect();
                    let p = SigmaIJParams::new(dim(nn), i, j, &pairs).unwrap();
                    assert_eq!(build_sigma_ij(&p), branch_reference(&p));
                }
            }
        }
    }

    #[test]
    fn sigma_ij_worked_example() {
        let p = SigmaIJParams::new(dim(3), 1, 2, &[(2, 1), (3, 3)]).unwrap();
        let m = build_sigma_ij(&p);
        assert_eq!(m.apply(word("000")).unwrap(), word("000"));
        assert_eq!(m.apply(word("100")).unwrap(), word("111"));
        // unit off i maps to the unit at its sigma image
        assert_eq!(m.apply(word("010")).unwrap(), word("100"));
        assert_eq!(m.apply(word("001")).unwrap(), word("001"));
        assert!(spectrum(&m).contains(2));
    }

    #[test]
    fn sigma_ij_rejects_malformed_restrictions() {
        let n = dim(4);
        assert!(SigmaIJParams::new(n, 1, 2, &[(2, 1), (3, 3)]).is_err()); // missing 4
        assert!(SigmaIJParams::new(n, 1, 2, &[(1, 1), (3, 3), (4, 4)]).is_err()); // source i
        assert!(SigmaIJParams::new(n, 1, 2, &[(2, 2), (3, 3), (4, 4)]).is_err()); // target j
        assert!(SigmaIJParams::new(n, 1, 2, &[(2, 1), (2, 3), (4, 4)]).is_err()); // dup source
        assert!(SigmaIJParams::new(n, 0, 2, &[]).is_err()); // bad coordinate
        let id = CoordPermutation::identity(n);
        assert!(SigmaIJParams::from_extended(1, 2, id).is_err()); // image mismatch
    }

    #[test]
    fn sigma_ij_preserves_parity_and_commutes_with_translations() {
        let n = dim(5);
        let mut rg = rng(7);
        for _ in 0..5 {
            let p = SigmaIJParams::random(n, &mut rg);
            let f = build_sigma_ij(&p);
            for v in 0..32u32 {
                assert_eq!(f.apply_raw(v).count_ones() % 2, v.count_ones() % 2);
            }
            for _ in 0..10 {
                let a = random_word(n, &mut rg);
                let fa = f.apply(a).unwrap().value();
                for v in 0..32u32 {
                    assert_eq!(f.apply_raw(v ^ a.value()), fa ^ f.apply_raw(v));
                }
            }
        }
    }

    #[test]
    fn sigma_ij_and_krasin_preserve_the_mid_distance() {
        let mut rg = rng(9);
        for nn in [3usize, 5, 7] {
            let mid = (nn + 1) / 2;
            for _ in 0..10 {
                let p = SigmaIJParams::random(dim(nn), &mut rg);
                assert!(spectrum(&build_sigma_ij(&p)).contains(mid));
            }
            for i in 1..=nn {
                let m = build_krasin_example(dim(nn), i).unwrap();
                assert!(spectrum(&m).contains(mid));
                // the krasin member is the i = j order-preserving specialization
                let tau = SigmaIJParams::order_preserving(dim(nn), i, i).unwrap();
                assert_eq!(m, build_sigma_ij(&tau));
            }
        }
        assert!(matches!(
            build_krasin_example(dim(4), 1),
            Err(Error::WrongResidue { .. })
        ));
    }

    #[test]
    fn sigma_ij_enumeration_is_injective() {
        for nn in [3usize, 4] {
            let maps = enumerate_tables(Family::SigmaIJ, nn);
            let expected = param_space_size(Family::SigmaIJ, dim(nn)).unwrap();
            assert_eq!(BigUint::from(maps.len()), expected);
        }
        assert_eq!(enumerate_tables(Family::Krasin, 5).len(), 5);
    }

    #[test]
    fn half_transversal_structure() {
        for nn in [2usize, 4, 6] {
            let n = dim(nn);
            let x = half_transversal(n).unwrap();
            assert_eq!(x.len(), 1 << (nn - 1));
            // exactly one member of every complement pair, and on the middle
            // weight the transversal member is the pair representative
            let values: BTreeSet<u32> = x.iter().map(|w| w.value()).collect();
            for w in crate::bitword::all_words(n) {
                assert_ne!(
                    values.contains(&w.value()),
                    values.contains(&w.complement().value())
                );
            }
            for w in &x {
                if 2 * w.weight() as usize == nn {
                    assert!(!w.coord(1).unwrap());
                    assert_eq!(*w, w.pair_representative());
                    assert_eq!(half_representative(w.complement()).unwrap(), *w);
                }
            }
        }
        assert!(half_transversal(dim(5)).is_err());
    }

    #[test]
    fn half_case1_flip_of_the_zero_pair() {
        let n = dim(6);
        let p = HalfCase1Params {
            pi: CoordPermutation::identity(n),
            s: vec![Word::zero(n)],
            shift: Word::zero(n),
        };
        let m = build_half_case1(&p).unwrap();
        // swaps the all-zeros and all-ones words, fixes everything else
        for v in 0..64u32 {
            let expect = match v {
                0 => 63,
                63 => 0,
                _ => v,
            };
            assert_eq!(m.apply_raw(v), expect);
        }
        assert_eq!(spectrum(&m), PreservedSet::from_distances(n, &[3, 6]).unwrap());

        let id = build_half_case1(&HalfCase1Params {
            pi: CoordPermutation::identity(n),
            s: vec![],
            shift: Word::zero(n),
        })
        .unwrap();
        assert!(id.is_identity());
    }

    #[test]
    fn half_case1_validation() {
        let n = dim(6);
        let not_in_x = HalfCase1Params {
            pi: CoordPermutation::identity(n),
            s: vec![word("111110")],
            shift: Word::zero(n),
        };
        assert!(matches!(build_half_case1(&not_in_x), Err(Error::InvalidParams(_))));

        let dup = HalfCase1Params {
            pi: CoordPermutation::identity(n),
            s: vec![Word::zero(n), Word::zero(n)],
            shift: Word::zero(n),
        };
        assert!(matches!(build_half_case1(&dup), Err(Error::InvalidParams(_))));

        let wrong_n = HalfCase1Params {
            pi: CoordPermutation::identity(dim(4)),
            s: vec![],
            shift: Word::zero(dim(4)),
        };
        assert!(matches!(build_half_case1(&wrong_n), Err(Error::WrongResidue { .. })));
    }

    #[test]
    fn half_case1_samples_preserve_half_and_top() {
        let mut rg = rng(13);
        for _ in 0..25 {
            let p = sample_params(Family::HalfCase1, dim(6), &mut rg).unwrap();
            let d = spectrum(&p.build().unwrap());
            assert!(d.contains(3) && d.contains(6));
        }
    }

    #[test]
    fn half_case1_canonical_parameters_are_injective() {
        let n = dim(6);
        let mut rg = rng(17);
        let pool: Vec<Word> =
            half_transversal(n).unwrap().into_iter().filter(|w| w.value() != 0).collect();
        let mut param_keys = BTreeSet::new();
        let mut map_tables = BTreeSet::new();
        for _ in 0..300 {
            let pi = CoordPermutation::random(n, &mut rg);
            let s = random_subset(&pool, &mut rg);
            let shift = random_word(n, &mut rg);
            let key =
                (pi.images(), s.iter().map(|w| w.value()).collect::<Vec<_>>(), shift.value());
            param_keys.insert(key);
            let m = build_half_case1(&HalfCase1Params { pi, s, shift }).unwrap();
            map_tables.insert(m.table().to_vec());
        }
        assert_eq!(param_keys.len(), map_tables.len());
    }

    #[test]
    fn half_case2_builder_and_validation() {
        let n = dim(4);
        let e1 = word("1000");
        let id = build_half_case2(&HalfCase2Params {
            pi1: CoordPermutation::identity(n),
            pi2: CoordPermutation::identity(n),
            s1: vec![],
            s2: vec![],
            a: e1,
            b: e1,
            shift: Word::zero(n),
        })
        .unwrap();
        assert!(id.is_identity());

        let even_a = HalfCase2Params {
            pi1: CoordPermutation::identity(n),
            pi2: CoordPermutation::identity(n),
            s1: vec![],
            s2: vec![],
            a: word("1100"),
            b: e1,
            shift: Word::zero(n),
        };
        assert!(matches!(build_half_case2(&even_a), Err(Error::InvalidParams(_))));

        let odd_s = HalfCase2Params {
            pi1: CoordPermutation::identity(n),
            pi2: CoordPermutation::identity(n),
            s1: vec![word("1000")],
            s2: vec![],
            a: e1,
            b: e1,
            shift: Word::zero(n),
        };
        assert!(matches!(build_half_case2(&odd_s), Err(Error::InvalidParams(_))));

        assert!(matches!(
            sample_params(Family::HalfCase2, dim(6), &mut rng(0)),
            Err(Error::WrongResidue { .. })
        ));
    }

    #[test]
    fn half_case2_samples_preserve_half_and_top() {
        let mut rg = rng(19);
        for nn in [4usize, 8] {
            for _ in 0..15 {
                let p = sample_params(Family::HalfCase2, dim(nn), &mut rg).unwrap();
                let d = spectrum(&p.build().unwrap());
                assert!(d.contains(nn / 2) && d.contains(nn));
            }
        }
    }

    #[test]
    fn half_case2_members_lie_in_the_n4_class_enumeration() {
        let class: HashSet<u64> = enumerate_family(Family::HalfCase2, dim(4))
            .unwrap()
            .map(|m| pack16(&m))
            .collect();
        assert_eq!(class.len(), 294_912);
        let mut rg = rng(11);
        for _ in 0..50 {
            let p = sample_params(Family::HalfCase2, dim(4), &mut rg).unwrap();
            assert!(class.contains(&pack16(&p.build().unwrap())));
        }
    }

    #[test]
    fn mid_plus_global_form_for_residue_one() {
        let n = dim(5);
        let tau = SigmaIJParams::order_preserving(n, 1, 2).unwrap();
        let shift = word("01000");
        let p = MidPlusParams {
            even_part: PartMap::Sigma { tau: tau.clone(), shift: Word::zero(n) },
            odd_part: PartMap::Sigma { tau: tau.clone(), shift: Word::zero(n) },
            outer_shift: shift,
        };
        let m = build_mid_plus(&p).unwrap();
        let direct = build_sigma_ij(&tau);
        for v in 0..32u32 {
            assert_eq!(m.apply_raw(v), direct.apply_raw(v) ^ shift.value());
        }
        assert!(spectrum(&m).contains(3));

        let other = SigmaIJParams::order_preserving(n, 2, 2).unwrap();
        let mixed = MidPlusParams {
            even_part: PartMap::Sigma { tau: tau.clone(), shift: Word::zero(n) },
            odd_part: PartMap::Sigma { tau: other, shift: Word::zero(n) },
            outer_shift: Word::zero(n),
        };
        assert!(matches!(build_mid_plus(&mixed), Err(Error::IllegalCombination(_))));

        let part_shift = MidPlusParams {
            even_part: PartMap::Sigma { tau: tau.clone(), shift: word("00011") },
            odd_part: PartMap::Sigma { tau, shift: word("00011") },
            outer_shift: Word::zero(n),
        };
        assert!(matches!(build_mid_plus(&part_shift), Err(Error::IllegalCombination(_))));
    }

    #[test]
    fn mid_plus_independent_parts_for_residue_three() {
        let n = dim(7);
        let tau = SigmaIJParams::order_preserving(n, 1, 1).unwrap();
        let tau2 = SigmaIJParams::order_preserving(n, 2, 2).unwrap();

        let perm_even_sigma_odd = MidPlusParams {
            even_part: PartMap::Even {
                a: Word::zero(n),
                pi: CoordPermutation::transposition(n, 1, 2).unwrap(),
            },
            odd_part: PartMap::Sigma { tau: tau.clone(), shift: word("0000011") },
            outer_shift: Word::zero(n),
        };
        assert!(spectrum(&build_mid_plus(&perm_even_sigma_odd).unwrap()).contains(4));

        let sigma_even_perm_odd = MidPlusParams {
            even_part: PartMap::Sigma { tau: tau.clone(), shift: Word::zero(n) },
            odd_part: PartMap::Even {
                a: word("0000011"),
                pi: CoordPermutation::identity(n),
            },
            outer_shift: word("1000000"),
        };
        assert!(spectrum(&build_mid_plus(&sigma_even_perm_odd).unwrap()).contains(4));

        // two unrelated sigma maps still preserve the mid distance but not n
        let two_sigmas = MidPlusParams {
            even_part: PartMap::Sigma { tau, shift: Word::zero(n) },
            odd_part: PartMap::Sigma { tau: tau2, shift: Word::zero(n) },
            outer_shift: Word::zero(n),
        };
        let d = spectrum(&build_mid_plus(&two_sigmas).unwrap());
        assert!(d.contains(4));
        assert!(!d.contains(7));

        let odd_shift = MidPlusParams {
            even_part: PartMap::Even { a: Word::zero(n), pi: CoordPermutation::identity(n) },
            odd_part: PartMap::Sigma {
                tau: SigmaIJParams::order_preserving(n, 1, 1).unwrap(),
                shift: word("0000001"),
            },
            outer_shift: Word::zero(n),
        };
        assert!(matches!(build_mid_plus(&odd_shift), Err(Error::IllegalCombination(_))));

        assert!(matches!(
            sample_params(Family::MidPlus, dim(4), &mut rng(0)),
            Err(Error::WrongResidue { .. })
        ));
    }

    #[test]
    fn mid_plus_samples_preserve_the_mid_distance() {
        let mut rg = rng(29);
        for nn in [5usize, 7] {
            for _ in 0..15 {
                let p = sample_params(Family::MidPlus, dim(nn), &mut rg).unwrap();
                assert!(spectrum(&p.build().unwrap()).contains((nn + 1) / 2));
            }
        }
    }

    #[test]
    fn mid_plus_enumeration_small_dimensions() {
        let one: Vec<CubeMap> = enumerate_family(Family::MidPlus, dim(1)).unwrap().collect();
        assert_eq!(one.len(), 2);
        assert!(one.iter().any(|m| m.is_identity()));
        assert!(one.contains(&CubeMap::translation(Word::ones(dim(1)))));

        // at n = 3 the mid distance is 2, so the family is the even preservers
        assert_eq!(enumerate_tables(Family::MidPlus, 3), brute_preservers(3, &[2]));

        let five: HashSet<Vec<u32>> = enumerate_family(Family::MidPlus, dim(5))
            .unwrap()
            .map(|m| m.table().to_vec())
            .collect();
        assert_eq!(BigUint::from(five.len()), param_space_size(Family::MidPlus, dim(5)).unwrap());
        assert!(five.contains(CubeMap::identity(dim(5)).table()));
        let mut checked = 0;
        for (k, t) in five.iter().enumerate() {
            if k % 1013 == 0 {
                let m = CubeMap::from_table(dim(5), t.clone()).unwrap();
                assert!(spectrum(&m).contains(3));
                checked += 1;
            }
        }
        assert!(checked > 10);
    }

    #[test]
    fn triple_members_at_n3_are_exactly_the_isometries() {
        assert_eq!(enumerate_tables(Family::Triple, 3), brute_preservers(3, &[1, 2, 3]));
    }

    #[test]
    fn triple_samples_preserve_all_three_distances() {
        let n = dim(7);
        let mut rg = rng(31);
        for _ in 0..10 {
            let p = sample_params(Family::Triple, n, &mut rg).unwrap();
            let d = spectrum(&p.build().unwrap());
            assert!(d.contains(3) && d.contains(4) && d.contains(7));
        }
        let tau = SigmaIJParams::order_preserving(n, 2, 5).unwrap();
        let m = build_triple(&TripleParams { tau, outer_shift: Word::zero(n) }).unwrap();
        let d = spectrum(&m);
        assert!(d.contains(3) && d.contains(4) && d.contains(7));
        assert!(!d.contains(1));

        assert!(matches!(
            sample_params(Family::Triple, dim(5), &mut rg),
            Err(Error::WrongResidue { .. })
        ));
    }

    #[test]
    fn param_space_sizes_frozen_values() {
        let cases: [(Family, usize, &str); 22] = [
            (Family::Isometry, 3, "48"),
            (Family::Isometry, 6, "46080"),
            (Family::NIsometry, 2, "8"),
            (Family::NIsometry, 3, "384"),
            (Family::NIsometry, 4, "10321920"),
            (Family::EvenIsometry, 1, "2"),
            (Family::EvenIsometry, 2, "8"),
            (Family::EvenIsometry, 3, "1152"),
            (Family::EvenIsometry, 4, "294912"),
            (Family::EvenIsometry, 5, "7372800"),
            (Family::EvenIsometry, 6, "1061683200"),
            (Family::SigmaIJ, 5, "600"),
            (Family::SigmaIJ, 9, "3265920"),
            (Family::Krasin, 7, "7"),
            (Family::HalfCase1, 2, "8"),
            (Family::HalfCase1, 6, "98956046499840"),
            (Family::HalfCase2, 4, "294912"),
            (Family::MidPlus, 1, "2"),
            (Family::MidPlus, 3, "1152"),
            (Family::MidPlus, 5, "23040"),
            (Family::MidPlus, 7, "13317754060800"),
            (Family::Triple, 7, "5160960"),
        ];
        for (family, nn, expected) in cases {
            assert_eq!(
                param_space_size(family, dim(nn)).unwrap().to_string(),
                expected,
                "{family} at n = {nn}"
            );
        }
        assert_eq!(param_space_size(Family::Triple, dim(3)).unwrap().to_string(), "48");
        assert!(param_space_size(Family::Krasin, dim(4)).is_err());
        assert!(param_space_size(Family::HalfCase1, dim(4)).is_err());
        assert!(param_space_size(Family::HalfCase2, dim(6)).is_err());
        assert!(param_space_size(Family::MidPlus, dim(6)).is_err());
    }

    #[test]
    fn enumeration_respects_the_limit() {
        assert!(matches!(
            enumerate_family(Family::NIsometry, dim(4)),
            Err(Error::EnumerationTooLarge { .. })
        ));
        assert!(matches!(
            enumerate_family(Family::HalfCase1, dim(6)),
            Err(Error::EnumerationTooLarge { .. })
        ));
        assert!(matches!(
            enumerate_family(Family::Triple, dim(7)),
            Err(Error::EnumerationTooLarge { .. })
        ));
        // a raised ceiling unlocks the stream lazily
        let mut it = enumerate_family_with_limit(Family::NIsometry, dim(4), 10_400_000).unwrap();
        assert!(it.next().unwrap().is_identity());
    }

    #[test]
    fn family_tags_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.as_str().parse::<Family>().unwrap(), f);
        }
        assert!("half_case3".parse::<Family>().is_err());
        assert_eq!(serde_json::to_string(&Family::SigmaIJ).unwrap(), "\"sigma_ij\"");
    }

    #[test]
    fn params_json_shapes() {
        let p = FamilyParams::Isometry(IsometryParams {
            a: word("101"),
            pi: CoordPermutation::transposition(dim(3), 1, 2).unwrap(),
        });
        assert_eq!(p.to_json(), r#"{"family":"isometry","n":3,"a":"101","pi":[2,1,3]}"#);

        let s = FamilyParams::SigmaIJ(SigmaIJParams::new(dim(3), 1, 2, &[(2, 1), (3, 3)]).unwrap());
        assert_eq!(s.to_json(), r#"{"family":"sigma_ij","n":3,"i":1,"j":2,"sigma":[2,1,3]}"#);

        let k = FamilyParams::Krasin { n: dim(5), i: 2 };
        assert_eq!(k.to_json(), r#"{"family":"krasin","n":5,"i":2}"#);
    }

    #[test]
    fn params_json_rejects_inconsistencies() {
        // component dimension disagrees with the declared n
        let bad = r#"{"family":"isometry","n":4,"a":"101","pi":[2,1,3]}"#;
        assert!(FamilyParams::from_json(bad).is_err());
        // sigma image at i must be j
        let bad = r#"{"family":"sigma_ij","n":3,"i":1,"j":2,"sigma":[1,2,3]}"#;
        assert!(FamilyParams::from_json(bad).is_err());
        // unknown family tag
        let bad = r#"{"family":"rotation","n":3}"#;
        assert!(FamilyParams::from_json(bad).is_err());
        // parity rule checked on deserialization
        let bad = r#"{"family":"even_isometry","n":2,"a":"10","pi":[1,2],"b":"11","sigma":[1,2]}"#;
        assert!(FamilyParams::from_json(bad).is_err());
    }

    #[test]
    fn sampled_params_build_and_round_trip() {
        let cases = [
            (Family::Isometry, 5),
            (Family::NIsometry, 5),
            (Family::EvenIsometry, 6),
            (Family::SigmaIJ, 7),
            (Family::Krasin, 5),
            (Family::HalfCase1, 6),
            (Family::HalfCase2, 4),
            (Family::MidPlus, 5),
            (Family::MidPlus, 7),
            (Family::Triple, 7),
        ];
        let mut rg = rng(23);
        for (family, nn) in cases {
            let required = required_distances(family, dim(nn)).unwrap();
            for _ in 0..10 {
                let p = sample_params(family, dim(nn), &mut rg).unwrap();
                assert_eq!(p.family(), family);
                assert_eq!(p.dimension().get(), nn);
                p.validate().unwrap();
                let m = p.build().unwrap();
                assert!(required.is_subset_of(&spectrum(&m)), "{family} at n = {nn}");
                let q = FamilyParams::from_json(&p.to_json()).unwrap();
                assert_eq!(p, q);
            }
        }
    }

    #[test]
    fn required_distance_sets() {
        assert!(required_distances(Family::Isometry, dim(4)).unwrap().is_full());
        assert_eq!(
            required_distances(Family::NIsometry, dim(4)).unwrap().distances(),
            vec![4]
        );
        assert_eq!(
            required_distances(Family::EvenIsometry, dim(6)).unwrap().distances(),
            vec![2, 4, 6]
        );
        assert_eq!(required_distances(Family::MidPlus, dim(7)).unwrap().distances(), vec![4]);
        assert_eq!(
            required_distances(Family::Triple, dim(7)).unwrap().distances(),
            vec![3, 4, 7]
        );
        assert_eq!(
            required_distances(Family::HalfCase1, dim(6)).unwrap().distances(),
            vec![3, 6]
        );
        assert!(required_distances(Family::SigmaIJ, dim(4)).is_err());
    }
}
