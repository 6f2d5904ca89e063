//! Words of the Boolean cube and coordinate permutations.
//!
//! A word of dimension n is a vector in {0,1}^n. Coordinate 1 is the most
//! significant position of the serialized string, so the numeric value of a
//! word equals its bit string read as a binary number. All iterators yield
//! words in strictly increasing numeric order.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Largest supported dimension. Dense tables stay below 2^26 bytes.
pub const MAX_N: usize = 24;

/// Validated cube dimension, 1..=MAX_N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if (1..=MAX_N).contains(&n) {
            Ok(Dimension(n))
        } else {
            Err(Error::DimensionOutOfRange(n))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Number of words, 2^n.
    pub fn word_count(self) -> usize {
        1 << self.0
    }

    /// Bit mask with the low n bits set; also the all-ones word value.
    pub fn mask(self) -> u32 {
        ((1u64 << self.0) - 1) as u32
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Weight parity class of a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_weight(w: u32) -> Parity {
        if w % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// A word of the cube: n bits, coordinate i stored at bit (n - i).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    n: Dimension,
    bits: u32,
}

impl Word {
    pub fn new(n: Dimension, value: u32) -> Result<Self> {
        if value & !n.mask() != 0 {
            return Err(Error::ValueOutOfRange {
                n: n.get(),
                value,
            });
        }
        Ok(Word { n, bits: value })
    }

    pub fn zero(n: Dimension) -> Self {
        Word { n, bits: 0 }
    }

    /// The all-ones word.
    pub fn ones(n: Dimension) -> Self {
        Word { n, bits: n.mask() }
    }

    /// The weight-1 word with coordinate i set.
    pub fn unit(n: Dimension, i: usize) -> Result<Self> {
        Ok(Word {
            n,
            bits: coord_bit(n, i)?,
        })
    }

    /// The word with every coordinate set except j.
    pub fn ones_except(n: Dimension, j: usize) -> Result<Self> {
        Ok(Word {
            n,
            bits: n.mask() ^ coord_bit(n, j)?,
        })
    }

    pub fn dimension(self) -> Dimension {
        self.n
    }

    pub fn value(self) -> u32 {
        self.bits
    }

    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn parity(self) -> Parity {
        Parity::of_weight(self.weight())
    }

    /// Coordinate i, 1-based.
    pub fn coord(self, i: usize) -> Result<bool> {
        Ok(self.bits & coord_bit(self.n, i)? != 0)
    }

    /// Componentwise sum mod 2.
    #[allow(clippy::should_implement_trait)] // fallible: the dimensions must agree
    pub fn add(self, other: Word) -> Result<Word> {
        check_dims(self.n, other.n)?;
        Ok(Word {
            n: self.n,
            bits: self.bits ^ other.bits,
        })
    }

    /// Hamming distance.
    pub fn distance(self, other: Word) -> Result<u32> {
        check_dims(self.n, other.n)?;
        Ok((self.bits ^ other.bits).count_ones())
    }

    /// The complement, i.e. this word plus the all-ones word.
    pub fn complement(self) -> Word {
        Word {
            n: self.n,
            bits: self.bits ^ self.n.mask(),
        }
    }

    /// The smaller of `self` and its complement: the canonical member of the
    /// complement pair. Equals the member whose first coordinate is zero.
    pub fn pair_representative(self) -> Word {
        let c = self.complement();
        if c.bits < self.bits {
            c
        } else {
            self
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.n.get()).rev() {
            f.write_str(if self.bits >> i & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let n = Dimension::new(s.len())?;
        let mut bits = 0u32;
        for ch in s.chars() {
            bits <<= 1;
            match ch {
                '0' => {}
                '1' => bits |= 1,
                _ => return Err(Error::Parse(format!("invalid word character {ch:?}"))),
            }
        }
        Ok(Word { n, bits })
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

fn check_dims(a: Dimension, b: Dimension) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            left: a.get(),
            right: b.get(),
        });
    }
    Ok(())
}

/// Bit holding coordinate i of an n-dimensional word.
fn coord_bit(n: Dimension, i: usize) -> Result<u32> {
    if i == 0 || i > n.get() {
        return Err(Error::CoordOutOfRange { n: n.get(), coord: i });
    }
    Ok(1 << (n.get() - i))
}

/// All 2^n words in increasing numeric order.
pub fn all_words(n: Dimension) -> impl Iterator<Item = Word> {
    (0..n.word_count() as u32).map(move |v| Word { n, bits: v })
}

/// All words of a given weight in increasing numeric order.
///
/// Uses the next-higher-same-popcount step, so successive values increase.
pub fn words_of_weight(n: Dimension, weight: u32) -> impl Iterator<Item = Word> {
    let mask = n.mask();
    let mut next: Option<u32> = if weight <= n.get() as u32 {
        Some(if weight == 0 { 0 } else { (1u32 << weight) - 1 })
    } else {
        None
    };
    std::iter::from_fn(move || {
        let v = next?;
        next = if v == 0 {
            None
        } else {
            // Next value with the same popcount: move the lowest block's top
            // bit up one and pack the rest of the block at the bottom.
            let low = v & v.wrapping_neg();
            let carried = v + low;
            let succ = carried | (((v ^ carried) >> 2) / low);
            (succ <= mask).then_some(succ)
        };
        Some(Word { n, bits: v })
    })
}

/// A permutation pi of the coordinate set {1..n}. Applying it to a word
/// produces (x_{pi(1)}, ..., x_{pi(n)}).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoordPermutation {
    n: Dimension,
    /// images[k - 1] = pi(k), 1-based values.
    images: Vec<u8>,
}

impl CoordPermutation {
    pub fn identity(n: Dimension) -> Self {
        CoordPermutation {
            n,
            images: (1..=n.get() as u8).collect(),
        }
    }

    /// Build from a 1-based image table [pi(1), ..., pi(n)].
    pub fn from_images(n: Dimension, images: &[usize]) -> Result<Self> {
        if images.len() != n.get() {
            return Err(Error::NotAPermutation(format!(
                "image table has length {}, expected {}",
                images.len(),
                n.get()
            )));
        }
        let mut seen = vec![false; n.get()];
        for &v in images {
            if v == 0 || v > n.get() {
                return Err(Error::NotAPermutation(format!("image {v} out of range")));
            }
            if seen[v - 1] {
                return Err(Error::NotAPermutation(format!("image {v} repeated")));
            }
            seen[v - 1] = true;
        }
        Ok(CoordPermutation {
            n,
            images: images.iter().map(|&v| v as u8).collect(),
        })
    }

    /// The transposition (i j); i = j gives the identity.
    pub fn transposition(n: Dimension, i: usize, j: usize) -> Result<Self> {
        let mut images: Vec<usize> = (1..=n.get()).collect();
        if i == 0 || i > n.get() {
            return Err(Error::CoordOutOfRange { n: n.get(), coord: i });
        }
        if j == 0 || j > n.get() {
            return Err(Error::CoordOutOfRange { n: n.get(), coord: j });
        }
        images.swap(i - 1, j - 1);
        Self::from_images(n, &images)
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    /// pi(k) for 1-based k.
    pub fn image(&self, k: usize) -> usize {
        self.images[k - 1] as usize
    }

    /// 1-based image table.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v as usize).collect()
    }

    pub fn inverse(&self) -> CoordPermutation {
        let mut images = vec![0u8; self.n.get()];
        for k in 1..=self.n.get() {
            images[self.images[k - 1] as usize - 1] = k as u8;
        }
        CoordPermutation {
            n: self.n,
            images,
        }
    }

    /// Composition acting as `self` after `other` on words.
    ///
    /// apply(self, apply(other, x)) = apply(other.compose_after(self)... use:
    /// apply(q, apply(p, x)) = apply(p * q, x) with (p * q)(k) = p(q(k)).
    pub fn then(&self, next: &CoordPermutation) -> Result<CoordPermutation> {
        check_dims(self.n, next.n)?;
        let images: Vec<usize> = (1..=self.n.get())
            .map(|k| self.image(next.image(k)))
            .collect();
        CoordPermutation::from_images(self.n, &images)
    }

    /// Apply to a word: result coordinate k equals input coordinate pi(k).
    pub fn apply(&self, w: Word) -> Result<Word> {
        check_dims(self.n, w.n)?;
        Ok(Word {
            n: self.n,
            bits: self.apply_raw(w.bits),
        })
    }

    /// Apply to a raw word value (low n bits).
    pub fn apply_raw(&self, v: u32) -> u32 {
        let n = self.n.get();
        let mut out = 0u32;
        for k in 0..n {
            let src = self.images[k] as usize; // pi(k+1)
            out |= (v >> (n - src) & 1) << (n - 1 - k);
        }
        out
    }

    /// Lexicographically next permutation of the image table, for enumeration.
    pub fn all(n: Dimension) -> impl Iterator<Item = CoordPermutation> {
        let mut current: Option<Vec<u8>> = Some((1..=n.get() as u8).collect());
        std::iter::from_fn(move || {
            let images = current.clone()?;
            current = next_permutation(images.clone());
            Some(CoordPermutation { n, images })
        })
    }

    /// Fisher-Yates shuffle with the given generator.
    pub fn random<R: rand::Rng>(n: Dimension, rng: &mut R) -> CoordPermutation {
        let mut images: Vec<u8> = (1..=n.get() as u8).collect();
        for k in (1..images.len()).rev() {
            let j = rng.gen_range(0..=k);
            images.swap(k, j);
        }
        CoordPermutation { n, images }
    }
}

impl Serialize for CoordPermutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.images.iter().map(|&v| v as usize))
    }
}

impl<'de> Deserialize<'de> for CoordPermutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<CoordPermutation, D::Error> {
        let images = Vec::<usize>::deserialize(d)?;
        let n = Dimension::new(images.len()).map_err(D::Error::custom)?;
        CoordPermutation::from_images(n, &images).map_err(D::Error::custom)
    }
}

fn next_permutation(mut v: Vec<u8>) -> Option<Vec<u8>> {
    let i = (0..v.len().checked_sub(1)?).rev().find(|&i| v[i] < v[i + 1])?;
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    Some(v)
}
