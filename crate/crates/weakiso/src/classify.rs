//! Recognition: given an arbitrary cube map, decide which class of
//! distance-subset preservers it belongs to and recover constructive
//! parameters where the structure allows it.
//!
//! The entry point is [`classify`], which computes the preserved-distance
//! spectrum and picks the strongest applicable label. The individual
//! recovery routines ([`decompose_isometry`], [`recover_even_params`],
//! [`recognize_sigma_ij`] and the best-effort `recover_*` helpers) run the
//! decompositions behind the classification: each reads parameters off the
//! map's action on low-weight words and certifies them by rebuilding the
//! table.
//!
//! [`lift_embed`] and [`restrict_from_extended`] relate preservers one
//! dimension apart: a map on C_n extends to a complement-respecting map on
//! C_{n+1}, and a map on C_{n+1} that stabilizes the embedded half restricts
//! back.

use serde::{Deserialize, Serialize};

use crate::bitword::{CoordPermutation, Dimension, Parity, Word};
use crate::cubemap::{CubeMap, PreservedSet, SpectrumOptions};
use crate::families::{
    build_even_isometry, build_half_case1, build_half_case2, build_isometry, build_mid_plus,
    build_n_isometry, build_sigma_ij, build_triple, half_transversal, EvenIsometryParams,
    FamilyParams, HalfCase1Params, HalfCase2Params, IsometryParams, MidPlusParams,
    NIsometryParams, PartMap, SigmaIJParams, TripleParams,
};
use crate::{Error, Result};

/// The classes of the classification, strongest first.
///
/// Every bijection of the cube lands in exactly one label under the
/// precedence used by [`classify`]; the labels overlap as sets of maps (an
/// isometry preserves even distances too), so the tag records the strongest
/// description supported by the spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassTag {
    /// All distances preserved: translation composed with a coordinate
    /// permutation.
    Isometry,
    /// All even distances preserved: independent affine actions on the two
    /// parity classes.
    EvenIsometry,
    /// Half and top distance preserved, n even.
    HalfAndN,
    /// The mid distance (n+1)/2 preserved, n odd.
    MidPlus,
    /// The distances {(n-1)/2, (n+1)/2, n} preserved, n = 3 (mod 4).
    Triple,
    /// Only the top distance is guaranteed: complement-pair relabelling.
    NOnly,
    /// Empty spectrum.
    Generic,
}

impl ClassTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassTag::Isometry => "isometry",
            ClassTag::EvenIsometry => "even_isometry",
            ClassTag::HalfAndN => "half_and_n",
            ClassTag::MidPlus => "mid_plus",
            ClassTag::Triple => "triple",
            ClassTag::NOnly => "n_only",
            ClassTag::Generic => "generic",
        }
    }
}

impl std::fmt::Display for ClassTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of [`classify`]: the strongest applicable tag, the full
/// preserved-distance spectrum, and recovered parameters when a
/// decomposition succeeded.
///
/// `recovered` carries the finest decomposition found, which may be from a
/// narrower family than the tag suggests (a mid-distance preserver fixing
/// the origin recovers as a bare sigma map, for example). `None` means no
/// constructive parametrization of the table was found, not that none
/// exists.
///
/// Serializes one way only: the spectrum renders as a bare distance list,
/// which cannot carry the cube dimension back in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassLabel {
    pub tag: ClassTag,
    pub spectrum: PreservedSet,
    #[serde(rename = "params")]
    pub recovered: Option<FamilyParams>,
}

/// Classify a map by its preserved-distance spectrum.
///
/// The tag is chosen by precedence: isometry, then even isometry, then
/// half-and-top (n even), then the triple class (n = 3 mod 4), then
/// mid-distance (n odd), then top-distance only, and finally generic for an
/// empty spectrum. The first label whose distance requirement the spectrum
/// meets wins. Parameter recovery is attempted for the chosen label (and
/// for finer structure where available) but never affects the tag.
pub fn classify(f: &CubeMap) -> Result<ClassLabel> {
    classify_with(f, &SpectrumOptions::default())
}

/// [`classify`] with explicit spectrum-scan options (dimension ceiling,
/// worker count). The label never depends on the worker count.
pub fn classify_with(f: &CubeMap, options: &SpectrumOptions) -> Result<ClassLabel> {
    let spectrum = f.preserved_distances_with(options)?;
    let nn = f.dimension().get();

    let (tag, recovered) = if spectrum.is_full() {
        (
            ClassTag::Isometry,
            decompose_isometry(f).ok().map(FamilyParams::Isometry),
        )
    } else if !spectrum.is_empty() && spectrum.contains_all_even() {
        (ClassTag::EvenIsometry, recover_even_like(f))
    } else if nn % 2 == 0 && spectrum.contains(nn / 2) && spectrum.contains(nn) {
        let params = if nn % 4 == 2 {
            recover_half_case1(f).map(FamilyParams::HalfCase1)
        } else {
            recover_half_case2(f).map(FamilyParams::HalfCase2)
        };
        (ClassTag::HalfAndN, params)
    } else if nn % 4 == 3
        && spectrum.contains((nn - 1) / 2)
        && spectrum.contains((nn + 1) / 2)
        && spectrum.contains(nn)
    {
        (ClassTag::Triple, recover_triple(f).map(FamilyParams::Triple))
    } else if nn % 2 == 1 && spectrum.contains((nn + 1) / 2) {
        (ClassTag::MidPlus, recover_mid_like(f))
    } else if spectrum.contains(nn) {
        (
            ClassTag::NOnly,
            recover_n_isometry(f).map(FamilyParams::NIsometry),
        )
    } else {
        (ClassTag::Generic, None)
    };

    Ok(ClassLabel { tag, spectrum, recovered })
}

/// Split an isometry into its translation and coordinate permutation.
///
/// The translation is the image of the origin; the permutation is read off
/// the images of the weight-1 words after undoing the translation. Errors
/// with [`Error::NotAnIsometry`] when any unit image has the wrong weight,
/// the images collide, or the rebuilt map disagrees with the input.
pub fn decompose_isometry(f: &CubeMap) -> Result<IsometryParams> {
    let n = f.dimension();
    let nn = n.get();
    let a = f.apply_raw(0);
    let mut images = Vec::with_capacity(nn);
    for k in 1..=nn {
        let img = f.apply_raw(unit_value(nn, k)) ^ a;
        if img.count_ones() != 1 {
            return Err(Error::NotAnIsometry);
        }
        // the unit at k lands on the unit at pi^{-1}(k), so the readings
        // assemble the inverse permutation
        images.push(coord_of_unit(nn, img));
    }
    let pi = CoordPermutation::from_images(n, &images)
        .map_err(|_| Error::NotAnIsometry)?
        .inverse();
    let params = IsometryParams { a: Word::new(n, a)?, pi };
    if build_isometry(&params)? == *f {
        Ok(params)
    } else {
        Err(Error::NotAnIsometry)
    }
}

/// Recover the parity-class decomposition of an even-distance preserver.
///
/// Both coordinate permutations are read off weight-2 images by the
/// common-coordinate rule: after normalizing the origin, the images of the
/// words of weight 2 sharing coordinate k must share exactly one coordinate,
/// the image of k. The odd-class translation and permutation come from the
/// same rule applied after translating a unit word onto the origin.
///
/// For n of 3 or 4 where the rule can degenerate, an exhaustive parameter
/// sweep backs it up; n of 2 or less errors with [`Error::SmallDimension`]
/// since weight-2 words are too few to read anything from. A map without
/// the affine structure errors with [`Error::NotEvenIsometry`].
pub fn recover_even_params(f: &CubeMap) -> Result<EvenIsometryParams> {
    let n = f.dimension();
    let nn = n.get();
    if nn <= 2 {
        return Err(Error::SmallDimension);
    }

    let direct = (|| {
        let a = f.apply_raw(0);
        let pi = even_side_permutation(n, |x| f.apply_raw(x) ^ a)?;
        let e1 = unit_value(nn, 1);
        let fe1 = f.apply_raw(e1);
        let sigma = even_side_permutation(n, |x| f.apply_raw(x ^ e1) ^ fe1)?;
        let b = fe1 ^ sigma.apply_raw(e1);
        let params = EvenIsometryParams {
            a: Word::new(n, a)?,
            pi,
            b: Word::new(n, b)?,
            sigma,
        };
        let rebuilt = build_even_isometry(&params).map_err(|_| Error::NotEvenIsometry)?;
        if rebuilt == *f {
            Ok(params)
        } else {
            Err(Error::NotEvenIsometry)
        }
    })();

    match direct {
        Ok(params) => Ok(params),
        Err(_) if nn <= 4 => even_param_sweep(f).ok_or(Error::NotEvenIsometry),
        Err(e) => Err(e),
    }
}

/// Test a map fixing the origin for the sigma structure and read its
/// parameters: i is the coordinate whose unit word maps to the all-ones
/// word, every other unit maps to a unit, and j is the one coordinate
/// missing from those unit images. Errors with [`Error::NotSigmaIJ`] when
/// the structure is absent or the rebuilt map disagrees.
pub fn recognize_sigma_ij(f: &CubeMap) -> Result<SigmaIJParams> {
    let n = f.dimension();
    let nn = n.get();
    if f.apply_raw(0) != 0 {
        return Err(Error::NotSigmaIJ);
    }
    let ones = n.mask();
    let mut i = None;
    let mut images = vec![0usize; nn];
    for k in 1..=nn {
        let img = f.apply_raw(unit_value(nn, k));
        if img == ones {
            if i.replace(k).is_some() {
                return Err(Error::NotSigmaIJ);
            }
        } else if img.count_ones() == 1 {
            images[k - 1] = coord_of_unit(nn, img);
        } else {
            return Err(Error::NotSigmaIJ);
        }
    }
    let i = i.ok_or(Error::NotSigmaIJ)?;
    let used: std::collections::BTreeSet<usize> =
        images.iter().copied().filter(|&t| t != 0).collect();
    let j = (1..=nn)
        .find(|t| !used.contains(t))
        .ok_or(Error::NotSigmaIJ)?;
    images[i - 1] = j;
    let sigma_hat = CoordPermutation::from_images(n, &images).map_err(|_| Error::NotSigmaIJ)?;
    let params = SigmaIJParams::from_extended(i, j, sigma_hat).map_err(|_| Error::NotSigmaIJ)?;
    if build_sigma_ij(&params) == *f {
        Ok(params)
    } else {
        Err(Error::NotSigmaIJ)
    }
}

/// Extend a map on C_n to C_{n+1} by acting identically on both halves of
/// the complement pairing: words with first coordinate 0 are mapped via the
/// original, and each complement goes to the complement of its partner's
/// image. The result commutes with complementation, so it preserves the top
/// distance; a preserved mid distance (n+1)/2 survives the lift.
pub fn lift_embed(f: &CubeMap) -> Result<CubeMap> {
    let nn = f.dimension().get();
    let up = Dimension::new(nn + 1)?;
    let mask = up.mask();
    let half = 1u32 << nn;
    CubeMap::from_fn(up, |v| {
        if v < half {
            f.apply_raw(v)
        } else {
            f.apply_raw(v ^ mask) ^ mask
        }
    })
}

/// Restrict a map on C_{n+1} to the embedded C_n of words with first
/// coordinate 0. Errors with [`Error::DoesNotStabilize`] when the map sends
/// any such word outside the embedded half.
pub fn restrict_from_extended(g: &CubeMap) -> Result<CubeMap> {
    let nn = g.dimension().get();
    if nn < 2 {
        return Err(Error::DimensionOutOfRange(nn - 1));
    }
    let down = Dimension::new(nn - 1)?;
    let half = 1u32 << (nn - 1);
    for v in 0..half {
        if g.apply_raw(v) >= half {
            return Err(Error::DoesNotStabilize);
        }
    }
    CubeMap::from_fn(down, |v| g.apply_raw(v))
}

/// Read a complement-pair relabelling off a top-distance preserver: the
/// image of each pair representative names the pair permutation, its half
/// names the flip. Returns `None` when the map does not commute with
/// complementation.
pub fn recover_n_isometry(f: &CubeMap) -> Option<NIsometryParams> {
    let n = f.dimension();
    let nn = n.get();
    let mask = n.mask();
    let half = 1u32 << (nn - 1);
    for v in 0..half {
        if f.apply_raw(v ^ mask) != f.apply_raw(v) ^ mask {
            return None;
        }
    }
    let mut pair_perm = Vec::with_capacity(half as usize);
    let mut flips = Vec::with_capacity(half as usize);
    for r in 0..half {
        let img = f.apply_raw(r);
        pair_perm.push(img.min(img ^ mask));
        flips.push(img >= half);
    }
    let params = NIsometryParams { n, pair_perm, flips };
    match build_n_isometry(&params) {
        Ok(m) if m == *f => Some(params),
        _ => None,
    }
}

/// Best-effort recovery of the half-distance form at n = 2 (mod 4): a
/// coordinate permutation, a flip set over the weight transversal, and a
/// translation. Gauge fixing puts the origin's pair outside the flip set,
/// making the parameters unique. Returns `None` when the structure is
/// absent.
pub fn recover_half_case1(f: &CubeMap) -> Option<HalfCase1Params> {
    let n = f.dimension();
    let nn = n.get();
    if nn % 4 != 2 {
        return None;
    }
    let mask = n.mask();
    let shift = f.apply_raw(0);
    let g = |x: u32| f.apply_raw(x) ^ shift;

    let pi = if nn == 2 {
        // weight-1 words straddle the transversal boundary at n = 2; both
        // coordinate permutations are cheap to test directly
        CoordPermutation::all(n).find(|pi| {
            half_transversal(n).unwrap().iter().all(|x| {
                let img = g(x.value());
                img == pi.apply_raw(x.value()) || img == pi.apply_raw(x.value()) ^ mask
            })
        })?
    } else {
        // units sit strictly inside the transversal, so each unit image is
        // either a unit or its complement; the readings assemble the
        // inverse permutation
        let mut images = Vec::with_capacity(nn);
        for k in 1..=nn {
            let img = g(unit_value(nn, k));
            let unit = match img.count_ones() as usize {
                1 => img,
                w if w == nn - 1 => img ^ mask,
                _ => return None,
            };
            images.push(coord_of_unit(nn, unit));
        }
        CoordPermutation::from_images(n, &images).ok()?.inverse()
    };

    let mut s = Vec::new();
    for x in half_transversal(n).ok()? {
        let img = g(x.value());
        let straight = pi.apply_raw(x.value());
        if img == straight ^ mask {
            s.push(x);
        } else if img != straight {
            return None;
        }
    }
    let params = HalfCase1Params { pi, s, shift: Word::new(n, shift).ok()? };
    match build_half_case1(&params) {
        Ok(m) if m == *f => Some(params),
        _ => None,
    }
}

/// Best-effort recovery of the half-distance form at n = 0 (mod 4): two
/// within-class permutations with flip sets over the even transversal, odd
/// translations between the classes, and a shared shift. Gauge fixing picks
/// the first unit word as the class-swapping translation and keeps the
/// origin's pair out of both flip sets. Returns `None` when the structure
/// is absent.
pub fn recover_half_case2(f: &CubeMap) -> Option<HalfCase2Params> {
    let n = f.dimension();
    let nn = n.get();
    if nn % 4 != 0 {
        return None;
    }
    let shift = f.apply_raw(0);
    let (pi1, s1) = solve_flipped_even_side(n, |x| f.apply_raw(x) ^ shift)?;
    let a = unit_value(nn, 1);
    let b = f.apply_raw(a) ^ shift;
    let (pi2, s2) = solve_flipped_even_side(n, |x| f.apply_raw(x ^ a) ^ b ^ shift)?;
    let params = HalfCase2Params {
        pi1,
        pi2,
        s1,
        s2,
        a: Word::new(n, a).ok()?,
        b: Word::new(n, b).ok()?,
        shift: Word::new(n, shift).ok()?,
    };
    match build_half_case2(&params) {
        Ok(m) if m == *f => Some(params),
        _ => None,
    }
}

/// Best-effort recovery of the triple form at n = 3 (mod 4): an outer
/// translation over a sigma map acting plainly on even words and composed
/// with the weight-(n-1) complement on odd words. Returns `None` when the
/// structure is absent.
pub fn recover_triple(f: &CubeMap) -> Option<TripleParams> {
    let n = f.dimension();
    let nn = n.get();
    if nn % 4 != 3 {
        return None;
    }
    let t = f.apply_raw(0);
    for j in 1..=nn {
        let flip = Word::ones_except(n, j).ok()?.value();
        let candidate = CubeMap::from_fn(n, |x| {
            let g = f.apply_raw(x) ^ t;
            if x.count_ones() % 2 == 0 {
                g
            } else {
                g ^ flip
            }
        });
        let Ok(tau_map) = candidate else { continue };
        let Ok(tau) = recognize_sigma_ij(&tau_map) else { continue };
        let params = TripleParams { tau, outer_shift: Word::new(n, t).ok()? };
        if let Ok(m) = build_triple(&params) {
            if m == *f {
                return Some(params);
            }
        }
    }
    None
}

/// Best-effort recovery of a mid-distance preserver at odd n. For n = 1
/// (mod 4) the map must be a translated sigma map; for n = 3 (mod 4) the
/// parity classes carry independent affine or sigma actions. A map fixing
/// the origin and recognizable as a bare sigma map recovers as such.
pub fn recover_mid_plus(f: &CubeMap) -> Option<FamilyParams> {
    let n = f.dimension();
    let nn = n.get();
    let t = f.apply_raw(0);
    let g = CubeMap::from_fn(n, |x| f.apply_raw(x) ^ t).ok()?;
    if nn % 4 == 1 {
        let tau = recognize_sigma_ij(&g).ok()?;
        if t == 0 {
            return Some(FamilyParams::SigmaIJ(tau));
        }
        let params = MidPlusParams {
            even_part: PartMap::Sigma { tau: tau.clone(), shift: Word::zero(n) },
            odd_part: PartMap::Sigma { tau, shift: Word::zero(n) },
            outer_shift: Word::new(n, t).ok()?,
        };
        return match build_mid_plus(&params) {
            Ok(m) if m == *f => Some(FamilyParams::MidPlus(params)),
            _ => None,
        };
    }
    if nn % 4 != 3 {
        return None;
    }

    // normalized map must act within parity classes
    if (0..1u32 << nn).any(|x| (g.apply_raw(x) ^ x).count_ones() % 2 != 0) {
        if t == 0 {
            return recognize_sigma_ij(&g).ok().map(FamilyParams::SigmaIJ);
        }
        return None;
    }

    let even_part = match solve_linear_part(n, |x| g.apply_raw(x))? {
        LinearCore::Perm(pi) => PartMap::Even { a: Word::zero(n), pi },
        LinearCore::Sigma(tau) => PartMap::Sigma { tau, shift: Word::zero(n) },
    };
    let e1 = unit_value(nn, 1);
    let ge1 = g.apply_raw(e1);
    let odd_part = match solve_linear_part(n, |y| g.apply_raw(y ^ e1) ^ ge1)? {
        LinearCore::Perm(pi) => {
            let a = ge1 ^ pi.apply_raw(e1);
            PartMap::Even { a: Word::new(n, a).ok()?, pi }
        }
        LinearCore::Sigma(tau) => {
            let shift = ge1 ^ build_sigma_ij(&tau).apply_raw(e1);
            PartMap::Sigma { tau, shift: Word::new(n, shift).ok()? }
        }
    };
    let params = MidPlusParams { even_part, odd_part, outer_shift: Word::new(n, t).ok()? };
    match build_mid_plus(&params) {
        Ok(m) if m == *f => Some(FamilyParams::MidPlus(params)),
        _ => None,
    }
}

/// Recovery attempts behind the even-isometry tag: the affine form first,
/// then the exhaustive sweep's small-dimension cousin, then the half-case
/// form which covers the n = 4 maps outside the affine parametrization.
fn recover_even_like(f: &CubeMap) -> Option<FamilyParams> {
    match recover_even_params(f) {
        Ok(p) => Some(FamilyParams::EvenIsometry(p)),
        Err(Error::SmallDimension) => even_param_sweep(f).map(FamilyParams::EvenIsometry),
        Err(_) => {
            if f.dimension().get() % 4 == 0 {
                recover_half_case2(f).map(FamilyParams::HalfCase2)
            } else {
                None
            }
        }
    }
}

/// Recovery attempts behind the mid-plus tag.
fn recover_mid_like(f: &CubeMap) -> Option<FamilyParams> {
    recover_mid_plus(f)
}

fn unit_value(nn: usize, k: usize) -> u32 {
    1u32 << (nn - k)
}

fn coord_of_unit(nn: usize, unit: u32) -> usize {
    debug_assert_eq!(unit.count_ones(), 1);
    nn - unit.trailing_zeros() as usize
}

/// Common-coordinate rule: for a map fixing the origin and sending weight-2
/// words to weight-2 words, the images of the words sharing coordinate k
/// must share exactly one coordinate, which k is the image of. The readings
/// assemble the inverse permutation, inverted before returning.
fn even_side_permutation(n: Dimension, g: impl Fn(u32) -> u32) -> Result<CoordPermutation> {
    let nn = n.get();
    let mut images = Vec::with_capacity(nn);
    for k in 1..=nn {
        let mut common = n.mask();
        for m in (1..=nn).filter(|&m| m != k) {
            let img = g(unit_value(nn, k) ^ unit_value(nn, m));
            if img.count_ones() != 2 {
                return Err(Error::NotEvenIsometry);
            }
            common &= img;
        }
        if common.count_ones() != 1 {
            return Err(Error::NotEvenIsometry);
        }
        images.push(coord_of_unit(nn, common));
    }
    Ok(CoordPermutation::from_images(n, &images)
        .map_err(|_| Error::NotEvenIsometry)?
        .inverse())
}

/// Exhaustive match against the affine parametrization, used at n <= 4
/// where the weight-2 words are too few for the common-coordinate rule to
/// be reliable.
fn even_param_sweep(f: &CubeMap) -> Option<EvenIsometryParams> {
    let n = f.dimension();
    let wc = n.word_count() as u32;
    for a in 0..wc {
        let a_par = a.count_ones() & 1;
        for pi in CoordPermutation::all(n) {
            if (0..wc)
                .filter(|v| v.count_ones() & 1 == 0)
                .any(|v| f.apply_raw(v) != pi.apply_raw(v) ^ a)
            {
                continue;
            }
            for b in (0..wc).filter(|b| b.count_ones() & 1 == a_par) {
                for sigma in CoordPermutation::all(n) {
                    if (0..wc)
                        .filter(|v| v.count_ones() & 1 == 1)
                        .all(|v| f.apply_raw(v) == sigma.apply_raw(v) ^ b)
                    {
                        return Some(EvenIsometryParams {
                            a: Word::new(n, a).ok()?,
                            pi,
                            b: Word::new(n, b).ok()?,
                            sigma,
                        });
                    }
                }
            }
        }
    }
    None
}

/// Solve g(x) = pi(x) xor [pair(x) in S] ones on the even words, for a map
/// with g(0) = 0. The flip set S lives on the even half of the weight
/// transversal and excludes the origin's pair. For n >= 8 the permutation
/// reads off weight-2 images (complemented images are recognizable by
/// weight); at n = 4 weight 2 is the ambiguous middle weight, so the eight
/// flip patterns over the three nonzero pairs are tried outright.
fn solve_flipped_even_side(
    n: Dimension,
    g: impl Fn(u32) -> u32,
) -> Option<(CoordPermutation, Vec<Word>)> {
    let nn = n.get();
    let mask = n.mask();
    if g(0) != 0 {
        return None;
    }
    let reps: Vec<Word> = half_transversal(n)
        .ok()?
        .into_iter()
        .filter(|w| w.parity() == Parity::Even)
        .collect();

    let finish = |pi: CoordPermutation| -> Option<(CoordPermutation, Vec<Word>)> {
        let mut s = Vec::new();
        for r in &reps {
            let img = g(r.value());
            let straight = pi.apply_raw(r.value());
            if img == straight ^ mask {
                s.push(*r);
            } else if img != straight {
                return None;
            }
        }
        Some((pi, s))
    };

    if nn == 4 {
        let nonzero: Vec<u32> = reps.iter().map(|w| w.value()).filter(|&v| v != 0).collect();
        for pattern in 0..1u32 << nonzero.len() {
            let imgs: Vec<u32> = nonzero
                .iter()
                .enumerate()
                .map(|(idx, &v)| {
                    let img = g(v);
                    if pattern >> idx & 1 == 1 {
                        img ^ mask
                    } else {
                        img
                    }
                })
                .collect();
            // coordinate images come from intersecting the coordinate sets
            // of the candidate weight-2 images
            if imgs.iter().any(|i| i.count_ones() != 2) {
                continue;
            }
            let mut images = vec![0usize; 4];
            let mut ok = true;
            for k in 1..=4usize {
                let mut common = mask;
                for (idx, &v) in nonzero.iter().enumerate() {
                    if v >> (4 - k) & 1 == 1 {
                        common &= imgs[idx];
                    } else {
                        common &= imgs[idx] ^ mask;
                    }
                }
                if common.count_ones() != 1 {
                    ok = false;
                    break;
                }
                images[k - 1] = coord_of_unit(4, common);
            }
            if !ok {
                continue;
            }
            // readings assemble the inverse permutation
            let Ok(pi) = CoordPermutation::from_images(n, &images) else { continue };
            if let Some(found) = finish(pi.inverse()) {
                return Some(found);
            }
        }
        None
    } else {
        let mut images = Vec::with_capacity(nn);
        for k in 1..=nn {
            let mut common = mask;
            for m in (1..=nn).filter(|&m| m != k) {
                let img = g(unit_value(nn, k) ^ unit_value(nn, m));
                let img = match img.count_ones() as usize {
                    2 => img,
                    w if w == nn - 2 => img ^ mask,
                    _ => return None,
                };
                common &= img;
            }
            if common.count_ones() != 1 {
                return None;
            }
            images.push(coord_of_unit(nn, common));
        }
        let pi = CoordPermutation::from_images(n, &images).ok()?.inverse();
        finish(pi)
    }
}

enum LinearCore {
    Perm(CoordPermutation),
    Sigma(SigmaIJParams),
}

/// Identify the linear map behind an action on the even parity class, given
/// only its even-word values with g(0) = 0: either a coordinate permutation
/// or a sigma map. The sigma case is pinned down by choosing the image of
/// the first unit among the units and the all-ones word and checking
/// consistency.
fn solve_linear_part(n: Dimension, g: impl Fn(u32) -> u32) -> Option<LinearCore> {
    let nn = n.get();
    let mask = n.mask();
    let e1 = unit_value(nn, 1);

    if (1..=nn).skip(1).all(|k| g(e1 ^ unit_value(nn, k)).count_ones() == 2) {
        if let Ok(pi) = even_side_permutation(n, &g) {
            let m = CubeMap::coord_permutation(&pi);
            if (0..1u32 << nn)
                .filter(|v| v.count_ones() % 2 == 0)
                .all(|v| g(v) == m.apply_raw(v))
            {
                return Some(LinearCore::Perm(pi));
            }
        }
    }

    let mut candidates: Vec<u32> = (1..=nn).map(|k| unit_value(nn, k)).collect();
    candidates.push(mask);
    for w in candidates {
        // hypothesize L(e_1) = w and propagate along the even basis
        let unit_images: Vec<u32> = (1..=nn)
            .map(|k| if k == 1 { w } else { w ^ g(e1 ^ unit_value(nn, k)) })
            .collect();
        let mut i = None;
        let mut images = vec![0usize; nn];
        let mut ok = true;
        for (k, &img) in unit_images.iter().enumerate() {
            if img == mask {
                if i.replace(k + 1).is_some() {
                    ok = false;
                    break;
                }
            } else if img.count_ones() == 1 {
                images[k] = coord_of_unit(nn, img);
            } else {
                ok = false;
                break;
            }
        }
        let Some(i) = i else { continue };
        if !ok {
            continue;
        }
        let used: std::collections::BTreeSet<usize> =
            images.iter().copied().filter(|&t| t != 0).collect();
        let Some(j) = (1..=nn).find(|t| !used.contains(t)) else { continue };
        images[i - 1] = j;
        let Ok(sigma_hat) = CoordPermutation::from_images(n, &images) else { continue };
        let Ok(tau) = SigmaIJParams::from_extended(i, j, sigma_hat) else { continue };
        let m = build_sigma_ij(&tau);
        if (0..1u32 << nn)
            .filter(|v| v.count_ones() % 2 == 0)
            .all(|v| g(v) == m.apply_raw(v))
        {
            return Some(LinearCore::Sigma(tau));
        }
    }
    None
}
