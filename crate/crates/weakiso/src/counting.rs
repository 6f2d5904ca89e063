//! Exact counting of words by weight and distance.
//!
//! Everything here is closed-form arithmetic over big integers and exact
//! rationals; no cube is materialized. Each formula is validated against a
//! direct word count in the tests, so the formulas and the cube code never
//! vouch for each other.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::{Error, Result};

/// C(n, k) as a big integer; 0 when k > n.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    num_integer::binomial(BigUint::from(n), BigUint::from(k))
}

/// Number of weight-w words at Hamming distance d from a fixed word of
/// weight m in the n-cube.
///
/// Choosing t positions inside the support to flip off and d - t outside to
/// flip on gives weight m + d - 2t, so t = (m + d - w) / 2 and the count is
/// C(m, t) * C(n - m, d - t); zero when t is not an integer in range.
pub fn count_weight_at_distance(n: usize, m: usize, w: usize, d: usize) -> BigUint {
    assert!(m <= n && w <= n && d <= n, "arguments must be at most n");
    let Some(twice_t) = (m + d).checked_sub(w) else {
        return BigUint::zero();
    };
    if twice_t % 2 != 0 {
        return BigUint::zero();
    }
    let t = twice_t / 2;
    if t > m || t > d {
        return BigUint::zero();
    }
    binomial(m, t) * binomial(n - m, d - t)
}

/// The profile value A_{2k}: the number of words of weight p at distance p
/// from a fixed word of weight 2k, where p is n/2 (n even) or (n-1)/2
/// (n odd). Equals C(2k, k) * C(n - 2k, p - k).
pub fn a_2k(n: usize, p: usize, k: usize) -> Result<BigUint> {
    check_mid_distance(n, p)?;
    if 2 * k > n {
        return Err(Error::InvalidParams(format!(
            "no word of weight {} in the {n}-cube",
            2 * k
        )));
    }
    if k > p {
        return Ok(BigUint::zero());
    }
    Ok(binomial(2 * k, k) * binomial(n - 2 * k, p - k))
}

fn check_mid_distance(n: usize, p: usize) -> Result<()> {
    let expected_half = if n % 2 == 0 { n / 2 } else { (n - 1) / 2 };
    if p != expected_half {
        return Err(Error::WrongResidue {
            expected: "with p = n/2 (n even) or p = (n-1)/2 (n odd)",
            n,
        });
    }
    Ok(())
}

/// The whole profile A_2, A_4, ..., A_{2*floor(n/2)} for the mid distance p.
pub fn a_profile(n: usize, p: usize) -> Result<CountProfile> {
    check_mid_distance(n, p)?;
    let values = (1..=n / 2).map(|k| a_2k(n, p, k)).collect::<Result<_>>()?;
    Ok(CountProfile { n, p, values })
}

/// Consecutive-profile ratio H_k = A_{2(k+1)} / A_{2k} for odd n, as the
/// exact rational ((2k+1)((n-1)/2 - k + 1)) / ((k+1)(n - 2k)).
///
/// H_k < 1 iff 2k < (n-1)/2 and H_k > 1 iff 2k > (n-1)/2, which is the
/// strict unimodality of the profile.
pub fn h_ratio(n: usize, k: usize) -> Result<BigRational> {
    if n % 2 == 0 {
        return Err(Error::WrongResidue { expected: "odd", n });
    }
    if 2 * (k + 1) > n - 1 {
        return Err(Error::InvalidParams(format!(
            "H_{k} needs A_{} to exist for n = {n}",
            2 * (k + 1)
        )));
    }
    let numer = BigInt::from((2 * k + 1) * ((n - 1) / 2 - k + 1));
    let denom = BigInt::from((k + 1) * (n - 2 * k));
    Ok(BigRational::new(numer, denom))
}

/// Number of distinct weights available to a word of the half-cube
/// transversal X at distance n/2 from a fixed word of odd weight 2k+1 < n/2.
///
/// The reachable weights step by 2 from n/2 - (2k+1) upward and the weight
/// n/2 itself has the wrong parity, so exactly the k+1 weights below n/2
/// occur.
pub fn b_odd(k: usize) -> u64 {
    k as u64 + 1
}

/// For n divisible by 4: the number of weight-n/2 words at distance n/2
/// from both members of a pair of weight-2 words, for the two support
/// shapes: sharing one coordinate, and disjoint.
///
/// shared = C(n-3, n/2 - 1) + C(n-3, n/2 - 2), disjoint = 4*C(n-4, n/2 - 2),
/// and shared/disjoint = (n-3)/(n-2), so the two counts never agree.
pub fn case2_pair_counts(n: usize) -> Result<(BigUint, BigUint)> {
    if n % 4 != 0 || n == 0 {
        return Err(Error::WrongResidue {
            expected: "divisible by 4",
            n,
        });
    }
    let shared = binomial(n - 3, n / 2 - 1) + binomial(n - 3, n / 2 - 2);
    let disjoint = BigUint::from(4u32) * binomial(n - 4, n / 2 - 2);
    debug_assert_eq!(
        shared.clone() * BigUint::from(n - 2),
        disjoint.clone() * BigUint::from(n - 3),
        "shared/disjoint must equal (n-3)/(n-2)"
    );
    Ok((shared, disjoint))
}

/// A profile of A_{2k} values for one (n, p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountProfile {
    pub n: usize,
    pub p: usize,
    /// A_2, A_4, ... in order.
    pub values: Vec<BigUint>,
}

impl Serialize for CountProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            n: usize,
            p: usize,
            values: Vec<String>,
        }
        Out {
            n: self.n,
            p: self.p,
            values: self.values.iter().map(BigUint::to_string).collect(),
        }
        .serialize(s)
    }
}

impl CountProfile {
    /// A_{2k}, 1-based k.
    pub fn a(&self, k: usize) -> &BigUint {
        &self.values[k - 1]
    }
}

#[cfg(test)]
mod tests {
    use num_traits::One;

    use super::*;

    /// Direct word count: weight/distance histogram of the whole n-cube
    /// against a fixed reference word of weight m. Uses raw integers only.
    fn brute_histogram(n: usize, m: usize) -> Vec<Vec<u64>> {
        let reference: u32 = ((1u64 << m) - 1) as u32;
        let mut counts = vec![vec![0u64; n + 1]; n + 1];
        for v in 0..(1u64 << n) as u32 {
            let w = v.count_ones() as usize;
            let d = (v ^ reference).count_ones() as usize;
            counts[w][d] += 1;
        }
        counts
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn weight_distance_formula_matches_brute_force() {
        for n in 1..=10 {
            for m in 0..=n {
                let counts = brute_histogram(n, m);
                for w in 0..=n {
                    for d in 0..=n {
                        assert_eq!(
                            count_weight_at_distance(n, m, w, d),
                            BigUint::from(counts[w][d]),
                            "n={n} m={m} w={w} d={d}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn weight_distance_examples() {
        assert_eq!(count_weight_at_distance(5, 1, 2, 3), BigUint::from(6u32));
        assert_eq!(count_weight_at_distance(6, 2, 3, 3), BigUint::from(12u32));
        for n in 1..=8 {
            for m in 0..=n {
                assert_eq!(count_weight_at_distance(n, m, m, 0), BigUint::one());
            }
        }
    }

    #[test]
    fn a_2k_examples_and_brute_force() {
        assert_eq!(a_2k(6, 3, 1).unwrap(), BigUint::from(12u32));
        assert_eq!(a_2k(13, 6, 1).unwrap(), BigUint::from(924u32));
        // Closed form against the direct count at the largest feasible n.
        for n in [12usize, 13] {
            let p = if n % 2 == 0 { n / 2 } else { (n - 1) / 2 };
            for k in 1..=n / 2 {
                let counts = brute_histogram(n, 2 * k);
                assert_eq!(
                    a_2k(n, p, k).unwrap(),
                    BigUint::from(counts[p][p]),
                    "n={n} k={k}"
                );
            }
        }
        assert!(a_2k(6, 2, 1).is_err());
        assert!(a_2k(7, 4, 1).is_err());
    }

    #[test]
    fn odd_profile_symmetry() {
        // A_{2k} = A_{n-2k+1} for p = (n-1)/2.
        for n in [5usize, 7, 9, 11, 13] {
            let p = (n - 1) / 2;
            for k in 1..=n / 2 {
                let mirror = n - 2 * k + 1;
                assert_eq!(mirror % 2, 0);
                let k2 = mirror / 2;
                if k2 >= 1 && 2 * k2 <= n {
                    assert_eq!(a_2k(n, p, k).unwrap(), a_2k(n, p, k2).unwrap(), "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn profile_is_unimodal_with_known_bend() {
        // n = 7: t = (n+1)/4 = 2, so A_2 > A_4 and A_4 < A_6.
        let profile = a_profile(7, 3).unwrap();
        assert!(profile.a(1) > profile.a(2));
        assert!(profile.a(2) < profile.a(3));
        assert_eq!(profile.a(1), &BigUint::from(20u32));
        assert_eq!(profile.a(2), &BigUint::from(18u32));
        assert_eq!(profile.a(3), &BigUint::from(20u32));
    }

    #[test]
    fn h_ratio_is_exact_profile_ratio() {
        for n in [5usize, 7, 9, 11, 13] {
            let p = (n - 1) / 2;
            for k in 1..=(n - 3) / 2 {
                let expected = BigRational::new(
                    BigInt::from(a_2k(n, p, k + 1).unwrap()),
                    BigInt::from(a_2k(n, p, k).unwrap()),
                );
                assert_eq!(h_ratio(n, k).unwrap(), expected, "n={n} k={k}");
            }
        }
        // Spot value: n=9, k=1 gives A_4/A_2 = (3*4)/(2*7) = 6/7.
        assert_eq!(
            h_ratio(9, 1).unwrap(),
            BigRational::new(BigInt::from(6), BigInt::from(7))
        );
    }

    #[test]
    fn h_ratio_sign_splits_at_half_p() {
        let one = BigRational::one();
        for n in (5..=25usize).step_by(2) {
            for k in 0..=(n - 3) / 2 {
                let h = h_ratio(n, k).unwrap();
                if 2 * k < (n - 1) / 2 {
                    assert!(h < one, "n={n} k={k}");
                } else if 2 * k > (n - 1) / 2 {
                    assert!(h > one, "n={n} k={k}");
                } else {
                    assert_eq!(h, one, "n={n} k={k}");
                }
                // Equality requires 2k = (n-1)/2, impossible for odd (n-1)/2.
                if ((n - 1) / 2) % 2 == 1 {
                    assert_ne!(h, one);
                }
            }
        }
    }

    /// Membership in the half-cube transversal X: weight below n/2, or
    /// weight exactly n/2 with the leading coordinate zero.
    fn in_x(n: usize, v: u32) -> bool {
        let w = v.count_ones() as usize;
        w * 2 < n || (w * 2 == n && v >> (n - 1) & 1 == 0)
    }

    #[test]
    fn b_odd_matches_direct_weight_count() {
        assert_eq!(b_odd(0), 1);
        assert_eq!(b_odd(1), 2);
        for n in [6usize, 10, 14] {
            let half = n / 2;
            for k in 0.. {
                let m = 2 * k + 1;
                if m >= half {
                    break;
                }
                let c: u32 = ((1u64 << m) - 1) as u32;
                let mut weights = std::collections::BTreeSet::new();
                for v in 0..(1u64 << n) as u32 {
                    if in_x(n, v) && (v ^ c).count_ones() as usize == half {
                        weights.insert(v.count_ones());
                    }
                }
                assert_eq!(weights.len() as u64, b_odd(k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn case2_counts_match_brute_force() {
        assert_eq!(
            case2_pair_counts(8).unwrap(),
            (BigUint::from(20u32), BigUint::from(24u32))
        );
        assert_eq!(
            case2_pair_counts(4).unwrap(),
            (BigUint::from(2u32), BigUint::from(4u32))
        );
        assert!(case2_pair_counts(6).is_err());
        for n in [4usize, 8, 12] {
            let half = n / 2;
            // Supports {1,2} and {2,3} share a coordinate; {1,2} and {3,4} do not.
            let c1: u32 = 0b11;
            let c2_shared: u32 = 0b110;
            let c2_disjoint: u32 = 0b1100;
            let mut shared = 0u64;
            let mut disjoint = 0u64;
            for v in 0..(1u64 << n) as u32 {
                if v.count_ones() as usize != half {
                    continue;
                }
                if (v ^ c1).count_ones() as usize == half {
                    if (v ^ c2_shared).count_ones() as usize == half {
                        shared += 1;
                    }
                    if (v ^ c2_disjoint).count_ones() as usize == half {
                        disjoint += 1;
                    }
                }
            }
            let (s, d) = case2_pair_counts(n).unwrap();
            assert_eq!(s, BigUint::from(shared), "shared n={n}");
            assert_eq!(d, BigUint::from(disjoint), "disjoint n={n}");
        }
    }

    #[test]
    fn case2_counts_never_collide() {
        for n in (4..=24usize).step_by(4) {
            let (s, d) = case2_pair_counts(n).unwrap();
            assert_ne!(s, d, "n={n}");
            assert_eq!(s * BigUint::from(n - 2), d * BigUint::from(n - 3));
        }
    }

    #[test]
    fn profile_serializes_as_decimal_strings() {
        let profile = a_profile(6, 3).unwrap();
        let json = serde_json::to_string(&profile).unwrap();
        assert_eq!(json, r#"{"n":6,"p":3,"values":["12","12","20"]}"#);
    }
}
