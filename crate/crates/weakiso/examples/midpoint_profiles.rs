//! Exact counting around the middle distance: profiles, ratios, pair counts.
//!
//! Run with `cargo run --example midpoint_profiles`.

use weakiso::counting::{a_profile, b_odd, case2_pair_counts, h_ratio};

fn main() -> weakiso::Result<()> {
    // A_{2k} counts the weight-p words at distance p from a weight-2k word,
    // where p is the mid distance n/2 or (n-1)/2.
    for (n, p) in [(6usize, 3usize), (7, 3), (9, 4), (13, 6)] {
        let profile = a_profile(n, p)?;
        let values: Vec<String> = profile.values.iter().map(|v| v.to_string()).collect();
        println!("n={n:<2} p={p}: A = [{}]", values.join(", "));
    }

    // For odd n the consecutive ratio H_k = A_{2(k+1)} / A_{2k} crosses 1
    // exactly where 2k passes (n-1)/2, so the profile is unimodal.
    let n = 13;
    println!("\nH_k for n={n}:");
    for k in 1..=(n - 3) / 2 {
        let h = h_ratio(n, k)?;
        let side = if 2 * k < (n - 1) / 2 {
            "< 1"
        } else if 2 * k > (n - 1) / 2 {
            "> 1"
        } else {
            "= 1"
        };
        println!("  H_{k} = {h} {side}");
    }

    // From an odd-weight word, the number of weights reachable inside the
    // half-cube transversal at the mid distance grows one step per weight.
    let reachable: Vec<u64> = (0..5).map(b_odd).collect();
    println!("\nreachable weight counts from weights 1,3,5,7,9: {reachable:?}");

    // For n divisible by 4, two weight-2 words see a different number of
    // common mid-distance words depending on whether their supports touch,
    // always in the ratio (n-3) : (n-2).
    for n in [4usize, 8, 12, 16] {
        let (shared, disjoint) = case2_pair_counts(n)?;
        println!("n={n:<2}: shared support {shared}, disjoint {disjoint}");
    }
    Ok(())
}
