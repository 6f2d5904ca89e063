//! Search the full group of P-preserving bijections without assuming any
//! classification: partition-refinement backtracking on the distance-colored
//! cube plus a stabilizer chain for exact orders and membership.
//!
//! Run with `cargo run --example group_oracle`.

use weakiso::bitword::Dimension;
use weakiso::cubemap::{CubeMap, PreservedSet};
use weakiso::families::{param_space_size, Family};
use weakiso::groupsearch::{aut_group, brute_force_group, group_contains};

fn main() -> weakiso::Result<()> {
    // The group of {2}-preserving bijections of C_4, found by search alone.
    let n = Dimension::new(4)?;
    let p = PreservedSet::from_distances(n, &[2])?;
    let group = aut_group(n, &p)?;
    println!(
        "aut(C_4, {{2}}): order {} from {} generators",
        group.order(),
        group.generators().len()
    );

    // The independent parametrized count lands on the same number.
    let counted = param_space_size(Family::HalfCase2, n)?;
    println!("parametrized member count:   {counted}");
    assert_eq!(group.order(), counted);

    // Membership is a stabilizer-chain sift, not a table scan.
    let identity = CubeMap::identity(n);
    println!("identity in group: {}", group_contains(&group, &identity));
    let mut table: Vec<u32> = (0..16).collect();
    table.swap(0, 1);
    let swap = CubeMap::from_table(n, table)?;
    println!("single swap in group: {}", group_contains(&group, &swap));

    // At tiny dimensions the search can be checked against filtering all
    // (2^n)! bijections directly.
    let n3 = Dimension::new(3)?;
    let p3 = PreservedSet::from_distances(n3, &[2])?;
    let searched = aut_group(n3, &p3)?;
    let filtered = brute_force_group(n3, &p3)?;
    println!(
        "C_3 {{2}}: searched order {}, brute-force order {}",
        searched.order(),
        filtered.order()
    );
    assert_eq!(searched.order(), filtered.order());
    Ok(())
}
