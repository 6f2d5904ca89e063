//! End-to-end certificate: the searched group of {(n+1)/2}-preservers of C_5
//! is exactly the parametrized family, generator by generator.
//!
//! This is the library-level version of `weakiso verify`; the CLI wraps the
//! same three steps in a report.
//!
//! Run with `cargo run --example certify_classification`.

use std::collections::BTreeMap;

use weakiso::bitword::Dimension;
use weakiso::classify::classify;
use weakiso::cubemap::PreservedSet;
use weakiso::families::{param_space_size, Family};
use weakiso::groupsearch::aut_group;

fn main() -> weakiso::Result<()> {
    let n = Dimension::new(5)?;
    let p = PreservedSet::from_distances(n, &[3])?;

    // Step 1: find the group by search, with no family knowledge.
    let group = aut_group(n, &p)?;

    // Step 2: compare its exact order against the parametrized count.
    let expected = param_space_size(Family::MidPlus, n)?;
    println!("searched order:  {}", group.order());
    println!("family size:     {expected}");
    assert_eq!(group.order(), expected, "order mismatch");

    // Step 3: every generator must classify into the claimed family or a
    // finer one, with its parameters recovered.
    let mut tags: BTreeMap<String, usize> = BTreeMap::new();
    for g in group.generators() {
        let label = classify(g)?;
        assert!(label.recovered.is_some(), "generator escaped the family");
        *tags.entry(format!("{:?}", label.tag)).or_default() += 1;
    }
    for (tag, count) in &tags {
        println!("generators tagged {tag}: {count}");
    }
    println!("certified: every {{3}}-preserver of C_5 is a parametrized map");
    Ok(())
}
