//! Classify bijections by spectrum and recover their defining parameters.
//!
//! Run with `cargo run --example classify_and_recover`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use weakiso::bitword::Dimension;
use weakiso::classify::classify;
use weakiso::cubemap::CubeMap;
use weakiso::families::{sample_params, Family};

fn main() -> weakiso::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    // Build from random parameters, classify the bare lookup table, and
    // check that the recovered parameters rebuild the identical table.
    for (family, n) in [
        (Family::Isometry, 5),
        (Family::EvenIsometry, 4),
        (Family::NIsometry, 3),
        (Family::MidPlus, 5),
        (Family::Triple, 7),
        (Family::HalfCase1, 6),
    ] {
        let params = sample_params(family, Dimension::new(n)?, &mut rng)?;
        let f = params.build()?;
        let label = classify(&f)?;
        print!(
            "built {:<14} n={n} -> tag {:?}, spectrum {:?}",
            family.to_string(),
            label.tag,
            label.spectrum.distances()
        );
        let recovered = label.recovered.expect("parametrized maps must round-trip");
        let rebuilt = recovered.build()?;
        assert_eq!(rebuilt, f);
        println!(", parameters recovered ({})", recovered.family());
    }

    // A bijection outside every family gets the generic tag and no
    // parameters: swap two words at distance 1 inside C_3.
    let mut table: Vec<u32> = (0..8).collect();
    table.swap(6, 7);
    let generic = CubeMap::from_table(Dimension::new(3)?, table)?;
    let label = classify(&generic)?;
    println!(
        "patched map        n=3 -> tag {:?}, spectrum {:?}, params {:?}",
        label.tag,
        label.spectrum.distances(),
        label.recovered
    );
    Ok(())
}
