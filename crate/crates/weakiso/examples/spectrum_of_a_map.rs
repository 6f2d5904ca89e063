//! Compute the preserved-distance spectrum D(f) of a few bijections.
//!
//! Run with `cargo run --example spectrum_of_a_map`.

use weakiso::bitword::{CoordPermutation, Dimension, Word};
use weakiso::cubemap::CubeMap;
use weakiso::families::{build_isometry, build_sigma_ij, IsometryParams, SigmaIJParams};

fn report(name: &str, f: &CubeMap) -> weakiso::Result<()> {
    let spectrum = f.preserved_distances()?;
    println!("{name}: D(f) = {:?}", spectrum.distances());
    Ok(())
}

fn main() -> weakiso::Result<()> {
    let n = Dimension::new(5)?;

    // A translation composed with a coordinate permutation preserves
    // every distance.
    let iso = build_isometry(&IsometryParams {
        a: Word::new(n, 0b10010)?,
        pi: CoordPermutation::from_images(n, &[2, 1, 4, 5, 3])?,
    })?;
    report("translation + permutation", &iso)?;

    // The branch-on-one-coordinate map keeps only the middle distance
    // (n + 1) / 2 = 3.
    let sigma = build_sigma_ij(&SigmaIJParams::order_preserving(n, 2, 2)?);
    report("branch map sigma_{2,2}", &sigma)?;

    // A hand-made bijection that swaps just two words at distance 1 keeps
    // nothing at all in C_2.
    let mut table: Vec<u32> = (0..4).collect();
    table.swap(2, 3);
    let patched = CubeMap::from_table(Dimension::new(2)?, table)?;
    report("single swap on C_2", &patched)?;

    // Distance checks are also available one distance at a time.
    println!(
        "sigma preserves 3: {}, preserves 2: {}",
        sigma.is_p_isometry(3),
        sigma.is_p_isometry(2)
    );
    Ok(())
}
