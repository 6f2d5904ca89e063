//! Build one member of every parametrized family and show its spectrum.
//!
//! Run with `cargo run --example family_tour`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use weakiso::bitword::{CoordPermutation, Dimension, Word};
use weakiso::families::{
    param_space_size, sample_params, Family, FamilyParams, IsometryParams, SigmaIJParams,
};

fn show(params: &FamilyParams) -> weakiso::Result<()> {
    let f = params.build()?;
    let spectrum = f.preserved_distances()?;
    println!(
        "{:<14} n={}  D(f)={:?}",
        params.family().to_string(),
        params.dimension(),
        spectrum.distances()
    );
    println!("    params: {}", params.to_json());
    Ok(())
}

fn main() -> weakiso::Result<()> {
    // Two families built by hand from explicit parts.
    let n5 = Dimension::new(5)?;
    show(&FamilyParams::Isometry(IsometryParams {
        a: Word::new(n5, 0b00110)?,
        pi: CoordPermutation::transposition(n5, 1, 4)?,
    }))?;
    show(&FamilyParams::SigmaIJ(SigmaIJParams::order_preserving(
        n5, 2, 4,
    )?))?;
    show(&FamilyParams::Krasin { n: n5, i: 3 })?;

    // The rest drawn uniformly from their parameter spaces, fixed seed.
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for (family, n) in [
        (Family::NIsometry, 3),
        (Family::EvenIsometry, 4),
        (Family::HalfCase1, 6),
        (Family::HalfCase2, 4),
        (Family::MidPlus, 5),
        (Family::Triple, 7),
    ] {
        show(&sample_params(family, Dimension::new(n)?, &mut rng)?)?;
    }

    // Every family knows how many members it has, exactly.
    println!("\nfamily sizes:");
    for (family, n) in [
        (Family::Isometry, 6),
        (Family::EvenIsometry, 6),
        (Family::HalfCase1, 6),
        (Family::NIsometry, 6),
        (Family::MidPlus, 5),
        (Family::Triple, 7),
    ] {
        let size = param_space_size(family, Dimension::new(n)?)?;
        println!("  {:<14} n={n}: {size}", family.to_string());
    }
    Ok(())
}
