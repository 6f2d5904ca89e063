//! Tour of the word layer: weights, parities, distances, complement pairs.
//!
//! Run with `cargo run --example words_and_distances`.

use weakiso::bitword::{all_words, words_of_weight, CoordPermutation, Dimension, Word};

fn main() -> weakiso::Result<()> {
    let n = Dimension::new(5)?;

    let x: Word = "01101".parse()?;
    let y: Word = "11010".parse()?;
    println!("x = {x}  weight {}  parity {:?}", x.weight(), x.parity());
    println!("y = {y}  weight {}  parity {:?}", y.weight(), y.parity());
    println!("x + y = {}", x.add(y)?);
    println!("d(x, y) = {}", x.distance(y)?);

    // The complement pair {c, c + ones} is the unique pair at distance n.
    println!("complement of x = {}", x.complement());
    println!("d(x, ~x) = {}", x.distance(x.complement())?);
    println!("pair representative of x  = {}", x.pair_representative());
    println!("pair representative of ~x = {}", x.complement().pair_representative());

    // Coordinate 1 is the leftmost character of the string form.
    let e1 = Word::unit(n, 1)?;
    let almost = Word::ones_except(n, 3)?;
    println!("e_1 = {e1}, ones-except-3 = {almost}");

    // A coordinate permutation rearranges positions, never weights.
    let rotate = CoordPermutation::from_images(n, &[2, 3, 4, 5, 1])?;
    println!("rotate(x) = {}, weight still {}", rotate.apply(x)?, x.weight());

    let mid_count = words_of_weight(n, 2).count();
    println!("words of weight 2 in C_5: {mid_count}");
    let even = all_words(n).filter(|w| w.weight() % 2 == 0).count();
    println!("even-weight words in C_5: {even} of {}", n.word_count());
    Ok(())
}
