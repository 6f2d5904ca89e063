//! Weak isometries of the Boolean cube.
//!
//! A bijection of the n-dimensional Boolean cube is a *P-isometry* when it
//! preserves every Hamming distance in a set P. This crate builds the known
//! families of such maps (translations composed with coordinate permutations,
//! complement-pair shuffles, parity-split maps, sigma mappings and their
//! relatives), recognizes them from raw value tables, counts them exactly,
//! and cross-checks everything against an independent group-search oracle
//! (partition-refinement backtracking plus a stabilizer chain).
//!
//! The `examples/` directory is the guided tour; the `weakiso` binary exposes
//! the same operations as subcommands.

// residue tests stay as explicit `n % k == r` comparisons: the r = 0 cases
// sit beside r = 1, 2, 3 cases and read best in one uniform shape
#![allow(clippy::manual_is_multiple_of, clippy::manual_div_ceil)]

pub mod bitword;
pub mod classify;
pub mod cli;
pub mod counting;
pub mod cubemap;
pub mod families;
pub mod groupsearch;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
