//! Independent group-search oracle.
//!
//! Everything else in this crate reasons about distance-preserving maps
//! through explicit parametrizations. This module takes the opposite route:
//! it colors the complete graph on the cube's words by the constrained
//! distances, finds the color-preserving permutations by canonical
//! partition-refinement backtracking, and manages the resulting group with
//! a Schreier-Sims stabilizer chain. The two routes share no recognition
//! code, so their agreement is evidence rather than tautology.
//!
//! A bijection f with P contained in D(f) preserves each distance d in P on
//! a finite pair set, hence bijectively, so pairs at non-P distances can
//! never land on a P distance. Color automorphisms of [`DistanceGraph`] are
//! therefore exactly the maps whose preserved set contains P.

mod schreier;

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::bitword::Dimension;
use crate::cubemap::{CubeMap, PreservedSet};
use crate::{Error, Result};

use schreier::{Perm, StabChain};

/// Largest dimension `aut_group` accepts without an explicit override.
/// Degree doubles per dimension; past 2^7 points the backtracking search
/// stops being an interactive-speed oracle.
pub const DEFAULT_SEARCH_MAX_N: usize = 7;

/// Dimension ceiling for [`brute_force_group`], which sweeps all (2^n)!
/// permutation tables.
pub const BRUTE_FORCE_MAX_N: usize = 3;

/// Complete graph on the 2^n words, with the edge {x, y} colored by the
/// Hamming distance d(x, y) when that distance lies in P, and by a shared
/// "unconstrained" color otherwise.
pub struct DistanceGraph {
    n: Dimension,
    size: usize,
    /// Number of edge colors beyond "unconstrained"; colors are 1..=n.
    colors: usize,
    /// Row-major size x size color matrix; entry 0 is the unconstrained color.
    color: Vec<u8>,
}

impl DistanceGraph {
    pub fn new(n: Dimension, p: &PreservedSet) -> Result<DistanceGraph> {
        if p.dimension() != n {
            return Err(Error::DimensionMismatch {
                left: n.get(),
                right: p.dimension().get(),
            });
        }
        let size = n.word_count();
        let mut color = vec![0u8; size * size];
        for x in 0..size {
            for y in 0..size {
                let d = (x as u32 ^ y as u32).count_ones() as usize;
                if d > 0 && p.contains(d) {
                    color[x * size + y] = d as u8;
                }
            }
        }
        Ok(DistanceGraph { n, size, colors: n.get(), color })
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    fn color(&self, x: u32, y: u32) -> u8 {
        self.color[x as usize * self.size + y as usize]
    }

    /// Full check that a permutation table preserves every edge color.
    pub fn is_color_automorphism(&self, perm: &[u32]) -> bool {
        if perm.len() != self.size {
            return false;
        }
        for x in 0..self.size as u32 {
            for y in (x + 1)..self.size as u32 {
                if self.color(perm[x as usize], perm[y as usize]) != self.color(x, y) {
                    return false;
                }
            }
        }
        true
    }
}

/// Ordered list of disjoint vertex cells; the search keeps a domain and an
/// image partition whose cells correspond positionally.
type Partition = Vec<Vec<u32>>;

/// Target cell for branching: the smallest cell with more than one vertex,
/// earliest position on ties. `None` means the partition is discrete.
fn target_cell(part: &Partition) -> Option<usize> {
    part.iter()
        .enumerate()
        .filter(|(_, c)| c.len() > 1)
        .min_by_key(|(i, c)| (c.len(), *i))
        .map(|(i, _)| i)
}

/// Split cell `ci` into the singleton [v] followed by the remaining
/// vertices, keeping every other cell in place.
fn individualize(part: &Partition, ci: usize, v: u32) -> Partition {
    let mut out = Vec::with_capacity(part.len() + 1);
    for (i, cell) in part.iter().enumerate() {
        if i != ci {
            out.push(cell.clone());
            continue;
        }
        out.push(vec![v]);
        out.push(cell.iter().copied().filter(|&x| x != v).collect());
    }
    out
}

fn cell_index(size: usize, part: &Partition) -> Vec<u32> {
    let mut idx = vec![0u32; size];
    for (ci, cell) in part.iter().enumerate() {
        for &v in cell {
            idx[v as usize] = ci as u32;
        }
    }
    idx
}

/// Per-vertex refinement signature: how many neighbors the vertex has in
/// each (cell, constrained color) class. Color 0 is omitted; its counts are
/// implied by cell sizes.
fn signature(g: &DistanceGraph, v: u32, cell_of: &[u32], cells: usize) -> Vec<u32> {
    let mut sig = vec![0u32; cells * g.colors];
    for u in 0..g.size as u32 {
        let c = g.color(v, u);
        if c > 0 {
            sig[cell_of[u as usize] as usize * g.colors + (c as usize - 1)] += 1;
        }
    }
    sig
}

/// Refine the domain/image pair to a common fixed point. Cells split by
/// signature, and the two sides must split identically (same signatures,
/// same multiplicities, positionally aligned); any discrepancy proves no
/// color automorphism maps dom-cells onto img-cells, and the branch dies.
fn refine_pair(g: &DistanceGraph, dom: &mut Partition, img: &mut Partition) -> bool {
    loop {
        debug_assert_eq!(dom.len(), img.len());
        let cells = dom.len();
        let dcell = cell_index(g.size, dom);
        let icell = cell_index(g.size, img);
        let dsig: Vec<Vec<u32>> =
            (0..g.size as u32).map(|v| signature(g, v, &dcell, cells)).collect();
        let isig: Vec<Vec<u32>> =
            (0..g.size as u32).map(|v| signature(g, v, &icell, cells)).collect();

        let mut new_dom: Partition = Vec::with_capacity(cells);
        let mut new_img: Partition = Vec::with_capacity(cells);
        let mut split = false;
        for ci in 0..cells {
            let mut dgroups: BTreeMap<&[u32], Vec<u32>> = BTreeMap::new();
            for &v in &dom[ci] {
                dgroups.entry(&dsig[v as usize]).or_default().push(v);
            }
            let mut igroups: BTreeMap<&[u32], Vec<u32>> = BTreeMap::new();
            for &v in &img[ci] {
                igroups.entry(&isig[v as usize]).or_default().push(v);
            }
            if dgroups.len() != igroups.len() {
                return false;
            }
            for ((dkey, dvs), (ikey, ivs)) in dgroups.iter().zip(igroups.iter()) {
                if dkey != ikey || dvs.len() != ivs.len() {
                    return false;
                }
            }
            if dgroups.len() > 1 {
                split = true;
            }
            new_dom.extend(dgroups.into_values());
            new_img.extend(igroups.into_values());
        }
        *dom = new_dom;
        *img = new_img;
        if !split {
            return true;
        }
    }
}

/// Is v in the orbit of u under the generators that fix the whole prefix
/// pointwise? Used to skip branches conjugate to one already explored. The
/// filter is conservative: it may keep a redundant branch (which then just
/// produces a redundant generator) but never discards a needed one.
fn in_orbit_fixing_prefix(gens: &[Perm], prefix: &[u32], u: u32, v: u32, size: usize) -> bool {
    let fixing: Vec<&Perm> = gens
        .iter()
        .filter(|p| prefix.iter().all(|&x| p[x as usize] == x))
        .collect();
    if fixing.is_empty() {
        return false;
    }
    let mut seen = vec![false; size];
    let mut stack = vec![u];
    seen[u as usize] = true;
    while let Some(x) = stack.pop() {
        if x == v {
            return true;
        }
        for p in &fixing {
            let y = p[x as usize];
            if !seen[y as usize] {
                seen[y as usize] = true;
                stack.push(y);
            }
        }
    }
    false
}

/// Stabilizer-coset recursion. The identity branch (u maps to u) descends
/// first so the generators it finds are available for orbit pruning; each
/// surviving coset branch (u maps to v) then needs only one automorphism,
/// found by [`find_extension`].
fn search_stabilizer(g: &DistanceGraph, part: &Partition, prefix: &mut Vec<u32>, gens: &mut Vec<Perm>) {
    let Some(ci) = target_cell(part) else {
        return;
    };
    let u = part[ci][0];

    {
        let mut dom = individualize(part, ci, u);
        let mut img = dom.clone();
        let ok = refine_pair(g, &mut dom, &mut img);
        debug_assert!(ok, "a partition pair refined against itself cannot die");
        prefix.push(u);
        search_stabilizer(g, &dom, prefix, gens);
        prefix.pop();
    }

    for &v in &part[ci][1..] {
        if in_orbit_fixing_prefix(gens, prefix, u, v, g.size) {
            continue;
        }
        let mut dom = individualize(part, ci, u);
        let mut img = individualize(part, ci, v);
        if refine_pair(g, &mut dom, &mut img) {
            if let Some(p) = find_extension(g, &dom, &img) {
                gens.push(p);
            }
        }
    }
}

/// Depth-first search for any single color automorphism mapping dom-cells
/// onto img-cells positionally; returns the first one found.
fn find_extension(g: &DistanceGraph, dom: &Partition, img: &Partition) -> Option<Perm> {
    if dom.iter().all(|c| c.len() == 1) {
        let mut p = vec![0u32; g.size];
        for (dc, ic) in dom.iter().zip(img.iter()) {
            p[dc[0] as usize] = ic[0];
        }
        return g.is_color_automorphism(&p).then_some(p);
    }
    let ci = target_cell(dom).expect("non-discrete partition has a multi-vertex cell");
    let u = dom[ci][0];
    for &v in &img[ci] {
        let mut d = individualize(dom, ci, u);
        let mut i = individualize(img, ci, v);
        if refine_pair(g, &mut d, &mut i) {
            if let Some(p) = find_extension(g, &d, &i) {
                return Some(p);
            }
        }
    }
    None
}

fn search_generators(g: &DistanceGraph) -> Vec<Perm> {
    let mut dom: Partition = vec![(0..g.size as u32).collect()];
    let mut img = dom.clone();
    let ok = refine_pair(g, &mut dom, &mut img);
    debug_assert!(ok, "the initial uniform pair cannot die");
    let mut gens = Vec::new();
    search_stabilizer(g, &dom, &mut Vec::new(), &mut gens);
    gens
}

/// Permutation group on the 2^n words, carried by a normalized generator
/// list and a stabilizer chain over the base 0, 1, .., 2^n - 1.
pub struct PermGroup {
    n: Dimension,
    generators: Vec<CubeMap>,
    chain: StabChain,
}

impl PermGroup {
    /// Normalize raw tables: sift out redundant generators in input order,
    /// sort the survivors by table, and rebuild the chain from the sorted
    /// list so equal groups compare equal generator-for-generator.
    fn from_tables(n: Dimension, tables: Vec<Perm>) -> PermGroup {
        let degree = n.word_count();
        let mut sieve = StabChain::new(degree);
        let mut kept: Vec<Perm> = Vec::new();
        for t in tables {
            debug_assert_eq!(t.len(), degree);
            if sieve.add(t.clone()) {
                kept.push(t);
            }
        }
        kept.sort_unstable();
        let mut chain = StabChain::new(degree);
        for t in &kept {
            chain.add(t.clone());
        }
        let generators = kept
            .into_iter()
            .map(|t| CubeMap::from_table(n, t).expect("chain tables are bijections"))
            .collect();
        PermGroup { n, generators, chain }
    }

    /// Group generated by explicit maps, all of the same dimension.
    pub fn from_generators(n: Dimension, gens: &[CubeMap]) -> Result<PermGroup> {
        for g in gens {
            if g.dimension() != n {
                return Err(Error::DimensionMismatch {
                    left: n.get(),
                    right: g.dimension().get(),
                });
            }
        }
        Ok(PermGroup::from_tables(n, gens.iter().map(|g| g.table().to_vec()).collect()))
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    /// Number of points acted on: 2^n.
    pub fn degree(&self) -> usize {
        self.n.word_count()
    }

    /// Normalized generating set (irredundant, sorted by value table).
    pub fn generators(&self) -> &[CubeMap] {
        &self.generators
    }

    /// Exact order as the product of the fundamental orbit lengths.
    pub fn order(&self) -> BigUint {
        self.chain.order()
    }

    /// Membership by sifting; a map of another dimension is never a member.
    pub fn contains(&self, f: &CubeMap) -> bool {
        f.dimension() == self.n && self.chain.contains(f.table())
    }
}

impl std::fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PermGroup")
            .field("n", &self.n.get())
            .field("generators", &self.generators.len())
            .field("order", &self.order())
            .finish()
    }
}

pub fn group_order(group: &PermGroup) -> BigUint {
    group.order()
}

pub fn group_contains(group: &PermGroup, f: &CubeMap) -> bool {
    group.contains(f)
}

/// The group of all bijections whose preserved-distance set contains P,
/// found by backtracking search over the P-colored distance graph.
pub fn aut_group(n: Dimension, p: &PreservedSet) -> Result<PermGroup> {
    aut_group_with_limit(n, p, DEFAULT_SEARCH_MAX_N)
}

/// Same search with an explicit dimension ceiling in place of
/// [`DEFAULT_SEARCH_MAX_N`].
pub fn aut_group_with_limit(n: Dimension, p: &PreservedSet, max_n: usize) -> Result<PermGroup> {
    if p.dimension() != n {
        return Err(Error::DimensionMismatch {
            left: n.get(),
            right: p.dimension().get(),
        });
    }
    if p.is_empty() {
        return Err(Error::EmptyP);
    }
    if n.get() > max_n {
        return Err(Error::ResourceGuard {
            what: "automorphism search",
            n: n.get(),
            limit: max_n,
        });
    }
    let graph = DistanceGraph::new(n, p)?;
    let tables = search_generators(&graph);
    for t in &tables {
        let m = CubeMap::from_table(n, t.clone()).expect("search tables are bijections");
        assert!(
            m.is_set_isometry(p),
            "search produced a generator violating a required distance"
        );
    }
    Ok(PermGroup::from_tables(n, tables))
}

/// Reference oracle for tiny dimensions: enumerate all (2^n)! permutation
/// tables and keep those preserving every distance in P. Independent of the
/// refinement search, so the two can cross-check each other.
pub fn brute_force_group(n: Dimension, p: &PreservedSet) -> Result<PermGroup> {
    if p.dimension() != n {
        return Err(Error::DimensionMismatch {
            left: n.get(),
            right: p.dimension().get(),
        });
    }
    if p.is_empty() {
        return Err(Error::EmptyP);
    }
    if n.get() > BRUTE_FORCE_MAX_N {
        return Err(Error::ResourceGuard {
            what: "brute-force group enumeration",
            n: n.get(),
            limit: BRUTE_FORCE_MAX_N,
        });
    }
    let size = n.word_count();
    let mut members: Vec<Perm> = Vec::new();
    for table in crate::families::LexPerms::new((0..size as u32).collect()) {
        let m = CubeMap::from_table(n, table.clone())?;
        if m.is_set_isometry(p) {
            members.push(table);
        }
    }
    Ok(PermGroup::from_tables(n, members))
}
