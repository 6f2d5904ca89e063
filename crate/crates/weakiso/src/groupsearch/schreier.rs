//! Deterministic Schreier-Sims stabilizer chain over a fixed full base.
//!
//! The base is every point 0..degree in increasing order, so no base-change
//! or extension logic is needed: a permutation sifts to the identity exactly
//! when it lies in the group. Orders come out as exact big integers, since
//! the groups of interest routinely exceed 64 bits.

use std::collections::VecDeque;

use num_bigint::BigUint;

/// Raw permutation: table[x] is the image of x.
pub(crate) type Perm = Vec<u32>;

pub(crate) fn p_identity(degree: usize) -> Perm {
    (0..degree as u32).collect()
}

pub(crate) fn p_is_identity(p: &[u32]) -> bool {
    p.iter().enumerate().all(|(x, &y)| x as u32 == y)
}

/// outer after inner: x maps to outer[inner[x]].
pub(crate) fn p_compose(outer: &[u32], inner: &[u32]) -> Perm {
    inner.iter().map(|&x| outer[x as usize]).collect()
}

pub(crate) fn p_inverse(p: &[u32]) -> Perm {
    let mut inv = vec![0u32; p.len()];
    for (x, &y) in p.iter().enumerate() {
        inv[y as usize] = x as u32;
    }
    inv
}

struct Level {
    /// Generators fixing all points below this level's base point.
    gens: Vec<Perm>,
    /// transversal[p] maps the base point to p; `None` outside the orbit.
    transversal: Vec<Option<Perm>>,
    /// Orbit in discovery order; the base point comes first.
    orbit: Vec<u32>,
}

impl Level {
    fn new(point: usize, degree: usize) -> Level {
        let mut transversal = vec![None; degree];
        transversal[point] = Some(p_identity(degree));
        Level { gens: Vec::new(), transversal, orbit: vec![point as u32] }
    }
}

/// Stabilizer chain with base 0, 1, .., degree-1.
pub(crate) struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub(crate) fn new(degree: usize) -> StabChain {
        StabChain {
            degree,
            levels: (0..degree).map(|l| Level::new(l, degree)).collect(),
        }
    }

    /// Sift a permutation through the chain from the given level. Returns
    /// the residue and the level where sifting stopped; a residue at level
    /// `degree` is the identity, meaning membership.
    fn strip_from(&self, mut g: Perm, start: usize) -> (Perm, usize) {
        for l in start..self.degree {
            let p = g[l] as usize;
            if p == l {
                continue;
            }
            match &self.levels[l].transversal[p] {
                None => return (g, l),
                Some(t) => g = p_compose(&p_inverse(t), &g),
            }
        }
        (g, self.degree)
    }

    pub(crate) fn contains(&self, g: &[u32]) -> bool {
        debug_assert_eq!(g.len(), self.degree);
        self.strip_from(g.to_vec(), 0).1 == self.degree
    }

    /// Add a generator. Returns false when it was already a member.
    pub(crate) fn add(&mut self, g: Perm) -> bool {
        debug_assert_eq!(g.len(), self.degree);
        let (res, l) = self.strip_from(g, 0);
        if l == self.degree {
            return false;
        }
        self.install(0, l, res);
        true
    }

    /// Hand a residue fixing base points 0..hi to every level lo..=hi it
    /// stabilizes: the residue may move non-base orbit points of shallow
    /// levels, so each of those orbits must be regrown under it. Deepest
    /// level first, so the Schreier residues the shallow levels spin off
    /// sift against an already-extended tail and stay irredundant.
    fn install(&mut self, lo: usize, hi: usize, g: Perm) {
        for l in (lo..=hi).rev() {
            self.extend_level(l, g.clone());
        }
    }

    /// Install a new generator at its level, grow the orbit, and push every
    /// fresh Schreier generator down the chain.
    fn extend_level(&mut self, l: usize, g: Perm) {
        let new_gen = self.levels[l].gens.len();
        self.levels[l].gens.push(g);

        // pairs of (orbit point, generator) not yet turned into Schreier
        // generators: the old orbit against the new generator, plus every
        // pair a newly discovered point creates
        let mut pending: VecDeque<(usize, usize)> = self.levels[l]
            .orbit
            .iter()
            .map(|&p| (p as usize, new_gen))
            .collect();

        while let Some((p, si)) = pending.pop_front() {
            let q = self.levels[l].gens[si][p] as usize;
            if self.levels[l].transversal[q].is_none() {
                let through = p_compose(
                    &self.levels[l].gens[si],
                    self.levels[l].transversal[p].as_ref().expect("p lies in the orbit"),
                );
                self.levels[l].transversal[q] = Some(through);
                self.levels[l].orbit.push(q as u32);
                for s2 in 0..self.levels[l].gens.len() {
                    pending.push_back((q, s2));
                }
            }
            let t_p = self.levels[l].transversal[p].as_ref().expect("p lies in the orbit");
            let t_q = self.levels[l].transversal[q].as_ref().expect("q was just added");
            let h = p_compose(&p_inverse(t_q), &p_compose(&self.levels[l].gens[si], t_p));
            if !p_is_identity(&h) {
                // a Schreier generator fixes base points 0..=l and is a
                // product of this level's generators, so levels at or above
                // l already generate it; it only carries new information
                // further down
                let (res, m) = self.strip_from(h, l + 1);
                if m < self.degree {
                    self.install(l + 1, m, res);
                }
            }
        }
    }

    /// Exact group order: the product of the fundamental orbit lengths.
    pub(crate) fn order(&self) -> BigUint {
        let mut order = BigUint::from(1u32);
        for level in &self.levels {
            order *= BigUint::from(level.orbit.len());
        }
        order
    }
}
