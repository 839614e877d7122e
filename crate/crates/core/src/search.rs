//! Exhaustive searches: lattice tiles, spectra of a set, general translational
//! tiles, and the tile/spectral classification of all subsets of a given size.
//!
//! Searches that can be long report through a sink and poll an interrupt
//! closure, and expose their top-level branches so a caller can hand disjoint
//! branches to different workers. Concatenating branch outputs in branch order
//! reproduces the sequential output.

use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;

use crate::cyclotomic::CyclotomicRing;
use crate::error::{invalid, Result};
use crate::fourier::character_sum;
use crate::group::{Character, Group, Side};
use crate::lattice::{SetOnGroup, Subgroup};

/// Returned by a sink to continue or stop a search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

/// Whether a search visited its whole space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Completion {
    Exhausted,
    Truncated,
}

impl Completion {
    pub fn and(self, other: Completion) -> Completion {
        if self == Completion::Exhausted && other == Completion::Exhausted {
            Completion::Exhausted
        } else {
            Completion::Truncated
        }
    }
}

/// Never interrupts.
pub fn no_interrupt() -> bool {
    false
}

// ---------------------------------------------------------------------------
// lattice tiles

/// All `Omega` tiling `G` by a subgroup: one element from each coset.
///
/// Cosets are ordered by least element and the choice in the last coset
/// varies fastest, so `Z4` with `H = {0, 2}` yields `{0,1}, {0,3}, {2,1}, {2,3}`.
#[derive(Clone, Debug)]
pub struct Tiles {
    group: Group,
    cosets: Vec<Vec<usize>>,
    digits: Vec<usize>,
    done: bool,
}

pub fn enumerate_tiles(h: &Subgroup) -> Result<Tiles> {
    if h.side() != Side::Primal {
        return invalid("tiles are enumerated for primal subgroups");
    }
    let cosets = h.cosets();
    Ok(Tiles {
        group: h.parent().clone(),
        digits: vec![0; cosets.len()],
        cosets,
        done: false,
    })
}

impl Tiles {
    /// `|H|^[G:H]`, or `None` when that overflows.
    pub fn expected_count(&self) -> Option<u128> {
        let base = self.cosets.first().map_or(1, |c| c.len()) as u128;
        let mut total: u128 = 1;
        for _ in &self.cosets {
            total = total.checked_mul(base)?;
        }
        Some(total)
    }

    /// Choice sequence of the next tile, as element indices per coset.
    pub fn choices(&self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        Some(
            self.digits
                .iter()
                .zip(&self.cosets)
                .map(|(&d, c)| c[d])
                .collect(),
        )
    }
}

impl Iterator for Tiles {
    type Item = SetOnGroup;

    fn next(&mut self) -> Option<SetOnGroup> {
        let tile = SetOnGroup::from_indices(&self.group, self.choices()?);
        let mut k = self.digits.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.digits[k] += 1;
            if self.digits[k] < self.cosets[k].len() {
                break;
            }
            self.digits[k] = 0;
        }
        Some(tile)
    }
}

// ---------------------------------------------------------------------------
// spectra

/// Clique search for the spectra of `Omega` containing the trivial character.
///
/// Vertices are characters, with an edge `{a, b}` when `a - b` sums to zero
/// over `Omega` (decided exactly). Spectra are the cliques of size `#Omega`.
#[derive(Clone, Debug)]
pub struct SpectrumSearch {
    group: Group,
    size: usize,
    /// `orthogonal[d]`: the character `d` sums to zero on `Omega`
    orthogonal: FixedBitSet,
    neighbours: Vec<FixedBitSet>,
}

/// A disjoint top-level part of a [`SpectrumSearch`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Branch(Option<usize>);

impl SpectrumSearch {
    pub fn new(omega: &SetOnGroup) -> Result<SpectrumSearch> {
        if omega.is_empty() {
            return invalid("Omega must be nonempty");
        }
        let group = omega.group().clone();
        let n = group.size();
        let ring = CyclotomicRing::new(group.exponent());
        let mut orthogonal = FixedBitSet::with_capacity(n);
        for d in 1..n {
            if ring.is_zero(&character_sum(omega, d)) {
                orthogonal.insert(d);
            }
        }
        let neighbours = (0..n)
            .map(|a| {
                let mut row = FixedBitSet::with_capacity(n);
                row.extend((0..n).filter(|&b| orthogonal.contains(group.sub_index(a, b))));
                row
            })
            .collect();
        Ok(SpectrumSearch {
            group,
            size: omega.cardinality(),
            orthogonal,
            neighbours,
        })
    }

    /// Characters orthogonal to the trivial one on `Omega`.
    pub fn zero_set(&self) -> &FixedBitSet {
        &self.orthogonal
    }

    pub fn branches(&self) -> Vec<Branch> {
        if self.size == 1 {
            return vec![Branch(None)];
        }
        self.neighbours[0].ones().map(|v| Branch(Some(v))).collect()
    }

    /// Emits every spectrum of the branch in lexicographic order.
    pub fn run_branch(
        &self,
        branch: Branch,
        sink: &mut dyn FnMut(Vec<Character>) -> Flow,
        interrupt: &dyn Fn() -> bool,
    ) -> Completion {
        let mut clique = vec![0usize];
        let cand = match branch.0 {
            None => FixedBitSet::with_capacity(self.group.size()),
            Some(v) => {
                clique.push(v);
                let mut c = self.neighbours[0].clone();
                c.intersect_with(&self.neighbours[v]);
                c.set_range(..v + 1, false);
                c
            }
        };
        match self.extend(&mut clique, &cand, sink, interrupt) {
            Flow::Continue => Completion::Exhausted,
            Flow::Stop => Completion::Truncated,
        }
    }

    /// All branches in order.
    pub fn run(
        &self,
        sink: &mut dyn FnMut(Vec<Character>) -> Flow,
        interrupt: &dyn Fn() -> bool,
    ) -> Completion {
        for b in self.branches() {
            if self.run_branch(b, sink, interrupt) == Completion::Truncated {
                return Completion::Truncated;
            }
        }
        Completion::Exhausted
    }

    /// Whether at least one spectrum exists.
    pub fn exists(&self) -> bool {
        let mut found = false;
        self.run(
            &mut |_| {
                found = true;
                Flow::Stop
            },
            &no_interrupt,
        );
        found
    }

    fn extend(
        &self,
        clique: &mut Vec<usize>,
        cand: &FixedBitSet,
        sink: &mut dyn FnMut(Vec<Character>) -> Flow,
        interrupt: &dyn Fn() -> bool,
    ) -> Flow {
        if interrupt() {
            return Flow::Stop;
        }
        if clique.len() == self.size {
            return sink(clique.iter().map(|&c| self.group.character_at(c)).collect());
        }
        let need = self.size - clique.len();
        if cand.count_ones(..) < need || self.colour_bound(cand) < need {
            return Flow::Continue;
        }
        for v in cand.ones() {
            let mut next = cand.clone();
            next.intersect_with(&self.neighbours[v]);
            next.set_range(..v + 1, false);
            clique.push(v);
            let flow = self.extend(clique, &next, sink, interrupt);
            clique.pop();
            if flow == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }

    /// Number of colours in a greedy colouring of `cand`, an upper bound on
    /// its largest clique.
    fn colour_bound(&self, cand: &FixedBitSet) -> usize {
        let mut classes: Vec<FixedBitSet> = Vec::new();
        for v in cand.ones() {
            match classes
                .iter_mut()
                .find(|c| c.is_disjoint(&self.neighbours[v]))
            {
                Some(c) => c.insert(v),
                None => {
                    let mut c = FixedBitSet::with_capacity(self.group.size());
                    c.insert(v);
                    classes.push(c);
                }
            }
        }
        classes.len()
    }
}

/// Every spectrum of `Omega` containing the trivial character, in
/// lexicographic order of character indices.
pub fn find_spectra(omega: &SetOnGroup) -> Result<Vec<Vec<Character>>> {
    let search = SpectrumSearch::new(omega)?;
    let mut out = Vec::new();
    search.run(
        &mut |s| {
            out.push(s);
            Flow::Continue
        },
        &no_interrupt,
    );
    Ok(out)
}

// ---------------------------------------------------------------------------
// general tiles

/// Exact covers of `G` by translates `Omega + t` with `0 in T`.
#[derive(Clone, Debug)]
pub struct CoverSearch {
    group: Group,
    omega: SetOnGroup,
    translates: Vec<FixedBitSet>,
}

impl CoverSearch {
    pub fn new(omega: &SetOnGroup) -> Result<CoverSearch> {
        if omega.is_empty() {
            return invalid("Omega must be nonempty");
        }
        let group = omega.group().clone();
        let n = group.size();
        if !n.is_multiple_of(omega.cardinality()) {
            return invalid("#Omega must divide |G|");
        }
        let translates = (0..n).map(|t| omega.translate(t).bits().clone()).collect();
        Ok(CoverSearch {
            group,
            omega: omega.clone(),
            translates,
        })
    }

    pub fn omega(&self) -> &SetOnGroup {
        &self.omega
    }

    /// Emits each translation set `T` once; order is the search order.
    pub fn run(
        &self,
        sink: &mut dyn FnMut(SetOnGroup) -> Flow,
        interrupt: &dyn Fn() -> bool,
    ) -> Completion {
        let mut covered = self.translates[0].clone();
        let mut chosen = vec![0usize];
        match self.cover(&mut covered, &mut chosen, sink, interrupt) {
            Flow::Continue => Completion::Exhausted,
            Flow::Stop => Completion::Truncated,
        }
    }

    /// All translation sets, sorted.
    pub fn complements(&self) -> Vec<SetOnGroup> {
        let mut out = Vec::new();
        self.run(
            &mut |t| {
                out.push(t);
                Flow::Continue
            },
            &no_interrupt,
        );
        out.sort_by(|a, b| a.indices().cmp(b.indices()));
        out
    }

    pub fn exists(&self) -> bool {
        let mut found = false;
        self.run(
            &mut |_| {
                found = true;
                Flow::Stop
            },
            &no_interrupt,
        );
        found
    }

    fn cover(
        &self,
        covered: &mut FixedBitSet,
        chosen: &mut Vec<usize>,
        sink: &mut dyn FnMut(SetOnGroup) -> Flow,
        interrupt: &dyn Fn() -> bool,
    ) -> Flow {
        if interrupt() {
            return Flow::Stop;
        }
        let n = self.group.size();
        if covered.count_ones(..) == n {
            return sink(SetOnGroup::from_indices(
                &self.group,
                chosen.iter().copied(),
            ));
        }
        // least-covered element first: fewest translates still able to cover it
        let mut best: Option<Vec<usize>> = None;
        for e in 0..n {
            if covered.contains(e) {
                continue;
            }
            let options: Vec<usize> = self
                .omega
                .indices()
                .map(|x| self.group.sub_index(e, x))
                .filter(|&t| self.translates[t].is_disjoint(covered))
                .collect();
            if options.is_empty() {
                return Flow::Continue;
            }
            if best.as_ref().is_none_or(|b| options.len() < b.len()) {
                let single = options.len() == 1;
                best = Some(options);
                if single {
                    break;
                }
            }
        }
        for t in best.expect("an uncovered element exists") {
            covered.union_with(&self.translates[t]);
            chosen.push(t);
            let flow = self.cover(covered, chosen, sink, interrupt);
            chosen.pop();
            covered.difference_with(&self.translates[t]);
            if flow == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }
}

/// Subsets of size `n` containing 0, in lexicographic order of their sorted
/// element indices.
pub fn anchored_subsets(group: &Group, n: usize) -> Result<Vec<SetOnGroup>> {
    let size = group.size();
    if n == 0 || n > size {
        return invalid("subset size must lie in 1..=|G|");
    }
    let mut out = Vec::new();
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        out.push(SetOnGroup::from_indices(group, pick.iter().copied()));
        // next combination of {1..size-1} in the tail
        let mut k = n;
        loop {
            if k <= 1 {
                return Ok(out);
            }
            k -= 1;
            if pick[k] < size - (n - k) {
                break;
            }
        }
        pick[k] += 1;
        for j in k + 1..n {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

fn require_divisor(group: &Group, n: usize) -> Result<()> {
    if n == 0 || !group.size().is_multiple_of(n) {
        return invalid("the subset size must divide |G|");
    }
    Ok(())
}

/// Every pair `(Omega, T)` with `#Omega = n`, `0 in Omega`, `0 in T` and
/// `Omega + T = G` as an exact cover, sorted.
pub fn general_tiles(group: &Group, n: usize) -> Result<Vec<(SetOnGroup, SetOnGroup)>> {
    require_divisor(group, n)?;
    let mut out = Vec::new();
    for omega in anchored_subsets(group, n)? {
        let search = CoverSearch::new(&omega)?;
        for t in search.complements() {
            out.push((omega.clone(), t));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Fuglede report

/// Tile and spectral classification of one subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub tile: bool,
    pub spectral: bool,
}

pub fn classify(omega: &SetOnGroup) -> Result<Classification> {
    Ok(Classification {
        tile: CoverSearch::new(omega)?.exists(),
        spectral: SpectrumSearch::new(omega)?.exists(),
    })
}

/// Which size-`n` subsets containing 0 tile `G` and which are spectral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FugledeReport {
    pub group: Group,
    pub size: usize,
    pub subsets: usize,
    pub tiles: Vec<SetOnGroup>,
    pub spectral: Vec<SetOnGroup>,
    pub tile_not_spectral: Vec<SetOnGroup>,
    pub spectral_not_tile: Vec<SetOnGroup>,
}

impl FugledeReport {
    /// Assembles a report from per-subset classifications, in subset order.
    pub fn from_classified(
        group: &Group,
        size: usize,
        items: &[(SetOnGroup, Classification)],
    ) -> FugledeReport {
        let pick = |f: fn(&Classification) -> bool| -> Vec<SetOnGroup> {
            items
                .iter()
                .filter(|(_, c)| f(c))
                .map(|(s, _)| s.clone())
                .collect()
        };
        FugledeReport {
            group: group.clone(),
            size,
            subsets: items.len(),
            tiles: pick(|c| c.tile),
            spectral: pick(|c| c.spectral),
            tile_not_spectral: pick(|c| c.tile && !c.spectral),
            spectral_not_tile: pick(|c| c.spectral && !c.tile),
        }
    }

    /// Tile and spectral sets coincide.
    pub fn agrees(&self) -> bool {
        self.tile_not_spectral.is_empty() && self.spectral_not_tile.is_empty()
    }
}

pub fn fuglede_report(group: &Group, n: usize) -> Result<FugledeReport> {
    require_divisor(group, n)?;
    let items = anchored_subsets(group, n)?
        .into_iter()
        .map(|s| classify(&s).map(|c| (s, c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FugledeReport::from_classified(group, n, &items))
}
