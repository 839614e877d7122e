//! Subgroups ("lattices" of a finite group), their annihilators, fundamental
//! domains and covolumes, plus the reduction of `Z^d` lattice tilings to a
//! finite quotient group.
//!
//! A subgroup `H <= G` is stored through its lift to `Z^k`: the lattice
//! spanned by the generators together with `diag(n_1, ..., n_k)`. That lift is
//! kept in column Hermite normal form (lower triangular, positive diagonal,
//! entries left of the diagonal reduced modulo it), which is a canonical key
//! for the subgroup and gives membership by back-substitution.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use fixedbitset::FixedBitSet;
use num_traits::Zero;

use crate::error::{invalid, Error, Result};
use crate::group::{Element, Group, MeasureConvention, Rational, Side};
use crate::snf::{smith_normal_form, IntMatrix, Smith};

/// A subset of a finite group, stored as a bit-set over element indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetOnGroup {
    group: Group,
    members: FixedBitSet,
}

impl SetOnGroup {
    pub fn empty(group: &Group) -> SetOnGroup {
        SetOnGroup {
            group: group.clone(),
            members: FixedBitSet::with_capacity(group.size()),
        }
    }

    pub fn full(group: &Group) -> SetOnGroup {
        let mut s = SetOnGroup::empty(group);
        s.members.insert_range(..);
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(group: &Group, indices: I) -> SetOnGroup {
        let mut s = SetOnGroup::empty(group);
        for i in indices {
            s.members.insert(i);
        }
        s
    }

    /// Validates every element against the group.
    pub fn from_elements(group: &Group, elements: &[Element]) -> Result<SetOnGroup> {
        let mut s = SetOnGroup::empty(group);
        for e in elements {
            let e = group.element(e.coords())?;
            s.members.insert(group.index_of(e.coords()));
        }
        Ok(s)
    }

    pub fn from_bitset(group: &Group, members: FixedBitSet) -> SetOnGroup {
        assert_eq!(members.len(), group.size(), "bit-set length must equal |G|");
        SetOnGroup {
            group: group.clone(),
            members,
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.contains(index)
    }

    pub fn insert(&mut self, index: usize) {
        self.members.insert(index);
    }

    pub fn cardinality(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    /// Haar measure `w_G * #set`.
    pub fn measure(&self, weight: Rational) -> Rational {
        weight * Rational::from_integer(self.cardinality() as i64)
    }

    /// Member indices in increasing order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn elements(&self) -> Vec<Element> {
        self.indices().map(|i| self.group.element_at(i)).collect()
    }

    pub fn translate(&self, by: usize) -> SetOnGroup {
        SetOnGroup::from_indices(
            &self.group,
            self.indices().map(|i| self.group.add_index(i, by)),
        )
    }

    pub fn is_disjoint(&self, other: &SetOnGroup) -> bool {
        self.members.is_disjoint(&other.members)
    }
}

impl fmt::Display for SetOnGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, e) in self.elements().iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

/// A subgroup of `G` (primal side) or of the dual group (dual side).
#[derive(Clone, Debug)]
pub struct Subgroup {
    parent: Group,
    side: Side,
    generators: Vec<Element>,
    basis: IntMatrix,
    order: u64,
    index: u64,
    elements: Vec<usize>,
    members: FixedBitSet,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Subgroup) -> bool {
        self.parent == other.parent && self.side == other.side && self.basis == other.basis
    }
}

impl Eq for Subgroup {}

/// Span of `gens` in `G`.
pub fn subgroup_from_generators(group: &Group, gens: &[Element]) -> Result<Subgroup> {
    Subgroup::new(group, Side::Primal, gens)
}

impl Subgroup {
    pub fn new(group: &Group, side: Side, gens: &[Element]) -> Result<Subgroup> {
        for g in gens {
            group.element(g.coords())?;
        }
        let k = group.rank();
        let mut basis = IntMatrix::diagonal(
            &group
                .factors()
                .iter()
                .map(|&n| n as i64)
                .collect::<Vec<_>>(),
        );
        for g in gens {
            let v: Vec<i64> = g.coords().iter().map(|&c| c as i64).collect();
            hermite_insert(&mut basis, v)?;
        }
        let index: u64 = (0..k).map(|i| basis[(i, i)] as u64).product();
        let order = group.order() / index;

        let gen_idx: Vec<usize> = gens.iter().map(|g| group.index_of(g.coords())).collect();
        let mut members = FixedBitSet::with_capacity(group.size());
        let zero = 0usize;
        members.insert(zero);
        let mut queue = vec![zero];
        while let Some(x) = queue.pop() {
            for &g in &gen_idx {
                let y = group.add_index(x, g);
                if !members.put(y) {
                    queue.push(y);
                }
            }
        }
        let elements: Vec<usize> = members.ones().collect();
        debug_assert_eq!(elements.len() as u64, order);

        Ok(Subgroup {
            parent: group.clone(),
            side,
            generators: gens.to_vec(),
            basis,
            order,
            index,
            elements,
            members,
        })
    }

    pub fn trivial(group: &Group, side: Side) -> Subgroup {
        Subgroup::new(group, side, &[]).expect("no generators to validate")
    }

    pub fn whole(group: &Group, side: Side) -> Subgroup {
        let gens: Vec<Element> = (0..group.rank())
            .map(|j| {
                let mut c = vec![0u64; group.rank()];
                c[j] = 1 % group.factors()[j];
                Element(c)
            })
            .collect();
        Subgroup::new(group, side, &gens).expect("unit vectors are valid")
    }

    pub fn parent(&self) -> &Group {
        &self.parent
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    /// Column Hermite basis of the lifted relation lattice.
    pub fn canonical_basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `[G : H]`.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Member indices, sorted.
    pub fn element_indices(&self) -> &[usize] {
        &self.elements
    }

    pub fn elements(&self) -> Vec<Element> {
        self.elements
            .iter()
            .map(|&i| self.parent.element_at(i))
            .collect()
    }

    /// Table lookup membership for an element index.
    pub fn contains_index(&self, index: usize) -> bool {
        self.members.contains(index)
    }

    /// Membership by back-substitution against the Hermite basis.
    pub fn contains(&self, e: &Element) -> bool {
        if self.parent.element(e.coords()).is_err() {
            return false;
        }
        let k = self.parent.rank();
        let mut v: Vec<i128> = e.coords().iter().map(|&c| c as i128).collect();
        for i in 0..k {
            let d = self.basis[(i, i)] as i128;
            if v[i] % d != 0 {
                return false;
            }
            let c = v[i] / d;
            for r in i..k {
                v[r] -= c * self.basis[(r, i)] as i128;
            }
        }
        true
    }

    /// The lexicographically least element of `g + H`.
    pub fn coset_representative(&self, g: usize) -> usize {
        self.elements
            .iter()
            .map(|&h| self.parent.add_index(g, h))
            .min()
            .expect("subgroup contains 0")
    }

    /// Cosets ordered by their least element; each coset sorted.
    pub fn cosets(&self) -> Vec<Vec<usize>> {
        let mut seen = FixedBitSet::with_capacity(self.parent.size());
        let mut out = Vec::with_capacity(self.index as usize);
        for g in 0..self.parent.size() {
            if seen.contains(g) {
                continue;
            }
            let mut coset: Vec<usize> = self
                .elements
                .iter()
                .map(|&h| self.parent.add_index(g, h))
                .collect();
            coset.sort_unstable();
            for &x in &coset {
                seen.insert(x);
            }
            out.push(coset);
        }
        out
    }
}

/// `col_i <- s col_i + t v`, `v <- (b/g) col_i - (a/g) v` on each row in turn,
/// which keeps the span and clears `v`.
fn hermite_insert(basis: &mut IntMatrix, v: Vec<i64>) -> Result<()> {
    let k = basis.rows();
    let mut v: Vec<i128> = v.into_iter().map(i128::from).collect();
    let mut cols: Vec<Vec<i128>> = (0..k)
        .map(|j| (0..k).map(|i| basis[(i, j)] as i128).collect())
        .collect();
    for i in 0..k {
        if v[i] == 0 {
            continue;
        }
        let a = cols[i][i];
        let b = v[i];
        let (g, s, t) = xgcd(a, b);
        let (ag, bg) = (a / g, b / g);
        for r in i..k {
            let c = cols[i][r];
            let x = v[r];
            let nc = s
                .checked_mul(c)
                .zip(t.checked_mul(x))
                .and_then(|(p, q)| p.checked_add(q))
                .ok_or(Error::Overflow("hermite normal form"))?;
            let nv = bg
                .checked_mul(c)
                .zip(ag.checked_mul(x))
                .and_then(|(p, q)| p.checked_sub(q))
                .ok_or(Error::Overflow("hermite normal form"))?;
            cols[i][r] = nc;
            v[r] = nv;
        }
        debug_assert_eq!(v[i], 0);
    }
    // normalize: positive diagonal, off-diagonal entries in [0, d_i)
    for i in 0..k {
        if cols[i][i] < 0 {
            for r in i..k {
                cols[i][r] = -cols[i][r];
            }
        }
    }
    for j in 0..k {
        for i in j + 1..k {
            let d = cols[i][i];
            let q = cols[j][i].div_euclid(d);
            if q != 0 {
                for r in i..k {
                    cols[j][r] = cols[j][r]
                        .checked_sub(q * cols[i][r])
                        .ok_or(Error::Overflow("hermite normal form"))?;
                }
            }
        }
    }
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            basis[(i, j)] = i64::try_from(x).map_err(|_| Error::Overflow("hermite normal form"))?;
        }
    }
    Ok(())
}

/// Extended gcd with a positive gcd: `s a + t b = g`.
fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// `H^perp = { chi : <chi, h> = 0 for all h in H }`, on the opposite side.
///
/// With the lifted basis `B` of `H` and `D = diag(n)`, the lift of the
/// annihilator is spanned by the columns of `(B^{-1} D)^T`, which is integral
/// because `D Z^k` is contained in `B Z^k`.
pub fn annihilator(h: &Subgroup) -> Result<Subgroup> {
    let group = h.parent();
    let k = group.rank();
    let b = h.canonical_basis();
    // solve B m = n_c e_c by forward substitution, one column at a time
    let mut m = vec![vec![0i128; k]; k];
    for c in 0..k {
        let n_c = group.factors()[c] as i128;
        for i in 0..k {
            let mut rhs = if i == c { n_c } else { 0 };
            for j in 0..i {
                rhs -= b[(i, j)] as i128 * m[j][c];
            }
            let d = b[(i, i)] as i128;
            debug_assert_eq!(rhs % d, 0, "lifted lattice must contain diag(n)");
            m[i][c] = rhs / d;
        }
    }
    // generators: rows of m, reduced mod n
    let gens = m
        .iter()
        .map(|row| {
            let coords: Vec<i64> = row
                .iter()
                .map(|&x| i64::try_from(x).map_err(|_| Error::Overflow("annihilator")))
                .collect::<Result<_>>()?;
            group.reduce(&coords)
        })
        .collect::<Result<Vec<_>>>()?;
    Subgroup::new(group, h.side().opposite(), &gens)
}

/// Lexicographically least representative of every coset of `H`.
pub fn fundamental_domain(h: &Subgroup) -> SetOnGroup {
    let group = h.parent();
    let mut covered = FixedBitSet::with_capacity(group.size());
    let mut reps = SetOnGroup::empty(group);
    for g in 0..group.size() {
        if covered.contains(g) {
            continue;
        }
        reps.insert(g);
        for &x in h.element_indices() {
            covered.insert(group.add_index(g, x));
        }
    }
    reps
}

/// Haar measure of a fundamental domain: `w_side * [G : H]`.
pub fn covolume(h: &Subgroup, mc: &MeasureConvention) -> Rational {
    mc.weight(h.side()) * Rational::from_integer(h.index() as i64)
}

/// `covolume(H) * covolume(H^perp)`; equals 1 for Plancherel-consistent weights.
pub fn covolume_product(h: &Subgroup, mc: &MeasureConvention) -> Result<Rational> {
    Ok(covolume(h, mc) * covolume(&annihilator(h)?, mc))
}

/// Every subgroup of `G`, by closure of generator sets with deduplication on
/// the canonical basis. Sorted by order, then by basis.
pub fn all_subgroups(group: &Group, side: Side) -> Vec<Subgroup> {
    let mut seen: BTreeSet<Vec<Vec<i64>>> = BTreeSet::new();
    let mut frontier = vec![Subgroup::trivial(group, side)];
    seen.insert(frontier[0].canonical_basis().to_rows());
    let mut all = frontier.clone();
    while let Some(h) = frontier.pop() {
        for g in 0..group.size() {
            if h.contains_index(g) {
                continue;
            }
            let mut gens = h.generators().to_vec();
            gens.push(group.element_at(g));
            let bigger = Subgroup::new(group, side, &gens).expect("elements of G are valid");
            if seen.insert(bigger.canonical_basis().to_rows()) {
                all.push(bigger.clone());
                frontier.push(bigger);
            }
        }
    }
    all.sort_by(|a, b| {
        a.order().cmp(&b.order()).then_with(|| {
            a.canonical_basis()
                .to_rows()
                .cmp(&b.canonical_basis().to_rows())
        })
    });
    all
}

/// Image of a finite set `Omega` of `Z^d` in `Z^d / A Z^d`.
#[derive(Clone, Debug)]
pub struct ZdReduction {
    pub smith: Smith,
    pub group: Group,
    pub image: SetOnGroup,
    /// How many points of `Omega` land on each element (enumeration order).
    pub multiplicity: Vec<u64>,
}

impl ZdReduction {
    /// `Omega` tiles `Z^d` by `A Z^d` iff every element is hit exactly once.
    pub fn tiles(&self) -> bool {
        self.multiplicity.iter().all(|&m| m == 1)
    }
}

/// With `U A V = D`, `x` and `y` lie in the same coset of `A Z^d` iff
/// `U x = U y (mod D)`, so `x -> U x mod D` identifies `Z^d / A Z^d` with
/// `Z_{d_1} x ... x Z_{d_d}`.
pub fn reduce_zd(a: &IntMatrix, omega: &[Vec<i64>]) -> Result<ZdReduction> {
    let d = a.rows();
    if a.cols() != d {
        return invalid("lattice matrix must be square");
    }
    let smith = smith_normal_form(a)?;
    let invariants = smith.invariants();
    if invariants.iter().any(Zero::is_zero) {
        return invalid("lattice matrix is singular");
    }
    let group = Group::new(&invariants)?;
    let mut multiplicity = vec![0u64; group.size()];
    let mut image = SetOnGroup::empty(&group);
    for (p, x) in omega.iter().enumerate() {
        if x.len() != d {
            return invalid(alloc::format!(
                "omega[{p}] has {} coordinates, expected {d}",
                x.len()
            ));
        }
        let ux = smith.u.apply(x)?;
        let e = group.reduce(&ux)?;
        let i = group.index_of(e.coords());
        multiplicity[i] += 1;
        image.insert(i);
    }
    Ok(ZdReduction {
        smith,
        group,
        image,
        multiplicity,
    })
}
