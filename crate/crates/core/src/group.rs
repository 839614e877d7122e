//! Finite abelian groups as ordered products of cyclic factors.
//!
//! Elements are enumerated in lexicographic order of their coordinate tuples
//! (last coordinate varies fastest), and that enumeration index is what the
//! rest of the crate uses to address functions and sets on the group.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedMul, One, Zero};

use crate::error::{invalid, Error, Result};

/// Exact rational numbers, used for Haar weights and covolumes.
pub type Rational = Ratio<i64>;

/// Which side of the duality a function or subgroup lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Side {
    Primal,
    Dual,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Primal => Side::Dual,
            Side::Dual => Side::Primal,
        }
    }
}

/// `Z_{n_1} x ... x Z_{n_k}`, stored exactly as given.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Group {
    factors: Vec<u64>,
    strides: Vec<usize>,
    order: u64,
    exponent: u64,
}

/// A group element: one residue per cyclic factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Element(pub Vec<u64>);

/// A character of the group, indexed by the same residue tuples as elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Character(pub Vec<u64>);

impl Element {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

impl Character {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

impl From<Element> for Character {
    fn from(e: Element) -> Self {
        Character(e.0)
    }
}

impl From<Character> for Element {
    fn from(c: Character) -> Self {
        Element(c.0)
    }
}

/// The unit complex number `exp(2 pi i t / L)` held as the exact fraction
/// `t / L` reduced mod 1.
#[derive(Clone, Copy, Debug)]
pub struct Phase {
    numerator: u64,
    denominator: u64,
}

impl Phase {
    pub fn new(numerator: u64, denominator: u64) -> Phase {
        assert!(denominator > 0, "phase denominator must be positive");
        Phase {
            numerator: numerator % denominator,
            denominator,
        }
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    /// The fraction `t / L` as an exact rational in `[0, 1)`.
    pub fn turns(&self) -> Rational {
        Rational::new(self.numerator as i64, self.denominator as i64)
    }

    pub fn to_complex(&self) -> Complex64 {
        root_of_unity(self.numerator, self.denominator)
    }
}

impl PartialEq for Phase {
    fn eq(&self, other: &Phase) -> bool {
        (self.numerator as u128) * (other.denominator as u128)
            == (other.numerator as u128) * (self.denominator as u128)
    }
}

impl Eq for Phase {}

/// `exp(2 pi i e / n)`, with the exponent reduced before the trig call.
pub fn root_of_unity(e: u64, n: u64) -> Complex64 {
    let e = e % n;
    if e == 0 {
        return Complex64::new(1.0, 0.0);
    }
    // exact quarter turns
    if (4 * e).is_multiple_of(n) {
        return match 4 * e / n {
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let angle = 2.0 * core::f64::consts::PI * (e as f64) / (n as f64);
    let (s, c) = libm::sincos(angle);
    Complex64::new(c, s)
}

/// Haar weights on `G` and on its dual. The dual weight is chosen so that
/// the Fourier transform is an isometry: `w_dual = 1 / (w_G |G|)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasureConvention {
    pub group_weight: Rational,
    pub dual_weight: Rational,
}

impl MeasureConvention {
    /// Counting measure on `G`.
    pub fn counting(group: &Group) -> MeasureConvention {
        haar_weights(group, Rational::one()).expect("unit weight is positive")
    }

    pub fn weight(&self, side: Side) -> Rational {
        match side {
            Side::Primal => self.group_weight,
            Side::Dual => self.dual_weight,
        }
    }
}

/// Builds the Plancherel-consistent measure pair for a given point mass on `G`.
pub fn haar_weights(group: &Group, group_weight: Rational) -> Result<MeasureConvention> {
    if group_weight <= Rational::zero() {
        return invalid("Haar weight must be positive");
    }
    let order = i64::try_from(group.order()).map_err(|_| Error::Overflow("haar_weights"))?;
    let denom = group_weight
        .checked_mul(&Rational::from_integer(order))
        .ok_or(Error::Overflow("haar_weights"))?;
    Ok(MeasureConvention {
        group_weight,
        dual_weight: denom.recip(),
    })
}

impl Group {
    /// Builds `Z_{n_1} x ... x Z_{n_k}`. Factors are kept in the given order.
    pub fn new(factors: &[i64]) -> Result<Group> {
        let mut fs = Vec::with_capacity(factors.len());
        for (j, &n) in factors.iter().enumerate() {
            if n < 1 {
                return invalid(alloc::format!("factor {j} is {n}, expected >= 1"));
            }
            fs.push(n as u64);
        }
        Group::from_moduli(fs)
    }

    pub fn cyclic(n: u64) -> Result<Group> {
        Group::from_moduli(alloc::vec![n])
    }

    pub fn from_moduli(factors: Vec<u64>) -> Result<Group> {
        let mut order: u64 = 1;
        let mut exponent: u64 = 1;
        for (j, &n) in factors.iter().enumerate() {
            if n == 0 {
                return invalid(alloc::format!("factor {j} is 0, expected >= 1"));
            }
            order = order.checked_mul(n).ok_or(Error::Overflow("group order"))?;
            exponent = exponent.lcm(&n);
        }
        usize::try_from(order).map_err(|_| Error::Overflow("group order"))?;
        let mut strides = alloc::vec![1usize; factors.len()];
        for j in (0..factors.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * factors[j + 1] as usize;
        }
        Ok(Group {
            factors,
            strides,
            order,
            exponent,
        })
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `|G|` as an index bound.
    pub fn size(&self) -> usize {
        self.order as usize
    }

    /// `lcm(n_1, ..., n_k)`; every phase has a denominator dividing it.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn zero(&self) -> Element {
        Element(alloc::vec![0; self.rank()])
    }

    /// Validates a coordinate tuple without reducing it.
    pub fn element(&self, coords: &[u64]) -> Result<Element> {
        self.validate(coords)?;
        Ok(Element(coords.to_vec()))
    }

    pub fn character(&self, coords: &[u64]) -> Result<Character> {
        self.validate(coords)?;
        Ok(Character(coords.to_vec()))
    }

    /// Reduces arbitrary integers coordinate-wise mod `n_j`.
    pub fn reduce(&self, coords: &[i64]) -> Result<Element> {
        if coords.len() != self.rank() {
            return invalid(alloc::format!(
                "expected {} coordinates, got {}",
                self.rank(),
                coords.len()
            ));
        }
        Ok(Element(
            coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as u64)
                .collect(),
        ))
    }

    fn validate(&self, coords: &[u64]) -> Result<()> {
        if coords.len() != self.rank() {
            return invalid(alloc::format!(
                "expected {} coordinates, got {}",
                self.rank(),
                coords.len()
            ));
        }
        for (j, (&c, &n)) in coords.iter().zip(&self.factors).enumerate() {
            if c >= n {
                return invalid(alloc::format!(
                    "coordinate {j} is {c}, out of range for factor {n}"
                ));
            }
        }
        Ok(())
    }

    pub fn index_of(&self, coords: &[u64]) -> usize {
        coords
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c as usize * s)
            .sum()
    }

    pub fn element_at(&self, index: usize) -> Element {
        Element(self.coords_at(index))
    }

    pub fn character_at(&self, index: usize) -> Character {
        Character(self.coords_at(index))
    }

    fn coords_at(&self, index: usize) -> Vec<u64> {
        debug_assert!(index < self.size());
        self.strides
            .iter()
            .zip(&self.factors)
            .map(|(&s, &n)| ((index / s) as u64) % n)
            .collect()
    }

    /// All elements in enumeration order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.size()).map(move |i| self.element_at(i))
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        Element(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((&x, &y), &n)| (x + y) % n)
                .collect(),
        )
    }

    pub fn neg(&self, a: &Element) -> Element {
        Element(
            a.0.iter()
                .zip(&self.factors)
                .map(|(&x, &n)| (n - x) % n)
                .collect(),
        )
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        self.add(a, &self.neg(b))
    }

    /// Addition on enumeration indices.
    pub fn add_index(&self, a: usize, b: usize) -> usize {
        let mut out = 0;
        for (&s, &n) in self.strides.iter().zip(&self.factors) {
            let n = n as usize;
            let x = (a / s) % n;
            let y = (b / s) % n;
            out += ((x + y) % n) * s;
        }
        out
    }

    pub fn neg_index(&self, a: usize) -> usize {
        let mut out = 0;
        for (&s, &n) in self.strides.iter().zip(&self.factors) {
            let n = n as usize;
            let x = (a / s) % n;
            out += ((n - x) % n) * s;
        }
        out
    }

    pub fn sub_index(&self, a: usize, b: usize) -> usize {
        let mut out = 0;
        for (&s, &n) in self.strides.iter().zip(&self.factors) {
            let n = n as usize;
            let x = (a / s) % n;
            let y = (b / s) % n;
            out += ((x + n - y) % n) * s;
        }
        out
    }

    /// Character pairing `<chi, g> = t / L` with `t = sum_j (L/n_j) chi_j g_j mod L`.
    pub fn pair(&self, chi: &Character, g: &Element) -> Result<Phase> {
        self.validate(&chi.0)?;
        self.validate(&g.0)?;
        let l = self.exponent as u128;
        let t = chi
            .0
            .iter()
            .zip(&g.0)
            .zip(&self.factors)
            .fold(0u128, |acc, ((&x, &y), &n)| {
                (acc + (self.exponent / n) as u128 * (x as u128 * y as u128 % n as u128)) % l
            });
        Ok(Phase::new(t as u64, self.exponent))
    }

    /// The pairing exponent `t` in `0..L` for enumeration indices.
    pub fn pair_exponent(&self, chi: usize, g: usize) -> u64 {
        let mut t = 0u64;
        for (&s, &n) in self.strides.iter().zip(&self.factors) {
            let x = ((chi / s) as u64) % n;
            let y = ((g / s) as u64) % n;
            t = (t + (self.exponent / n) * ((x * y) % n)) % self.exponent;
        }
        t
    }

    /// Every ordered factor list (factors >= 2) with product at most
    /// `max_order`, plus the trivial group `[1]`. Sorted by order, then
    /// lexicographically.
    pub fn all_up_to(max_order: u64) -> Vec<Group> {
        fn rec(rest: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
            if rest == 1 {
                out.push(prefix.clone());
                return;
            }
            for d in 2..=rest {
                if rest.is_multiple_of(d) {
                    prefix.push(d);
                    rec(rest / d, prefix, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        if max_order >= 1 {
            out.push(Group::from_moduli(alloc::vec![1]).expect("trivial group"));
        }
        for n in 2..=max_order {
            let mut lists = Vec::new();
            rec(n, &mut Vec::new(), &mut lists);
            lists.sort();
            out.extend(
                lists
                    .into_iter()
                    .map(|f| Group::from_moduli(f).expect("valid factors")),
            );
        }
        out
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, n) in self.factors.iter().enumerate() {
            if j > 0 {
                f.write_str("x")?;
            }
            write!(f, "Z{n}")?;
        }
        Ok(())
    }
}

/// Parses the literal grammar `Z<n>(x Z<n>)*`, e.g. `Z4xZ3`.
impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Group> {
        let mut factors = Vec::new();
        for (j, part) in s.split(['x', 'X']).enumerate() {
            let part = part.trim();
            let digits = part.strip_prefix('Z').ok_or_else(|| {
                Error::InvalidArgument(alloc::format!(
                    "group literal {s:?}: factor {j} must look like Z<n>"
                ))
            })?;
            let n: i64 = digits.parse().map_err(|_| {
                Error::InvalidArgument(alloc::format!(
                    "group literal {s:?}: bad modulus {digits:?}"
                ))
            })?;
            factors.push(n);
        }
        Group::new(&factors)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn make_group_examples() {
        let g = Group::new(&[4]).unwrap();
        assert_eq!((g.order(), g.exponent()), (4, 4));
        let g = Group::new(&[2, 3]).unwrap();
        assert_eq!((g.order(), g.exponent()), (6, 6));
        let g = Group::new(&[4, 3]).unwrap();
        assert_eq!((g.order(), g.exponent()), (12, 12));
        assert_eq!(g.factors(), &[4, 3]);
    }

    #[test]
    fn make_group_rejects_nonpositive() {
        assert!(matches!(
            Group::new(&[4, 0]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(Group::new(&[-2]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn literal_roundtrip() {
        let g: Group = "Z4xZ3".parse().unwrap();
        assert_eq!(g.factors(), &[4, 3]);
        assert_eq!(g.to_string(), "Z4xZ3");
        let g: Group = "Z2 x Z2".parse().unwrap();
        assert_eq!(g.factors(), &[2, 2]);
        assert!("Z4x3".parse::<Group>().is_err());
        assert!("Z0".parse::<Group>().is_err());
        assert!("".parse::<Group>().is_err());
    }

    #[test]
    fn pair_examples() {
        let g = Group::new(&[4, 3]).unwrap();
        let chi = g.character(&[1, 1]).unwrap();
        let x = g.element(&[2, 1]).unwrap();
        let p = g.pair(&chi, &x).unwrap();
        assert_eq!((p.numerator(), p.denominator()), (10, 12));

        let z = g.pair(&g.character(&[0, 0]).unwrap(), &x).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.denominator(), 12);
        let z = g.pair(&chi, &g.zero()).unwrap();
        assert!(z.is_zero());

        let c4 = Group::new(&[4]).unwrap();
        let p = c4.pair(&Character(vec![2]), &Element(vec![1])).unwrap();
        assert_eq!(p, Phase::new(2, 4));
        let v = p.to_complex();
        assert_eq!((v.re, v.im), (-1.0, 0.0));
    }

    #[test]
    fn pair_rejects_mismatch() {
        let g = Group::new(&[4, 3]).unwrap();
        assert!(g.pair(&Character(vec![1]), &Element(vec![0, 0])).is_err());
        assert!(g
            .pair(&Character(vec![1, 3]), &Element(vec![0, 0]))
            .is_err());
    }

    #[test]
    fn haar_weight_examples() {
        let r = Rational::new;
        let g4 = Group::new(&[4]).unwrap();
        assert_eq!(haar_weights(&g4, r(1, 1)).unwrap().dual_weight, r(1, 4));
        let g6 = Group::new(&[2, 3]).unwrap();
        assert_eq!(haar_weights(&g6, r(1, 1)).unwrap().dual_weight, r(1, 6));
        assert_eq!(haar_weights(&g4, r(1, 4)).unwrap().dual_weight, r(1, 1));
        assert!(haar_weights(&g4, r(0, 1)).is_err());
        assert!(haar_weights(&g4, r(-1, 2)).is_err());
    }

    #[test]
    fn index_arithmetic_matches_tuples() {
        let g = Group::new(&[4, 3, 2]).unwrap();
        for a in 0..g.size() {
            let ea = g.element_at(a);
            assert_eq!(g.index_of(ea.coords()), a);
            assert_eq!(g.element_at(g.neg_index(a)), g.neg(&ea));
            for b in 0..g.size() {
                let eb = g.element_at(b);
                assert_eq!(g.element_at(g.add_index(a, b)), g.add(&ea, &eb));
                assert_eq!(g.element_at(g.sub_index(a, b)), g.sub(&ea, &eb));
                let p = g.pair(&Character(ea.0.clone()), &eb).unwrap();
                assert_eq!(p.numerator(), g.pair_exponent(a, b));
            }
        }
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let g = Group::new(&[2, 3]).unwrap();
        let all: Vec<_> = g.elements().collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        assert_eq!(all.len(), 6);
    }

    #[test]
    fn factor_lists_up_to_six() {
        let lists: Vec<Vec<u64>> = Group::all_up_to(6)
            .iter()
            .map(|g| g.factors().to_vec())
            .collect();
        assert_eq!(
            lists,
            vec![
                vec![1],
                vec![2],
                vec![3],
                vec![2, 2],
                vec![4],
                vec![5],
                vec![2, 3],
                vec![3, 2],
                vec![6],
            ]
        );
    }

    // exhaustive bilinearity and separation on every group up to order 24
    #[test]
    fn pairing_bilinear_and_separating() {
        for g in Group::all_up_to(24) {
            let n = g.size();
            for chi in 0..n {
                for a in 0..n {
                    let ta = g.pair_exponent(chi, a);
                    for b in 0..n {
                        let tb = g.pair_exponent(chi, b);
                        assert_eq!(
                            g.pair_exponent(chi, g.add_index(a, b)),
                            (ta + tb) % g.exponent(),
                            "{g} chi={chi} a={a} b={b}"
                        );
                    }
                }
            }
            for x in 1..n {
                assert!((0..n).any(|chi| g.pair_exponent(chi, x) != 0), "{g} x={x}");
            }
        }
    }
}
