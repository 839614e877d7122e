//! Functions on a finite abelian group and on its dual, the group Fourier
//! transform, convolution, periodization, and the Weil and Poisson identities.
//!
//! With Haar weights `w_G` and `w_dual = 1/(w_G |G|)`:
//!
//! ```text
//! F(f)(chi) = w_G      sum_g   f(g)   conj<chi, g>
//! f(g)      = w_dual   sum_chi F(chi) <chi, g>
//! ```

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{CheckedAdd, ToPrimitive, Zero};

use crate::cyclotomic::{CyclotomicInt, CyclotomicRing};
use crate::error::{invalid, Error, Result};
use crate::fft::{transform, Direction};
use crate::group::{Character, Element, Group, MeasureConvention, Rational, Side};
use crate::lattice::{annihilator, covolume, fundamental_domain, SetOnGroup, Subgroup};

pub(crate) fn to_f64(r: Rational) -> f64 {
    r.to_f64().expect("rational weights are finite")
}

/// A complex-valued function on `G` (primal) or on the dual group (dual),
/// stored densely in element enumeration order.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionOnGroup {
    group: Group,
    side: Side,
    values: Vec<Complex64>,
    mc: MeasureConvention,
}

impl FunctionOnGroup {
    pub fn new(
        group: &Group,
        side: Side,
        values: Vec<Complex64>,
        mc: MeasureConvention,
    ) -> Result<Self> {
        if values.len() != group.size() {
            return invalid(alloc::format!(
                "function has {} values, group has {} elements",
                values.len(),
                group.size()
            ));
        }
        Ok(FunctionOnGroup {
            group: group.clone(),
            side,
            values,
            mc,
        })
    }

    pub fn zeros(group: &Group, side: Side, mc: MeasureConvention) -> Self {
        FunctionOnGroup {
            group: group.clone(),
            side,
            values: vec![Complex64::zero(); group.size()],
            mc,
        }
    }

    pub fn delta(group: &Group, at: usize, mc: MeasureConvention) -> Self {
        let mut f = FunctionOnGroup::zeros(group, Side::Primal, mc);
        f.values[at] = Complex64::new(1.0, 0.0);
        f
    }

    /// `1_Omega` on the primal side.
    pub fn indicator(set: &SetOnGroup, mc: MeasureConvention) -> Self {
        let mut f = FunctionOnGroup::zeros(set.group(), Side::Primal, mc);
        for i in set.indices() {
            f.values[i] = Complex64::new(1.0, 0.0);
        }
        f
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn measure(&self) -> &MeasureConvention {
        &self.mc
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    fn weight(&self) -> f64 {
        to_f64(self.mc.weight(self.side))
    }

    /// `||f||^2` with the Haar weight of the function's side.
    pub fn norm_sqr(&self) -> f64 {
        self.weight() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// `<f, h> = w sum f conj(h)`.
    pub fn inner(&self, other: &FunctionOnGroup) -> Result<Complex64> {
        self.same_space(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            * self.weight())
    }

    pub fn scale(&self, k: Complex64) -> FunctionOnGroup {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= k);
        out
    }

    /// Pointwise product.
    pub fn mul(&self, other: &FunctionOnGroup) -> Result<FunctionOnGroup> {
        self.same_space(other)?;
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a *= b;
        }
        Ok(out)
    }

    /// `(T_l f)(g) = f(g - l)`.
    pub fn translate(&self, by: usize) -> FunctionOnGroup {
        let mut out = self.clone();
        for g in 0..self.group.size() {
            out.values[g] = self.values[self.group.sub_index(g, by)];
        }
        out
    }

    fn same_space(&self, other: &FunctionOnGroup) -> Result<()> {
        if self.group != other.group {
            return invalid("functions live on different groups");
        }
        if self.side != other.side {
            return invalid("functions live on different sides of the duality");
        }
        Ok(())
    }

    fn shape(&self) -> Vec<usize> {
        self.group.factors().iter().map(|&n| n as usize).collect()
    }
}

/// Group Fourier transform `G -> dual`.
pub fn dft(f: &FunctionOnGroup) -> Result<FunctionOnGroup> {
    if f.side != Side::Primal {
        return invalid("dft expects a function on the primal side");
    }
    let mut values = f.values.clone();
    transform(&mut values, &f.shape(), Direction::Forward);
    let w = to_f64(f.mc.group_weight);
    values.iter_mut().for_each(|v| *v *= w);
    Ok(FunctionOnGroup {
        group: f.group.clone(),
        side: Side::Dual,
        values,
        mc: f.mc,
    })
}

/// Inverse transform `dual -> G`.
pub fn idft(f: &FunctionOnGroup) -> Result<FunctionOnGroup> {
    if f.side != Side::Dual {
        return invalid("idft expects a function on the dual side");
    }
    let mut values = f.values.clone();
    transform(&mut values, &f.shape(), Direction::Inverse);
    let w = to_f64(f.mc.dual_weight);
    values.iter_mut().for_each(|v| *v *= w);
    Ok(FunctionOnGroup {
        group: f.group.clone(),
        side: Side::Primal,
        values,
        mc: f.mc,
    })
}

/// `(f * h)(g) = w sum_{g1} f(g1) h(g - g1)`, evaluated directly.
pub fn convolve(f: &FunctionOnGroup, h: &FunctionOnGroup) -> Result<FunctionOnGroup> {
    f.same_space(h)?;
    let group = &f.group;
    let w = f.weight();
    let mut out = FunctionOnGroup::zeros(group, f.side, f.mc);
    for g in 0..group.size() {
        let mut acc = Complex64::zero();
        for (g1, &a) in f.values.iter().enumerate() {
            if a != Complex64::zero() {
                acc += a * h.values[group.sub_index(g, g1)];
            }
        }
        out.values[g] = acc * w;
    }
    Ok(out)
}

/// `f~(g) = conj f(-g)`.
pub fn involution(f: &FunctionOnGroup) -> FunctionOnGroup {
    let mut out = f.clone();
    for g in 0..f.group.size() {
        out.values[g] = f.values[f.group.neg_index(g)].conj();
    }
    out
}

/// `sum_{g in Omega} zeta_L^{t(chi, g)}` as an exact cyclotomic integer.
pub fn character_sum(omega: &SetOnGroup, chi: usize) -> CyclotomicInt {
    let group = omega.group();
    CyclotomicInt::from_exponents(
        group.exponent(),
        omega.indices().map(|g| group.pair_exponent(chi, g)),
    )
}

/// Exact decision of `sum_{g in Omega} <chi, g> == 0`.
pub fn exact_sum_is_zero(omega: &SetOnGroup, chi: &Character) -> Result<bool> {
    let group = omega.group();
    let chi = group.character(chi.coords())?;
    let x = character_sum(omega, group.index_of(chi.coords()));
    Ok(CyclotomicRing::new(group.exponent()).is_zero(&x))
}

/// `Phi(g + H) = sum_{h in H} f(g + h)` at the canonical coset representatives.
#[derive(Clone, Debug, PartialEq)]
pub struct Periodization {
    pub representatives: Vec<usize>,
    pub values: Vec<Complex64>,
}

pub fn periodize(f: &FunctionOnGroup, h: &Subgroup) -> Result<Periodization> {
    periodize_on(f, h, &fundamental_domain(h))
}

/// Periodization evaluated on an arbitrary cross section.
pub fn periodize_on(
    f: &FunctionOnGroup,
    h: &Subgroup,
    cross_section: &SetOnGroup,
) -> Result<Periodization> {
    if f.side != Side::Primal || h.side() != Side::Primal {
        return invalid("periodization expects primal function and subgroup");
    }
    if f.group != *h.parent() {
        return invalid("function and subgroup live on different groups");
    }
    let group = &f.group;
    let representatives: Vec<usize> = cross_section.indices().collect();
    let values = representatives
        .iter()
        .map(|&g| {
            h.element_indices()
                .iter()
                .map(|&l| f.values[group.add_index(g, l)])
                .sum()
        })
        .collect();
    Ok(Periodization {
        representatives,
        values,
    })
}

/// Both sides of the Weil formula
/// `int_G f = |Q_H| int_{G/H} sum_{h in H} f(g + h) d(g+H)`
/// with the normalized quotient measure (mass `1/[G:H]` per coset).
pub fn weil_check(f: &FunctionOnGroup, h: &Subgroup) -> Result<(Complex64, Complex64)> {
    let p = periodize(f, h)?;
    let lhs = f.values.iter().sum::<Complex64>() * to_f64(f.mc.group_weight);
    let covol = to_f64(covolume(h, &f.mc));
    let rhs = p.values.iter().sum::<Complex64>() * (covol / h.index() as f64);
    Ok((lhs, rhs))
}

/// Weil formula in exact rational arithmetic.
pub fn weil_check_exact(
    group: &Group,
    values: &[Rational],
    h: &Subgroup,
    mc: &MeasureConvention,
) -> Result<(Rational, Rational)> {
    if values.len() != group.size() || group != h.parent() {
        return invalid("values and subgroup must live on the same group");
    }
    fn checked_sum(it: impl Iterator<Item = Rational>) -> Result<Rational> {
        let mut acc = Rational::zero();
        for x in it {
            acc = acc
                .checked_add(&x)
                .ok_or(Error::Overflow("weil_check_exact"))?;
        }
        Ok(acc)
    }
    let total = checked_sum(values.iter().copied())?;
    let lhs = mc.group_weight * total;
    let reps: Vec<usize> = fundamental_domain(h).indices().collect();
    let mut per = Vec::with_capacity(reps.len());
    for &g in &reps {
        per.push(checked_sum(
            &mut h
                .element_indices()
                .iter()
                .map(|&l| values[group.add_index(g, l)]),
        )?);
    }
    let quotient = checked_sum(per.into_iter())?;
    let rhs = covolume(h, mc) * Rational::new(1, h.index() as i64) * quotient;
    Ok((lhs, rhs))
}

/// Both sides of Poisson summation at `g`:
/// `sum_{h in H} f(g + h) = |Q_H|^{-1} sum_{chi in H^perp} F(f)(chi) <chi, g>`.
pub fn poisson_check(
    f: &FunctionOnGroup,
    h: &Subgroup,
    g: &Element,
) -> Result<(Complex64, Complex64)> {
    let group = f.group.clone();
    let g = group.element(g.coords())?;
    let sides = poisson_sides(f, h)?;
    Ok(sides[group.index_of(g.coords())])
}

/// Poisson summation at every `g`, in element order, sharing one transform.
pub fn poisson_sides(f: &FunctionOnGroup, h: &Subgroup) -> Result<Vec<(Complex64, Complex64)>> {
    if f.side != Side::Primal || h.side() != Side::Primal {
        return invalid("poisson_check expects primal function and subgroup");
    }
    if f.group != *h.parent() {
        return invalid("function and subgroup live on different groups");
    }
    let group = &f.group;
    let spectrum = dft(f)?;
    let perp = annihilator(h)?;
    let inv_covol = 1.0 / to_f64(covolume(h, &f.mc));
    let l = group.exponent();
    Ok((0..group.size())
        .map(|g| {
            let lhs: Complex64 = h
                .element_indices()
                .iter()
                .map(|&x| f.values[group.add_index(g, x)])
                .sum();
            let rhs: Complex64 = perp
                .element_indices()
                .iter()
                .map(|&chi| {
                    spectrum.values[chi]
                        * crate::group::root_of_unity(group.pair_exponent(chi, g), l)
                })
                .sum::<Complex64>()
                * inv_covol;
            (lhs, rhs)
        })
        .collect())
}

/// An identity `lhs == rhs` between cyclotomic integers, both sides
/// multiplied by a common positive integer to clear denominators.
#[derive(Clone, Debug)]
pub struct ExactIdentity {
    pub lhs: CyclotomicInt,
    pub rhs: CyclotomicInt,
    pub common_factor: i64,
}

impl ExactIdentity {
    pub fn holds(&self) -> bool {
        CyclotomicRing::new(self.lhs.order()).is_zero(&(&self.lhs - &self.rhs))
    }
}

/// Poisson summation at `g` in exact arithmetic for rational-valued `f`.
///
/// Both sides are multiplied by `[G:H]` times the common denominator of the
/// values; the Haar weight cancels.
pub fn poisson_check_exact(
    group: &Group,
    values: &[Rational],
    h: &Subgroup,
    g: &Element,
) -> Result<ExactIdentity> {
    if values.len() != group.size() || group != h.parent() || h.side() != Side::Primal {
        return invalid("values and primal subgroup must live on the same group");
    }
    let g = group.index_of(group.element(g.coords())?.coords());
    let denom = values
        .iter()
        .try_fold(1i64, |acc, v| {
            let d = *v.denom();
            acc.checked_mul(d / num_integer::gcd(acc, d))
        })
        .ok_or(Error::Overflow("poisson_check_exact"))?;
    let ints: Vec<i64> = values
        .iter()
        .map(|v| (v * Rational::from_integer(denom)).to_integer())
        .collect();
    let l = group.exponent();
    let index = h.index() as i64;

    let mut lhs = CyclotomicInt::zero(l);
    for &x in h.element_indices() {
        lhs.add_term(0, ints[group.add_index(g, x)]);
    }
    let lhs = lhs.scale(index);

    let perp = annihilator(h)?;
    let mut rhs = CyclotomicInt::zero(l);
    for &chi in perp.element_indices() {
        let tg = group.pair_exponent(chi, g);
        for (x, &c) in ints.iter().enumerate() {
            if c != 0 {
                rhs.add_term(tg + l - group.pair_exponent(chi, x), c);
            }
        }
    }
    Ok(ExactIdentity {
        lhs,
        rhs,
        common_factor: index * denom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::haar_weights;
    use crate::lattice::subgroup_from_generators;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn z4() -> Group {
        Group::new(&[4]).unwrap()
    }

    #[test]
    fn dft_of_delta_is_constant() {
        let g = z4();
        let mc = MeasureConvention::counting(&g);
        let f = dft(&FunctionOnGroup::delta(&g, 0, mc)).unwrap();
        assert_eq!(f.side(), Side::Dual);
        assert!(f.values().iter().all(|v| close(*v, c(1.0, 0.0), 1e-15)));
    }

    #[test]
    fn dft_of_indicator_matches_direct_sum() {
        let g = z4();
        let mc = MeasureConvention::counting(&g);
        let omega = SetOnGroup::from_indices(&g, [0, 1]);
        let f = dft(&FunctionOnGroup::indicator(&omega, mc)).unwrap();
        let want = [c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.0), c(1.0, 1.0)];
        for (a, b) in f.values().iter().zip(want) {
            assert!(close(*a, b, 1e-14), "{a} vs {b}");
        }
    }

    #[test]
    fn dft_of_constant_is_scaled_delta() {
        for n in [1u64, 5, 6, 7] {
            let g = Group::cyclic(n).unwrap();
            let mc = MeasureConvention::counting(&g);
            let one =
                FunctionOnGroup::new(&g, Side::Primal, vec![c(1.0, 0.0); n as usize], mc).unwrap();
            let f = dft(&one).unwrap();
            assert!(close(f.values()[0], c(n as f64, 0.0), 1e-12));
            assert!(f.values()[1..].iter().all(|v| v.norm() < 1e-12));
        }
    }

    #[test]
    fn side_mismatch_is_rejected() {
        let g = z4();
        let mc = MeasureConvention::counting(&g);
        let f = dft(&FunctionOnGroup::delta(&g, 0, mc)).unwrap();
        assert!(dft(&f).is_err());
        assert!(idft(&FunctionOnGroup::delta(&g, 0, mc)).is_err());
        assert!(convolve(&f, &FunctionOnGroup::delta(&g, 0, mc)).is_err());
    }

    #[test]
    fn convolution_examples() {
        let g = z4();
        let mc = MeasureConvention::counting(&g);
        let h = FunctionOnGroup::new(
            &g,
            Side::Primal,
            vec![c(1.0, 2.0), c(0.5, 0.0), c(-1.0, 1.0), c(0.0, 3.0)],
            mc,
        )
        .unwrap();
        let d = FunctionOnGroup::delta(&g, 0, mc);
        assert_eq!(convolve(&d, &h).unwrap(), h);
        assert_eq!(involution(&involution(&h)), h);

        let f = FunctionOnGroup::indicator(&SetOnGroup::from_indices(&g, [0, 1]), mc);
        let auto = convolve(&f, &involution(&f)).unwrap();
        let want = [2.0, 1.0, 0.0, 1.0];
        for (a, w) in auto.values().iter().zip(want) {
            assert!(close(*a, c(w, 0.0), 1e-15));
        }
    }

    #[test]
    fn exact_sum_examples() {
        let g = z4();
        let omega = SetOnGroup::from_indices(&g, [0, 1]);
        assert!(exact_sum_is_zero(&omega, &Character(vec![2])).unwrap());
        assert!(!exact_sum_is_zero(&omega, &Character(vec![1])).unwrap());
        assert!(!exact_sum_is_zero(&omega, &Character(vec![0])).unwrap());
        assert!(exact_sum_is_zero(&omega, &Character(vec![4])).is_err());
    }

    #[test]
    fn weil_examples() {
        let g = z4();
        let mc = MeasureConvention::counting(&g);
        let h = subgroup_from_generators(&g, &[Element(vec![2])]).unwrap();
        let one = FunctionOnGroup::new(&g, Side::Primal, vec![c(1.0, 0.0); 4], mc).unwrap();
        let p = periodize(&one, &h).unwrap();
        assert_eq!(p.representatives, vec![0, 1]);
        assert!(p.values.iter().all(|v| close(*v, c(2.0, 0.0), 0.0)));
        let (lhs, rhs) = weil_check(&one, &h).unwrap();
        assert_eq!((lhs, rhs), (c(4.0, 0.0), c(4.0, 0.0)));

        let d = FunctionOnGroup::delta(&g, 0, mc);
        let p = periodize(&d, &h).unwrap();
        assert_eq!(p.values, vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let (lhs, rhs) = weil_check(&d, &h).unwrap();
        assert_eq!((lhs, rhs), (c(1.0, 0.0), c(1.0, 0.0)));
    }

    #[test]
    fn weil_on_z12_direct_sum() {
        let g = Group::cyclic(12).unwrap();
        let mc = haar_weights(&g, Rational::new(7, 3)).unwrap();
        let h = subgroup_from_generators(&g, &[Element(vec![4])]).unwrap();
        let vals: Vec<Complex64> = (0..12)
            .map(|j| c(j as f64 * 0.37 - 1.0, 2.0 - j as f64 * 0.11))
            .collect();
        let f = FunctionOnGroup::new(&g, Side::Primal, vals.clone(), mc).unwrap();
        let (lhs, rhs) = weil_check(&f, &h).unwrap();
        let direct = vals.iter().sum::<Complex64>() * (7.0 / 3.0);
        assert!(close(lhs, direct, 1e-12 * direct.norm()));
        assert!(close(lhs, rhs, 1e-12 * direct.norm()));
    }

    #[test]
    fn poisson_examples() {
        let g = z4();
        let mc = MeasureConvention::counting(&g);
        let h = subgroup_from_generators(&g, &[Element(vec![2])]).unwrap();
        let d = FunctionOnGroup::delta(&g, 0, mc);
        for x in 0..4u64 {
            let (lhs, rhs) = poisson_check(&d, &h, &Element(vec![x])).unwrap();
            let want = if x % 2 == 0 { 1.0 } else { 0.0 };
            assert!(close(lhs, c(want, 0.0), 1e-15));
            assert!(close(rhs, c(want, 0.0), 1e-12));
        }
        let one = FunctionOnGroup::new(&g, Side::Primal, vec![c(1.0, 0.0); 4], mc).unwrap();
        let (lhs, rhs) = poisson_check(&one, &h, &Element(vec![3])).unwrap();
        assert!(close(lhs, c(2.0, 0.0), 1e-15) && close(rhs, c(2.0, 0.0), 1e-12));
    }

    #[test]
    fn exact_identities_on_rational_input() {
        let g = Group::new(&[2, 6]).unwrap();
        let mc = haar_weights(&g, Rational::new(1, 12)).unwrap();
        let h = subgroup_from_generators(&g, &[Element(vec![1, 2])]).unwrap();
        let vals: Vec<Rational> = (0..12)
            .map(|j| Rational::new(j * j - 5, (j % 4) + 1))
            .collect();
        let (lhs, rhs) = weil_check_exact(&g, &vals, &h, &mc).unwrap();
        assert_eq!(lhs, rhs);
        for x in g.elements() {
            assert!(poisson_check_exact(&g, &vals, &h, &x).unwrap().holds());
        }
        // a perturbed right-hand side must be detected
        let mut id = poisson_check_exact(&g, &vals, &h, &g.zero()).unwrap();
        id.rhs.add_term(0, 1);
        assert!(!id.holds());
    }
}
