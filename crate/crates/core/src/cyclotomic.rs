//! Exact arithmetic in `Z[zeta_L]`.
//!
//! Elements are integer combinations `sum_t c_t zeta_L^t` with `0 <= t < L`,
//! i.e. polynomials modulo `x^L - 1`. Such a combination is zero in `C` exactly
//! when the polynomial is divisible by the cyclotomic polynomial `Phi_L`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::group::root_of_unity;

/// Coefficients of `Phi_n`, lowest degree first.
///
/// Computed by exact division of `x^n - 1` by `Phi_d` for every proper
/// divisor `d` of `n`, building up from `Phi_1 = x - 1`.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    let divisors: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut table: BTreeMap<u64, Vec<i64>> = BTreeMap::new();
    for &d in &divisors {
        let mut p = vec![0i64; d as usize + 1];
        p[0] = -1;
        p[d as usize] = 1;
        for (&e, phi) in &table {
            if e < d && d % e == 0 {
                p = exact_div(&p, phi);
            }
        }
        table.insert(d, p);
    }
    table.remove(&n).expect("n divides itself")
}

/// Quotient of an exact division by a monic polynomial.
fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    debug_assert_eq!(den[dn], 1);
    let mut rem = num.to_vec();
    let mut q = vec![0i64; num.len() - dn];
    for deg in (dn..num.len()).rev() {
        let c = rem[deg];
        if c != 0 {
            q[deg - dn] = c;
            for (i, &d) in den.iter().enumerate() {
                rem[deg - dn + i] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "division was not exact");
    q
}

/// Decides `p(zeta_L) == 0` for polynomials of degree below `L`.
#[derive(Clone, Debug)]
pub struct CyclotomicRing {
    order: u64,
    modulus: Vec<i64>,
}

impl CyclotomicRing {
    pub fn new(order: u64) -> CyclotomicRing {
        CyclotomicRing {
            order,
            modulus: cyclotomic_polynomial(order),
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn modulus(&self) -> &[i64] {
        &self.modulus
    }

    /// Exact zero test of `sum_t c_t zeta_L^t`.
    pub fn is_zero(&self, x: &CyclotomicInt) -> bool {
        assert_eq!(x.order, self.order, "mismatched root orders");
        self.is_zero_coeffs(&x.coeffs)
    }

    /// Same test on a raw coefficient slice of length `L`.
    pub fn is_zero_coeffs(&self, coeffs: &[i64]) -> bool {
        let deg = self.modulus.len() - 1;
        let mut rem: Vec<i128> = coeffs.iter().map(|&c| c as i128).collect();
        for top in (deg..rem.len()).rev() {
            let c = rem[top];
            if c != 0 {
                for (i, &m) in self.modulus.iter().enumerate() {
                    let r = &mut rem[top - deg + i];
                    *r = r
                        .checked_sub(
                            c.checked_mul(m as i128)
                                .expect("cyclotomic reduction overflow"),
                        )
                        .expect("cyclotomic reduction overflow");
                }
            }
        }
        rem.iter().all(|&r| r == 0)
    }
}

/// `sum_t c_t zeta_L^t` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicInt {
    order: u64,
    coeffs: Vec<i64>,
}

impl CyclotomicInt {
    pub fn zero(order: u64) -> CyclotomicInt {
        assert!(order >= 1, "root order must be positive");
        CyclotomicInt {
            order,
            coeffs: vec![0; order as usize],
        }
    }

    pub fn constant(order: u64, c: i64) -> CyclotomicInt {
        let mut x = CyclotomicInt::zero(order);
        x.coeffs[0] = c;
        x
    }

    /// `zeta_L^e`.
    pub fn root(order: u64, e: u64) -> CyclotomicInt {
        let mut x = CyclotomicInt::zero(order);
        x.coeffs[(e % order) as usize] = 1;
        x
    }

    /// `sum_e zeta_L^e` over an iterator of exponents (with repetition).
    pub fn from_exponents<I: IntoIterator<Item = u64>>(order: u64, exps: I) -> CyclotomicInt {
        let mut x = CyclotomicInt::zero(order);
        for e in exps {
            x.coeffs[(e % order) as usize] += 1;
        }
        x
    }

    pub fn from_coeffs(order: u64, coeffs: Vec<i64>) -> CyclotomicInt {
        assert_eq!(coeffs.len() as u64, order, "need exactly L coefficients");
        CyclotomicInt { order, coeffs }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Adds `c zeta^e` in place.
    pub fn add_term(&mut self, e: u64, c: i64) {
        let slot = &mut self.coeffs[(e % self.order) as usize];
        *slot = slot
            .checked_add(c)
            .expect("cyclotomic coefficient overflow");
    }

    /// Complex conjugate: `zeta^t -> zeta^{-t}`.
    pub fn conj(&self) -> CyclotomicInt {
        let l = self.order as usize;
        let mut out = CyclotomicInt::zero(self.order);
        for (t, &c) in self.coeffs.iter().enumerate() {
            out.coeffs[(l - t) % l] = c;
        }
        out
    }

    pub fn scale(&self, k: i64) -> CyclotomicInt {
        CyclotomicInt {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| c.checked_mul(k).expect("cyclotomic coefficient overflow"))
                .collect(),
        }
    }

    /// `|x|^2 = x * conj(x)`.
    pub fn norm_sqr(&self) -> CyclotomicInt {
        self * &self.conj()
    }

    pub fn to_complex(&self) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(t, &c)| root_of_unity(t as u64, self.order) * c as f64)
            .sum()
    }

    /// Zero test; builds `Phi_L` on each call. Use [`CyclotomicRing`] to reuse it.
    pub fn is_zero(&self) -> bool {
        CyclotomicRing::new(self.order).is_zero(self)
    }
}

impl Add for &CyclotomicInt {
    type Output = CyclotomicInt;
    fn add(self, rhs: &CyclotomicInt) -> CyclotomicInt {
        assert_eq!(self.order, rhs.order, "mismatched root orders");
        CyclotomicInt {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.checked_add(*b).expect("cyclotomic coefficient overflow"))
                .collect(),
        }
    }
}

impl Sub for &CyclotomicInt {
    type Output = CyclotomicInt;
    fn sub(self, rhs: &CyclotomicInt) -> CyclotomicInt {
        self + &(-rhs)
    }
}

impl Neg for &CyclotomicInt {
    type Output = CyclotomicInt;
    fn neg(self) -> CyclotomicInt {
        self.scale(-1)
    }
}

impl Mul for &CyclotomicInt {
    type Output = CyclotomicInt;
    fn mul(self, rhs: &CyclotomicInt) -> CyclotomicInt {
        assert_eq!(self.order, rhs.order, "mismatched root orders");
        let l = self.order as usize;
        let mut out = vec![0i64; l];
        for (i, &a) in self.coeffs.iter().enumerate().filter(|(_, &a)| a != 0) {
            for (j, &b) in rhs.coeffs.iter().enumerate().filter(|(_, &b)| b != 0) {
                let slot = &mut out[(i + j) % l];
                *slot = a
                    .checked_mul(b)
                    .and_then(|p| slot.checked_add(p))
                    .expect("cyclotomic coefficient overflow");
            }
        }
        CyclotomicInt {
            order: self.order,
            coeffs: out,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn totient(n: u64) -> u64 {
        (1..=n).filter(|&k| num_integer::gcd(k, n) == 1).count() as u64
    }

    #[test]
    fn known_small_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn degree_is_totient() {
        for n in 1..=120 {
            assert_eq!(
                cyclotomic_polynomial(n).len() as u64 - 1,
                totient(n),
                "n={n}"
            );
        }
    }

    #[test]
    fn prime_cyclotomic_is_geometric() {
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29] {
            assert_eq!(cyclotomic_polynomial(p), vec![1; p as usize], "p={p}");
        }
    }

    #[test]
    fn zero_tests() {
        // 1 + zeta_4^2 = 0, 1 + zeta_4 != 0
        assert!(CyclotomicInt::from_exponents(4, [0, 2]).is_zero());
        assert!(!CyclotomicInt::from_exponents(4, [0, 1]).is_zero());
        // 1 + zeta_3 + zeta_3^2 = 0 inside Z[zeta_6]
        assert!(CyclotomicInt::from_exponents(6, [0, 2, 4]).is_zero());
        assert!(!CyclotomicInt::constant(5, 3).is_zero());
        assert!(CyclotomicInt::zero(7).is_zero());
    }

    #[test]
    fn ring_operations_agree_with_floats() {
        let a = CyclotomicInt::from_coeffs(6, vec![1, -2, 0, 3, 0, 1]);
        let b = CyclotomicInt::from_coeffs(6, vec![0, 1, 1, 0, -1, 2]);
        let close = |x: Complex64, y: Complex64| (x - y).norm() < 1e-12;
        assert!(close(
            (&a * &b).to_complex(),
            a.to_complex() * b.to_complex()
        ));
        assert!(close(
            (&a + &b).to_complex(),
            a.to_complex() + b.to_complex()
        ));
        assert!(close(
            (&a - &b).to_complex(),
            a.to_complex() - b.to_complex()
        ));
        assert!(close(a.conj().to_complex(), a.to_complex().conj()));
        assert!(close(
            a.norm_sqr().to_complex(),
            a.to_complex().norm_sqr().into()
        ));
    }
}
