//! Smith normal form of integer matrices.
//!
//! All arithmetic is overflow-checked; an overflow surfaces as
//! [`Error::Overflow`] instead of a wrong answer.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{invalid, Error, Result};

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn diagonal(entries: &[i64]) -> IntMatrix {
        let mut m = IntMatrix::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<IntMatrix> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return invalid("matrix rows have different lengths");
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return invalid("matrix dimensions do not match");
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i64 = 0;
                for k in 0..self.cols {
                    let p = self[(i, k)]
                        .checked_mul(other[(k, j)])
                        .ok_or(Error::Overflow("matrix product"))?;
                    acc = acc
                        .checked_add(p)
                        .ok_or(Error::Overflow("matrix product"))?;
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols {
            return invalid("vector length does not match matrix");
        }
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).try_fold(0i64, |acc, (&a, &b)| {
                    a.checked_mul(b)
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(Error::Overflow("matrix-vector product"))
                })
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        for j in 0..self.cols {
            let v = self[(src, j)]
                .checked_mul(k)
                .and_then(|p| self[(dst, j)].checked_add(p))
                .ok_or(Error::Overflow("smith normal form"))?;
            self[(dst, j)] = v;
        }
        Ok(())
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        for i in 0..self.rows {
            let v = self[(i, src)]
                .checked_mul(k)
                .and_then(|p| self[(i, dst)].checked_add(p))
                .ok_or(Error::Overflow("smith normal form"))?;
            self[(i, dst)] = v;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) -> Result<()> {
        for j in 0..self.cols {
            self[(i, j)] = self[(i, j)]
                .checked_neg()
                .ok_or(Error::Overflow("smith normal form"))?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal,
/// `d_1 | d_2 | ... | d_r`, all `d_i >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    pub fn invariants(&self) -> Vec<i64> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)])
            .collect()
    }
}

/// Smith normal form by repeated smallest-pivot elimination.
pub fn smith_normal_form(a: &IntMatrix) -> Result<Smith> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = smallest_nonzero(&d, t..rows, t..cols) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let p = d[(t, t)];
            let mut clean = true;
            for i in t + 1..rows {
                let q = d[(i, t)] / p;
                if q != 0 {
                    d.add_row(i, t, -q)?;
                    u.add_row(i, t, -q)?;
                }
                clean &= d[(i, t)] == 0;
            }
            for j in t + 1..cols {
                let q = d[(t, j)] / p;
                if q != 0 {
                    d.add_col(j, t, -q)?;
                    v.add_col(j, t, -q)?;
                }
                clean &= d[(t, j)] == 0;
            }
            if !clean {
                // a remainder smaller than the pivot is left in row or column t
                let (pi, pj) = smallest_in_cross(&d, t);
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            // divisibility: pull a non-multiple into row t and reduce again
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| d[(i, j)] % p != 0);
            match offender {
                Some((i, _)) => {
                    d.add_row(t, i, 1)?;
                    u.add_row(t, i, 1)?;
                }
                None => break,
            }
        }
        if d[(t, t)] < 0 {
            d.negate_row(t)?;
            u.negate_row(t)?;
        }
    }
    Ok(Smith { u, d, v })
}

fn smallest_nonzero(
    m: &IntMatrix,
    rows: core::ops::Range<usize>,
    cols: core::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            let x = m[(i, j)];
            if x != 0 && best.is_none_or(|(bi, bj)| x.unsigned_abs() < m[(bi, bj)].unsigned_abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn smallest_in_cross(m: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut best_abs = m[(t, t)].unsigned_abs();
    for i in t + 1..m.rows() {
        let x = m[(i, t)].unsigned_abs();
        if x != 0 && x < best_abs {
            best = (i, t);
            best_abs = x;
        }
    }
    for j in t + 1..m.cols() {
        let x = m[(t, j)].unsigned_abs();
        if x != 0 && x < best_abs {
            best = (t, j);
            best_abs = x;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_contract(a: &IntMatrix) -> Smith {
        let s = smith_normal_form(a).unwrap();
        assert_eq!(s.u.mul(a).unwrap().mul(&s.v).unwrap(), s.d);
        let inv = s.invariants();
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert_eq!(s.d[(i, j)], 0);
                }
            }
        }
        for w in inv.windows(2) {
            assert!(w[0] >= 0 && w[1] >= 0);
            if w[0] == 0 {
                assert_eq!(w[1], 0);
            } else {
                assert_eq!(w[1] % w[0], 0, "{inv:?}");
            }
        }
        s
    }

    #[test]
    fn diag_two_three() {
        let s = check_contract(&IntMatrix::diagonal(&[2, 3]));
        assert_eq!(s.invariants(), vec![1, 6]);
    }

    #[test]
    fn identity_stays_identity() {
        let s = check_contract(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        assert_eq!(s.u, IntMatrix::identity(3));
        assert_eq!(s.v, IntMatrix::identity(3));
    }

    #[test]
    fn diag_two_four() {
        let s = check_contract(&IntMatrix::diagonal(&[2, 4]));
        assert_eq!(s.invariants(), vec![2, 4]);
    }

    #[test]
    fn rectangular_and_zero() {
        let a = IntMatrix::from_rows(&[vec![2, 4, 6], vec![0, 0, 0]]).unwrap();
        assert_eq!(check_contract(&a).invariants(), vec![2, 0]);
        let z = IntMatrix::zeros(2, 3);
        assert_eq!(check_contract(&z).invariants(), vec![0, 0]);
        let a = IntMatrix::from_rows(&[vec![-3], vec![6], vec![9]]).unwrap();
        assert_eq!(check_contract(&a).invariants(), vec![3]);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(IntMatrix::from_rows(&[vec![1, 2], vec![3]]).is_err());
    }
}
