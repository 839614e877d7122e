//! Multidimensional discrete Fourier transform over a product of cyclic axes.
//!
//! Each axis is transformed with a recursive mixed-radix Cooley-Tukey split
//! on its smallest prime factor; prime lengths fall back to the direct
//! `O(n^2)` sum. The data layout matches group element enumeration: row-major
//! with the last axis contiguous.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::group::root_of_unity;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `X[k] = sum_j x[j] exp(-2 pi i jk/n)`
    Forward,
    /// `x[j] = sum_k X[k] exp(+2 pi i jk/n)`, unnormalized
    Inverse,
}

/// Unnormalized transform of `data` in place, axis sizes given by `shape`.
pub fn transform(data: &mut [Complex64], shape: &[usize], direction: Direction) {
    let total: usize = shape.iter().product();
    assert_eq!(
        data.len(),
        total,
        "data length must equal the product of the shape"
    );
    let mut inner = total;
    let mut line = Vec::new();
    let mut out = Vec::new();
    for &n in shape {
        inner /= n;
        if n == 1 {
            continue;
        }
        let plan = CyclicPlan::new(n, direction);
        line.resize(n, Complex64::default());
        out.resize(n, Complex64::default());
        let outer = total / (n * inner);
        for o in 0..outer {
            for i in 0..inner {
                let base = o * n * inner + i;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + j * inner];
                }
                plan.run(&line, &mut out);
                for (j, &v) in out.iter().enumerate() {
                    data[base + j * inner] = v;
                }
            }
        }
    }
}

/// One-dimensional transform of length `n` with a precomputed twiddle table.
pub struct CyclicPlan {
    n: usize,
    twiddles: Vec<Complex64>,
}

impl CyclicPlan {
    pub fn new(n: usize, direction: Direction) -> CyclicPlan {
        assert!(n > 0, "transform length must be positive");
        let twiddles = (0..n as u64)
            .map(|e| {
                let w = root_of_unity(e, n as u64);
                match direction {
                    Direction::Forward => w.conj(),
                    Direction::Inverse => w,
                }
            })
            .collect();
        CyclicPlan { n, twiddles }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn run(&self, input: &[Complex64], output: &mut [Complex64]) {
        assert_eq!(input.len(), self.n);
        assert_eq!(output.len(), self.n);
        self.rec(input, 0, 1, self.n, output);
    }

    /// Transform of `input[offset + stride * j]`, `j < len`, into `output`.
    fn rec(
        &self,
        input: &[Complex64],
        offset: usize,
        stride: usize,
        len: usize,
        output: &mut [Complex64],
    ) {
        if len == 1 {
            output[0] = input[offset];
            return;
        }
        // twiddle for exp(-+2 pi i e / len) lives at e * (n / len)
        let step = self.n / len;
        let p = smallest_prime_factor(len);
        if p == len {
            for (k, out) in output.iter_mut().enumerate().take(len) {
                let mut acc = Complex64::default();
                for j in 0..len {
                    acc += input[offset + stride * j] * self.twiddles[((j * k) % len) * step];
                }
                *out = acc;
            }
            return;
        }
        let m = len / p;
        // decimation in time: p interleaved sub-sequences of length m
        let mut sub = vec![Complex64::default(); len];
        for r in 0..p {
            self.rec(
                input,
                offset + stride * r,
                stride * p,
                m,
                &mut sub[r * m..(r + 1) * m],
            );
        }
        // X[k + m q] = sum_r w_len^{r k} w_p^{r q} Y_r[k]
        for k in 0..m {
            for q in 0..p {
                let idx = k + m * q;
                let mut acc = Complex64::default();
                for r in 0..p {
                    acc += sub[r * m + k] * self.twiddles[((r * idx) % len) * step];
                }
                output[idx] = acc;
            }
        }
    }
}

fn smallest_prime_factor(n: usize) -> usize {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 2;
    }
    n
}
