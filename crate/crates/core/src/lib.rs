#![no_std]

//! Lattice tilings and spectral sets on finite abelian groups.
//!
//! A finite abelian group is an ordered product of cyclic factors
//! `Z_{n_1} x ... x Z_{n_k}`. Subgroups play the role of lattices, and the
//! dual group is identified with the group itself through the pairing
//! `<x, g> = sum_j x_j g_j / n_j (mod 1)`.
//!
//! The crate provides:
//!
//! - [`group`]: groups, elements, characters, exact phases and Haar weights.
//! - [`snf`] and [`lattice`]: integer normal forms, subgroups, annihilators,
//!   fundamental domains, covolumes and the reduction of `Z^d` tilings to a
//!   finite quotient.
//! - [`fourier`], [`fft`] and [`cyclotomic`]: the group Fourier transform,
//!   convolution, periodization, the Weil and Poisson identities, and exact
//!   zero tests for sums of roots of unity.
//! - [`tiling`]: five independent checkers for the equivalent tiling and
//!   spectral conditions, plus the bracket map of the translation system.
//! - [`search`]: tile and spectrum enumeration and tile/spectral cross reports.
//!
//! Everything here depends only on `core` and `alloc`.

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cyclotomic;
mod error;
pub mod fft;
pub mod fourier;
pub mod group;
pub mod lattice;
pub mod search;
pub mod snf;
pub mod tiling;

pub use cyclotomic::CyclotomicInt;
pub use error::{Error, Result};
pub use fourier::FunctionOnGroup;
pub use group::{Character, Element, Group, MeasureConvention, Phase, Rational, Side};
pub use lattice::{SetOnGroup, Subgroup};
pub use tiling::{Arithmetic, ConditionReport};
