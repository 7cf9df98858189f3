//! Computational toolkit for the `(q,t)`-deformed Fock space.
//!
//! - [`combin`]: pair partitions, permutations and their exact generating polynomials.
//! - [`fock`]: finite truncations of the deformed Fock space with operators and inner product.
//! - [`moments`]: Wick expansions, weighted Dyck paths, S-fractions and closed-form checks.
//! - [`orthopoly`]: deformed Hermite/Chebyshev recurrences, the t-Airy function and the
//!   atomic t-semicircular measure.
//! - [`wigner`]: Monte Carlo for correlated Wigner processes.

pub mod combin;
pub mod dense;
pub mod error;
pub mod fock;
pub mod guard;
pub mod moments;
pub mod orthopoly;
pub mod poly;
pub mod scalar;
pub mod wigner;

pub use error::{Error, Result};
pub use guard::Guards;
pub use poly::BivarPoly;
