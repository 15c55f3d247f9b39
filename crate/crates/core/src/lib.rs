//! Exact bookkeeping for local symplectic field theory in dimension four.
//!
//! The crate is organised bottom-up: [`orbits`] holds Reeb orbits and their
//! Conley-Zehnder indices, [`covers`] does index and moduli bookkeeping for
//! branched multiple covers, [`algebra`] is the graded formal-series engine,
//! [`potentials`] builds Hamiltonians and potentials from count tables, and
//! [`exceptional`] runs the exceptional-sphere computations on top of all of
//! them.

pub mod error;
pub mod orbits;
pub mod covers;
pub mod algebra;
pub mod potentials;
pub mod exceptional;

pub use error::{Error, ErrorClass, Result};
pub use orbits::{
    parse_theta, EndSign, OrbitCollection, OrbitIterate, OrbitKind, OrbitRegistry, ReebOrbit, Theta, VarKind,
};

pub type Rational = num::BigRational;
