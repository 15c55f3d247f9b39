//! Graded supercommutative formal series in orbit variables `p` and `q`,
//! with exact rational coefficients and the κ-weighted Poisson bracket.
//!
//! Series are polynomial in `q` and truncated by total `p`-degree. A variable
//! is odd when its degree is odd; odd variables anticommute and square to
//! zero. Monomials are stored with their variables in canonical order, and the
//! coefficient refers to that ordered product.

mod series;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Result;
use crate::orbits::{OrbitIterate, VarKind};

pub use series::GradedSeries;
pub(crate) use series::check_registry;

/// Which end of a cobordism a variable belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Plus,
    Minus,
    Middle,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Plus => "+",
            Side::Minus => "-",
            Side::Middle => "",
        })
    }
}

/// A `p` or `q` generator attached to a good orbit iterate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    iterate: OrbitIterate,
    kind: VarKind,
    side: Side,
    degree: i64,
}

impl Variable {
    /// Fails with `BadOrbit` when the iterate is bad.
    pub fn new(iterate: OrbitIterate, kind: VarKind, side: Side) -> Result<Self> {
        let degree = iterate.variable_degree(kind)?;
        Ok(Variable {
            iterate,
            kind,
            side,
            degree,
        })
    }

    pub fn p(iterate: &OrbitIterate, side: Side) -> Result<Self> {
        Self::new(iterate.clone(), VarKind::P, side)
    }

    pub fn q(iterate: &OrbitIterate, side: Side) -> Result<Self> {
        Self::new(iterate.clone(), VarKind::Q, side)
    }

    pub fn iterate(&self) -> &OrbitIterate {
        &self.iterate
    }
    pub fn kind(&self) -> VarKind {
        self.kind
    }
    pub fn side(&self) -> Side {
        self.side
    }
    pub fn degree(&self) -> i64 {
        self.degree
    }
    pub fn is_odd(&self) -> bool {
        self.degree % 2 != 0
    }

    /// Covering multiplicity of the underlying iterate.
    pub fn kappa(&self) -> u32 {
        self.iterate.k()
    }

    /// The canonically conjugate variable: same iterate and side, other kind.
    pub fn conjugate(&self) -> Variable {
        let kind = match self.kind {
            VarKind::P => VarKind::Q,
            VarKind::Q => VarKind::P,
        };
        Variable::new(self.iterate.clone(), kind, self.side).expect("conjugate of a good iterate is good")
    }

    pub fn with_side(&self, side: Side) -> Variable {
        Variable { side, ..self.clone() }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}[{}]", self.kind, self.side, self.iterate)
    }
}

/// Product of variables in canonical order, odd exponents at most one.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(BTreeMap<Variable, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: Variable) -> Self {
        Monomial(BTreeMap::from([(v, 1)]))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: &Variable) -> u32 {
        self.0.get(v).copied().unwrap_or(0)
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Variable, u32)> {
        self.0.iter().map(|(v, &e)| (v, e))
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|(v, &e)| v.degree * i64::from(e)).sum()
    }

    pub fn p_degree(&self) -> u32 {
        self.0.iter().filter(|(v, _)| v.kind == VarKind::P).map(|(_, &e)| e).sum()
    }

    /// Total exponent of the variables satisfying `pred`.
    pub fn count_where(&self, pred: impl Fn(&Variable) -> bool) -> u32 {
        self.0.iter().filter(|(v, _)| pred(v)).map(|(_, &e)| e).sum()
    }

    /// Ordered product `self · other`, with the Koszul sign of sorting the
    /// concatenation. `None` when an odd variable would appear twice.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        let mut negative = false;
        for (y, _) in other.0.iter().filter(|(v, _)| v.is_odd()) {
            if self.0.contains_key(y) {
                return None;
            }
            let passed = self.0.range(y..).filter(|(v, _)| v.is_odd()).count();
            negative ^= passed % 2 == 1;
        }
        let mut out = self.0.clone();
        for (v, e) in &other.0 {
            *out.entry(v.clone()).or_insert(0) += e;
        }
        Some((Monomial(out), negative))
    }

    /// Removes one factor of `v`, returning the multiplicity and whether the
    /// variable had to pass an odd number of odd variables from the left.
    fn strip_left(&self, v: &Variable) -> Option<(Monomial, u32, bool)> {
        let e = self.exponent(v);
        if e == 0 {
            return None;
        }
        let before = self.0.range(..v).filter(|(w, _)| w.is_odd()).count();
        Some((self.without_one(v), e, v.is_odd() && before % 2 == 1))
    }

    fn strip_right(&self, v: &Variable) -> Option<(Monomial, u32, bool)> {
        let e = self.exponent(v);
        if e == 0 {
            return None;
        }
        let after = self
            .0
            .range(v..)
            .filter(|(w, _)| *w != v && w.is_odd())
            .count();
        Some((self.without_one(v), e, v.is_odd() && after % 2 == 1))
    }

    fn without_one(&self, v: &Variable) -> Monomial {
        let mut out = self.0.clone();
        match out.get_mut(v) {
            Some(e) if *e > 1 => *e -= 1,
            _ => {
                out.remove(v);
            }
        }
        Monomial(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, (v, &e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{v}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}
