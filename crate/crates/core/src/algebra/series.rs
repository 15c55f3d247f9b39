use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num::{BigRational, One, Signed, Zero};

use super::{Monomial, Variable};
use crate::error::{Error, Result};
use crate::orbits::{ReebOrbit, VarKind};

/// Finite sum of monomials with rational coefficients, truncated in total
/// `p`-degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSeries {
    terms: BTreeMap<Monomial, BigRational>,
    truncation: u32,
}

impl GradedSeries {
    pub fn zero(truncation: u32) -> Self {
        GradedSeries {
            terms: BTreeMap::new(),
            truncation,
        }
    }

    pub fn constant(c: BigRational, truncation: u32) -> Self {
        Self::term(Monomial::one(), c, truncation)
    }

    pub fn one(truncation: u32) -> Self {
        Self::constant(BigRational::one(), truncation)
    }

    pub fn variable(v: Variable, truncation: u32) -> Self {
        Self::term(Monomial::var(v), BigRational::one(), truncation)
    }

    pub fn term(m: Monomial, c: BigRational, truncation: u32) -> Self {
        let mut s = Self::zero(truncation);
        s.add_term(m, c);
        s
    }

    /// Product of the given variables in the order listed, times `c`.
    pub fn product(vars: &[Variable], c: BigRational, truncation: u32) -> Self {
        vars.iter().fold(Self::constant(c, truncation), |acc, v| {
            acc.mul_unchecked(&Self::variable(v.clone(), truncation))
        })
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common degree of all terms; `None` for zero or inhomogeneous series.
    pub fn degree(&self) -> Option<i64> {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn is_odd(&self) -> Option<bool> {
        self.degree().map(|d| d % 2 != 0)
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn with_truncation(&self, truncation: u32) -> Self {
        let mut out = Self::zero(truncation);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    /// Keeps only the terms satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        GradedSeries {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
            truncation: self.truncation,
        }
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() || m.p_degree() > self.truncation {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.truncation);
        }
        GradedSeries {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
            truncation: self.truncation,
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.truncation.min(other.truncation));
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if a.p_degree() + b.p_degree() > out.truncation {
                    continue;
                }
                if let Some((m, negative)) = a.mul(b) {
                    let c = x * y;
                    out.add_term(m, if negative { -c } else { c });
                }
            }
        }
        out
    }

    /// Graded-commutative product, truncated to the smaller truncation order.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        check_registry([self, other])?;
        Ok(self.mul_unchecked(other))
    }

    fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.truncation), |acc, _| acc.mul_unchecked(self))
    }

    fn derive(&self, v: &Variable, right: bool) -> Self {
        let mut out = Self::zero(self.truncation);
        for (m, c) in &self.terms {
            let stripped = if right { m.strip_right(v) } else { m.strip_left(v) };
            if let Some((rest, e, negative)) = stripped {
                let c = c * BigRational::from_integer(e.into());
                out.add_term(rest, if negative { -c } else { c });
            }
        }
        out
    }

    /// Left derivative `∂f/∂v`: `v` is moved to the front before removal.
    pub fn partial(&self, v: &Variable) -> Self {
        self.derive(v, false)
    }

    /// Right derivative `f ∂/∂v`: `v` is moved to the back before removal.
    pub fn right_partial(&self, v: &Variable) -> Self {
        self.derive(v, true)
    }

    /// `{f, g} = Σ κ ( f∂⃖_p · ∂⃗_q g − (−1)^{|p||q|} f∂⃖_q · ∂⃗_p g )`, summed
    /// over every conjugate pair (same iterate and side) occurring in `f` or
    /// `g`. For even variables this is `κ(∂f/∂p ∂g/∂q − ∂f/∂q ∂g/∂p)`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        check_registry([self, other])?;
        let mut pairs = BTreeSet::new();
        for v in self.variables().into_iter().chain(other.variables()) {
            let p = match v.kind() {
                VarKind::P => v,
                VarKind::Q => v.conjugate(),
            };
            pairs.insert(p);
        }
        let mut out = Self::zero(self.truncation.min(other.truncation));
        for p in pairs {
            let q = p.conjugate();
            let kappa = BigRational::from_integer(p.kappa().into());
            let first = self.right_partial(&p).mul_unchecked(&other.partial(&q));
            let second = self.right_partial(&q).mul_unchecked(&other.partial(&p));
            let term = if p.is_odd() { first + second } else { first - second };
            out = out + term.scale(&kappa);
        }
        Ok(out)
    }

    /// Simultaneous substitution of the listed variables; others are kept.
    ///
    /// With `check_degrees`, every image must be zero or homogeneous of the
    /// variable's degree. Substituting a `p`-variable by something with a
    /// `p`-degree-zero part would let terms beyond the truncation feed lower
    /// orders, so this is refused when `self` has terms at the truncation
    /// boundary.
    pub fn substitute(&self, assignment: &BTreeMap<Variable, GradedSeries>, check_degrees: bool) -> Result<Self> {
        check_registry(std::iter::once(self).chain(assignment.values()))?;
        if check_degrees {
            for (v, image) in assignment {
                if !image.is_zero() && image.degree() != Some(v.degree()) {
                    let found: BTreeSet<i64> = image.terms.keys().map(Monomial::degree).collect();
                    return Err(Error::DegreeMismatch {
                        variable: v.to_string(),
                        expected: v.degree(),
                        found: format!("{found:?}"),
                    });
                }
            }
        }
        let saturated = self.terms.keys().any(|m| m.p_degree() == self.truncation);
        if saturated {
            for (v, image) in assignment {
                let lowers = image.terms.keys().any(|m| m.p_degree() == 0);
                if v.kind() == VarKind::P && lowers && self.variables().contains(v) {
                    return Err(Error::TruncationOverflow(format!(
                        "{v} is replaced by a series with p-degree zero terms while the source reaches the truncation order {}",
                        self.truncation
                    )));
                }
            }
        }
        Ok(self.substitute_raw(assignment))
    }

    /// Substitution without degree or truncation checks.
    pub(crate) fn substitute_raw(&self, assignment: &BTreeMap<Variable, GradedSeries>) -> Self {
        let mut out = Self::zero(self.truncation);
        for (m, c) in &self.terms {
            let mut acc = Self::constant(c.clone(), self.truncation);
            for (v, e) in m.factors() {
                let factor = match assignment.get(v) {
                    Some(image) => image.with_truncation(self.truncation).pow(e),
                    None => Self::variable(v.clone(), self.truncation).pow(e),
                };
                acc = acc.mul_unchecked(&factor);
                if acc.is_zero() {
                    break;
                }
            }
            out = out + acc;
        }
        out
    }

    /// Renames variables one for one (for example to move them to another
    /// side). The map must preserve degrees.
    pub fn relabel(&self, rename: impl Fn(&Variable) -> Variable) -> Self {
        let assignment = self
            .variables()
            .into_iter()
            .map(|v| {
                let image = Self::variable(rename(&v), self.truncation);
                (v, image)
            })
            .collect();
        self.substitute(&assignment, true).expect("renaming preserves degrees")
    }
}

/// Fails when two series refer to differently declared orbits of one name.
pub(crate) fn check_registry<'a>(series: impl IntoIterator<Item = &'a GradedSeries>) -> Result<()> {
    let mut seen: BTreeMap<String, &ReebOrbit> = BTreeMap::new();
    for s in series {
        for m in s.terms.keys() {
            for (v, _) in m.factors() {
                let orbit = v.iterate().orbit();
                match seen.get(orbit.name()) {
                    Some(prev) if **prev != **orbit => {
                        return Err(Error::RegistryMismatch(format!(
                            "orbit `{}` is declared as {prev} and as {orbit}",
                            orbit.name()
                        )));
                    }
                    Some(_) => {}
                    None => {
                        seen.insert(orbit.name().to_string(), orbit);
                    }
                }
            }
        }
    }
    Ok(())
}

impl Add for GradedSeries {
    type Output = GradedSeries;
    fn add(self, rhs: GradedSeries) -> GradedSeries {
        &self + &rhs
    }
}

impl Add for &GradedSeries {
    type Output = GradedSeries;
    fn add(self, rhs: &GradedSeries) -> GradedSeries {
        let mut out = self.with_truncation(self.truncation.min(rhs.truncation));
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for GradedSeries {
    type Output = GradedSeries;
    fn sub(self, rhs: GradedSeries) -> GradedSeries {
        &self - &rhs
    }
}

impl Sub for &GradedSeries {
    type Output = GradedSeries;
    fn sub(self, rhs: &GradedSeries) -> GradedSeries {
        self + &(-rhs)
    }
}

impl Neg for &GradedSeries {
    type Output = GradedSeries;
    fn neg(self) -> GradedSeries {
        GradedSeries {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
            truncation: self.truncation,
        }
    }
}

impl Neg for GradedSeries {
    type Output = GradedSeries;
    fn neg(self) -> GradedSeries {
        -&self
    }
}

impl fmt::Display for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let magnitude = c.abs();
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{magnitude}*{m}")?;
            }
        }
        Ok(())
    }
}
