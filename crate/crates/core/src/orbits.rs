//! Reeb orbits, their iterates, and Conley-Zehnder bookkeeping.
//!
//! Elliptic orbits carry a rotation number `theta`. An irrational rotation
//! number is emulated by an exact rational whose reduced denominator exceeds
//! `max_iterate`, so `k * theta` is never an integer for admissible `k` and
//! `CZ(γ^k) = 2⌊kθ⌋ + 1` is unambiguous and odd.
//!
//! Hyperbolic orbits carry the index of the simple orbit; iterates follow
//! additivity `CZ(γ^k) = k · CZ(γ)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::rational::Ratio;
use num::{Signed, Zero};

use crate::error::{Error, Result};

pub type Theta = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitKind {
    Elliptic { theta: Theta },
    Hyperbolic { cz1: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReebOrbit {
    name: String,
    kind: OrbitKind,
    max_iterate: u32,
}

impl ReebOrbit {
    pub fn elliptic(name: impl Into<String>, theta: Theta, max_iterate: u32) -> Result<Self> {
        let orbit = ReebOrbit {
            name: name.into(),
            kind: OrbitKind::Elliptic { theta },
            max_iterate,
        };
        orbit.validate()?;
        Ok(orbit)
    }

    pub fn hyperbolic(name: impl Into<String>, cz1: i64, max_iterate: u32) -> Result<Self> {
        let orbit = ReebOrbit {
            name: name.into(),
            kind: OrbitKind::Hyperbolic { cz1 },
            max_iterate,
        };
        orbit.validate()?;
        Ok(orbit)
    }

    fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Error::InvalidOrbit {
            name: self.name.clone(),
            reason,
        };
        if !is_identifier(&self.name) {
            return Err(invalid("name must be a nonempty identifier".into()));
        }
        if self.max_iterate == 0 {
            return Err(invalid("max_iterate must be positive".into()));
        }
        if let OrbitKind::Elliptic { theta } = &self.kind {
            if !theta.is_positive() {
                return Err(invalid(format!("theta {theta} must be positive")));
            }
            // Ratio keeps itself reduced, so this is the true denominator.
            if *theta.denom() <= i64::from(self.max_iterate) {
                return Err(invalid(format!(
                    "theta {theta} needs a denominator greater than max_iterate {}",
                    self.max_iterate
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &OrbitKind {
        &self.kind
    }

    pub fn max_iterate(&self) -> u32 {
        self.max_iterate
    }

    pub fn is_elliptic(&self) -> bool {
        matches!(self.kind, OrbitKind::Elliptic { .. })
    }

    pub fn is_hyperbolic(&self) -> bool {
        !self.is_elliptic()
    }

    fn check_range(&self, k: u32) -> Result<()> {
        if k == 0 || (self.is_elliptic() && k > self.max_iterate) {
            return Err(Error::IterateOutOfRange {
                orbit: self.name.clone(),
                k,
                max: self.max_iterate,
            });
        }
        Ok(())
    }

    /// Conley-Zehnder index of the `k`-fold iterate.
    pub fn cz_iterate(&self, k: u32) -> Result<i64> {
        self.check_range(k)?;
        Ok(match &self.kind {
            OrbitKind::Elliptic { theta } => {
                let scaled = theta * Theta::from_integer(i64::from(k));
                2 * scaled.floor().to_integer() + 1
            }
            OrbitKind::Hyperbolic { cz1 } => i64::from(k) * cz1,
        })
    }

    /// `CZ(γ^{k+m}) − CZ(γ^k) − CZ(γ^m)`.
    pub fn cz_defect(&self, k: u32, m: u32) -> Result<i64> {
        self.check_range(k)?;
        self.check_range(m)?;
        Ok(self.cz_iterate(k + m)? - self.cz_iterate(k)? - self.cz_iterate(m)?)
    }
}

impl fmt::Display for ReebOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            OrbitKind::Elliptic { theta } => write!(f, "{} (elliptic, theta={theta})", self.name),
            OrbitKind::Hyperbolic { cz1 } => write!(f, "{} (hyperbolic, cz1={cz1})", self.name),
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Parses a rotation number written as `a/b` or as an integer.
pub fn parse_theta(s: &str) -> Result<Theta> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
            let d: i64 = d.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Theta::new(n, d)
        }
        None => Theta::from_integer(s.parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?),
    };
    Ok(parsed)
}

/// A covering iterate `γ^k` of a simple orbit.
///
/// Equality and ordering go by orbit name, then multiplicity. Names are unique
/// within an [`OrbitRegistry`].
#[derive(Debug, Clone)]
pub struct OrbitIterate {
    orbit: Arc<ReebOrbit>,
    k: u32,
}

impl OrbitIterate {
    pub fn new(orbit: Arc<ReebOrbit>, k: u32) -> Result<Self> {
        orbit.check_range(k)?;
        Ok(OrbitIterate { orbit, k })
    }

    pub fn orbit(&self) -> &Arc<ReebOrbit> {
        &self.orbit
    }

    pub fn name(&self) -> &str {
        &self.orbit.name
    }

    /// Covering multiplicity, the κ of the iterate.
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn cz(&self) -> i64 {
        self.orbit.cz_iterate(self.k).expect("iterate range checked at construction")
    }

    /// False exactly for even iterates of odd hyperbolic orbits.
    pub fn is_good(&self) -> bool {
        match self.orbit.kind {
            OrbitKind::Elliptic { .. } => true,
            OrbitKind::Hyperbolic { cz1 } => cz1 % 2 == 0 || self.k % 2 == 1,
        }
    }

    /// Degree of the `p` or `q` variable attached to this iterate
    /// (`−CZ − 1` and `CZ − 1` in dimension four).
    pub fn variable_degree(&self, kind: VarKind) -> Result<i64> {
        if !self.is_good() {
            return Err(Error::BadOrbit {
                orbit: self.name().to_string(),
                k: self.k,
            });
        }
        let cz = self.cz();
        Ok(match kind {
            VarKind::P => -cz - 1,
            VarKind::Q => cz - 1,
        })
    }

    /// Same orbit, iterated `j` more times.
    pub fn power(&self, j: u32) -> Result<Self> {
        OrbitIterate::new(self.orbit.clone(), self.k * j)
    }
}

impl PartialEq for OrbitIterate {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.orbit.name == other.orbit.name
    }
}

impl Eq for OrbitIterate {}

impl PartialOrd for OrbitIterate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrbitIterate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.orbit.name.as_str(), self.k).cmp(&(other.orbit.name.as_str(), other.k))
    }
}

impl std::hash::Hash for OrbitIterate {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.orbit.name.hash(state);
        self.k.hash(state);
    }
}

impl fmt::Display for OrbitIterate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "{}", self.orbit.name)
        } else {
            write!(f, "{}^{}", self.orbit.name, self.k)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    P,
    Q,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarKind::P => "p",
            VarKind::Q => "q",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EndSign {
    Positive,
    Negative,
}

/// Ordered asymptotic ends `Γ±` of a curve.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrbitCollection {
    sign: EndSign,
    items: Vec<OrbitIterate>,
}

impl OrbitCollection {
    pub fn new(sign: EndSign, items: Vec<OrbitIterate>) -> Self {
        OrbitCollection { sign, items }
    }

    pub fn empty(sign: EndSign) -> Self {
        OrbitCollection { sign, items: Vec::new() }
    }

    pub fn sign(&self) -> EndSign {
        self.sign
    }

    pub fn items(&self) -> &[OrbitIterate] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// κ_Γ, the product of the covering multiplicities.
    pub fn kappa(&self) -> u64 {
        self.items.iter().map(|it| u64::from(it.k())).product()
    }

    pub fn cz_sum(&self) -> i64 {
        self.items.iter().map(OrbitIterate::cz).sum()
    }

    /// Iterates with even Conley-Zehnder index.
    pub fn even_count(&self) -> usize {
        self.items.iter().filter(|it| it.cz() % 2 == 0).count()
    }

    /// Total multiplicity per underlying simple orbit.
    pub fn multiplicities(&self) -> BTreeMap<String, u32> {
        let mut out = BTreeMap::new();
        for it in &self.items {
            *out.entry(it.name().to_string()).or_insert(0) += it.k();
        }
        out
    }

    /// Copy with items in canonical order.
    pub fn sorted(&self) -> Self {
        let mut items = self.items.clone();
        items.sort();
        OrbitCollection { sign: self.sign, items }
    }

    pub fn with_sign(&self, sign: EndSign) -> Self {
        OrbitCollection { sign, items: self.items.clone() }
    }

    pub fn concat(&self, other: &OrbitCollection) -> Self {
        let mut items = self.items.clone();
        items.extend(other.items.iter().cloned());
        OrbitCollection { sign: self.sign, items }
    }
}

impl fmt::Display for OrbitCollection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.items.is_empty() {
            return f.write_str("()");
        }
        f.write_str("(")?;
        for (i, it) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{it}")?;
        }
        f.write_str(")")
    }
}

/// Name-indexed set of simple orbits.
#[derive(Debug, Clone, Default)]
pub struct OrbitRegistry {
    orbits: BTreeMap<String, Arc<ReebOrbit>>,
}

impl OrbitRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, orbit: ReebOrbit) -> Result<Arc<ReebOrbit>> {
        if self.orbits.contains_key(orbit.name()) {
            return Err(Error::RegistryMismatch(format!(
                "orbit `{}` declared twice",
                orbit.name()
            )));
        }
        let orbit = Arc::new(orbit);
        self.orbits.insert(orbit.name().to_string(), orbit.clone());
        Ok(orbit)
    }

    pub fn get(&self, name: &str) -> Result<&Arc<ReebOrbit>> {
        self.orbits.get(name).ok_or_else(|| Error::UnknownName {
            kind: "orbit",
            name: name.to_string(),
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<ReebOrbit>> {
        self.orbits.values()
    }

    /// Resolves `name` or `name^k`.
    pub fn iterate(&self, token: &str) -> Result<OrbitIterate> {
        let token = token.trim();
        let (name, k) = match token.split_once('^') {
            Some((n, k)) => {
                let k: u32 = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad iterate exponent in `{token}`")))?;
                (n.trim(), k)
            }
            None => (token, 1),
        };
        OrbitIterate::new(self.get(name)?.clone(), k)
    }

    pub fn collection(&self, sign: EndSign, tokens: &[String]) -> Result<OrbitCollection> {
        let items = tokens
            .iter()
            .map(|t| self.iterate(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(OrbitCollection::new(sign, items))
    }
}
