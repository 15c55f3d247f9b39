//! Integer bookkeeping for branched multiple covers `u = v ∘ φ` of a fixed
//! simple curve `v`: Riemann-Hurwitz ramification, Fredholm indices,
//! dimensions of the space of covers, obstruction-bundle ranks, normal Chern
//! numbers, boundary strata, and a Hurwitz-count enumerator.
//!
//! All domains are genus zero. A domain may be disconnected (a level of a
//! building); `components` records how many pieces it has, so the Euler
//! characteristic is `2·components − #punctures`.

mod hurwitz;
mod strata;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::Integer;

use crate::error::{Error, Result};
use crate::orbits::{EndSign, OrbitCollection, ReebOrbit};

pub use hurwitz::{cycle_type, hurwitz_count, Perm, MAX_HURWITZ_DEGREE};
pub use strata::{
    boundary_strata, neck_strata, Building, BuildingKind, LevelTag, NeckSplit, StrataEdge,
    StrataGraph, StrataNode,
};

/// The simple curve being covered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseCurve {
    name: String,
    positive_ends: OrbitCollection,
    negative_ends: OrbitCollection,
    index: i64,
    rel_c1_doubled: i64,
    immersed: bool,
    closed: bool,
    components: u32,
    cylindrical: bool,
}

/// Plain constructor data for [`BaseCurve`].
#[derive(Debug, Clone)]
pub struct BaseCurveData {
    pub name: String,
    pub positive_ends: OrbitCollection,
    pub negative_ends: OrbitCollection,
    pub index: i64,
    pub rel_c1_doubled: i64,
    pub immersed: bool,
    pub components: u32,
}

impl BaseCurve {
    /// Builds a curve in a cobordism and checks that its declared index agrees
    /// with the index formula.
    pub fn new(data: BaseCurveData) -> Result<Self> {
        let closed = data.positive_ends.is_empty() && data.negative_ends.is_empty();
        let curve = BaseCurve {
            name: data.name,
            positive_ends: data.positive_ends.with_sign(EndSign::Positive),
            negative_ends: data.negative_ends.with_sign(EndSign::Negative),
            index: data.index,
            rel_c1_doubled: data.rel_c1_doubled,
            immersed: data.immersed,
            closed,
            components: data.components,
            cylindrical: false,
        };
        curve.validate()?;
        Ok(curve)
    }

    /// The trivial cylinder `ℝ × γ` over a simple orbit.
    pub fn orbit_cylinder(orbit: &Arc<ReebOrbit>) -> Self {
        Self::cylinders(std::slice::from_ref(orbit))
    }

    /// Disjoint union of trivial cylinders over distinct simple orbits.
    pub fn cylinders(orbits: &[Arc<ReebOrbit>]) -> Self {
        let mut orbits = orbits.to_vec();
        orbits.sort_by(|a, b| a.name().cmp(b.name()));
        orbits.dedup_by(|a, b| a.name() == b.name());
        let items: Vec<_> = orbits
            .iter()
            .map(|o| crate::orbits::OrbitIterate::new(o.clone(), 1).expect("k = 1 is always in range"))
            .collect();
        let names: Vec<_> = orbits.iter().map(|o| o.name()).collect();
        BaseCurve {
            name: format!("R×{}", names.join("+")),
            positive_ends: OrbitCollection::new(EndSign::Positive, items.clone()),
            negative_ends: OrbitCollection::new(EndSign::Negative, items),
            index: 0,
            rel_c1_doubled: 0,
            immersed: true,
            closed: false,
            components: orbits.len() as u32,
            cylindrical: true,
        }
    }

    fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Error::InvalidCurve {
            name: self.name.clone(),
            reason,
        };
        if self.components == 0 {
            return Err(invalid("components must be positive".into()));
        }
        let computed = self.computed_index();
        if computed != self.index {
            return Err(invalid(format!(
                "declared index {} but the index formula gives {computed}",
                self.index
            )));
        }
        if self.rel_c1_doubled % 2 != 0 && self.closed {
            return Err(invalid("closed curves have integral c1".into()));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn positive_ends(&self) -> &OrbitCollection {
        &self.positive_ends
    }
    pub fn negative_ends(&self) -> &OrbitCollection {
        &self.negative_ends
    }
    pub fn index(&self) -> i64 {
        self.index
    }
    pub fn rel_c1_doubled(&self) -> i64 {
        self.rel_c1_doubled
    }
    pub fn is_immersed(&self) -> bool {
        self.immersed
    }
    pub fn is_closed(&self) -> bool {
        self.closed
    }
    pub fn components(&self) -> u32 {
        self.components
    }
    /// True for unions of trivial cylinders in a symplectization.
    pub fn is_cylindrical(&self) -> bool {
        self.cylindrical
    }
    pub fn is_rigid(&self) -> bool {
        self.index == 0
    }

    pub fn puncture_count(&self) -> usize {
        self.positive_ends.len() + self.negative_ends.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 * i64::from(self.components) - self.puncture_count() as i64
    }

    pub fn computed_index(&self) -> i64 {
        -self.euler_characteristic() + self.positive_ends.cz_sum() - self.negative_ends.cz_sum()
            + self.rel_c1_doubled
    }

    /// Whether every asymptotic orbit is elliptic (vacuous for closed curves).
    pub fn all_ends_elliptic(&self) -> bool {
        self.positive_ends
            .items()
            .iter()
            .chain(self.negative_ends.items())
            .all(|it| it.orbit().is_elliptic())
    }
}

/// Symmetries that `tangency_dimension` leaves undivided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotientNote {
    /// The ℝ-translation of a symplectization target.
    TargetTranslation,
    /// Reparametrizations of a domain with fewer than three special points.
    DomainAutomorphisms { real_dimension: u32 },
}

impl fmt::Display for QuotientNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuotientNote::TargetTranslation => f.write_str("R-translation of the target not divided out"),
            QuotientNote::DomainAutomorphisms { real_dimension } => {
                write!(f, "domain automorphisms of real dimension {real_dimension} not divided out")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangencyDimension {
    pub value: i64,
    pub quotient_notes: Vec<QuotientNote>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalChern {
    /// `2 c_N(u) = ind u − 2 + 2g + #Γ₀` with `g = 0`.
    pub c_n_doubled: i64,
    /// `c₁(N_u) = c_N(u) − 2 #Crit(u)`.
    pub adjusted_c1: i64,
    pub negative_c1: bool,
}

/// A multiple cover of a base curve with prescribed ends and point constraints.
#[derive(Debug, Clone)]
pub struct CoverSpec {
    base: Arc<BaseCurve>,
    degree: u32,
    positive_ends: OrbitCollection,
    negative_ends: OrbitCollection,
    constrained_branch_points: u32,
    marked_points: u32,
    components: u32,
}

impl CoverSpec {
    /// Connected cover without marked points.
    pub fn new(
        base: Arc<BaseCurve>,
        degree: u32,
        positive_ends: OrbitCollection,
        negative_ends: OrbitCollection,
    ) -> Result<Self> {
        Self::with_points(base, degree, positive_ends, negative_ends, 0, 0, 1)
    }

    pub fn with_points(
        base: Arc<BaseCurve>,
        degree: u32,
        positive_ends: OrbitCollection,
        negative_ends: OrbitCollection,
        marked_points: u32,
        constrained_branch_points: u32,
        components: u32,
    ) -> Result<Self> {
        let spec = CoverSpec {
            base,
            degree,
            positive_ends: positive_ends.with_sign(EndSign::Positive),
            negative_ends: negative_ends.with_sign(EndSign::Negative),
            constrained_branch_points,
            marked_points,
            components,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Error::InconsistentProfile(format!("{}: {msg}", self.label()));
        if self.degree == 0 {
            return Err(bad("degree must be positive".into()));
        }
        if self.components == 0 {
            return Err(bad("components must be positive".into()));
        }
        if self.constrained_branch_points > self.marked_points {
            return Err(bad("more constrained branch points than marked points".into()));
        }
        let base = &self.base;
        for (cover, base_ends, side) in [
            (&self.positive_ends, base.positive_ends(), "positive"),
            (&self.negative_ends, base.negative_ends(), "negative"),
        ] {
            let have = cover.multiplicities();
            let want = base_ends.multiplicities();
            for name in have.keys() {
                if !want.contains_key(name) {
                    return Err(bad(format!("{side} end over `{name}` which the base does not have")));
                }
            }
            if !base.is_cylindrical() {
                for (name, m) in &want {
                    let got = have.get(name).copied().unwrap_or(0);
                    if got != self.degree * m {
                        return Err(bad(format!(
                            "{side} ends over `{name}` have total multiplicity {got}, expected {}",
                            self.degree * m
                        )));
                    }
                    let step = base_ends
                        .items()
                        .iter()
                        .filter(|it| it.name() == name)
                        .fold(0u32, |g, it| g.gcd(&it.k()));
                    if let Some(it) = cover.items().iter().find(|it| it.name() == name && it.k() % step != 0) {
                        return Err(bad(format!("end {it} is not an iterate of the base asymptote")));
                    }
                }
            }
        }
        if base.is_cylindrical() {
            let plus = self.positive_ends.multiplicities();
            let minus = self.negative_ends.multiplicities();
            for name in base.positive_ends().multiplicities().keys() {
                let p = plus.get(name).copied().unwrap_or(0);
                let m = minus.get(name).copied().unwrap_or(0);
                if p != m || p == 0 {
                    return Err(bad(format!("ends over `{name}` are unbalanced ({p} vs {m})")));
                }
            }
            let total: u32 = plus.values().sum();
            if total != self.degree {
                return Err(bad(format!("degree {} but ends have total multiplicity {total}", self.degree)));
            }
            let orbits = base.components();
            if self.components < orbits
                || self.components as usize > self.positive_ends.len().min(self.negative_ends.len())
            {
                return Err(bad(format!("{} components cannot cover the cylinders", self.components)));
            }
        } else {
            let max = u64::from(self.degree) * u64::from(base.components());
            let mut upper = max;
            if !base.is_closed() && base.components() == 1 {
                upper = upper.min(self.puncture_count() as u64);
            }
            if self.components < base.components() || u64::from(self.components) > upper {
                return Err(bad(format!("{} components is impossible for this cover", self.components)));
            }
        }
        if self.ramification() < 0 {
            return Err(bad(format!(
                "Riemann-Hurwitz gives negative ramification {}",
                self.ramification()
            )));
        }
        Ok(())
    }

    pub fn base(&self) -> &Arc<BaseCurve> {
        &self.base
    }
    pub fn degree(&self) -> u32 {
        self.degree
    }
    pub fn positive_ends(&self) -> &OrbitCollection {
        &self.positive_ends
    }
    pub fn negative_ends(&self) -> &OrbitCollection {
        &self.negative_ends
    }
    pub fn marked_points(&self) -> u32 {
        self.marked_points
    }
    pub fn constrained_branch_points(&self) -> u32 {
        self.constrained_branch_points
    }
    pub fn components(&self) -> u32 {
        self.components
    }

    pub fn puncture_count(&self) -> usize {
        self.positive_ends.len() + self.negative_ends.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 * i64::from(self.components) - self.puncture_count() as i64
    }

    fn ramification(&self) -> i64 {
        let base_chi = if self.base.is_cylindrical() {
            0
        } else {
            self.base.euler_characteristic()
        };
        i64::from(self.degree) * base_chi - self.euler_characteristic()
    }

    /// Total interior ramification `Z = d·χ(S′) − χ(S)`.
    pub fn branch_count(&self) -> u64 {
        self.ramification() as u64
    }

    /// `−χ(S) + ΣCZ(Γ⁺) − ΣCZ(Γ⁻) + d·2c₁(v)`.
    pub fn fredholm_index(&self) -> i64 {
        -self.euler_characteristic() + self.positive_ends.cz_sum() - self.negative_ends.cz_sum()
            + i64::from(self.degree) * self.base.rel_c1_doubled()
    }

    /// Expected dimension after imposing the branch-point constraints.
    pub fn virtual_dimension(&self) -> i64 {
        self.fredholm_index() - 2 * i64::from(self.constrained_branch_points)
    }

    /// Virtual dimension with the ℝ-translation divided out when nothing
    /// pins the target. Used for strata bookkeeping.
    pub fn quotient_dimension(&self) -> i64 {
        let translation = i64::from(self.base.is_cylindrical() && self.marked_points == 0);
        self.virtual_dimension() - translation
    }

    /// `ind(v) + 2·Z − 2·(constrained branch points)`.
    pub fn tangency_dimension(&self) -> Result<TangencyDimension> {
        if !self.base.is_immersed() {
            return Err(Error::NotImmersed(self.base.name().to_string()));
        }
        let value = self.base.index() + 2 * self.branch_count() as i64
            - 2 * i64::from(self.constrained_branch_points);
        let mut quotient_notes = Vec::new();
        if self.base.is_cylindrical() && self.marked_points == 0 {
            quotient_notes.push(QuotientNote::TargetTranslation);
        }
        let special = self.puncture_count() as u32 + self.marked_points;
        if self.components == 1 && special < 3 {
            quotient_notes.push(QuotientNote::DomainAutomorphisms {
                real_dimension: 6 - 2 * special,
            });
        }
        Ok(TangencyDimension { value, quotient_notes })
    }

    /// Rank of the obstruction bundle, `ind(v) + 2Z − ind(u)`.
    pub fn cokernel_rank(&self) -> Result<u64> {
        if !self.base.is_immersed() {
            return Err(Error::HypothesesViolated(format!(
                "{}: base `{}` is not immersed",
                self.label(),
                self.base.name()
            )));
        }
        if !self.base.is_cylindrical() && !self.base.all_ends_elliptic() {
            return Err(Error::HypothesesViolated(format!(
                "{}: base `{}` has non-elliptic asymptotic orbits",
                self.label(),
                self.base.name()
            )));
        }
        let bound = self.base.index() + 2 * self.branch_count() as i64;
        let index = self.fredholm_index();
        if index > bound {
            return Err(Error::HypothesesViolated(format!(
                "{}: index {index} exceeds the tangency bound {bound}",
                self.label()
            )));
        }
        Ok((bound - index) as u64)
    }

    pub fn normal_chern_numbers(&self) -> Result<NormalChern> {
        let even = (self.positive_ends.even_count() + self.negative_ends.even_count()) as i64;
        let c_n_doubled = self.fredholm_index() - 2 + even;
        if c_n_doubled % 2 != 0 {
            return Err(Error::OddChern(c_n_doubled));
        }
        let adjusted_c1 = c_n_doubled / 2 - 2 * self.branch_count() as i64;
        Ok(NormalChern {
            c_n_doubled,
            adjusted_c1,
            negative_c1: adjusted_c1 < 0,
        })
    }

    /// Same cover with one branch-point-constrained marked point added.
    pub fn with_constrained_point(&self) -> Result<Self> {
        Self::with_points(
            self.base.clone(),
            self.degree,
            self.positive_ends.clone(),
            self.negative_ends.clone(),
            self.marked_points + 1,
            self.constrained_branch_points + 1,
            self.components,
        )
    }

    /// Canonical label such as `M^1_{v,2,1}((gamma,gamma);())`.
    pub fn label(&self) -> String {
        let mut s = String::from("M");
        if self.constrained_branch_points > 0 {
            s.push_str(&format!("^{}", self.constrained_branch_points));
        }
        s.push_str(&format!("_{{{},{}", self.base.name(), self.degree));
        if self.marked_points > 0 {
            s.push_str(&format!(",{}", self.marked_points));
        }
        s.push('}');
        s.push_str(&format!(
            "({};{})",
            self.positive_ends.sorted(),
            self.negative_ends.sorted()
        ));
        if self.components > 1 {
            s.push_str(&format!("[{} components]", self.components));
        }
        s
    }

    /// Ends grouped by orbit name.
    pub fn end_profile(&self) -> (BTreeMap<String, u32>, BTreeMap<String, u32>) {
        (self.positive_ends.multiplicities(), self.negative_ends.multiplicities())
    }
}

impl PartialEq for CoverSpec {
    fn eq(&self, other: &Self) -> bool {
        self.label() == other.label()
    }
}

impl Eq for CoverSpec {}

impl fmt::Display for CoverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}
