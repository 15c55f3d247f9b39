//! Local Hamiltonians and potentials built from tables of moduli counts, the
//! `#` composition, the Hamilton-Jacobi right-hand side, and restriction to
//! the Lagrangian of a potential.
//!
//! A count `#M(Γ⁺, Γ⁻)` contributes
//! `#M / (s⁺! s⁻! κ_{Γ⁺} κ_{Γ⁻}) · q^{Γ⁻} p^{Γ⁺}`, where the monomial is the
//! product of the `q` variables of `Γ⁻` followed by the `p` variables of
//! `Γ⁺`, each collection taken in canonical order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};

use crate::algebra::{check_registry, GradedSeries, Monomial, Side, Variable};
use crate::covers::{BaseCurve, CoverSpec};
use crate::error::{Error, Result};
use crate::orbits::{EndSign, OrbitCollection, OrbitIterate, ReebOrbit, VarKind};

/// What a count table counts covers of.
#[derive(Debug, Clone)]
pub enum TableContext {
    /// Covers of the trivial cylinder over a simple orbit.
    Orbit(Arc<ReebOrbit>),
    /// Covers of a rigid curve in a cobordism.
    Curve(Arc<BaseCurve>),
}

impl TableContext {
    pub fn name(&self) -> &str {
        match self {
            TableContext::Orbit(o) => o.name(),
            TableContext::Curve(c) => c.name(),
        }
    }

    fn base(&self) -> Arc<BaseCurve> {
        match self {
            TableContext::Orbit(o) => Arc::new(BaseCurve::orbit_cylinder(o)),
            TableContext::Curve(c) => c.clone(),
        }
    }

    fn end_orbits(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        match self {
            TableContext::Orbit(o) => {
                let names = BTreeSet::from([o.name().to_string()]);
                (names.clone(), names)
            }
            TableContext::Curve(c) => (
                c.negative_ends().multiplicities().into_keys().collect(),
                c.positive_ends().multiplicities().into_keys().collect(),
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CountEntry {
    pub positive: OrbitCollection,
    pub negative: OrbitCollection,
    pub count: BigRational,
    /// Why the obstruction-bundle description does not apply, if it does not.
    pub flag: Option<String>,
}

impl CountEntry {
    pub fn key(&self) -> String {
        format!("({};{})", self.positive, self.negative)
    }
}

/// Counts `#M(Γ⁺, Γ⁻)` keyed by unordered end collections.
#[derive(Debug, Clone)]
pub struct CountTable {
    context: TableContext,
    entries: Vec<CountEntry>,
    negative_side: Side,
    positive_side: Side,
}

impl CountTable {
    /// Validates and canonicalises the keys. Orbit tables put both `p` and
    /// `q` on the plus side; curve tables use `q⁻` and `p⁺`.
    pub fn new(context: TableContext, entries: Vec<(OrbitCollection, OrbitCollection, BigRational)>) -> Result<Self> {
        let (negative_side, positive_side) = match context {
            TableContext::Orbit(_) => (Side::Plus, Side::Plus),
            TableContext::Curve(_) => (Side::Minus, Side::Plus),
        };
        let mut table = CountTable {
            context,
            entries: Vec::new(),
            negative_side,
            positive_side,
        };
        let base = table.context.base();
        let mut seen = BTreeSet::new();
        for (positive, negative, count) in entries {
            let positive = positive.with_sign(EndSign::Positive).sorted();
            let negative = negative.with_sign(EndSign::Negative).sorted();
            let entry = CountEntry {
                flag: table.admissibility(&base, &positive, &negative)?,
                positive,
                negative,
                count,
            };
            if !seen.insert(entry.key()) {
                return Err(Error::InadmissibleKey(format!("{} listed twice", entry.key())));
            }
            table.entries.push(entry);
        }
        Ok(table)
    }

    /// Places the `q` and `p` variables on the given sides.
    pub fn with_sides(mut self, negative_side: Side, positive_side: Side) -> Self {
        self.negative_side = negative_side;
        self.positive_side = positive_side;
        self
    }

    pub fn context(&self) -> &TableContext {
        &self.context
    }
    pub fn entries(&self) -> &[CountEntry] {
        &self.entries
    }
    pub fn sides(&self) -> (Side, Side) {
        (self.negative_side, self.positive_side)
    }

    /// Returns the hypothesis flag for an admissible key.
    fn admissibility(
        &self,
        base: &Arc<BaseCurve>,
        positive: &OrbitCollection,
        negative: &OrbitCollection,
    ) -> Result<Option<String>> {
        let key = format!("({positive};{negative})");
        let reject = |why: String| Error::InadmissibleKey(format!("{key}: {why}"));
        if positive.is_empty() && negative.is_empty() {
            return Err(reject("both end collections are empty".into()));
        }
        for it in positive.items().iter().chain(negative.items()) {
            if !it.is_good() {
                return Err(reject(format!("{it} is a bad orbit")));
            }
        }
        for coll in [positive, negative] {
            let items = coll.items();
            let repeated_odd = items
                .windows(2)
                .any(|w| w[0] == w[1] && w[0].variable_degree(VarKind::P).map(|d| d % 2 != 0).unwrap_or(false));
            if repeated_odd {
                return Err(reject("an odd variable is repeated".into()));
            }
        }
        let degree = match &self.context {
            TableContext::Orbit(o) => {
                if let Some(it) = positive.items().iter().chain(negative.items()).find(|it| it.name() != o.name()) {
                    return Err(reject(format!("{it} is not an iterate of `{}`", o.name())));
                }
                positive.items().iter().map(OrbitIterate::k).sum::<u32>()
            }
            TableContext::Curve(c) => cover_degree(c, positive, negative).ok_or_else(|| {
                reject(format!("ends do not cover the asymptotics of `{}`", c.name()))
            })?,
        };
        let spec = CoverSpec::new(base.clone(), degree, positive.clone(), negative.clone())
            .map_err(|e| reject(e.to_string()))?;
        Ok(match spec.cokernel_rank() {
            Ok(_) => None,
            Err(e) => Some(e.to_string()),
        })
    }

    /// Monomial and weight `1/(s⁺!s⁻!κ⁺κ⁻)` for a key, including the sign of
    /// the ordered product.
    fn weighted_monomial(&self, entry: &CountEntry, truncation: u32) -> Result<GradedSeries> {
        let mut vars = Vec::new();
        for it in entry.negative.items() {
            vars.push(Variable::q(it, self.negative_side)?);
        }
        for it in entry.positive.items() {
            vars.push(Variable::p(it, self.positive_side)?);
        }
        let denominator = factorial(entry.positive.len())
            * factorial(entry.negative.len())
            * BigInt::from(entry.positive.kappa())
            * BigInt::from(entry.negative.kappa());
        let weight = BigRational::new(BigInt::one(), denominator);
        Ok(GradedSeries::product(&vars, weight, truncation))
    }
}

/// Degree of the cover of `curve` with the given ends, if any.
fn cover_degree(curve: &BaseCurve, positive: &OrbitCollection, negative: &OrbitCollection) -> Option<u32> {
    let (ends, cover) = if !curve.positive_ends().is_empty() {
        (curve.positive_ends(), positive)
    } else {
        (curve.negative_ends(), negative)
    };
    let (name, m) = ends.multiplicities().into_iter().next()?;
    let got = cover.multiplicities().get(&name).copied().unwrap_or(0);
    (got % m == 0 && got > 0).then_some(got / m)
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// A Hamiltonian or potential together with the orbits at its ends.
#[derive(Debug, Clone)]
pub struct Potential {
    series: GradedSeries,
    negative_orbits: BTreeSet<String>,
    positive_orbits: BTreeSet<String>,
    table: Option<CountTable>,
    flagged: BTreeMap<Monomial, String>,
}

impl Potential {
    pub fn from_series(series: GradedSeries, negative_orbits: BTreeSet<String>, positive_orbits: BTreeSet<String>) -> Self {
        Potential {
            series,
            negative_orbits,
            positive_orbits,
            table: None,
            flagged: BTreeMap::new(),
        }
    }

    /// `Σ κ⁻¹ q⁻_{γ^k} p⁺_{γ^k}` over all good iterates of the given orbits.
    pub fn identity(orbits: &[Arc<ReebOrbit>], truncation: u32) -> Result<Self> {
        let mut series = GradedSeries::zero(truncation);
        for orbit in orbits {
            for k in 1..=orbit.max_iterate() {
                let it = OrbitIterate::new(orbit.clone(), k)?;
                if !it.is_good() {
                    continue;
                }
                let vars = [Variable::q(&it, Side::Minus)?, Variable::p(&it, Side::Plus)?];
                series = series + GradedSeries::product(&vars, BigRational::new(1.into(), k.into()), truncation);
            }
        }
        let names: BTreeSet<String> = orbits.iter().map(|o| o.name().to_string()).collect();
        Ok(Self::from_series(series, names.clone(), names))
    }

    pub fn series(&self) -> &GradedSeries {
        &self.series
    }
    pub fn negative_orbits(&self) -> &BTreeSet<String> {
        &self.negative_orbits
    }
    pub fn positive_orbits(&self) -> &BTreeSet<String> {
        &self.positive_orbits
    }
    pub fn table(&self) -> Option<&CountTable> {
        self.table.as_ref()
    }

    /// Recovers the count table from the coefficients by inverting the
    /// weights. Only potentials built from a table can be read back.
    pub fn read_counts(&self) -> Result<CountTable> {
        let table = self
            .table
            .as_ref()
            .ok_or_else(|| Error::InadmissibleKey("potential was not built from a count table".into()))?;
        let mut entries = Vec::new();
        for (m, c) in self.series.terms() {
            let mut positive = Vec::new();
            let mut negative = Vec::new();
            for (v, e) in m.factors() {
                let target = match v.kind() {
                    VarKind::P => &mut positive,
                    VarKind::Q => &mut negative,
                };
                target.extend(std::iter::repeat_n(v.iterate().clone(), e as usize));
            }
            let positive = OrbitCollection::new(EndSign::Positive, positive);
            let negative = OrbitCollection::new(EndSign::Negative, negative);
            let probe = CountEntry {
                positive,
                negative,
                count: BigRational::one(),
                flag: None,
            };
            let unit = table.weighted_monomial(&probe, self.series.truncation())?;
            let weight = unit.coefficient(m);
            entries.push((probe.positive, probe.negative, c / weight));
        }
        Ok(CountTable::new(table.context.clone(), entries)?.with_sides(table.negative_side, table.positive_side))
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.series.fmt(f)
    }
}

/// Potential of a table over any context.
pub fn potential_from_counts(table: &CountTable, truncation: u32) -> Result<Potential> {
    let mut series = GradedSeries::zero(truncation);
    let mut flagged = BTreeMap::new();
    for entry in &table.entries {
        let term = table.weighted_monomial(entry, truncation)?.scale(&entry.count);
        if let Some(why) = &entry.flag {
            for m in term.terms().keys() {
                flagged.insert(m.clone(), why.clone());
            }
        }
        series = series + term;
    }
    let (negative_orbits, positive_orbits) = table.context.end_orbits();
    Ok(Potential {
        series,
        negative_orbits,
        positive_orbits,
        table: Some(table.clone()),
        flagged,
    })
}

/// `H_γ = Σ #M / (s⁺!s⁻!κ_{Γ⁺}κ_{Γ⁻}) q^{Γ⁻} p^{Γ⁺}` for an orbit table.
pub fn hamiltonian_from_counts(table: &CountTable, truncation: u32) -> Result<Potential> {
    if !matches!(table.context, TableContext::Orbit(_)) {
        return Err(Error::InadmissibleKey(format!(
            "table over `{}` is not an orbit table",
            table.context.name()
        )));
    }
    potential_from_counts(table, truncation)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VanishingReport {
    Pass,
    /// Nonzero, but only through entries whose hypotheses fail.
    Warn { flagged: Vec<String> },
    Fail { offending: Vec<String> },
}

impl VanishingReport {
    pub fn is_pass(&self) -> bool {
        matches!(self, VanishingReport::Pass)
    }
}

impl fmt::Display for VanishingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VanishingReport::Pass => f.write_str("pass"),
            VanishingReport::Warn { flagged } => write!(f, "warn: only flagged terms remain: {}", flagged.join(", ")),
            VanishingReport::Fail { offending } => write!(f, "fail: nonzero terms {}", offending.join(", ")),
        }
    }
}

/// Checks that a closed-orbit Hamiltonian is identically zero.
pub fn assert_hamiltonian_vanishes(h: &Potential) -> VanishingReport {
    if h.series.is_zero() {
        return VanishingReport::Pass;
    }
    let render = |m: &Monomial, c: &BigRational| GradedSeries::term(m.clone(), c.clone(), h.series.truncation()).to_string();
    let (flagged, offending): (Vec<_>, Vec<_>) = h.series.terms().iter().partition(|(m, _)| h.flagged.contains_key(m));
    if offending.is_empty() {
        VanishingReport::Warn {
            flagged: flagged.into_iter().map(|(m, c)| render(m, c)).collect(),
        }
    } else {
        VanishingReport::Fail {
            offending: offending.into_iter().map(|(m, c)| render(m, c)).collect(),
        }
    }
}

fn check_sides(f: &Potential, role: &str) -> Result<()> {
    for v in f.series.variables() {
        let ok = matches!((v.kind(), v.side()), (VarKind::Q, Side::Minus) | (VarKind::P, Side::Plus));
        if !ok {
            return Err(Error::SideConflict(format!("{role} contains {v}, expected only q- and p+ variables")));
        }
    }
    // the constraints q = κ ∂f/∂p only respect parity when f is even
    if let Some(m) = f.series.terms().keys().find(|m| m.count_where(Variable::is_odd) % 2 == 1) {
        return Err(Error::OddPotential(format!("{role} has the odd term {m}")));
    }
    Ok(())
}

fn non_middle_degree(m: &Monomial) -> u32 {
    m.count_where(|v| v.side() != Side::Middle)
}

fn kappa(v: &Variable) -> BigRational {
    BigRational::from_integer(v.kappa().into())
}

/// `f₋ # f₊ = (f₋ + f₊ − Σ κ⁻¹ q_γ p_γ)|_L`, with `L` cut out by
/// `q_γ = κ f₋∂⃖/∂p_γ` and `p_γ = κ ∂⃗f₊/∂q_γ` for the iterates `γ` of the
/// `middle` orbits.
///
/// The `p⁺` variables of `f₋` and the `q⁻` variables of `f₊` over middle
/// orbits are the ones eliminated. `L` is solved by fixed-point iteration in
/// the filtration by the number of remaining variables, keeping terms up to
/// `order`. Each pass gains at least one order once any chain of purely
/// middle dependencies has been traversed, so the iteration gets
/// `(order + 1)` passes per unknown before giving up.
pub fn compose_sharp(f_minus: &Potential, f_plus: &Potential, middle: &BTreeSet<String>, order: u32) -> Result<Potential> {
    check_sides(f_minus, "lower potential")?;
    check_sides(f_plus, "upper potential")?;
    check_registry([&f_minus.series, &f_plus.series])?;
    let is_middle = |v: &Variable| middle.contains(v.iterate().name());
    let lower = f_minus.series.relabel(|v| {
        if v.kind() == VarKind::P && is_middle(v) {
            v.with_side(Side::Middle)
        } else {
            v.clone()
        }
    });
    let upper = f_plus.series.relabel(|v| {
        if v.kind() == VarKind::Q && is_middle(v) {
            v.with_side(Side::Middle)
        } else {
            v.clone()
        }
    });
    let truncation = lower.truncation().min(upper.truncation());
    let work = order.max(truncation);
    let lower = lower.with_truncation(work);
    let upper = upper.with_truncation(work);

    let mut unknowns = BTreeSet::new();
    for v in lower.variables().into_iter().chain(upper.variables()) {
        if v.side() == Side::Middle {
            unknowns.insert(v.conjugate());
            unknowns.insert(v);
        }
    }
    let keep = |s: GradedSeries| s.filter(|m| non_middle_degree(m) <= order);
    let equations: BTreeMap<Variable, GradedSeries> = unknowns
        .iter()
        .map(|v| {
            let rhs = match v.kind() {
                VarKind::Q => lower.right_partial(&v.conjugate()),
                VarKind::P => upper.partial(&v.conjugate()),
            };
            (v.clone(), rhs.scale(&kappa(v)))
        })
        .collect();

    let mut solution: BTreeMap<Variable, GradedSeries> =
        unknowns.iter().map(|v| (v.clone(), GradedSeries::zero(work))).collect();
    let passes = (order as usize + 1) * unknowns.len().max(1) + 1;
    let mut stable = false;
    for _ in 0..passes {
        let next: BTreeMap<Variable, GradedSeries> = equations
            .iter()
            .map(|(v, rhs)| (v.clone(), keep(rhs.substitute_raw(&solution))))
            .collect();
        if next == solution {
            stable = true;
            break;
        }
        solution = next;
    }
    if !stable {
        let obstructions: Vec<String> = solution
            .iter()
            .filter_map(|(v, s)| {
                let c = s.coefficient(&Monomial::one());
                (!c.is_zero()).then(|| format!("{v} = {c} + …"))
            })
            .collect();
        return Err(Error::NoFormalSolution(format!(
            "constraint iteration did not stabilise within {passes} passes; constant terms: [{}]",
            obstructions.join(", ")
        )));
    }

    let mut total = &lower + &upper;
    for p in unknowns.iter().filter(|v| v.kind() == VarKind::P) {
        let q = p.conjugate();
        let inverse = BigRational::new(1.into(), p.kappa().into());
        total = total - GradedSeries::product(&[q, p.clone()], inverse, work);
    }
    let restricted = keep(total.substitute_raw(&solution)).with_truncation(truncation);
    Ok(Potential::from_series(
        restricted,
        f_minus.negative_orbits.clone(),
        f_plus.positive_orbits.clone(),
    ))
}

/// `F¹ = F^{10} # F⁰ # F^{01}`, computed with both groupings.
pub fn transform_potential(f0: &Potential, f10: &Potential, f01: &Potential, order: u32) -> Result<Potential> {
    let lower_mid = f10.positive_orbits.clone();
    let upper_mid = f01.negative_orbits.clone();
    if !lower_mid.is_subset(&f0.negative_orbits) {
        return Err(Error::SideConflict(format!(
            "lower cobordism ends {lower_mid:?} are not negative ends {:?} of the middle potential",
            f0.negative_orbits
        )));
    }
    if !upper_mid.is_subset(&f0.positive_orbits) {
        return Err(Error::SideConflict(format!(
            "upper cobordism ends {upper_mid:?} are not positive ends {:?} of the middle potential",
            f0.positive_orbits
        )));
    }
    let right_first = compose_sharp(f10, &compose_sharp(f0, f01, &upper_mid, order)?, &lower_mid, order)?;
    let left_first = compose_sharp(&compose_sharp(f10, f0, &lower_mid, order)?, f01, &upper_mid, order)?;
    if right_first.series != left_first.series {
        return Err(Error::AssociativityViolation(format!(
            "F10#(F0#F01) = {} but (F10#F0)#F01 = {}",
            right_first.series, left_first.series
        )));
    }
    Ok(right_first)
}

/// `Σ_{γ⁻} κ ∂H₋/∂p⁻ · ∂k/∂q⁻ + Σ_{γ⁺} κ ∂k/∂p⁺ · ∂H₊/∂q⁺`, the right-hand
/// side of the Hamilton-Jacobi equation for the homotopy potential `k`.
pub fn hamilton_jacobi_rhs(h_plus: &Potential, h_minus: &Potential, k: &GradedSeries) -> Result<GradedSeries> {
    check_registry([&h_plus.series, &h_minus.series, k])?;
    let truncation = k.truncation().min(h_plus.series.truncation()).min(h_minus.series.truncation());
    let mut out = GradedSeries::zero(truncation);
    let p_vars = |side: Side, series: [&GradedSeries; 2]| -> BTreeSet<Variable> {
        series
            .iter()
            .flat_map(|s| s.variables())
            .filter(|v| v.side() == side)
            .map(|v| if v.kind() == VarKind::P { v } else { v.conjugate() })
            .collect()
    };
    for p in p_vars(Side::Minus, [&h_minus.series, k]) {
        let term = h_minus.series.right_partial(&p).multiply(&k.partial(&p.conjugate()))?;
        out = out + term.scale(&kappa(&p));
    }
    for p in p_vars(Side::Plus, [&h_plus.series, k]) {
        let term = k.right_partial(&p).multiply(&h_plus.series.partial(&p.conjugate()))?;
        out = out + term.scale(&kappa(&p));
    }
    Ok(out)
}

/// Restricts `g` to the Lagrangian of `F`: `q⁺ = κ F∂⃖/∂p⁺`, `p⁻ = κ ∂⃗F/∂q⁻`.
pub fn lagrangian_restrict(g: &GradedSeries, f_v: &Potential) -> Result<GradedSeries> {
    check_registry([g, &f_v.series])?;
    let mut assignment = BTreeMap::new();
    for v in g.variables() {
        let image = match (v.kind(), v.side()) {
            (VarKind::Q, Side::Plus) => f_v.series.right_partial(&v.conjugate()),
            (VarKind::P, Side::Minus) => f_v.series.partial(&v.conjugate()),
            _ => continue,
        };
        let image = image.scale(&kappa(&v));
        assignment.insert(v, image);
    }
    g.substitute(&assignment, false)
}
