//! Exceptional spheres: their index invariants, the descendant count
//! `#M¹_{v,2,1} = −1/4` with an auditable trace, the equations obtained by
//! stretching along a neck, and the obstruction to breaking only along
//! hyperbolic orbits.
//!
//! Results imported from outside this crate's computations enter as named
//! [`Axiom`]s and are quoted by every derivation that uses them.

use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One};

use crate::covers::{neck_strata, BaseCurve, BaseCurveData, CoverSpec, LevelTag, NeckSplit, StrataGraph};
use crate::error::{Error, Result};
use crate::orbits::{EndSign, OrbitCollection, OrbitIterate, ReebOrbit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Axiom {
    pub name: &'static str,
    pub statement: &'static str,
    pub source: &'static str,
}

pub const CLOSED_ORBIT_HAMILTONIAN_VANISHES: Axiom = Axiom {
    name: "closed-orbit-vanishing",
    statement: "H_gamma = 0 for every closed Reeb orbit and every coherent choice of obstruction sections",
    source: "imported vanishing theorem for local Hamiltonians of orbit cylinders",
};

pub const DESCENDANT_HAMILTONIAN_VANISHES: Axiom = Axiom {
    name: "hyperbolic-descendant-vanishing",
    statement: "H^1_{gamma,1} = 0 when gamma is hyperbolic, for any sections making the moduli spaces regular",
    source: "imported computation of the descendant Hamiltonian of an orbit cylinder",
};

pub const UNIFORMIZED_GEODESICS_HYPERBOLIC: Axiom = Axiom {
    name: "uniformized-geodesics",
    statement: "a surface of genus at least two has a metric whose closed geodesics are all hyperbolic and Morse",
    source: "uniformization; the Reeb flow on the unit cotangent bundle is the geodesic flow",
};

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "axiom {}: {} ({})", self.name, self.statement, self.source)
    }
}

/// One step of a derivation: a claim, where it comes from, and the data it
/// consumes and produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub id: String,
    pub claim: String,
    pub citation: String,
    pub inputs: Vec<(String, String)>,
    pub outputs: Vec<(String, String)>,
}

impl TraceStep {
    fn new(id: impl Into<String>, claim: impl Into<String>, citation: impl Into<String>) -> Self {
        TraceStep {
            id: id.into(),
            claim: claim.into(),
            citation: citation.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.push((key.to_string(), value.to_string()));
        self
    }

    fn output(mut self, key: &str, value: impl ToString) -> Self {
        self.outputs.push((key.to_string(), value.to_string()));
        self
    }

    pub fn output_value(&self, key: &str) -> Option<&str> {
        self.outputs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Single-line `key=value` form; fields are separated by tabs.
    pub fn record(&self) -> String {
        let join = |kv: &[(String, String)]| kv.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
        format!(
            "step={}\tclaim={}\tcitation={}\tinputs={}\toutputs={}",
            self.id,
            self.claim,
            self.citation,
            join(&self.inputs),
            join(&self.outputs)
        )
    }
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}] {}", self.id, self.claim)?;
        writeln!(f, "    by: {}", self.citation)?;
        for (k, v) in &self.inputs {
            writeln!(f, "    in:  {k} = {v}")?;
        }
        for (k, v) in &self.outputs {
            writeln!(f, "    out: {k} = {v}")?;
        }
        Ok(())
    }
}

/// The closed, immersed, index-zero sphere with `c₁ = 1`.
pub fn exceptional_sphere(name: &str) -> Arc<BaseCurve> {
    Arc::new(
        BaseCurve::new(BaseCurveData {
            name: name.to_string(),
            positive_ends: OrbitCollection::empty(EndSign::Positive),
            negative_ends: OrbitCollection::empty(EndSign::Negative),
            index: 0,
            rel_c1_doubled: 2,
            immersed: true,
            components: 1,
        })
        .expect("the exceptional sphere satisfies the index formula"),
    )
}

#[derive(Debug, Clone)]
pub struct ExceptionalInvariants {
    base: Arc<BaseCurve>,
    pub c_n_doubled: i64,
    pub c_n: i64,
    pub self_intersection: i64,
    pub c1: i64,
}

impl ExceptionalInvariants {
    /// Fredholm index `2(d−1)` of a `d`-fold cover, computed by the index
    /// formula.
    pub fn cover_index(&self, d: u32) -> Result<i64> {
        let empty = |s| OrbitCollection::empty(s);
        let spec = CoverSpec::new(self.base.clone(), d, empty(EndSign::Positive), empty(EndSign::Negative))?;
        Ok(spec.fredholm_index())
    }

    pub fn base(&self) -> &Arc<BaseCurve> {
        &self.base
    }
}

/// `2c_N = ind − 2 = −2`, `[v]·[v] = 2δ + c_N = −1` (embedded, so `δ = 0`),
/// and `c₁ = c_N + 2 = 1`, each checked against the declared data.
pub fn exceptional_invariants(base: &Arc<BaseCurve>) -> Result<ExceptionalInvariants> {
    let reject = |why: String| Error::NotExceptional(format!("`{}`: {why}", base.name()));
    if !base.is_closed() {
        return Err(reject("curve has punctures".into()));
    }
    if !base.is_immersed() {
        return Err(reject("curve is not immersed".into()));
    }
    if base.components() != 1 {
        return Err(reject("curve is disconnected".into()));
    }
    if base.index() != 0 {
        return Err(reject(format!("index {} is not zero", base.index())));
    }
    let empty = |s| OrbitCollection::empty(s);
    let itself = CoverSpec::new(base.clone(), 1, empty(EndSign::Positive), empty(EndSign::Negative))?;
    let c_n_doubled = itself.normal_chern_numbers()?.c_n_doubled;
    let c_n = c_n_doubled / 2;
    let self_intersection = c_n;
    let c1 = c_n + 2;
    if 2 * c1 != base.rel_c1_doubled() {
        return Err(reject(format!(
            "declared 2c1 = {} but the normal bundle gives c1 = {c1}",
            base.rel_c1_doubled()
        )));
    }
    if self_intersection != -1 {
        return Err(reject(format!("self-intersection {self_intersection} is not -1")));
    }
    Ok(ExceptionalInvariants {
        base: base.clone(),
        c_n_doubled,
        c_n,
        self_intersection,
        c1,
    })
}

/// Covers of a closed curve with `r` marked points mapped to special points,
/// point `i` required to branch when `branching_orders[i] = 1`.
#[derive(Debug, Clone)]
pub struct DescendantSpec {
    base: Arc<BaseCurve>,
    d: u32,
    branching_orders: Vec<u32>,
}

impl DescendantSpec {
    pub fn new(base: Arc<BaseCurve>, d: u32, branching_orders: Vec<u32>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InconsistentProfile("descendant degree must be positive".into()));
        }
        if let Some(j) = branching_orders.iter().find(|&&j| j > 1) {
            return Err(Error::PipelineHypothesis(format!(
                "branching order {j} has no branch-point interpretation here; only 0 and 1 are supported"
            )));
        }
        Ok(DescendantSpec {
            base,
            d,
            branching_orders,
        })
    }

    pub fn base(&self) -> &Arc<BaseCurve> {
        &self.base
    }
    pub fn degree(&self) -> u32 {
        self.d
    }
    pub fn marked_points(&self) -> u32 {
        self.branching_orders.len() as u32
    }
    pub fn branching_orders(&self) -> &[u32] {
        &self.branching_orders
    }

    /// The underlying cover moduli space.
    pub fn cover(&self) -> Result<CoverSpec> {
        let constrained = self.branching_orders.iter().filter(|&&j| j == 1).count() as u32;
        CoverSpec::with_points(
            self.base.clone(),
            self.d,
            OrbitCollection::empty(EndSign::Positive),
            OrbitCollection::empty(EndSign::Negative),
            self.marked_points(),
            constrained,
            1,
        )
    }
}

/// `d^r`: the divisor equation identifies `M_{v,d,r}` with that many copies
/// of `M_{v,d}`.
pub fn descendant_copies(spec: &DescendantSpec) -> u64 {
    u64::from(spec.d).pow(spec.marked_points())
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub value: BigRational,
    pub steps: Vec<TraceStep>,
}

impl PipelineResult {
    pub fn step(&self, id: &str) -> Option<&TraceStep> {
        self.steps.iter().find(|s| s.id == id)
    }
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Computes `#(M¹_{v,2,1})^ν = −1/4` in four steps: divisor equation,
/// topological recursion to a fibre product of simple curves, identification
/// of the obstruction bundle with the normal bundle, and its Euler number.
pub fn recursion_pipeline(spec: &DescendantSpec) -> Result<PipelineResult> {
    let fail = |why: String| Error::PipelineHypothesis(why);
    if spec.d != 2 || spec.branching_orders != [1] {
        return Err(fail(format!(
            "the recursion is implemented for d = 2 with one branching marked point, got d = {} and orders {:?}",
            spec.d, spec.branching_orders
        )));
    }
    let inv = exceptional_invariants(&spec.base).map_err(|e| fail(e.to_string()))?;
    let glued = spec.cover()?;
    let name = spec.base.name();

    // divisor equation twice: two extra unconstrained points
    let enlarged = DescendantSpec::new(spec.base.clone(), 2, vec![1, 0, 0])?.cover()?;
    let extra = DescendantSpec::new(spec.base.clone(), 2, vec![0, 0])?;
    let copies = descendant_copies(&extra);
    let factor = BigRational::new(BigInt::one(), BigInt::from(copies));
    let divisor = TraceStep::new(
        "divisor",
        format!("#M^1_{{{name},2,1}} = 1/{copies} · #M^{{(1,0,0)}}_{{{name},2,3}}"),
        "divisor equation: each unconstrained marked point mapped to a special point has d preimages",
    )
    .input("d", 2)
    .input("added_points", 2)
    .input("enlarged_space", enlarged.label())
    .output("copies", copies)
    .output("factor", &factor);

    // topological recursion lands on pairs of simple spheres meeting at a point
    let simple = DescendantSpec::new(spec.base.clone(), 1, vec![0])?.cover()?;
    let simple_dim = simple.tangency_dimension()?.value + 2 * i64::from(simple.marked_points());
    let simple_index = simple.fredholm_index() + 2 * i64::from(simple.marked_points());
    // the evaluation constraint u1(w1) = u2(w2) has real codimension four
    let fibre_expected = 2 * simple_index - 4;
    let fibre_actual = simple_dim;
    let recursion = TraceStep::new(
        "recursion",
        format!(
            "#M^{{(1,0,0)}}_{{{name},2,3}} = #(M_{{{name},1,3}} x_ev M_{{{name},1,2}}) = #(M_{{{name},1,1}} x_ev M_{{{name},1,1}}), a copy of S^2"
        ),
        "topological recursion, then the divisor equation in reverse; u1 = u2 = v after reparametrisation",
    )
    .input("factor_space", simple.label())
    .output("fibre_product", "S^2")
    .output("dimension", fibre_actual)
    .output("expected_dimension", fibre_expected);

    // obstruction bundle: the cokernel over the fibre product is N_v
    let rank = glued.cokernel_rank()?;
    let unperturbed = glued.tangency_dimension()?.value;
    let excess = fibre_actual - fibre_expected;
    if rank != 2 || excess != 2 || unperturbed != 2 || glued.virtual_dimension() != 0 {
        return Err(fail(format!(
            "obstruction bookkeeping does not close: rank {rank}, excess {excess}, dimension {unperturbed}, virtual dimension {}",
            glued.virtual_dimension()
        )));
    }
    let obstruction = TraceStep::new(
        "obstruction",
        format!("coker over the fibre product is (N_{name})_z; rank matches the obstruction bundle of {}", glued.label()),
        "both components are simple and regular, so the cokernel is (N_z + N_z)/diagonal",
    )
    .input("unperturbed_dimension", unperturbed)
    .input("virtual_dimension", glued.virtual_dimension())
    .output("rank", rank)
    .output("bundle", format!("N_{name}"));

    // Euler number of the normal bundle is the self-intersection
    let euler = inv.self_intersection;
    let euler_step = TraceStep::new(
        "euler",
        format!("#(fibre product)^nu = integral of e(N_{name}) over S^2 = [{name}]·[{name}]"),
        "Euler class of the obstruction bundle counts zeros of a generic section",
    )
    .input("self_intersection", inv.self_intersection)
    .output("euler", euler);

    let value = factor * BigRational::from_integer(euler.into());
    if value != rational(-1, 4) {
        return Err(fail(format!("pipeline produced {value}")));
    }
    Ok(PipelineResult {
        value,
        steps: vec![divisor, recursion, obstruction, euler_step],
    })
}

/// A closed curve stretched along a hypersurface into an upper and a lower
/// piece joined by neck orbits.
#[derive(Debug, Clone)]
pub struct NeckConfiguration {
    split: NeckSplit,
    glued: Arc<BaseCurve>,
    morse: bool,
}

impl NeckConfiguration {
    pub fn new(upper: Arc<BaseCurve>, lower: Arc<BaseCurve>, separating: bool, morse: bool) -> Result<Self> {
        if !separating {
            return Err(Error::PipelineHypothesis(
                "only separating hypersurfaces are supported".into(),
            ));
        }
        for piece in [&upper, &lower] {
            if piece.index() != 0 {
                return Err(Error::InvalidCurve {
                    name: piece.name().to_string(),
                    reason: format!("neck pieces must have index 0, got {}", piece.index()),
                });
            }
        }
        let glued = Arc::new(BaseCurve::new(BaseCurveData {
            name: "v".into(),
            positive_ends: OrbitCollection::empty(EndSign::Positive),
            negative_ends: OrbitCollection::empty(EndSign::Negative),
            index: 0,
            rel_c1_doubled: upper.rel_c1_doubled() + lower.rel_c1_doubled(),
            immersed: upper.is_immersed() && lower.is_immersed(),
            components: 1,
        })?);
        let split = NeckSplit::new(upper, lower)?;
        Ok(NeckConfiguration { split, glued, morse })
    }

    /// The exceptional sphere broken along the given simple orbits: a
    /// connected upper piece with one negative end per orbit and one plane
    /// below each orbit, all of index 0.
    pub fn exceptional(orbits: &[Arc<ReebOrbit>], morse: bool) -> Result<Self> {
        let m = orbits.len() as i64;
        let ends = |sign| -> Result<OrbitCollection> {
            let items = orbits.iter().map(|o| OrbitIterate::new(o.clone(), 1)).collect::<Result<_>>()?;
            Ok(OrbitCollection::new(sign, items))
        };
        let negative = ends(EndSign::Negative)?;
        let cz_sum = negative.cz_sum();
        let upper = BaseCurve::new(BaseCurveData {
            name: "v+".into(),
            positive_ends: OrbitCollection::empty(EndSign::Positive),
            negative_ends: negative,
            index: 0,
            rel_c1_doubled: 2 - m + cz_sum,
            immersed: true,
            components: 1,
        })?;
        let lower = BaseCurve::new(BaseCurveData {
            name: "v-".into(),
            positive_ends: ends(EndSign::Positive)?,
            negative_ends: OrbitCollection::empty(EndSign::Negative),
            index: 0,
            rel_c1_doubled: m - cz_sum,
            immersed: true,
            components: orbits.len() as u32,
        })?;
        Self::new(Arc::new(upper), Arc::new(lower), true, morse)
    }

    pub fn upper(&self) -> &Arc<BaseCurve> {
        self.split.upper()
    }
    pub fn lower(&self) -> &Arc<BaseCurve> {
        self.split.lower()
    }
    pub fn glued(&self) -> &Arc<BaseCurve> {
        &self.glued
    }
    pub fn orbits(&self) -> Vec<Arc<ReebOrbit>> {
        self.split.orbits()
    }
    pub fn is_morse(&self) -> bool {
        self.morse
    }

    /// Limits of `M¹_{v,2,1}` under neck-stretching.
    pub fn strata(&self) -> Result<StrataGraph> {
        let spec = DescendantSpec::new(self.glued.clone(), 2, vec![1])?.cover()?;
        neck_strata(&spec, &self.split)
    }
}

/// A moduli count appearing in a splitting equation, with its bookkeeping.
#[derive(Debug, Clone)]
pub struct CountSymbol {
    pub spec: CoverSpec,
    pub level: LevelTag,
    pub index: i64,
    pub virtual_dimension: i64,
    pub dimension: i64,
    pub obstruction_rank: u64,
}

impl CountSymbol {
    fn new(spec: CoverSpec, level: LevelTag) -> Result<Self> {
        Ok(CountSymbol {
            index: spec.fredholm_index(),
            virtual_dimension: spec.virtual_dimension(),
            dimension: spec.tangency_dimension()?.value,
            obstruction_rank: spec.cokernel_rank()?,
            level,
            spec,
        })
    }

    pub fn label(&self) -> String {
        format!("#{}", self.spec.label())
    }
}

/// `sum[0] + sum[1] = single = value`.
#[derive(Debug, Clone)]
pub struct SplittingEquation {
    pub orbit: String,
    pub defect: i64,
    pub sum: [CountSymbol; 2],
    pub single: CountSymbol,
    pub value: BigRational,
    /// Indices of the double covers of `v⁺` and `v⁻` asymptotic to `γ²`.
    pub upper_double_index: i64,
    pub lower_double_index: i64,
}

impl fmt::Display for SplittingEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + {} = {} = {}",
            self.sum[0].label(),
            self.sum[1].label(),
            self.single.label(),
            self.value
        )
    }
}

fn require_morse(neck: &NeckConfiguration) -> Result<()> {
    if !neck.morse {
        let names: Vec<_> = neck.orbits().iter().map(|o| o.name().to_string()).collect();
        return Err(Error::NotMorse(names.join(", ")));
    }
    Ok(())
}

/// The equations relating double covers of `v±` for a single elliptic neck
/// orbit, selected by the sign of `CZ(γ²) − 2CZ(γ)`.
pub fn splitting_equations(neck: &NeckConfiguration) -> Result<SplittingEquation> {
    require_morse(neck)?;
    let orbits = neck.orbits();
    let [gamma] = orbits.as_slice() else {
        return Err(Error::PipelineHypothesis(format!(
            "splitting equations need a single neck orbit, got {}",
            orbits.len()
        )));
    };
    if !gamma.is_elliptic() {
        return Err(Error::NotElliptic(gamma.name().to_string()));
    }
    for piece in [neck.upper(), neck.lower()] {
        if !piece.is_immersed() || !piece.all_ends_elliptic() {
            return Err(Error::HypothesesViolated(format!(
                "`{}` must be immersed with elliptic ends",
                piece.name()
            )));
        }
    }
    let defect = gamma.cz_defect(1, 1)?;
    let g1 = OrbitIterate::new(gamma.clone(), 1)?;
    let g2 = OrbitIterate::new(gamma.clone(), 2)?;
    let pair = |sign| OrbitCollection::new(sign, vec![g1.clone(), g1.clone()]);
    let double = |sign| OrbitCollection::new(sign, vec![g2.clone()]);
    let none = |sign| OrbitCollection::empty(sign);
    use EndSign::{Negative as N, Positive as P};

    let (upper, lower) = (neck.upper().clone(), neck.lower().clone());
    let upper_double = CoverSpec::new(upper.clone(), 2, none(P), double(N))?;
    let lower_double = CoverSpec::new(lower.clone(), 2, double(P), none(N))?;
    let upper_branched = CoverSpec::with_points(upper, 2, none(P), pair(N), 1, 1, 1)?;
    let lower_branched = CoverSpec::with_points(lower, 2, pair(P), none(N), 1, 1, 1)?;

    let (sum, single) = match defect {
        -1 => (
            [
                CountSymbol::new(lower_double.clone(), LevelTag::Lower)?,
                CountSymbol::new(upper_branched, LevelTag::Upper)?,
            ],
            CountSymbol::new(lower_branched, LevelTag::Lower)?,
        ),
        1 => (
            [
                CountSymbol::new(upper_double.clone(), LevelTag::Upper)?,
                CountSymbol::new(lower_branched, LevelTag::Lower)?,
            ],
            CountSymbol::new(upper_branched, LevelTag::Upper)?,
        ),
        other => {
            return Err(Error::PipelineHypothesis(format!(
                "CZ defect {other} of elliptic `{}` is not ±1",
                gamma.name()
            )))
        }
    };

    // every count must occur as a level of a neck-stretching limit
    let graph = neck.strata()?;
    let unconstrained = DescendantSpec::new(neck.glued().clone(), 2, vec![])?.cover()?;
    let plain = neck_strata(&unconstrained, &neck.split)?;
    for symbol in sum.iter().chain(std::iter::once(&single)) {
        let label = symbol.spec.label();
        let found = graph.find(symbol.level, &label).is_some() || plain.find(symbol.level, &label).is_some();
        if !found {
            return Err(Error::PipelineHypothesis(format!("{label} does not occur as a neck level")));
        }
    }

    let value = recursion_pipeline(&DescendantSpec::new(neck.glued().clone(), 2, vec![1])?)?.value;
    Ok(SplittingEquation {
        orbit: gamma.name().to_string(),
        defect,
        sum,
        single,
        value,
        upper_double_index: upper_double.fredholm_index(),
        lower_double_index: lower_double.fredholm_index(),
    })
}

#[derive(Debug, Clone)]
pub enum Necessity {
    Consistent { elliptic: String },
    Contradiction { derivation: Vec<TraceStep> },
}

impl Necessity {
    pub fn is_contradiction(&self) -> bool {
        matches!(self, Necessity::Contradiction { .. })
    }
}

/// Decides whether the neck orbits are compatible with the descendant count
/// `−1/4`: if they are all hyperbolic, the count is forced to vanish.
pub fn elliptic_necessity(neck: &NeckConfiguration) -> Result<Necessity> {
    require_morse(neck)?;
    let orbits = neck.orbits();
    if let Some(e) = orbits.iter().find(|o| o.is_elliptic()) {
        return Ok(Necessity::Consistent {
            elliptic: e.name().to_string(),
        });
    }

    let pipeline = recursion_pipeline(&DescendantSpec::new(neck.glued().clone(), 2, vec![1])?)?;
    let graph = neck.strata()?;
    let mut derivation = Vec::new();
    let mut survivors = Vec::new();
    for gamma in &orbits {
        let cylinder = BaseCurve::orbit_cylinder(gamma);
        let levels: Vec<&crate::covers::StrataNode> = graph
            .nodes
            .iter()
            .filter(|n| n.level == LevelTag::NeckCylinder && n.spec.base().name() == cylinder.name())
            .collect();
        if levels.is_empty() {
            return Err(Error::PipelineHypothesis(format!(
                "no limit puts the special point on R x {}",
                gamma.name()
            )));
        }
        let mut a = TraceStep::new(
            format!("a:{}", gamma.name()),
            format!(
                "with the special point on the intersection locus, it lies on the orbit cylinder over {} after stretching",
                gamma.name()
            ),
            "neck-stretching limits of the constrained double cover",
        )
        .input("orbit", gamma);
        for n in &levels {
            a = a.output(&format!("n{}", n.id), format!("{} vdim={}", n.spec.label(), n.dimension));
        }
        derivation.push(a);

        let (kept, dropped): (Vec<&crate::covers::StrataNode>, Vec<_>) = levels.iter().copied().partition(|n| n.dimension >= 0);
        let mut b = TraceStep::new(
            format!("b:{}", gamma.name()),
            "strata of negative virtual dimension are empty after a generic choice of obstruction sections",
            "generic sections in obstruction bundles over negative-dimensional moduli",
        );
        for n in &dropped {
            b = b.output(&format!("n{}", n.id), format!("{} vdim={}", n.spec.label(), n.dimension));
        }
        derivation.push(b);

        let pair = |sign| -> Result<OrbitCollection> {
            let one = OrbitIterate::new(gamma.clone(), 1)?;
            Ok(OrbitCollection::new(sign, vec![one.clone(), one]))
        };
        let expected = (pair(EndSign::Positive)?, pair(EndSign::Negative)?);
        for n in &kept {
            if n.spec.components() != 1
                || n.spec.positive_ends().sorted() != expected.0
                || n.spec.negative_ends().sorted() != expected.1
                || n.dimension != 0
            {
                return Err(Error::PipelineHypothesis(format!(
                    "unexpected surviving stratum {} of dimension {}",
                    n.spec.label(),
                    n.dimension
                )));
            }
            let rank = n.spec.cokernel_rank()?;
            let dim = n.spec.tangency_dimension()?.value;
            derivation.push(
                TraceStep::new(
                    format!("c:{}", gamma.name()),
                    format!(
                        "{} carries a rank-{rank} obstruction bundle over a {dim}-dimensional space; its perturbed count is a coefficient of H^1_{{{},1}}, which vanishes",
                        n.spec.label(),
                        gamma.name()
                    ),
                    DESCENDANT_HAMILTONIAN_VANISHES.to_string(),
                )
                .input("stratum", format!("n{}", n.id))
                .input("rank", rank)
                .input("dimension", dim)
                .output("count", 0),
            );
            survivors.push(n.id);
        }
    }
    derivation.push(
        TraceStep::new(
            "d",
            format!(
                "every limit contributes 0, so #M^1_{{v,2,1}} = 0, contradicting the direct computation {}",
                pipeline.value
            ),
            "recursion pipeline for the exceptional sphere",
        )
        .input("surviving_strata", survivors.iter().map(|i| format!("n{i}")).collect::<Vec<_>>().join(","))
        .input("direct_count", &pipeline.value)
        .output("stretched_count", 0)
        .output("verdict", "contradiction"),
    );
    Ok(Necessity::Contradiction { derivation })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateVerdict {
    Allowed,
    Excluded { reason: String },
}

/// A closed Lagrangian surface meeting an exceptional sphere nontrivially
/// must have genus 0 or 1.
pub fn lagrangian_genus_gate(genus: u32, intersects_exceptional: bool) -> GateVerdict {
    if intersects_exceptional && genus >= 2 {
        GateVerdict::Excluded {
            reason: format!(
                "{}; stretching along the unit cotangent bundle would break the sphere only along hyperbolic orbits, which elliptic_necessity rules out",
                UNIFORMIZED_GEODESICS_HYPERBOLIC
            ),
        }
    } else {
        GateVerdict::Allowed
    }
}
