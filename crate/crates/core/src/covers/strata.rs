//! Codimension-one boundary strata and neck-stretching limits of cover
//! moduli spaces, as graphs of level descriptors joined along intermediate
//! orbit collections.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use num::Integer;

use super::{BaseCurve, CoverSpec};
use crate::error::{Error, Result};
use crate::orbits::{EndSign, OrbitCollection, OrbitIterate, ReebOrbit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LevelTag {
    /// Covers of cylinders over positive asymptotic orbits.
    TopCylinder,
    /// Covers of the base curve itself.
    Middle,
    /// Covers of cylinders over negative asymptotic orbits.
    BottomCylinder,
    /// Covers of the upper half of a curve broken along a neck.
    Upper,
    /// Covers of a neck orbit cylinder carrying the special point.
    NeckCylinder,
    /// Covers of the lower half of a curve broken along a neck.
    Lower,
}

impl fmt::Display for LevelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LevelTag::TopCylinder => "top-cylinder",
            LevelTag::Middle => "middle",
            LevelTag::BottomCylinder => "bottom-cylinder",
            LevelTag::Upper => "upper",
            LevelTag::NeckCylinder => "neck-cylinder",
            LevelTag::Lower => "lower",
        })
    }
}

#[derive(Debug, Clone)]
pub struct StrataNode {
    pub id: usize,
    pub level: LevelTag,
    pub spec: CoverSpec,
    pub index: i64,
    pub dimension: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrataEdge {
    pub upper: usize,
    pub lower: usize,
    pub intermediate: OrbitCollection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildingKind {
    /// Two-level building in the compactification: dimensions add up to one
    /// less than the glued dimension.
    Boundary,
    /// Limit under neck-stretching: dimensions add up to the glued dimension.
    Neck,
}

#[derive(Debug, Clone)]
pub struct Building {
    pub kind: BuildingKind,
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct StrataGraph {
    pub glued: CoverSpec,
    pub nodes: Vec<StrataNode>,
    pub edges: Vec<StrataEdge>,
    pub buildings: Vec<Building>,
}

/// A closed curve broken along neck orbits into an upper and a lower piece.
#[derive(Debug, Clone)]
pub struct NeckSplit {
    upper: Arc<BaseCurve>,
    lower: Arc<BaseCurve>,
}

impl NeckSplit {
    pub fn new(upper: Arc<BaseCurve>, lower: Arc<BaseCurve>) -> Result<Self> {
        let bad = |m: String| Error::InconsistentProfile(format!("neck {}|{}: {m}", upper.name(), lower.name()));
        if !upper.positive_ends().is_empty() || !lower.negative_ends().is_empty() {
            return Err(bad("only separating splittings of closed curves are supported".into()));
        }
        if upper.negative_ends().sorted().items() != lower.positive_ends().sorted().items() {
            return Err(bad("upper negative ends must match lower positive ends".into()));
        }
        let neck = upper.negative_ends().sorted();
        if neck.is_empty() {
            return Err(bad("no neck orbits".into()));
        }
        for pair in neck.items().windows(2) {
            if pair[0].name() == pair[1].name() {
                return Err(bad(format!("orbit `{}` crosses the neck twice", pair[0].name())));
            }
        }
        if let Some(it) = neck.items().iter().find(|it| it.k() != 1) {
            return Err(bad(format!("neck orbit {it} is not simple")));
        }
        Ok(NeckSplit { upper, lower })
    }

    pub fn upper(&self) -> &Arc<BaseCurve> {
        &self.upper
    }

    pub fn lower(&self) -> &Arc<BaseCurve> {
        &self.lower
    }

    pub fn orbits(&self) -> Vec<Arc<ReebOrbit>> {
        self.upper
            .negative_ends()
            .sorted()
            .items()
            .iter()
            .map(|it| it.orbit().clone())
            .collect()
    }
}

impl StrataGraph {
    fn empty(glued: CoverSpec) -> Self {
        StrataGraph {
            glued,
            nodes: Vec::new(),
            edges: Vec::new(),
            buildings: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.buildings.is_empty()
    }

    pub fn node(&self, id: usize) -> &StrataNode {
        &self.nodes[id]
    }

    pub fn find(&self, level: LevelTag, label: &str) -> Option<&StrataNode> {
        self.nodes.iter().find(|n| n.level == level && n.spec.label() == label)
    }

    /// Index additivity and dimension bookkeeping for every building, plus
    /// matching of intermediate collections along every edge.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let glued_index = self.glued.fredholm_index();
        let glued_dim = self.glued.quotient_dimension();
        for b in &self.buildings {
            let index: i64 = b.nodes.iter().map(|&i| self.nodes[i].index).sum();
            let dim: i64 = b.nodes.iter().map(|&i| self.nodes[i].dimension).sum();
            if index != glued_index {
                return Err(format!("building {:?}: index {index} != {glued_index}", b.nodes));
            }
            let expected = match b.kind {
                BuildingKind::Boundary => glued_dim - 1,
                BuildingKind::Neck => glued_dim,
            };
            if dim != expected {
                return Err(format!("building {:?}: dimension {dim} != {expected}", b.nodes));
            }
        }
        for e in &self.edges {
            let mid = e.intermediate.sorted();
            if !is_submultiset(mid.items(), self.nodes[e.upper].spec.negative_ends().items())
                || !is_submultiset(mid.items(), self.nodes[e.lower].spec.positive_ends().items())
            {
                return Err(format!("edge n{}-n{} does not match its levels", e.upper, e.lower));
            }
        }
        Ok(())
    }

    /// Plain-text adjacency listing.
    pub fn render_adjacency(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            let _ = writeln!(
                out,
                "n{} [{}] {} ind={} dim={}",
                n.id, n.level, n.spec, n.index, n.dimension
            );
            for e in self.edges.iter().filter(|e| e.upper == n.id) {
                let _ = writeln!(out, "  -> n{} via {}", e.lower, e.intermediate);
            }
        }
        out
    }

    /// One edge per line: `upper-id lower-id intermediate-collection`.
    pub fn render_edges(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(out, "n{} n{} {}", e.upper, e.lower, e.intermediate);
        }
        out
    }
}

fn is_submultiset(small: &[OrbitIterate], big: &[OrbitIterate]) -> bool {
    let mut counts: BTreeMap<&OrbitIterate, i64> = BTreeMap::new();
    for it in big {
        *counts.entry(it).or_insert(0) += 1;
    }
    for it in small {
        let c = counts.entry(it).or_insert(0);
        *c -= 1;
        if *c < 0 {
            return false;
        }
    }
    true
}

struct GraphBuilder {
    graph: StrataGraph,
    node_ids: BTreeMap<(LevelTag, String), usize>,
    edge_ids: BTreeMap<(usize, usize, String), usize>,
    building_keys: std::collections::BTreeSet<Vec<usize>>,
}

impl GraphBuilder {
    fn new(glued: CoverSpec) -> Self {
        GraphBuilder {
            graph: StrataGraph::empty(glued),
            node_ids: BTreeMap::new(),
            edge_ids: BTreeMap::new(),
            building_keys: Default::default(),
        }
    }

    fn node(&mut self, level: LevelTag, spec: CoverSpec) -> usize {
        let key = (level, spec.label());
        if let Some(&id) = self.node_ids.get(&key) {
            return id;
        }
        let id = self.graph.nodes.len();
        self.graph.nodes.push(StrataNode {
            id,
            level,
            index: spec.fredholm_index(),
            dimension: spec.quotient_dimension(),
            spec,
        });
        self.node_ids.insert(key, id);
        id
    }

    fn edge(&mut self, upper: usize, lower: usize, intermediate: &OrbitCollection) -> usize {
        let intermediate = intermediate.sorted();
        let key = (upper, lower, intermediate.to_string());
        if let Some(&id) = self.edge_ids.get(&key) {
            return id;
        }
        let id = self.graph.edges.len();
        self.graph.edges.push(StrataEdge {
            upper,
            lower,
            intermediate,
        });
        self.edge_ids.insert(key, id);
        id
    }

    fn building(&mut self, kind: BuildingKind, levels: Vec<(LevelTag, CoverSpec)>, links: &[(usize, usize, &OrbitCollection)]) {
        let nodes: Vec<usize> = levels.into_iter().map(|(tag, spec)| self.node(tag, spec)).collect();
        let mut key = nodes.clone();
        let edges: Vec<usize> = links
            .iter()
            .filter(|(_, _, c)| !c.is_empty())
            .map(|&(u, l, c)| self.edge(nodes[u], nodes[l], c))
            .collect();
        key.extend(edges.iter().map(|e| e + 1_000_000));
        if self.building_keys.insert(key) {
            self.graph.buildings.push(Building { kind, nodes, edges });
        }
    }

    fn finish(self) -> StrataGraph {
        self.graph
    }
}

/// Partitions of `n` into positive parts, nonincreasing.
pub(crate) fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=n.min(max)).rev() {
            prefix.push(part);
            go(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Every collection with the given total multiplicity over each orbit, using
/// iterates that are multiples of `step`.
fn collections(totals: &[(Arc<ReebOrbit>, u32, u32)], sign: EndSign) -> Result<Vec<OrbitCollection>> {
    let mut acc: Vec<Vec<OrbitIterate>> = vec![Vec::new()];
    for (orbit, total, step) in totals {
        if total % step != 0 {
            return Ok(Vec::new());
        }
        let mut next = Vec::new();
        for parts in partitions(total / step) {
            let its = parts
                .iter()
                .map(|p| OrbitIterate::new(orbit.clone(), p * step))
                .collect::<Result<Vec<_>>>()?;
            for prefix in &acc {
                let mut v = prefix.clone();
                v.extend(its.iter().cloned());
                next.push(v);
            }
        }
        acc = next;
    }
    Ok(acc
        .into_iter()
        .map(|items| OrbitCollection::new(sign, items).sorted())
        .collect())
}

fn totals_of(ends: &OrbitCollection, step_from: Option<&OrbitCollection>) -> Vec<(Arc<ReebOrbit>, u32, u32)> {
    let mut map: BTreeMap<String, (Arc<ReebOrbit>, u32, u32)> = BTreeMap::new();
    for it in ends.items() {
        let entry = map.entry(it.name().to_string()).or_insert((it.orbit().clone(), 0, 0));
        entry.1 += it.k();
    }
    for (name, entry) in map.iter_mut() {
        entry.2 = match step_from {
            Some(base) => base
                .items()
                .iter()
                .filter(|it| it.name() == name)
                .fold(0u32, |g, it| g.gcd(&it.k()))
                .max(1),
            None => 1,
        };
    }
    map.into_values().collect()
}

fn orbits_of(ends: &OrbitCollection) -> Vec<Arc<ReebOrbit>> {
    totals_of(ends, None).into_iter().map(|(o, _, _)| o).collect()
}

/// A symplectization level made only of unmarked trivial cylinders.
fn is_trivial_level(spec: &CoverSpec) -> bool {
    spec.base().is_cylindrical()
        && spec.marked_points() == 0
        && spec.components() as usize == spec.positive_ends().len()
        && spec.positive_ends().sorted().items() == spec.negative_ends().sorted().items()
}

fn level(
    base: &Arc<BaseCurve>,
    degree: u32,
    plus: &OrbitCollection,
    minus: &OrbitCollection,
    points: (u32, u32),
    components: i64,
) -> Option<CoverSpec> {
    if components < 1 {
        return None;
    }
    CoverSpec::with_points(
        base.clone(),
        degree,
        plus.clone(),
        minus.clone(),
        points.0,
        points.1,
        components as u32,
    )
    .ok()
}

/// Where the marked points of the glued curve may sit: all on one level.
fn point_placements(spec: &CoverSpec, levels: usize) -> Vec<Vec<(u32, u32)>> {
    let r = spec.marked_points();
    let c = spec.constrained_branch_points();
    if r == 0 {
        return vec![vec![(0, 0); levels]];
    }
    (0..levels)
        .map(|i| {
            let mut v = vec![(0, 0); levels];
            v[i] = (r, c);
            v
        })
        .collect()
}

fn max_components(spec: &CoverSpec) -> i64 {
    i64::from(spec.degree()) * i64::from(spec.base().components()) + spec.puncture_count() as i64 + 2
}

/// Two-level boundary strata of the compactified moduli space of `spec`.
///
/// Closed base curves have no boundary. For covers of orbit cylinders both
/// levels are cylinder covers; for covers of a curve in a cobordism one level
/// covers the base and the other covers cylinders over its asymptotic orbits,
/// and marked points stay on the base level.
pub fn boundary_strata(spec: &CoverSpec) -> Result<StrataGraph> {
    let mut builder = GraphBuilder::new(spec.clone());
    let base = spec.base();
    if base.is_closed() {
        return Ok(builder.finish());
    }
    let glued_components = i64::from(spec.components());
    let cap = max_components(spec);

    if base.is_cylindrical() {
        let d = spec.degree();
        for mid in collections(&totals_of(spec.positive_ends(), None), EndSign::Negative)? {
            let m = mid.len() as i64;
            for placement in point_placements(spec, 2) {
                for n_up in 1..=cap {
                    let n_down = glued_components + m - n_up;
                    let Some(up) = level(base, d, spec.positive_ends(), &mid, placement[0], n_up) else {
                        continue;
                    };
                    let Some(down) = level(base, d, &mid, spec.negative_ends(), placement[1], n_down) else {
                        continue;
                    };
                    if is_trivial_level(&up) || is_trivial_level(&down) {
                        continue;
                    }
                    builder.building(
                        BuildingKind::Boundary,
                        vec![(LevelTag::TopCylinder, up), (LevelTag::BottomCylinder, down)],
                        &[(0, 1, &mid)],
                    );
                }
            }
        }
        return Ok(builder.finish());
    }

    let points = (spec.marked_points(), spec.constrained_branch_points());
    let d = spec.degree();
    if !spec.positive_ends().is_empty() {
        let cyl = Arc::new(BaseCurve::cylinders(&orbits_of(spec.positive_ends())));
        let top_degree: u32 = spec.positive_ends().items().iter().map(OrbitIterate::k).sum();
        let totals = totals_of(spec.positive_ends(), Some(base.positive_ends()));
        for mid in collections(&totals, EndSign::Negative)? {
            let m = mid.len() as i64;
            for n_top in 1..=cap {
                let n_mid = glued_components + m - n_top;
                let Some(top) = level(&cyl, top_degree, spec.positive_ends(), &mid, (0, 0), n_top) else {
                    continue;
                };
                let Some(middle) = level(base, d, &mid, spec.negative_ends(), points, n_mid) else {
                    continue;
                };
                if is_trivial_level(&top) {
                    continue;
                }
                builder.building(
                    BuildingKind::Boundary,
                    vec![(LevelTag::TopCylinder, top), (LevelTag::Middle, middle)],
                    &[(0, 1, &mid)],
                );
            }
        }
    }
    if !spec.negative_ends().is_empty() {
        let cyl = Arc::new(BaseCurve::cylinders(&orbits_of(spec.negative_ends())));
        let bottom_degree: u32 = spec.negative_ends().items().iter().map(OrbitIterate::k).sum();
        let totals = totals_of(spec.negative_ends(), Some(base.negative_ends()));
        for mid in collections(&totals, EndSign::Positive)? {
            let m = mid.len() as i64;
            for n_bottom in 1..=cap {
                let n_mid = glued_components + m - n_bottom;
                let Some(middle) = level(base, d, spec.positive_ends(), &mid, points, n_mid) else {
                    continue;
                };
                let Some(bottom) = level(&cyl, bottom_degree, &mid, spec.negative_ends(), (0, 0), n_bottom) else {
                    continue;
                };
                if is_trivial_level(&bottom) {
                    continue;
                }
                builder.building(
                    BuildingKind::Boundary,
                    vec![(LevelTag::Middle, middle), (LevelTag::BottomCylinder, bottom)],
                    &[(0, 1, &mid)],
                );
            }
        }
    }
    Ok(builder.finish())
}

/// Limits of covers of a closed curve when it is stretched along a neck.
///
/// Two-level limits pair a cover of the upper piece with a cover of the lower
/// piece. When the glued space carries marked points, three-level limits put
/// them on a cover of one neck orbit cylinder between the two pieces; the
/// remaining neck orbits connect the outer levels directly.
pub fn neck_strata(spec: &CoverSpec, split: &NeckSplit) -> Result<StrataGraph> {
    let base = spec.base();
    if !base.is_closed() {
        return Err(Error::InconsistentProfile(format!(
            "{}: neck stretching is only supported for closed curves",
            spec.label()
        )));
    }
    let (upper, lower) = (split.upper(), split.lower());
    if upper.rel_c1_doubled() + lower.rel_c1_doubled() != base.rel_c1_doubled()
        || upper.index() + lower.index() != base.index()
    {
        return Err(Error::InconsistentProfile(format!(
            "pieces {} and {} do not glue to {}",
            upper.name(),
            lower.name(),
            base.name()
        )));
    }
    let d = spec.degree();
    let glued_components = i64::from(spec.components());
    let cap = max_components(spec) + 2 * i64::from(d) * split.orbits().len() as i64;
    let empty_plus = OrbitCollection::empty(EndSign::Positive);
    let empty_minus = OrbitCollection::empty(EndSign::Negative);
    let totals: Vec<_> = split.orbits().into_iter().map(|o| (o, d, 1)).collect();
    let necks = collections(&totals, EndSign::Negative)?;
    let mut builder = GraphBuilder::new(spec.clone());

    for neck in &necks {
        let m = neck.len() as i64;
        for placement in point_placements(spec, 2) {
            for n_up in 1..=cap {
                let n_low = glued_components + m - n_up;
                let Some(up) = level(upper, d, &empty_plus, neck, placement[0], n_up) else {
                    continue;
                };
                let Some(low) = level(lower, d, neck, &empty_minus, placement[1], n_low) else {
                    continue;
                };
                builder.building(
                    BuildingKind::Neck,
                    vec![(LevelTag::Upper, up), (LevelTag::Lower, low)],
                    &[(0, 1, neck)],
                );
            }
        }
    }

    if spec.marked_points() > 0 {
        let points = (spec.marked_points(), spec.constrained_branch_points());
        for orbit in split.orbits() {
            let cyl = Arc::new(BaseCurve::orbit_cylinder(&orbit));
            let on_orbit = |c: &OrbitCollection, keep: bool| {
                OrbitCollection::new(
                    c.sign(),
                    c.items().iter().filter(|it| (it.name() == orbit.name()) == keep).cloned().collect(),
                )
            };
            let below = collections(&[(orbit.clone(), d, 1)], EndSign::Negative)?;
            for neck in &necks {
                let into_cyl = on_orbit(neck, true);
                let rest = on_orbit(neck, false);
                for out_of_cyl in &below {
                    let lower_ends = out_of_cyl.concat(&rest).with_sign(EndSign::Positive);
                    let edges = (into_cyl.len() + out_of_cyl.len() + rest.len()) as i64;
                    for n_up in 1..=cap {
                        for n_mid in 1..=cap {
                            let n_low = glued_components + edges - n_up - n_mid;
                            let Some(up) = level(upper, d, &empty_plus, neck, (0, 0), n_up) else {
                                continue;
                            };
                            let Some(mid) = level(&cyl, d, &into_cyl, out_of_cyl, points, n_mid) else {
                                continue;
                            };
                            let Some(low) = level(lower, d, &lower_ends, &empty_minus, (0, 0), n_low) else {
                                continue;
                            };
                            builder.building(
                                BuildingKind::Neck,
                                vec![
                                    (LevelTag::Upper, up),
                                    (LevelTag::NeckCylinder, mid),
                                    (LevelTag::Lower, low),
                                ],
                                &[(0, 1, &into_cyl), (1, 2, out_of_cyl), (0, 2, &rest)],
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(builder.finish())
}
