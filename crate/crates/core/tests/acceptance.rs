//! Acceptance criteria, one reported line each. Run with `--nocapture` to
//! see the report.

mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::monodromy::{brute_force, profile_sets, with_simple};
use common::samplers::{generators, random_potential, Ends, Sampler, ORDER, TRUNCATION};
use common::specs::{random_elliptic, random_hyperbolic, random_sample};
use localsft::algebra::{GradedSeries, Side, Variable};
use localsft::covers::{hurwitz_count, BaseCurve, CoverSpec};
use localsft::exceptional::{
    elliptic_necessity, exceptional_invariants, exceptional_sphere, lagrangian_genus_gate, recursion_pipeline,
    splitting_equations, DescendantSpec, GateVerdict, Necessity, NeckConfiguration,
};
use localsft::potentials::{
    compose_sharp, hamilton_jacobi_rhs, potential_from_counts, transform_potential, CountTable, Potential,
    TableContext,
};
use localsft::{EndSign, OrbitCollection, OrbitIterate, ReebOrbit, Theta};
use num::{BigInt, BigRational};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn exceptional_constants() -> Outcome {
    let inv = exceptional_invariants(&exceptional_sphere("v")).map_err(err)?;
    ensure!(inv.self_intersection == -1, "self-intersection {}", inv.self_intersection);
    ensure!(inv.c1 == 1, "c1 {}", inv.c1);
    for d in 1..=5u32 {
        let ind = inv.cover_index(d).map_err(err)?;
        ensure!(ind == 2 * (i64::from(d) - 1), "index {ind} for d = {d}");
    }
    Ok("v.v = -1, c1 = 1, ind = 0,2,4,6,8".into())
}

fn minus_one_quarter() -> Outcome {
    let spec = DescendantSpec::new(exceptional_sphere("v"), 2, vec![1]).map_err(err)?;
    let out = recursion_pipeline(&spec).map_err(err)?;
    ensure!(out.value == q(-1, 4), "value {}", out.value);
    let euler = out.step("euler").and_then(|s| s.output_value("euler"));
    ensure!(euler == Some("-1"), "euler step {euler:?}");
    let factor = out.step("divisor").and_then(|s| s.output_value("factor"));
    ensure!(factor == Some("1/4"), "divisor factor {factor:?}");
    Ok(format!("{} via {} steps", out.value, out.steps.len()))
}

fn cz_case_split() -> Outcome {
    let mut rng = StdRng::seed_from_u64(301);
    let mut seen = BTreeMap::new();
    for _ in 0..200 {
        let gamma = random_elliptic(&mut rng, "gamma", 51);
        let defect = gamma.orbit.cz_defect(1, 1).map_err(err)?;
        ensure!(defect == -1 || defect == 1, "defect {defect} for {:?}", gamma.theta);
        // independent check of the defect from the rotation number
        ensure!(defect == gamma.cz(2) - 2 * gamma.cz(1), "defect disagrees with 2⌊kθ⌋+1");
        let neck = NeckConfiguration::exceptional(&[gamma.orbit.clone()], true).map_err(err)?;
        let eq = splitting_equations(&neck).map_err(err)?;
        ensure!(eq.defect == defect, "branch {} selected for defect {defect}", eq.defect);
        ensure!(eq.value == q(-1, 4), "right side {}", eq.value);
        let expected = if defect == -1 { (2, 0) } else { (0, 2) };
        ensure!(
            (eq.upper_double_index, eq.lower_double_index) == expected,
            "indices ({}, {}) for defect {defect}",
            eq.upper_double_index,
            eq.lower_double_index
        );
        let upper_first = eq.sum[0].spec.base().name() == "v+";
        ensure!(upper_first == (defect == 1), "wrong equation shape: {eq}");
        *seen.entry(defect).or_insert(0) += 1;
    }
    ensure!(seen.len() == 2, "only defects {seen:?} sampled");
    Ok(format!("200 orbits, defect counts {seen:?}"))
}

fn hyperbolic_contradiction() -> Outcome {
    let mut rng = StdRng::seed_from_u64(401);
    let mut runs = 0;
    for m in 1..=3 {
        for parity in 0..(1 << m) {
            let orbits: Vec<Arc<ReebOrbit>> = (0..m)
                .map(|i| {
                    let cz1 = 2 * rng.gen_range(-2..=2) + ((parity >> i) & 1);
                    Arc::new(ReebOrbit::hyperbolic(format!("h{i}"), cz1, 4).unwrap())
                })
                .collect();
            let neck = NeckConfiguration::exceptional(&orbits, true).map_err(err)?;
            let verdict = elliptic_necessity(&neck).map_err(err)?;
            ensure!(verdict.is_contradiction(), "{m} hyperbolic orbits were consistent");
            for slot in 0..m {
                let mut mixed = orbits.clone();
                mixed[slot] = random_elliptic(&mut rng, "e", 2).orbit;
                let neck = NeckConfiguration::exceptional(&mixed, true).map_err(err)?;
                let verdict = elliptic_necessity(&neck).map_err(err)?;
                ensure!(matches!(verdict, Necessity::Consistent { .. }), "elliptic neck was contradictory");
            }
            runs += 1;
        }
    }
    for genus in 0..6 {
        for intersects in [false, true] {
            let excluded = matches!(lagrangian_genus_gate(genus, intersects), GateVerdict::Excluded { .. });
            ensure!(excluded == (intersects && genus >= 2), "gate wrong at genus {genus}");
        }
    }
    Ok(format!("{runs} hyperbolic configurations contradict, genus gate exact"))
}

fn rank_bookkeeping() -> Outcome {
    let gamma = Arc::new(ReebOrbit::hyperbolic("gamma", 1, 4).unwrap());
    let one = OrbitIterate::new(gamma.clone(), 1).unwrap();
    let pair = |s| OrbitCollection::new(s, vec![one.clone(), one.clone()]);
    let cylinder = Arc::new(BaseCurve::orbit_cylinder(&gamma));
    let m = CoverSpec::with_points(cylinder, 2, pair(EndSign::Positive), pair(EndSign::Negative), 1, 1, 1)
        .map_err(err)?;
    let (rank, dim) = (m.cokernel_rank().map_err(err)?, m.tangency_dimension().map_err(err)?.value);
    ensure!(rank == 2 && dim == 2, "M^1_gamma,2,1: rank {rank} over dimension {dim}");

    for theta in [(3, 10), (7, 10)] {
        let e = Arc::new(ReebOrbit::elliptic("e", Theta::new(theta.0, theta.1), 4).unwrap());
        let neck = NeckConfiguration::exceptional(&[e], true).map_err(err)?;
        let eq = splitting_equations(&neck).map_err(err)?;
        let double = eq.sum.iter().find(|s| s.spec.marked_points() == 0).ok_or("no double plane")?;
        ensure!(double.obstruction_rank == 2, "rank {} over {}", double.obstruction_rank, double.label());
    }

    let mut rng = StdRng::seed_from_u64(501);
    let (mut balanced, mut rejected) = (0, 0);
    while balanced < 500 {
        let s = random_sample(&mut rng);
        let z = s.ramification();
        ensure!(z >= 0 && z as u64 == s.spec.branch_count(), "Z mismatch for {}", s.spec.label());
        ensure!(s.index() == s.spec.fredholm_index(), "index mismatch for {}", s.spec.label());
        let bound = s.spec.base().index() + 2 * z;
        match s.spec.cokernel_rank() {
            Ok(rank) if s.index() <= bound => {
                ensure!(rank as i64 + s.index() == bound, "rank + index != ind(v) + 2Z for {}", s.spec.label());
                balanced += 1;
            }
            Err(e) if s.index() > bound && e.code() == "HYPOTHESES_VIOLATED" => rejected += 1,
            other => return Err(format!("{}: unexpected {other:?}", s.spec.label())),
        }
    }
    Ok(format!("rank 2 over both strata; {balanced} specs balance, {rejected} over-index specs rejected"))
}

fn hurwitz_cross_check() -> Outcome {
    let mut cases = 0;
    for d in 1..=4u32 {
        for (profiles, simple) in profile_sets(d, 4) {
            let ours = hurwitz_count(d, &profiles, simple).map_err(err)?;
            let (n, f) = brute_force(d as usize, &with_simple(d, &profiles, simple));
            let theirs = q(n as i64, f as i64);
            ensure!(ours == theirs, "d={d} {profiles:?} + {simple} simple: {ours} vs {theirs}");
            cases += 1;
        }
    }
    Ok(format!("{cases} profile sets agree"))
}

fn sign(f: &GradedSeries, g: &GradedSeries) -> BigRational {
    let odd = f.is_odd().unwrap() && g.is_odd().unwrap();
    q(if odd { -1 } else { 1 }, 1)
}

fn algebra_suite() -> Outcome {
    let mut s = Sampler::new(701);
    let vars = generators();
    let mut odd_pairs = 0;
    for i in 0..1000 {
        let (f, g, h) = (s.homogeneous(), s.homogeneous(), s.homogeneous());
        let fg = f.multiply(&g).map_err(err)?;
        ensure!(fg == g.multiply(&f).map_err(err)?.scale(&sign(&f, &g)), "commutativity: {f} | {g}");

        let v = &vars[i % vars.len()];
        let twist = q(if v.is_odd() && f.is_odd().unwrap() { -1 } else { 1 }, 1);
        let rhs = f.partial(v).multiply(&g).map_err(err)? + f.multiply(&g.partial(v)).map_err(err)?.scale(&twist);
        ensure!(fg.partial(v) == rhs, "Leibniz: {v} | {f} | {g}");

        let b = f.bracket(&g).map_err(err)?;
        ensure!(b == -g.bracket(&f).map_err(err)?.scale(&sign(&f, &g)), "antisymmetry: {f} | {g}");

        let lhs = f.bracket(&g.bracket(&h).map_err(err)?).map_err(err)?;
        let rhs = b.bracket(&h).map_err(err)?
            + g.bracket(&f.bracket(&h).map_err(err)?).map_err(err)?.scale(&sign(&f, &g));
        ensure!(lhs == rhs, "Jacobi: {f} | {g} | {h}");
        if f.is_odd().unwrap() && g.is_odd().unwrap() {
            odd_pairs += 1;
        }
    }
    ensure!(odd_pairs > 50, "only {odd_pairs} odd pairs");
    Ok(format!("1000 samples, {odd_pairs} odd pairs"))
}

fn sharp_composition() -> Outcome {
    let mut rng = StdRng::seed_from_u64(801);
    let ends = [Ends::elliptic("a", 3), Ends::hyperbolic("b", 2), Ends::hyperbolic("c", 4), Ends::elliptic("d", 7)];
    let mut instances = 0;
    for i in 0..60 {
        let (below, above) = (&ends[i % 4], &ends[(i + 1) % 4]);
        let f = random_potential(&mut rng, below, above, None);
        let left = compose_sharp(&Potential::identity(&[below.orbit.clone()], TRUNCATION).map_err(err)?, &f, &below.names(), ORDER)
            .map_err(err)?;
        let right = compose_sharp(&f, &Potential::identity(&[above.orbit.clone()], TRUNCATION).map_err(err)?, &above.names(), ORDER)
            .map_err(err)?;
        let expected = f.series().filter(|m| m.count_where(|_| true) <= ORDER);
        ensure!(left.series() == &expected && right.series() == &expected, "identity fails on {f}");

        let f10 = random_potential(&mut rng, &ends[2], &ends[0], Some(Side::Minus));
        let f0 = random_potential(&mut rng, &ends[0], &ends[1], None);
        let f01 = random_potential(&mut rng, &ends[1], &ends[3], Some(Side::Plus));
        transform_potential(&f0, &f10, &f01, ORDER).map_err(|e| format!("{e}: {f10} | {f0} | {f01}"))?;

        let c: Vec<BigRational> = (0..3).map(|_| q(rng.gen_range(1..=9), rng.gen_range(1..=9))).collect();
        let line = |a: &Ends, b: &Ends, c: &BigRational| {
            let vars = [a.vars(localsft::VarKind::Q, Side::Minus)[0].clone(), b.vars(localsft::VarKind::P, Side::Plus)[0].clone()];
            GradedSeries::product(&vars, c.clone(), TRUNCATION)
        };
        let chain = [Ends::elliptic("w", 3), Ends::elliptic("x", 7), Ends::elliptic("y", 1), Ends::elliptic("z", 9)];
        let link = |k: usize| Potential::from_series(line(&chain[k], &chain[k + 1], &c[k]), chain[k].names(), chain[k + 1].names());
        let out = transform_potential(&link(1), &link(0), &link(2), ORDER).map_err(err)?;
        ensure!(out.series() == &line(&chain[0], &chain[3], &(&c[0] * &c[1] * &c[2])), "linear chain gave {out}");
        instances += 1;
    }
    Ok(format!("{instances} instances of each check"))
}

fn hamilton_jacobi() -> Outcome {
    let vars: Vec<Variable> = generators();
    let zero = |names: &[&str]| {
        let set = names.iter().map(|s| s.to_string()).collect();
        Potential::from_series(GradedSeries::zero(TRUNCATION), set, Default::default())
    };
    let (h_plus, h_minus) = (zero(&["a", "b", "c"]), zero(&["a", "b", "c"]));
    let mut inputs = 0;
    let mut stack: Vec<(usize, Vec<Variable>)> = vec![(0, vec![])];
    while let Some((from, word)) = stack.pop() {
        let k = GradedSeries::product(&word, q(1, 1), TRUNCATION);
        let rhs = hamilton_jacobi_rhs(&h_plus, &h_minus, &k).map_err(err)?;
        ensure!(rhs.is_zero(), "nonzero right side {rhs} for k = {k}");
        inputs += 1;
        if word.len() < 4 {
            for (i, v) in vars.iter().enumerate().skip(from) {
                let mut next = word.clone();
                next.push(v.clone());
                stack.push((i, next));
            }
        }
    }
    Ok(format!("{inputs} monomials up to degree 4"))
}

fn weight_round_trip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1001);
    for trial in 0..200 {
        let o = if rng.gen_bool(0.5) {
            random_elliptic(&mut rng, "g", 2)
        } else {
            random_hyperbolic(&mut rng, "g")
        };
        let mut entries = Vec::new();
        let mut keys = std::collections::BTreeSet::new();
        for _ in 0..rng.gen_range(1..=5) {
            let d = rng.gen_range(1..=4);
            let mut ends = |sign| {
                let items = common::specs::random_partition(&mut rng, d)
                    .into_iter()
                    .map(|a| OrbitIterate::new(o.orbit.clone(), a).unwrap())
                    .collect();
                OrbitCollection::new(sign, items).sorted()
            };
            let (plus, minus) = (ends(EndSign::Positive), ends(EndSign::Negative));
            let c = q(rng.gen_range(1..=20) * if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(1..=7));
            if keys.insert((plus.to_string(), minus.to_string())) {
                entries.push((plus, minus, c));
            }
        }
        let context = TableContext::Orbit(o.orbit.clone());
        let Ok(table) = CountTable::new(context, entries.clone()) else {
            // bad orbits or repeated odd variables: drop the inadmissible keys
            let kept: Vec<_> = entries
                .into_iter()
                .filter(|e| CountTable::new(TableContext::Orbit(o.orbit.clone()), vec![e.clone()]).is_ok())
                .collect();
            if kept.is_empty() {
                continue;
            }
            let table = CountTable::new(TableContext::Orbit(o.orbit.clone()), kept).map_err(err)?;
            check_round_trip(&table, trial)?;
            continue;
        };
        check_round_trip(&table, trial)?;
    }
    Ok("200 random tables".into())
}

fn check_round_trip(table: &CountTable, trial: usize) -> Result<(), String> {
    let key = |t: &CountTable| -> BTreeMap<String, BigRational> {
        t.entries().iter().map(|e| (e.key(), e.count.clone())).collect()
    };
    let back = potential_from_counts(table, 16).map_err(err)?.read_counts().map_err(err)?;
    ensure!(key(&back) == key(table), "trial {trial}: {:?} came back as {:?}", key(table), key(&back));
    Ok(())
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, name: "exceptional-sphere constants", limit: Some(Duration::from_secs(1)), run: exceptional_constants },
    Criterion { id: 2, name: "descendant count -1/4", limit: Some(Duration::from_secs(1)), run: minus_one_quarter },
    Criterion { id: 3, name: "CZ case split", limit: None, run: cz_case_split },
    Criterion { id: 4, name: "hyperbolic contradiction and genus gate", limit: None, run: hyperbolic_contradiction },
    Criterion { id: 5, name: "rank/dimension bookkeeping", limit: None, run: rank_bookkeeping },
    Criterion { id: 6, name: "Hurwitz oracle cross-check", limit: Some(Duration::from_secs(60)), run: hurwitz_cross_check },
    Criterion { id: 7, name: "algebra property suite", limit: Some(Duration::from_secs(60)), run: algebra_suite },
    Criterion { id: 8, name: "# composition", limit: None, run: sharp_composition },
    Criterion { id: 9, name: "Hamilton-Jacobi invariance", limit: None, run: hamilton_jacobi },
    Criterion { id: 10, name: "weight round-trip", limit: None, run: weight_round_trip },
];

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    for c in CRITERIA {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:?}, limit {limit:?}")),
            (o, _) => o,
        };
        // straight to stderr so the lines survive libtest's output capture
        let line = match &outcome {
            Ok(detail) => format!("PASS {:>2} {}: {detail} ({:.2?})\n", c.id, c.name, elapsed),
            Err(why) => {
                failed.push(c.id);
                format!("FAIL {:>2} {}: {why} ({:.2?})\n", c.id, c.name, elapsed)
            }
        };
        let _ = std::io::stderr().write_all(line.as_bytes());
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
