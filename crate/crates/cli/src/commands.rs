//! One function per subcommand. Each builds a [`Report`] from the resolved
//! configuration.

use std::collections::BTreeMap;
use std::sync::Arc;

use localsft::covers::{boundary_strata, hurwitz_count, BaseCurve, CoverSpec, QuotientNote};
use localsft::exceptional::{
    elliptic_necessity, exceptional_invariants, recursion_pipeline, splitting_equations, DescendantSpec, Necessity,
    NeckConfiguration, TraceStep,
};
use localsft::potentials::{
    assert_hamiltonian_vanishes, compose_sharp, hamiltonian_from_counts, potential_from_counts, CountTable,
    TableContext, VanishingReport,
};
use localsft::{OrbitKind, Rational};

use crate::config::{ConfigDocument, Model};
use crate::report::{Report, Section};
use crate::{Cli, CliError, Command, Outcome};

pub fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    if let Command::Hurwitz {
        degree,
        profiles,
        simple,
    } = &cli.command
    {
        return done(hurwitz(*degree, profiles, *simple)?);
    }
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("this subcommand needs --config <path>".into()))?;
    let doc = ConfigDocument::load(path)?;
    let model = Model::build(&doc, cli.truncation)?;
    match &cli.command {
        Command::Cz { orbit } => done(cz(&model, orbit.as_deref())?),
        Command::Index => done(index(&model)),
        Command::Moduli => done(moduli(&model)?),
        Command::Strata { cover } => strata(&model, cover.as_deref()),
        Command::Hamiltonian { table } => hamiltonian(&model, table.as_deref()),
        Command::Potential { table } => done(potential(&model, table.as_deref())?),
        Command::Compose { lower, upper, order } => done(compose(&model, lower, upper, *order)?),
        Command::Exceptional { curve } => done(exceptional(&model, curve.as_deref())?),
        Command::Neckstretch { neck } => done(neckstretch(&model, neck.as_deref(), cli.trace)?),
        Command::Check => check(&doc, &model),
        Command::Hurwitz { .. } => unreachable!("handled above"),
    }
}

fn done(report: Report) -> Result<Outcome, CliError> {
    Ok(Outcome { report, failure: None })
}

fn single(title: &str, columns: &[&str], fill: impl FnOnce(&mut Section)) -> Report {
    let mut s = Section::new(title, columns);
    fill(&mut s);
    let mut r = Report::default();
    r.push(s);
    r
}

fn kind_name(kind: &OrbitKind) -> String {
    match kind {
        OrbitKind::Elliptic { theta } => format!("elliptic {theta}"),
        OrbitKind::Hyperbolic { cz1 } => format!("hyperbolic {cz1}"),
    }
}

fn cz(model: &Model, only: Option<&str>) -> Result<Report, CliError> {
    if let Some(name) = only {
        model.registry.get(name)?;
    }
    let mut s = Section::new("cz", &["orbit", "kind", "k", "cz", "defect", "good"]);
    for orbit in model.registry.iter().filter(|o| only.is_none_or(|n| n == o.name())) {
        for k in 1..=orbit.max_iterate() {
            let defect = if k < orbit.max_iterate() {
                orbit.cz_defect(k, 1)?.to_string()
            } else {
                "-".into()
            };
            let good = localsft::OrbitIterate::new(orbit.clone(), k)?.is_good();
            s.row([
                orbit.name().to_string(),
                kind_name(orbit.kind()),
                k.to_string(),
                orbit.cz_iterate(k)?.to_string(),
                defect,
                good.to_string(),
            ]);
        }
    }
    let mut r = Report::default();
    r.push(s);
    Ok(r)
}

fn index(model: &Model) -> Report {
    single("index", &["cover", "space", "degree", "branch_points", "index", "vdim"], |s| {
        for (name, spec) in &model.covers {
            s.row([
                name.clone(),
                spec.label(),
                spec.degree().to_string(),
                spec.branch_count().to_string(),
                spec.fredholm_index().to_string(),
                spec.virtual_dimension().to_string(),
            ]);
        }
    })
}

fn notes(notes: &[QuotientNote]) -> String {
    if notes.is_empty() {
        return "-".into();
    }
    let parts: Vec<String> = notes
        .iter()
        .map(|n| match n {
            QuotientNote::TargetTranslation => "mod R".to_string(),
            QuotientNote::DomainAutomorphisms { real_dimension } => format!("mod Aut ({real_dimension})"),
        })
        .collect();
    parts.join(", ")
}

fn moduli(model: &Model) -> Result<Report, CliError> {
    let columns = ["cover", "space", "index", "vdim", "dimension", "quotient", "rank"];
    let mut s = Section::new("moduli", &columns);
    for (name, spec) in &model.covers {
        let tangency = spec.tangency_dimension()?;
        s.row([
            name.clone(),
            spec.label(),
            spec.fredholm_index().to_string(),
            spec.virtual_dimension().to_string(),
            tangency.value.to_string(),
            notes(&tangency.quotient_notes),
            spec.cokernel_rank()?.to_string(),
        ]);
    }
    let mut r = Report::default();
    r.push(s);
    Ok(r)
}

fn select<'a, T>(items: &'a [(String, T)], name: Option<&str>, kind: &'static str) -> Result<Vec<&'a (String, T)>, CliError> {
    match name {
        None => Ok(items.iter().collect()),
        Some(n) => match items.iter().find(|(m, _)| m == n) {
            Some(item) => Ok(vec![item]),
            None => Err(localsft::Error::UnknownName {
                kind,
                name: n.to_string(),
            }
            .into()),
        },
    }
}

fn strata(model: &Model, cover: Option<&str>) -> Result<Outcome, CliError> {
    let mut r = Report::default();
    let mut failure = None;
    for (name, spec) in select(&model.covers, cover, "cover")? {
        let graph = boundary_strata(spec)?;
        let mut nodes = Section::new(format!("strata {name}"), &["node", "level", "space", "index", "dim"]);
        for n in &graph.nodes {
            nodes.row([
                format!("n{}", n.id),
                n.level.to_string(),
                n.spec.label(),
                n.index.to_string(),
                n.dimension.to_string(),
            ]);
        }
        if graph.nodes.is_empty() {
            nodes.note(format!("{} has no codimension-one strata", spec.label()));
        }
        if let Err(why) = graph.check_invariants() {
            failure.get_or_insert(CliError::CheckFailed(format!("{name}: {why}")));
        }
        let mut edges = Section::new(format!("edges {name}"), &["upper", "lower", "via"]);
        for e in &graph.edges {
            edges.row([format!("n{}", e.upper), format!("n{}", e.lower), e.intermediate.to_string()]);
        }
        r.push(nodes);
        r.push(edges);
    }
    Ok(Outcome { report: r, failure })
}

fn parse_profile(text: &str) -> Result<Vec<u32>, CliError> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<u32>()
                .map_err(|_| CliError::Usage(format!("`{text}` is not a comma-separated partition")))
        })
        .collect()
}

fn hurwitz(degree: u32, profiles: &[String], simple: u32) -> Result<Report, CliError> {
    let parsed = profiles.iter().map(|p| parse_profile(p)).collect::<Result<Vec<_>, _>>()?;
    let count = hurwitz_count(degree, &parsed, simple)?;
    let shown = if profiles.is_empty() { "-".to_string() } else { profiles.join(" ") };
    Ok(single("hurwitz", &["degree", "profiles", "simple", "count"], |s| {
        s.row([degree.to_string(), shown, simple.to_string(), count.to_string()]);
    }))
}

fn orbit_tables<'a>(model: &'a Model, name: Option<&str>) -> Result<Vec<&'a (String, CountTable)>, CliError> {
    let picked = select(&model.tables, name, "table")?;
    if name.is_some() {
        return Ok(picked);
    }
    Ok(picked
        .into_iter()
        .filter(|(_, t)| matches!(t.context(), TableContext::Orbit(_)))
        .collect())
}

fn hamiltonian(model: &Model, table: Option<&str>) -> Result<Outcome, CliError> {
    let mut s = Section::new("hamiltonian", &["table", "orbit", "series", "vanishing"]);
    let mut failure = None;
    for (name, t) in orbit_tables(model, table)? {
        let h = hamiltonian_from_counts(t, model.truncation)?;
        let verdict = assert_hamiltonian_vanishes(&h);
        if let VanishingReport::Fail { .. } = verdict {
            failure.get_or_insert(CliError::CheckFailed(format!("Hamiltonian `{name}` does not vanish: {verdict}")));
        }
        s.row([name.clone(), t.context().name().to_string(), h.to_string(), verdict.to_string()]);
    }
    let mut r = Report::default();
    r.push(s);
    Ok(Outcome { report: r, failure })
}

fn potential(model: &Model, table: Option<&str>) -> Result<Report, CliError> {
    let mut s = Section::new("potential", &["table", "context", "series"]);
    for (name, t) in select(&model.tables, table, "table")? {
        let f = potential_from_counts(t, model.truncation)?;
        s.row([name.clone(), t.context().name().to_string(), f.to_string()]);
    }
    let mut r = Report::default();
    r.push(s);
    Ok(r)
}

fn compose(model: &Model, lower: &str, upper: &str, order: u32) -> Result<Report, CliError> {
    let f_minus = potential_from_counts(model.table(lower)?, model.truncation)?;
    let f_plus = potential_from_counts(model.table(upper)?, model.truncation)?;
    let middle = f_minus
        .positive_orbits()
        .intersection(f_plus.negative_orbits())
        .cloned()
        .collect();
    let out = compose_sharp(&f_minus, &f_plus, &middle, order)?;
    let shown = middle.iter().cloned().collect::<Vec<_>>().join(",");
    Ok(single("compose", &["lower", "upper", "middle", "order", "series"], |s| {
        s.row([lower.to_string(), upper.to_string(), shown, order.to_string(), out.to_string()]);
    }))
}

fn kv(pairs: &[(String, String)]) -> String {
    if pairs.is_empty() {
        return "-".into();
    }
    pairs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join("; ")
}

fn trace_section(title: String, steps: &[TraceStep]) -> Section {
    let mut s = Section::stacked(title, &["step", "claim", "citation", "inputs", "outputs"]);
    for step in steps {
        s.row([
            step.id.clone(),
            step.claim.clone(),
            step.citation.clone(),
            kv(&step.inputs),
            kv(&step.outputs),
        ]);
    }
    s
}

fn exceptional_curve<'a>(model: &'a Model, name: Option<&str>) -> Result<&'a Arc<BaseCurve>, CliError> {
    if let Some(n) = name {
        return Ok(model.curve(n)?);
    }
    let closed: Vec<_> = model.curves.values().filter(|c| c.is_closed()).collect();
    match closed.as_slice() {
        [only] => Ok(only),
        [] => Err(CliError::Usage("no closed curve declared".into())),
        _ => Err(CliError::Usage("several closed curves declared; name one".into())),
    }
}

fn exceptional(model: &Model, curve: Option<&str>) -> Result<Report, CliError> {
    let v = exceptional_curve(model, curve)?;
    let inv = exceptional_invariants(v)?;
    let out = recursion_pipeline(&DescendantSpec::new(v.clone(), 2, vec![1])?)?;
    let mut r = Report::default();
    let mut s = Section::new("exceptional", &["curve", "self_intersection", "c1", "space", "count"]);
    s.row([
        v.name().to_string(),
        inv.self_intersection.to_string(),
        inv.c1.to_string(),
        format!("M^1_{{{},2,1}}", v.name()),
        out.value.to_string(),
    ]);
    let mut indices = Section::new("cover-index", &["d", "index"]);
    for d in 1..=5 {
        indices.row([d.to_string(), inv.cover_index(d)?.to_string()]);
    }
    r.push(s);
    r.push(indices);
    r.push(trace_section(format!("trace {}", v.name()), &out.steps));
    Ok(r)
}

fn orbit_names(neck: &NeckConfiguration) -> String {
    neck.orbits().iter().map(|o| o.name().to_string()).collect::<Vec<_>>().join(",")
}

fn neckstretch(model: &Model, neck: Option<&str>, trace: bool) -> Result<Report, CliError> {
    let mut r = Report::default();
    let mut s = Section::new("neckstretch", &["neck", "orbits", "defect", "equation", "verdict"]);
    let mut derivations = Vec::new();
    for (name, n) in select(&model.necks, neck, "neck")? {
        let orbits = n.orbits();
        let (defect, equation) = match orbits.as_slice() {
            [g] if g.is_elliptic() => {
                let eq = splitting_equations(n)?;
                (eq.defect.to_string(), eq.to_string())
            }
            _ => ("-".into(), "-".into()),
        };
        let verdict = match elliptic_necessity(n)? {
            Necessity::Consistent { elliptic } => format!("consistent (elliptic {elliptic})"),
            Necessity::Contradiction { derivation } => {
                derivations.push(trace_section(format!("derivation {name}"), &derivation));
                "contradiction".into()
            }
        };
        s.row([name.clone(), orbit_names(n), defect, equation, verdict]);
    }
    r.push(s);
    if trace {
        for d in derivations {
            r.push(d);
        }
    }
    Ok(r)
}

struct Checks {
    section: Section,
    failed: usize,
}

impl Checks {
    fn record(&mut self, check: &str, subject: &str, result: Result<String, String>) {
        let (status, detail) = match result {
            Ok(d) => ("pass", d),
            Err(d) => {
                self.failed += 1;
                ("FAIL", d)
            }
        };
        self.section.row([check.to_string(), subject.to_string(), status.to_string(), detail]);
    }
}

fn weight_round_trip(table: &CountTable, truncation: u32) -> Result<String, String> {
    let counts = |t: &CountTable| -> BTreeMap<String, Rational> {
        t.entries()
            .iter()
            .filter(|e| e.count != Rational::from_integer(0.into()))
            .map(|e| (e.key(), e.count.clone()))
            .collect()
    };
    let f = potential_from_counts(table, truncation).map_err(|e| e.to_string())?;
    let back = f.read_counts().map_err(|e| e.to_string())?;
    let (want, got) = (counts(table), counts(&back));
    if want == got {
        Ok(format!("{} entries", want.len()))
    } else {
        Err(format!("read back {got:?}"))
    }
}

fn cover_balance(spec: &CoverSpec) -> Result<String, String> {
    let z = spec.branch_count() as i64;
    match spec.cokernel_rank() {
        Ok(rank) => {
            let lhs = rank as i64 + spec.fredholm_index();
            let rhs = spec.base().index() + 2 * z;
            if lhs == rhs {
                Ok(format!("rank {rank} + index {} = {rhs}", spec.fredholm_index()))
            } else {
                Err(format!("rank + index = {lhs}, expected {rhs}"))
            }
        }
        Err(e) => Err(e.to_string()),
    }
}

fn check(doc: &ConfigDocument, model: &Model) -> Result<Outcome, CliError> {
    let mut c = Checks {
        section: Section::new("check", &["check", "subject", "status", "detail"]),
        failed: 0,
    };

    let rendered = doc.render();
    let round = rendered
        .parse::<ConfigDocument>()
        .map_err(|e| e.to_string())
        .and_then(|again| {
            if &again == doc && again.render() == rendered {
                Ok("parse, render, parse is a fixpoint".to_string())
            } else {
                Err("rendered document parses differently".to_string())
            }
        });
    c.record("round-trip", "config", round);

    for orbit in model.registry.iter().filter(|o| o.is_elliptic() && o.max_iterate() >= 2) {
        let result = match orbit.cz_defect(1, 1) {
            Ok(d) if d == 1 || d == -1 => Ok(format!("CZ defect {d}")),
            Ok(d) => Err(format!("CZ defect {d}")),
            Err(e) => Err(e.to_string()),
        };
        c.record("cz-defect", orbit.name(), result);
    }

    for (name, spec) in &model.covers {
        c.record("rank-balance", name, cover_balance(spec));
        if !spec.base().is_closed() {
            let result = boundary_strata(spec)
                .map_err(|e| e.to_string())
                .and_then(|g| g.check_invariants().map(|_| format!("{} buildings", g.buildings.len())));
            c.record("strata", name, result);
        }
    }

    for (name, table) in &model.tables {
        c.record("weights", name, weight_round_trip(table, model.truncation));
        if matches!(table.context(), TableContext::Orbit(_)) {
            let result = hamiltonian_from_counts(table, model.truncation)
                .map_err(|e| e.to_string())
                .and_then(|h| match assert_hamiltonian_vanishes(&h) {
                    VanishingReport::Fail { offending } => Err(format!("nonzero: {}", offending.join(", "))),
                    other => Ok(other.to_string()),
                });
            c.record("hamiltonian", name, result);
        }
    }

    for curve in model.curves.values().filter(|v| v.is_closed()) {
        if exceptional_invariants(curve).is_err() {
            continue;
        }
        let result = DescendantSpec::new(curve.clone(), 2, vec![1])
            .and_then(|spec| recursion_pipeline(&spec))
            .map_err(|e| e.to_string())
            .and_then(|out| {
                if out.value == Rational::new((-1).into(), 4.into()) {
                    Ok(format!("count {}", out.value))
                } else {
                    Err(format!("count {}", out.value))
                }
            });
        c.record("exceptional", curve.name(), result);
    }

    for (name, neck) in &model.necks {
        let orbits = neck.orbits();
        let all_hyperbolic = orbits.iter().all(|o| o.is_hyperbolic());
        let result = elliptic_necessity(neck).map_err(|e| e.to_string()).and_then(|v| {
            if v.is_contradiction() == all_hyperbolic {
                Ok(if all_hyperbolic { "contradiction" } else { "consistent" }.to_string())
            } else {
                Err("verdict disagrees with the orbit kinds".to_string())
            }
        });
        c.record("necessity", name, result);
        if let [g] = orbits.as_slice() {
            if g.is_elliptic() {
                let result = splitting_equations(neck).map_err(|e| e.to_string()).and_then(|eq| {
                    if eq.value == Rational::new((-1).into(), 4.into()) {
                        Ok(eq.to_string())
                    } else {
                        Err(format!("right side {}", eq.value))
                    }
                });
                c.record("splitting", name, result);
            }
        }
    }

    let total = c.section.rows.len();
    let summary = if c.failed == 0 {
        format!("all {total} checks passed")
    } else {
        format!("{} of {total} checks failed", c.failed)
    };
    c.section.note(summary.clone());
    let failed = c.failed;
    let mut r = Report::default();
    r.push(c.section);
    let failure = (failed > 0).then(|| CliError::CheckFailed(summary));
    Ok(Outcome { report: r, failure })
}
