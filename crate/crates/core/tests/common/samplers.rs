//! Random homogeneous series and potentials over a few fixed orbits.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use localsft::algebra::{GradedSeries, Side, Variable};
use localsft::potentials::Potential;
use localsft::{OrbitIterate, ReebOrbit, Theta, VarKind};
use num::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const TRUNCATION: u32 = 6;

pub fn generators() -> Vec<Variable> {
    let orbits = [
        Arc::new(ReebOrbit::elliptic("a", Theta::new(3, 10), 8).unwrap()),
        // even CZ gives odd variables
        Arc::new(ReebOrbit::hyperbolic("b", 2, 8).unwrap()),
        Arc::new(ReebOrbit::hyperbolic("c", 1, 8).unwrap()),
    ];
    let mut out = Vec::new();
    for orbit in &orbits {
        for k in 1..=2 {
            let it = OrbitIterate::new(orbit.clone(), k).unwrap();
            for kind in [VarKind::P, VarKind::Q] {
                for side in [Side::Plus, Side::Minus] {
                    if let Ok(v) = Variable::new(it.clone(), kind, side) {
                        out.push(v);
                    }
                }
            }
        }
    }
    out
}

pub struct Sampler {
    rng: StdRng,
    vars: Vec<Variable>,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: StdRng::seed_from_u64(seed),
            vars: generators(),
        }
    }

    pub fn coefficient(&mut self) -> BigRational {
        let n: i64 = self.rng.gen_range(-5..=5);
        let d: i64 = self.rng.gen_range(1..=3);
        BigRational::new(if n == 0 { 1 } else { n }.into(), d.into())
    }

    pub fn monomial(&mut self) -> Vec<Variable> {
        let len = self.rng.gen_range(0..=3);
        let mut p_count = 0;
        let mut out = Vec::new();
        while out.len() < len {
            let v = self.vars[self.rng.gen_range(0..self.vars.len())].clone();
            if v.kind() == VarKind::P {
                if p_count == 2 {
                    continue;
                }
                p_count += 1;
            }
            out.push(v);
        }
        out
    }

    /// A nonzero homogeneous series with a few terms.
    pub fn homogeneous(&mut self) -> GradedSeries {
        loop {
            let mut buckets: BTreeMap<i64, GradedSeries> = BTreeMap::new();
            for _ in 0..12 {
                let vars = self.monomial();
                let c = self.coefficient();
                let term = GradedSeries::product(&vars, c, TRUNCATION);
                if let Some(d) = term.degree() {
                    let slot = buckets.entry(d).or_insert_with(|| GradedSeries::zero(TRUNCATION));
                    if slot.len() < 3 {
                        *slot = &*slot + &term;
                    }
                }
            }
            if let Some(best) = buckets.into_values().filter(|s| !s.is_zero()).max_by_key(|s| s.len()) {
                return best;
            }
        }
    }
}

pub const ORDER: u32 = 4;

pub fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub struct Ends {
    pub orbit: Arc<ReebOrbit>,
}

impl Ends {
    pub fn elliptic(name: &str, num: i64) -> Self {
        Ends {
            orbit: Arc::new(ReebOrbit::elliptic(name, Theta::new(num, 10), 3).unwrap()),
        }
    }

    pub fn hyperbolic(name: &str, cz1: i64) -> Self {
        Ends {
            orbit: Arc::new(ReebOrbit::hyperbolic(name, cz1, 3).unwrap()),
        }
    }

    pub fn names(&self) -> BTreeSet<String> {
        BTreeSet::from([self.orbit.name().to_string()])
    }

    pub fn vars(&self, kind: VarKind, side: Side) -> Vec<Variable> {
        (1..=2)
            .filter_map(|k| Variable::new(OrbitIterate::new(self.orbit.clone(), k).unwrap(), kind, side).ok())
            .collect()
    }
}

/// Random even potential in `q⁻` of `below` and `p⁺` of `above`. With `anchor`,
/// every term carries a variable of that side, so elimination through the
/// other side raises the filtration.
pub fn random_potential(rng: &mut StdRng, below: &Ends, above: &Ends, anchor: Option<Side>) -> Potential {
    let qs = below.vars(VarKind::Q, Side::Minus);
    let ps = above.vars(VarKind::P, Side::Plus);
    let mut series = GradedSeries::zero(TRUNCATION);
    for _ in 0..rng.gen_range(2..=6) {
        let mut vars = Vec::new();
        match anchor {
            Some(Side::Minus) => vars.push(qs[rng.gen_range(0..qs.len())].clone()),
            Some(Side::Plus) => vars.push(ps[rng.gen_range(0..ps.len())].clone()),
            _ => {}
        }
        for _ in 0..rng.gen_range(0..=2) {
            let pool = if rng.gen_bool(0.5) { &qs } else { &ps };
            vars.push(pool[rng.gen_range(0..pool.len())].clone());
        }
        // potentials are even
        if vars.is_empty() || vars.iter().filter(|v| v.is_odd()).count() % 2 == 1 {
            continue;
        }
        let c = r(rng.gen_range(1..=4) * if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(1..=3));
        series = series + GradedSeries::product(&vars, c, TRUNCATION);
    }
    Potential::from_series(series, below.names(), above.names())
}

