//! Random valid cover specifications, with index and ramification computed
//! here from first principles.

use std::sync::Arc;

use localsft::covers::{BaseCurve, BaseCurveData, CoverSpec};
use localsft::{EndSign, OrbitCollection, OrbitIterate, ReebOrbit, Theta};
use rand::rngs::StdRng;
use rand::Rng;

pub const MAX_ITERATE: u32 = 40;

/// An orbit together with the data needed to recompute its CZ indices.
#[derive(Clone)]
pub struct Orbit {
    pub orbit: Arc<ReebOrbit>,
    /// `(num, den)` for elliptic, `None` for hyperbolic.
    pub theta: Option<(i64, i64)>,
    pub cz1: i64,
}

impl Orbit {
    pub fn cz(&self, k: u32) -> i64 {
        let k = i64::from(k);
        match self.theta {
            Some((n, d)) => 2 * (k * n).div_euclid(d) + 1,
            None => k * self.cz1,
        }
    }
}

pub fn random_elliptic(rng: &mut StdRng, name: &str, min_den: i64) -> Orbit {
    loop {
        let den = rng.gen_range(min_den.max(21)..=min_den.max(21) + 60);
        let num = rng.gen_range(1..den);
        if num::integer::gcd(num, den) != 1 {
            continue;
        }
        let orbit = ReebOrbit::elliptic(name, Theta::new(num, den), MAX_ITERATE.min(den as u32 - 1)).unwrap();
        return Orbit {
            orbit: Arc::new(orbit),
            theta: Some((num, den)),
            cz1: 2 * (num.div_euclid(den)) + 1,
        };
    }
}

pub fn random_hyperbolic(rng: &mut StdRng, name: &str) -> Orbit {
    let cz1 = rng.gen_range(-3..=4);
    Orbit {
        orbit: Arc::new(ReebOrbit::hyperbolic(name, cz1, MAX_ITERATE).unwrap()),
        theta: None,
        cz1,
    }
}

pub fn random_partition(rng: &mut StdRng, d: u32) -> Vec<u32> {
    let mut parts = Vec::new();
    let mut left = d;
    while left > 0 {
        let p = rng.gen_range(1..=left);
        parts.push(p);
        left -= p;
    }
    parts
}

/// A random spec accepted by validation, with the orbits it uses.
pub struct Sample {
    pub spec: CoverSpec,
    pub orbits: Vec<Orbit>,
    pub base_chi: i64,
}

impl Sample {
    fn find(&self, name: &str) -> &Orbit {
        self.orbits.iter().find(|o| o.orbit.name() == name).unwrap()
    }

    pub fn cover_chi(&self) -> i64 {
        let s = &self.spec;
        2 * i64::from(s.components()) - (s.positive_ends().len() + s.negative_ends().len()) as i64
    }

    pub fn ramification(&self) -> i64 {
        i64::from(self.spec.degree()) * self.base_chi - self.cover_chi()
    }

    pub fn index(&self) -> i64 {
        let cz = |c: &OrbitCollection| -> i64 { c.items().iter().map(|it| self.find(it.name()).cz(it.k())).sum() };
        let s = &self.spec;
        -self.cover_chi() + cz(s.positive_ends()) - cz(s.negative_ends())
            + i64::from(s.degree()) * s.base().rel_c1_doubled()
    }
}

fn cover_ends(rng: &mut StdRng, sign: EndSign, base: &OrbitCollection, d: u32) -> OrbitCollection {
    let mut items = Vec::new();
    for it in base.items() {
        for a in random_partition(rng, d) {
            items.push(OrbitIterate::new(it.orbit().clone(), it.k() * a).unwrap());
        }
    }
    OrbitCollection::new(sign, items)
}

fn cylinder_sample(rng: &mut StdRng) -> Option<Sample> {
    let o = if rng.gen_bool(0.5) {
        random_elliptic(rng, "g", 2)
    } else {
        random_hyperbolic(rng, "h")
    };
    let base = Arc::new(BaseCurve::orbit_cylinder(&o.orbit));
    let d = rng.gen_range(1..=5);
    let plus = cover_ends(rng, EndSign::Positive, base.positive_ends(), d);
    let minus = cover_ends(rng, EndSign::Negative, base.negative_ends(), d);
    let max = plus.len().min(minus.len()) as u32;
    let components = rng.gen_range(1..=max);
    let spec = CoverSpec::with_points(base, d, plus, minus, 0, 0, components).ok()?;
    Some(Sample {
        spec,
        orbits: vec![o],
        base_chi: 0,
    })
}

fn punctured_sample(rng: &mut StdRng) -> Option<Sample> {
    let np = rng.gen_range(0..=2);
    let nm = rng.gen_range(0..=2);
    let orbits: Vec<Orbit> = (0..np + nm).map(|i| random_elliptic(rng, &format!("e{i}"), 2)).collect();
    let simple = |o: &Orbit| OrbitIterate::new(o.orbit.clone(), 1).unwrap();
    let plus = OrbitCollection::new(EndSign::Positive, orbits[..np].iter().map(simple).collect());
    let minus = OrbitCollection::new(EndSign::Negative, orbits[np..].iter().map(simple).collect());
    let chi = 2 - (np + nm) as i64;
    // rigid, as in the count tables
    let index = 0;
    let cz_plus: i64 = orbits[..np].iter().map(|o| o.cz(1)).sum();
    let cz_minus: i64 = orbits[np..].iter().map(|o| o.cz(1)).sum();
    let rel = index + chi - cz_plus + cz_minus;
    let base = Arc::new(
        BaseCurve::new(BaseCurveData {
            name: "v".into(),
            positive_ends: plus,
            negative_ends: minus,
            index,
            rel_c1_doubled: rel,
            immersed: true,
            components: 1,
        })
        .ok()?,
    );
    let d = rng.gen_range(1..=4);
    let cplus = cover_ends(rng, EndSign::Positive, base.positive_ends(), d);
    let cminus = cover_ends(rng, EndSign::Negative, base.negative_ends(), d);
    let spec = CoverSpec::new(base, d, cplus, cminus).ok()?;
    Some(Sample {
        spec,
        orbits,
        base_chi: chi,
    })
}

pub fn random_sample(rng: &mut StdRng) -> Sample {
    loop {
        let s = if rng.gen_bool(0.5) {
            cylinder_sample(rng)
        } else {
            punctured_sample(rng)
        };
        if let Some(s) = s {
            return s;
        }
    }
}
