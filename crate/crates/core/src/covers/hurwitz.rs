//! Connected Hurwitz counts by enumerating monodromy tuples in `S_d`.

use num::{BigInt, BigRational};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const MAX_HURWITZ_DEGREE: u32 = 6;

/// A permutation of `{0, …, d−1}` stored as its image table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(d: usize) -> Self {
        Perm((0..d as u8).collect())
    }

    pub fn from_images(images: Vec<u8>) -> Self {
        Perm(images)
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j as usize)
    }

    /// All permutations of the given degree in lexicographic order.
    pub fn all(d: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut current: Vec<u8> = (0..d as u8).collect();
        loop {
            out.push(Perm(current.clone()));
            // next lexicographic permutation
            let Some(i) = (1..current.len()).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..current.len()).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }
}

/// Cycle lengths in nonincreasing order.
pub fn cycle_type(p: &Perm) -> Vec<u32> {
    let d = p.degree();
    let mut seen = vec![false; d];
    let mut lengths = Vec::new();
    for start in 0..d {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p.0[i] as usize;
            len += 1;
        }
        lengths.push(len);
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    lengths
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut x = x;
    while parent[x] != root {
        let next = parent[x];
        parent[x] = root;
        x = next;
    }
    root
}

fn transitive(d: usize, perms: &[&Perm]) -> bool {
    let mut parent: Vec<usize> = (0..d).collect();
    let mut classes = d;
    for p in perms {
        for (i, &j) in p.0.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j as usize));
            if a != b {
                parent[a] = b;
                classes -= 1;
            }
        }
    }
    classes <= 1
}

struct Search<'a> {
    d: usize,
    classes: &'a [Vec<Perm>],
    targets: &'a [Vec<u32>],
}

impl<'a> Search<'a> {
    /// Counts completions of `chosen`, whose product so far is `product`.
    /// The last element is forced to be the inverse of the running product.
    fn count(&self, chosen: &mut Vec<&'a Perm>, product: &Perm) -> u64 {
        let pos = chosen.len();
        let last = self.classes.len() - 1;
        if pos == last {
            let closing = product.inverse();
            if cycle_type(&closing) != self.targets[last] {
                return 0;
            }
            let mut all: Vec<&Perm> = chosen.clone();
            all.push(&closing);
            return u64::from(transitive(self.d, &all));
        }
        let mut total = 0;
        for p in &self.classes[pos] {
            chosen.push(p);
            total += self.count(chosen, &product.compose(p));
            chosen.pop();
        }
        total
    }
}

fn check_partition(d: u32, profile: &[u32]) -> Result<Vec<u32>> {
    if profile.iter().any(|&x| x == 0) || profile.iter().sum::<u32>() != d {
        return Err(Error::InvalidPartition(format!("{profile:?} is not a partition of {d}")));
    }
    let mut sorted = profile.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    Ok(sorted)
}

/// Weighted count of connected degree-`d` covers of the sphere with the given
/// ramification profiles plus `simple_branch_points` simple branch points:
/// the number of transitive tuples with product the identity, divided by `d!`.
///
/// Profiles with inconsistent Riemann-Hurwitz parity admit no tuples and
/// yield zero.
pub fn hurwitz_count(d: u32, end_profiles: &[Vec<u32>], simple_branch_points: u32) -> Result<BigRational> {
    if d == 0 {
        return Err(Error::InvalidPartition("degree must be positive".into()));
    }
    if d > MAX_HURWITZ_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree: d,
            max: MAX_HURWITZ_DEGREE,
        });
    }
    let mut targets = end_profiles
        .iter()
        .map(|p| check_partition(d, p))
        .collect::<Result<Vec<_>>>()?;
    if d >= 2 {
        let mut transposition = vec![1; d as usize - 2];
        transposition.insert(0, 2);
        targets.extend(std::iter::repeat_n(transposition, simple_branch_points as usize));
    }
    // degree 1 has no transpositions, so any requested branch point kills the count
    let impossible = d == 1 && simple_branch_points > 0;

    let factorial: u64 = (1..=u64::from(d)).product();
    let count = if impossible {
        0
    } else if targets.is_empty() {
        u64::from(d == 1)
    } else {
        let all = Perm::all(d as usize);
        let classes: Vec<Vec<Perm>> = targets
            .iter()
            .map(|t| all.iter().filter(|p| &cycle_type(p) == t).cloned().collect())
            .collect();
        let search = Search {
            d: d as usize,
            classes: &classes,
            targets: &targets,
        };
        if classes.len() == 1 {
            let mut chosen = Vec::new();
            search.count(&mut chosen, &Perm::identity(d as usize))
        } else {
            classes[0]
                .par_iter()
                .map(|first| {
                    let mut chosen = vec![first];
                    search.count(&mut chosen, first)
                })
                .sum()
        }
    };
    Ok(BigRational::new(BigInt::from(count), BigInt::from(factorial)))
}
