//! Direct enumeration of monodromy representations, written independently of
//! the library's search: every tuple from the conjugacy classes is built in
//! full, the last element is forced by the product relation, and
//! transitivity is checked by breadth-first search.

use std::collections::VecDeque;

type P = Vec<usize>;

fn all_perms(d: usize) -> Vec<P> {
    fn go(prefix: &mut P, used: &mut Vec<bool>, out: &mut Vec<P>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; d], &mut out);
    out
}

fn cycles(p: &P) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len > 0 {
            out.push(len);
        }
    }
    out.sort_unstable();
    out
}

/// `(a then b)(i) = b(a(i))`.
fn then(a: &P, b: &P) -> P {
    a.iter().map(|&i| b[i]).collect()
}

fn invert(a: &P) -> P {
    let mut out = vec![0; a.len()];
    for (i, &j) in a.iter().enumerate() {
        out[j] = i;
    }
    out
}

fn transitive(tuple: &[&P], d: usize) -> bool {
    let mut seen = vec![false; d];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for p in tuple {
            let j = p[i];
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Number of transitive tuples `(σ₁, …, σ_n)` with `σᵢ` of cycle type
/// `profiles[i]` and `σ₁⋯σ_n = 1`, divided by `d!`, as `(numerator, d!)`.
pub fn brute_force(d: usize, profiles: &[Vec<u32>]) -> (u64, u64) {
    let factorial: u64 = (1..=d as u64).product();
    if profiles.is_empty() {
        return (u64::from(d == 1), factorial);
    }
    let perms = all_perms(d);
    let class = |t: &Vec<u32>| -> Vec<P> {
        let mut want: Vec<usize> = t.iter().map(|&x| x as usize).collect();
        want.sort_unstable();
        perms.iter().filter(|p| cycles(p) == want).cloned().collect()
    };
    let classes: Vec<Vec<P>> = profiles.iter().map(class).collect();
    let (last, rest) = classes.split_last().unwrap();
    let mut count = 0u64;
    let mut idx = vec![0usize; rest.len()];
    if rest.iter().any(Vec::is_empty) {
        return (0, factorial);
    }
    loop {
        let mut product: P = (0..d).collect();
        for (c, &i) in rest.iter().zip(&idx) {
            product = then(&product, &c[i]);
        }
        let closing = invert(&product);
        if last.contains(&closing) {
            let mut tuple: Vec<&P> = rest.iter().zip(&idx).map(|(c, &i)| &c[i]).collect();
            tuple.push(&closing);
            if transitive(&tuple, d) {
                count += 1;
            }
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return (count, factorial);
            }
            idx[pos] += 1;
            if idx[pos] < rest[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

pub fn partitions(d: u32) -> Vec<Vec<u32>> {
    fn go(rem: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rem == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=rem.min(max)).rev() {
            prefix.push(part);
            go(rem - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(d, d, &mut Vec::new(), &mut out);
    out
}

/// Every multiset of at most `max_points` partitions of `d` (non-simple ones
/// as profiles, simple ones as a count), as `(profiles, simple_points)`.
pub fn profile_sets(d: u32, max_points: usize) -> Vec<(Vec<Vec<u32>>, u32)> {
    let simple: Vec<u32> = if d >= 2 {
        let mut t = vec![2];
        t.extend(std::iter::repeat_n(1, d as usize - 2));
        t
    } else {
        vec![]
    };
    let others: Vec<Vec<u32>> = partitions(d).into_iter().filter(|p| *p != simple).collect();
    let mut out = Vec::new();
    fn choose(from: usize, left: usize, pool: &[Vec<u32>], cur: &mut Vec<Vec<u32>>, out: &mut Vec<Vec<Vec<u32>>>) {
        out.push(cur.clone());
        if left == 0 {
            return;
        }
        for i in from..pool.len() {
            cur.push(pool[i].clone());
            choose(i, left - 1, pool, cur, out);
            cur.pop();
        }
    }
    let mut multisets = Vec::new();
    choose(0, max_points, &others, &mut Vec::new(), &mut multisets);
    for profiles in multisets {
        let room = max_points - profiles.len();
        let max_simple = if d >= 2 { room } else { 0 };
        for s in 0..=max_simple {
            out.push((profiles.clone(), s as u32));
        }
    }
    out
}

pub fn with_simple(d: u32, profiles: &[Vec<u32>], simple: u32) -> Vec<Vec<u32>> {
    let mut all = profiles.to_vec();
    if d >= 2 {
        let mut t = vec![2];
        t.extend(std::iter::repeat_n(1, d as usize - 2));
        all.extend(std::iter::repeat_n(t, simple as usize));
    }
    all
}
