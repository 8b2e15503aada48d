//! Deterministic hit-and-miss families over a ground set `[N]`.
//!
//! A family `H` of labelings `h: [N] -> {0,1}` is `(a, b)`-hit-and-miss when
//! for every `A` with `|A| <= a` and disjoint `B` with `|B| <= b` some member
//! labels all of `A` zero and all of `B` one.
//!
//! Members are built in layers. A layer reads `x < m` as a polynomial over a
//! prime field `GF(q)`, `q < m`, whose coefficients are its base-`q` digits,
//! and maps it to its value at one of the first `len` points. Two distinct
//! elements agree on at most `digits - 1` points, so with
//! `len > a * b * (digits - 1)` some point separates every element of `B`
//! from every element of `A`, and the problem moves to the alphabet `[q]`.
//! The last alphabet is served by explicit small subsets. Each level picks
//! whichever is smaller: a further layer, or subsets directly.

use std::collections::HashMap;

use crate::error::{invalid, Error, Result};

/// Largest `b` this module constructs.
pub const MAX_B: usize = 2;

fn is_prime(p: usize) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Fewest base-`q` digits that represent every value below `n`.
fn digits_for(n: usize, q: usize) -> usize {
    let mut digits = 1;
    let mut cap = q as u128;
    while cap < n as u128 {
        cap *= q as u128;
        digits += 1;
    }
    digits
}

fn rs_symbol(mut x: usize, q: usize, digits: usize, point: usize) -> usize {
    // Horner over the base-q digits, least significant first.
    let mut coeffs = Vec::with_capacity(digits);
    for _ in 0..digits {
        coeffs.push(x % q);
        x /= q;
    }
    coeffs.iter().rev().fold(0, |acc, &c| (acc * point + c) % q)
}

/// Subsets serving every `(A, B)` on `[m]`: singletons when `b = 1`;
/// pairs when `b = 2`, plus singletons unless a spare partner always exists.
fn subsets(m: usize, a: usize, b: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if b == 1 || m < a + 2 {
        out.extend((0..m).map(|x| vec![x]));
    }
    if b == 2 {
        for x in 0..m {
            for y in x + 1..m {
                out.push(vec![x, y]);
            }
        }
    }
    out
}

fn subsets_size(m: usize, a: usize, b: usize) -> u128 {
    let m128 = m as u128;
    let pairs = m128 * m128.saturating_sub(1) / 2;
    match b {
        1 => m128,
        _ if m < a + 2 => m128 + pairs,
        _ => pairs,
    }
}

const PRIME_SEARCH_LIMIT: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Step {
    q: usize,
    digits: usize,
    len: usize,
}

/// Smallest family size for ground `[m]` and the layer achieving it.
fn plan(m: usize, a: usize, b: usize, primes: &[usize], memo: &mut HashMap<usize, (u128, Option<Step>)>) -> u128 {
    if let Some(&(size, _)) = memo.get(&m) {
        return size;
    }
    let a_m = a.min(m);
    let mut best = (subsets_size(m, a_m, b), None);
    for &q in primes.iter().take_while(|&&q| q < m) {
        let digits = digits_for(m, q);
        let len = a_m * b * (digits - 1) + 1;
        if len > q || len as u128 >= best.0 {
            continue;
        }
        let size = len as u128 * plan(q, a, b, primes, memo);
        if size < best.0 {
            best = (size, Some(Step { q, digits, len }));
        }
    }
    memo.insert(m, best);
    best.0
}

#[derive(Clone, Debug)]
struct Layer {
    len: usize,
    /// Input alphabet size.
    width: usize,
    /// `table[point * width + s]`: symbol of `s` at `point`.
    table: Vec<u32>,
    q: usize,
}

#[derive(Clone, Debug)]
pub struct HitMissFamily {
    ground: usize,
    a: usize,
    b: usize,
    layers: Vec<Layer>,
    /// Subsets of the last alphabet.
    bottom: Vec<Vec<usize>>,
}

impl HitMissFamily {
    /// `ConstructHitAndMissFamily([N], a, b)` for `b <= 2`.
    pub fn construct(n: usize, a: usize, b: usize) -> Result<HitMissFamily> {
        if b > MAX_B {
            return Err(Error::Unsupported(format!("hit-and-miss families need b <= {MAX_B}, got {b}")));
        }
        if a == 0 || b == 0 {
            return invalid("hit-and-miss parameters must be positive");
        }
        if a < b {
            return invalid(format!("hit-and-miss needs a >= b, got a={a}, b={b}"));
        }
        let primes: Vec<usize> = (2..n.clamp(2, PRIME_SEARCH_LIMIT)).filter(|&p| is_prime(p)).collect();
        let mut memo = HashMap::new();
        plan(n, a, b, &primes, &mut memo);
        let mut layers = Vec::new();
        let mut m = n;
        while let Some(step) = memo[&m].1 {
            let mut table = Vec::with_capacity(step.len * m);
            for point in 0..step.len {
                table.extend((0..m).map(|x| rs_symbol(x, step.q, step.digits, point) as u32));
            }
            layers.push(Layer { len: step.len, width: m, table, q: step.q });
            m = step.q;
        }
        let bottom = subsets(m, a.min(m), b);
        Ok(HitMissFamily { ground: n, a, b, layers, bottom })
    }

    /// A family given by explicit labelings, for callers with their own
    /// construction. No property is checked.
    pub fn from_labelings(n: usize, labelings: Vec<Vec<bool>>) -> Result<HitMissFamily> {
        let mut bottom = Vec::with_capacity(labelings.len());
        for l in labelings {
            if l.len() != n {
                return invalid("labeling length differs from ground size");
            }
            bottom.push((0..n).filter(|&x| l[x]).collect());
        }
        Ok(HitMissFamily { ground: n, a: 0, b: 0, layers: Vec::new(), bottom })
    }

    pub fn ground_size(&self) -> usize {
        self.ground
    }

    pub fn params(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn len(&self) -> usize {
        self.layers.iter().map(|l| l.len).product::<usize>() * self.bottom.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// A short name of the construction that was selected.
    pub fn scheme_name(&self) -> String {
        let mut parts: Vec<String> = self.layers.iter().map(|l| format!("rs({})x{}", l.q, l.len)).collect();
        parts.push("subsets".into());
        parts.join(" > ")
    }

    /// Layer points and bottom subset of member `index`.
    fn decode(&self, mut index: usize) -> (Vec<usize>, usize) {
        let j = index % self.bottom.len();
        index /= self.bottom.len();
        let mut points = vec![0; self.layers.len()];
        for (k, l) in self.layers.iter().enumerate().rev() {
            points[k] = index % l.len;
            index /= l.len;
        }
        (points, j)
    }

    fn symbol(&self, points: &[usize], x: usize) -> usize {
        self.layers.iter().zip(points).fold(x, |s, (l, &p)| l.table[p * l.width + s] as usize)
    }

    /// `h(x)` for member `index`.
    pub fn label(&self, index: usize, x: usize) -> bool {
        let (points, j) = self.decode(index);
        self.bottom[j].contains(&self.symbol(&points, x))
    }

    /// `{x : h(x) = 1}` for member `index`, sorted.
    pub fn hit_set(&self, index: usize) -> Result<Vec<usize>> {
        if index >= self.len() {
            return invalid(format!("family index {index} out of range ({} members)", self.len()));
        }
        let (points, j) = self.decode(index);
        if self.layers.is_empty() {
            return Ok(self.bottom[j].clone());
        }
        let accept = &self.bottom[j];
        Ok((0..self.ground).filter(|&x| accept.contains(&self.symbol(&points, x))).collect())
    }
}

/// An `A` of at most `k` elements meeting every set, if one exists.
fn transversal(sets: &[u128], k: usize, chosen: &mut Vec<usize>) -> bool {
    let open = sets.iter().copied().filter(|&z| chosen.iter().all(|&x| z >> x & 1 == 0)).min_by_key(|z| z.count_ones());
    let Some(z) = open else { return true };
    if k == 0 {
        return false;
    }
    // some element of the smallest open set must be in A
    for x in (0..128).filter(|&x| z >> x & 1 == 1) {
        chosen.push(x);
        if transversal(sets, k - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Checks the hit-and-miss property for every admissible `(A, B)` and
/// returns a failing pair, if any. For each `B` the members labeling `B`
/// one fail exactly when some `A` with `|A| <= a` meets all their one-sets,
/// which is decided by a bounded transversal search. Grounds up to 128.
pub fn find_violation(fam: &HitMissFamily, a: usize, b: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = fam.ground_size();
    assert!(n <= 128, "violation search supports grounds up to 128");
    let ones: Vec<u128> = (0..fam.len())
        .map(|i| (0..n).filter(|&x| fam.label(i, x)).fold(0u128, |m, x| m | 1 << x))
        .collect();
    let mut bsets: Vec<Vec<usize>> = (0..n).map(|x| vec![x]).collect();
    if b >= 2 {
        for x in 0..n {
            for y in x + 1..n {
                bsets.push(vec![x, y]);
            }
        }
    }
    for bset in bsets {
        let bmask = bset.iter().fold(0u128, |m, &y| m | 1 << y);
        let rest: Vec<u128> = ones.iter().filter(|&&h| h & bmask == bmask).map(|&h| h & !bmask).collect();
        let mut aset = Vec::new();
        if transversal(&rest, a, &mut aset) {
            aset.sort_unstable();
            return Some((aset, bset));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singletons_for_a1_b1() {
        let fam = HitMissFamily::construct(4, 1, 1).unwrap();
        assert_eq!(find_violation(&fam, 1, 1), None);
        assert!(fam.len() <= 4);
    }

    #[test]
    fn exhaustive_small() {
        let fam = HitMissFamily::construct(8, 2, 2).unwrap();
        assert_eq!(find_violation(&fam, 2, 2), None);
    }

    #[test]
    fn rejects_large_b_and_bad_params() {
        assert!(matches!(HitMissFamily::construct(8, 3, 3), Err(Error::Unsupported(_))));
        assert!(matches!(HitMissFamily::construct(8, 1, 2), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn hit_sets_of_explicit_labelings() {
        let n = 5;
        let fam = HitMissFamily::from_labelings(
            n,
            vec![vec![false; n], vec![true; n], (0..n).map(|x| x == 3).collect()],
        )
        .unwrap();
        assert_eq!(fam.hit_set(0).unwrap(), Vec::<usize>::new());
        assert_eq!(fam.hit_set(1).unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(fam.hit_set(2).unwrap(), vec![3]);
        assert!(fam.hit_set(3).is_err());
    }

    #[test]
    fn violation_detected_for_bad_family() {
        let fam = HitMissFamily::from_labelings(3, vec![vec![true, true, false]]).unwrap();
        assert!(find_violation(&fam, 1, 1).is_some());
    }

    #[test]
    fn coded_scheme_used_for_large_ground() {
        let fam = HitMissFamily::construct(4096, 2, 2).unwrap();
        assert_ne!(fam.scheme_name(), "subsets");
        assert!(fam.scheme_name().starts_with("rs("));
    }
}
