use std::cmp::Ordering;
use std::sync::Arc;

use thiserror::Error;

use super::{Sign, SignAssignment};
use crate::ball::Ball;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CosetError {
    #[error("elements {0} and {1} are compared inconsistently")]
    Inconsistent(usize, usize),
    #[error("left translation by element {h} reverses the comparison of elements {f} and {g}")]
    NotLeftInvariant { h: usize, f: usize, g: usize },
    #[error("no left-invariant linear extension separates cosets {0} and {1}")]
    NoExtension(usize, usize),
    #[error("linear extension search gave up after {0} choices")]
    ExtensionBudget(u64),
    #[error("element {0} is required to lie in the base coset")]
    NotInBase(usize),
    #[error("invalid coset data: {0}")]
    Invalid(String),
}

/// A total order on the cosets met by a ball.
///
/// Cosets are numbered by their least member, so coset 0 is the base coset
/// `C` and `representative(k)` is increasing in `k`.
#[derive(Clone, Debug)]
pub struct CosetOrder {
    ball: Arc<Ball>,
    coset_of: Vec<usize>,
    reps: Vec<usize>,
    position: Vec<usize>,
    undecided: Vec<(usize, usize)>,
}

impl CosetOrder {
    /// Builds an order from a coset label per element and a position per coset.
    pub fn from_ranking(ball: Arc<Ball>, labels: Vec<usize>, position_of_label: Vec<usize>) -> Result<CosetOrder, CosetError> {
        if labels.len() != ball.len() {
            return Err(CosetError::Invalid("one label per ball element required".into()));
        }
        let mut relabel = vec![usize::MAX; position_of_label.len()];
        let mut reps = Vec::new();
        let mut coset_of = Vec::with_capacity(labels.len());
        for (i, &l) in labels.iter().enumerate() {
            if l >= relabel.len() {
                return Err(CosetError::Invalid(format!("label {l} has no position")));
            }
            if relabel[l] == usize::MAX {
                relabel[l] = reps.len();
                reps.push(i);
            }
            coset_of.push(relabel[l]);
        }
        let mut used: Vec<(usize, usize)> = (0..relabel.len())
            .filter(|&l| relabel[l] != usize::MAX)
            .map(|l| (position_of_label[l], relabel[l]))
            .collect();
        used.sort_unstable();
        if used.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(CosetError::Invalid("two cosets share a position".into()));
        }
        let mut position = vec![0; reps.len()];
        for (p, (_, c)) in used.into_iter().enumerate() {
            position[c] = p;
        }
        Ok(CosetOrder { ball, coset_of, reps, position, undecided: Vec::new() })
    }

    pub fn ball(&self) -> &Arc<Ball> {
        &self.ball
    }

    pub fn coset_count(&self) -> usize {
        self.reps.len()
    }

    pub fn coset_of(&self, i: usize) -> usize {
        self.coset_of[i]
    }

    pub fn representative(&self, coset: usize) -> usize {
        self.reps[coset]
    }

    /// Rank of a coset, 0 for the smallest.
    pub fn position(&self, coset: usize) -> usize {
        self.position[coset]
    }

    /// Cosets from smallest to largest.
    pub fn ascending(&self) -> Vec<usize> {
        let mut out = vec![0; self.reps.len()];
        for (c, &p) in self.position.iter().enumerate() {
            out[p] = c;
        }
        out
    }

    pub fn compare_cosets(&self, x: usize, y: usize) -> Ordering {
        self.position[x].cmp(&self.position[y])
    }

    /// Compares `fC` with `gC` for ball elements `f`, `g`.
    pub fn compare(&self, f: usize, g: usize) -> Ordering {
        self.compare_cosets(self.coset_of[f], self.coset_of[g])
    }

    /// Coset pairs that the cone left open and the linear extension decided.
    pub fn undecided(&self) -> &[(usize, usize)] {
        &self.undecided
    }

    /// Members of a coset, in index order.
    pub fn members(&self, coset: usize) -> Vec<usize> {
        (0..self.coset_of.len()).filter(|&i| self.coset_of[i] == coset).collect()
    }

    /// Coset of `s · X` for the element `s` and coset `X`, if some member's
    /// translate stays in the ball.
    pub fn translate(&self, s: usize, coset: usize) -> Option<usize> {
        self.members(coset).into_iter().find_map(|x| self.ball.product(s, x)).map(|y| self.coset_of[y])
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (a, b) = (self.find(x), self.find(y));
        if a == b {
            return false;
        }
        // keep the smaller index as root so labels follow least members
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.0[hi] = lo;
        true
    }
}

/// Square boolean relation stored as bit rows.
#[derive(Clone)]
struct Relation {
    m: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Relation {
    fn new(m: usize) -> Relation {
        let words = m.div_ceil(64).max(1);
        Relation { m, words, bits: vec![0; m * words] }
    }

    fn get(&self, x: usize, y: usize) -> bool {
        self.bits[x * self.words + y / 64] >> (y % 64) & 1 == 1
    }

    fn set(&mut self, x: usize, y: usize) -> bool {
        let w = &mut self.bits[x * self.words + y / 64];
        let had = *w >> (y % 64) & 1 == 1;
        *w |= 1 << (y % 64);
        !had
    }

    fn close(&mut self) {
        for k in 0..self.m {
            let row_k: Vec<u64> = self.bits[k * self.words..(k + 1) * self.words].to_vec();
            for i in 0..self.m {
                if self.get(i, k) {
                    for (w, r) in self.bits[i * self.words..(i + 1) * self.words].iter_mut().zip(&row_k) {
                        *w |= r;
                    }
                }
            }
        }
    }

    fn cyclic(&self) -> Option<usize> {
        (0..self.m).find(|&x| self.get(x, x))
    }
}

/// Closes `less` under transitivity and translation by each map in `sigma`
/// until stable; returns a coset on a cycle if the result is not a strict order.
fn propagate(less: &mut Relation, sigma: &[Vec<Option<usize>>]) -> Result<(), usize> {
    loop {
        less.close();
        if let Some(x) = less.cyclic() {
            return Err(x);
        }
        let mut changed = false;
        for map in sigma {
            for x in 0..less.m {
                let Some(sx) = map[x] else { continue };
                for y in 0..less.m {
                    if less.get(x, y) {
                        if let Some(sy) = map[y] {
                            changed |= less.set(sx, sy);
                        }
                    }
                }
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

const EXTENSION_BUDGET: u64 = 2000;

/// Decides open pairs in index order, lower coset first, backtracking when a
/// choice breaks transitivity or translation invariance. `Ok(None)` means no
/// extension exists; `Err` means the budget ran out.
fn extend(less: Relation, sigma: &[Vec<Option<usize>>], budget: &mut u64) -> Result<Option<Relation>, ()> {
    let m = less.m;
    let open = (0..m).flat_map(|x| (x + 1..m).map(move |y| (x, y))).find(|&(x, y)| !less.get(x, y) && !less.get(y, x));
    let Some((x, y)) = open else { return Ok(Some(less)) };
    for (lo, hi) in [(x, y), (y, x)] {
        if *budget == 0 {
            return Err(());
        }
        *budget -= 1;
        let mut trial = less.clone();
        trial.set(lo, hi);
        if propagate(&mut trial, sigma).is_ok() {
            if let Some(done) = extend(trial, sigma, budget)? {
                return Ok(Some(done));
            }
        }
    }
    Ok(None)
}

/// Translates a verified cone into an order on the cosets it meets.
///
/// Cosets are merged where `f^-1 g` is an in-ball element marked `*` and where
/// left translation forces it. Comparisons come from in-ball `f^-1 g`, closed
/// under transitivity and in-ball left translation. Pairs still open are
/// decided by a backtracking search preferring the lower coset first; such
/// pairs are listed in `undecided`.
pub fn cone_to_coset_order(phi: &SignAssignment) -> Result<CosetOrder, CosetError> {
    let ball = phi.ball().clone();
    let n = ball.len();
    let movers: Vec<usize> = (1..n).collect();
    let mut uf = UnionFind((0..n).collect());
    for i in 0..n {
        let ii = ball.invert(i);
        for j in i + 1..n {
            if let Some(k) = ball.product(ii, j) {
                if phi.sign(k) == Some(Sign::Star) {
                    uf.union(i, j);
                }
            }
        }
    }
    // left translation must map cosets to cosets
    loop {
        let mut merged = false;
        for &s in &movers {
            let mut image: Vec<Option<usize>> = vec![None; n];
            for x in 0..n {
                let Some(y) = ball.product(s, x) else { continue };
                let root = uf.find(x);
                match image[root] {
                    None => image[root] = Some(y),
                    Some(y0) => merged |= uf.union(y0, y),
                }
            }
        }
        if !merged {
            break;
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut reps = Vec::new();
    let mut coset_of = vec![0; n];
    for i in 0..n {
        let r = uf.find(i);
        if label[r] == usize::MAX {
            label[r] = reps.len();
            reps.push(i);
        }
        coset_of[i] = label[r];
    }
    let m = reps.len();
    let mut less = Relation::new(m);
    for i in 0..n {
        let ii = ball.invert(i);
        for j in 0..n {
            let Some(k) = ball.product(ii, j) else { continue };
            let (ci, cj) = (coset_of[i], coset_of[j]);
            match phi.sign(k) {
                Some(Sign::Pos) if ci != cj => {
                    less.set(ci, cj);
                }
                Some(Sign::Neg) if ci != cj => {
                    less.set(cj, ci);
                }
                Some(Sign::Star) | None => {}
                _ => return Err(CosetError::Inconsistent(i, j)),
            }
        }
    }
    let sigma: Vec<Vec<Option<usize>>> = movers
        .iter()
        .map(|&s| {
            let mut map = vec![None; m];
            for x in 0..n {
                if let Some(y) = ball.product(s, x) {
                    map[coset_of[x]] = Some(coset_of[y]);
                }
            }
            map
        })
        .collect();
    let cycle_error = |c: usize| CosetError::Inconsistent(reps[c], reps[c]);
    propagate(&mut less, &sigma).map_err(cycle_error)?;
    let mut undecided = Vec::new();
    for x in 0..m {
        for y in x + 1..m {
            if !less.get(x, y) && !less.get(y, x) {
                undecided.push((x, y));
            }
        }
    }
    let mut budget = EXTENSION_BUDGET;
    let less = match extend(less, &sigma, &mut budget) {
        Ok(Some(l)) => l,
        Ok(None) => {
            let (x, y) = undecided[0];
            return Err(CosetError::NoExtension(reps[x], reps[y]));
        }
        Err(()) => return Err(CosetError::ExtensionBudget(EXTENSION_BUDGET)),
    };
    let position = (0..m).map(|x| (0..m).filter(|&y| less.get(y, x)).count()).collect();
    Ok(CosetOrder { ball, coset_of, reps, position, undecided })
}

/// Reads a cone off a coset order: `phi(g)` compares `gC` with `C`.
///
/// Fails if a listed C-generator lies outside the base coset or if some
/// in-ball left translation reverses a comparison.
pub fn coset_order_to_cone(order: &CosetOrder, c_generators: &[usize]) -> Result<SignAssignment, CosetError> {
    let ball = order.ball().clone();
    if let Some(&c) = c_generators.iter().find(|&&c| order.coset_of(c) != 0) {
        return Err(CosetError::NotInBase(c));
    }
    let n = ball.len();
    for h in 1..n {
        let moved: Vec<Option<usize>> = (0..n).map(|f| ball.product(h, f)).collect();
        for f in 0..n {
            let Some(hf) = moved[f] else { continue };
            for g in f + 1..n {
                let Some(hg) = moved[g] else { continue };
                if order.compare(f, g) != order.compare(hf, hg) {
                    return Err(CosetError::NotLeftInvariant { h, f, g });
                }
            }
        }
    }
    Ok(SignAssignment::from_fn(ball, |g| {
        Some(match order.compare(g, 0) {
            Ordering::Greater => Sign::Pos,
            Ordering::Less => Sign::Neg,
            Ordering::Equal => Sign::Star,
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::super::tests::ball;
    use super::*;
    use crate::word::Letter;

    fn exps(b: &Ball, i: usize) -> Vec<i64> {
        b.element(i).exponent_sums(b.alphabet().rank())
    }

    fn sign_of(x: i64) -> Sign {
        match x.signum() {
            1 => Sign::Pos,
            -1 => Sign::Neg,
            _ => Sign::Star,
        }
    }

    #[test]
    fn z_natural_order() {
        let b = ball("z", 3);
        let phi = SignAssignment::from_fn(b.clone(), |i| Some(sign_of(exps(&b, i)[0])));
        let order = cone_to_coset_order(&phi).unwrap();
        assert_eq!(order.coset_count(), 7);
        let chain: Vec<i64> = order.ascending().iter().map(|&c| exps(&b, order.representative(c))[0]).collect();
        assert_eq!(chain, vec![-3, -2, -1, 0, 1, 2, 3]);
        assert!(order.undecided().is_empty());
        assert_eq!(coset_order_to_cone(&order, &[]).unwrap(), phi);
    }

    #[test]
    fn z2_relative_to_b() {
        let b = ball("z2", 3);
        let phi = SignAssignment::from_fn(b.clone(), |i| Some(sign_of(exps(&b, i)[0])));
        let order = cone_to_coset_order(&phi).unwrap();
        assert_eq!(order.coset_count(), 7);
        for x in 0..b.len() {
            for y in 0..b.len() {
                assert_eq!(order.compare(x, y), exps(&b, x)[0].cmp(&exps(&b, y)[0]));
            }
        }
        let gen_b = b.letter(Letter::new(1, false)).unwrap();
        assert_eq!(coset_order_to_cone(&order, &[gen_b]).unwrap(), phi);
        let gen_a = b.letter(Letter::new(0, false)).unwrap();
        assert_eq!(coset_order_to_cone(&order, &[gen_a]).unwrap_err(), CosetError::NotInBase(gen_a));
    }

    #[test]
    fn hand_built_order_breaks_left_invariance() {
        let b = ball("z2", 1);
        // cosets of <b>: {id, b, b^-1}, {a}, {a^-1}, ordered C < a^-1 C < a C
        let a = b.letter(Letter::new(0, false)).unwrap();
        let inv_a = b.letter(Letter::new(0, true)).unwrap();
        let labels: Vec<usize> = (0..b.len()).map(|i| if i == a { 2 } else if i == inv_a { 1 } else { 0 }).collect();
        let order = CosetOrder::from_ranking(b.clone(), labels, vec![0, 1, 2]).unwrap();
        match coset_order_to_cone(&order, &[]).unwrap_err() {
            CosetError::NotLeftInvariant { h, f, g } => {
                let (hf, hg) = (b.product(h, f).unwrap(), b.product(h, g).unwrap());
                assert_ne!(order.compare(f, g), order.compare(hf, hg));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn f2_radius_one_has_five_singleton_cosets() {
        let b = ball("f2", 1);
        // a > id, b > id
        let phi = SignAssignment::from_fn(b.clone(), |i| {
            let e = exps(&b, i);
            Some(sign_of(e[0] + e[1]))
        });
        let order = cone_to_coset_order(&phi).unwrap();
        assert_eq!(order.coset_count(), 5);
        for x in 0..5 {
            for y in 0..5 {
                let k = b.product(b.invert(x), y);
                if let Some(k) = k {
                    let expect = match phi.sign(k).unwrap() {
                        Sign::Pos => Ordering::Less,
                        Sign::Neg => Ordering::Greater,
                        Sign::Star => Ordering::Equal,
                    };
                    assert_eq!(order.compare(x, y), expect);
                }
            }
        }
    }
}
