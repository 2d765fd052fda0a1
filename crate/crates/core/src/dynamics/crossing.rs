use num::BigRational;
use rayon::prelude::*;

use super::{DynamicsError, OrderedAction};
use crate::ball::enumerate_ball;
use crate::word::Word;

/// A point of `Omega` with an element carrying the base point to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point {
    pub value: BigRational,
    pub label: Word,
}

/// `(f, g; u, v, w)` with `u < w < v`, `g^n(u) < v` and `u < f^n(v)` for
/// `n = 1..=n_max`, and `f^N(v) < w < g^M(u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingWitness {
    pub f: Word,
    pub g: Word,
    pub u: Point,
    pub v: Point,
    pub w: Point,
    pub n: usize,
    pub m: usize,
    pub n_max: usize,
}

impl CrossingWitness {
    /// Recomputes every condition against `action`.
    pub fn replay(&self, action: &OrderedAction) -> bool {
        let (u, v, w) = (&self.u.value, &self.v.value, &self.w.value);
        if !(u < w && w < v) || self.n == 0 || self.m == 0 || self.n > self.n_max || self.m > self.n_max {
            return false;
        }
        let gs = action.orbit(&self.g, u, self.n_max, false);
        let fs = action.orbit(&self.f, v, self.n_max, false);
        let all = gs.iter().all(|y| y.as_ref().is_some_and(|y| y < v)) && fs.iter().all(|y| y.as_ref().is_some_and(|y| y > u));
        all && fs[self.n - 1].as_ref().is_some_and(|y| y < w) && gs[self.m - 1].as_ref().is_some_and(|y| y > w)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrossingOutcome {
    Found(CrossingWitness),
    NoneUpToBound { word_bound: usize, power_bound: usize },
}

/// Position of a rational among the sorted sample: `2k` for the `k`-th point,
/// `2k + 1` strictly between the `k`-th and the next.
fn rank(sorted: &[BigRational], x: &BigRational) -> i64 {
    match sorted.binary_search(x) {
        Ok(k) => 2 * k as i64,
        Err(k) => 2 * k as i64 - 1,
    }
}

/// Extremes of `n -> h^n(x)` over `1..=bound`, as ranks, when all are known.
struct Sweep {
    min: Vec<Option<i64>>,
    max: Vec<Option<i64>>,
}

fn sweep(action: &OrderedAction, h: &Word, bound: usize, sorted: &[BigRational]) -> Sweep {
    let mut min = Vec::with_capacity(action.points().len());
    let mut max = Vec::with_capacity(action.points().len());
    for x in action.points() {
        let orbit: Option<Vec<BigRational>> = action.orbit(h, x, bound, false).into_iter().collect();
        match orbit {
            Some(o) => {
                min.push(o.iter().min().map(|y| rank(sorted, y)));
                max.push(o.iter().max().map(|y| rank(sorted, y)));
            }
            None => {
                min.push(None);
                max.push(None);
            }
        }
    }
    Sweep { min, max }
}

/// Searches `f, g` over non-trivial elements of length at most `word_bound`
/// and `u, v, w` over the sample, each in enumeration order, for the first
/// crossing whose "for every n" clauses hold for all `n <= power_bound`.
/// Powers must be known throughout; partial orbits never count.
pub fn find_crossing(
    action: &OrderedAction,
    word_bound: usize,
    power_bound: usize,
    parallel: bool,
) -> Result<CrossingOutcome, DynamicsError> {
    if power_bound == 0 {
        return Err(DynamicsError::ZeroBound);
    }
    let elements: Vec<Word> = enumerate_ball(action.rws(), word_bound)?.elements()[1..].to_vec();
    let sorted: Vec<BigRational> = action.ascending().iter().map(|&i| action.points()[i].clone()).collect();
    let ranks: Vec<i64> = action.points().iter().map(|x| rank(&sorted, x)).collect();
    let sweeps: Vec<Sweep> = if parallel {
        elements.par_iter().map(|h| sweep(action, h, power_bound, &sorted)).collect()
    } else {
        elements.iter().map(|h| sweep(action, h, power_bound, &sorted)).collect()
    };
    let search_f = |fi: usize| -> Option<(usize, usize, usize, usize)> {
        let fs = &sweeps[fi];
        for (gi, gs) in sweeps.iter().enumerate() {
            for (ui, &ru) in ranks.iter().enumerate() {
                let Some(gmax) = gs.max[ui] else { continue };
                for (vi, &rv) in ranks.iter().enumerate() {
                    let Some(fmin) = fs.min[vi] else { continue };
                    if rv <= ru || gmax >= rv || fmin <= ru {
                        continue;
                    }
                    let lo = fmin.max(ru);
                    let hi = gmax.min(rv);
                    if let Some(wi) = ranks.iter().position(|&rw| lo < rw && rw < hi) {
                        return Some((gi, ui, vi, wi));
                    }
                }
            }
        }
        None
    };
    let hit = if parallel {
        (0..elements.len()).into_par_iter().find_map_first(|fi| search_f(fi).map(|r| (fi, r)))
    } else {
        (0..elements.len()).find_map(|fi| search_f(fi).map(|r| (fi, r)))
    };
    let Some((fi, (gi, ui, vi, wi))) = hit else {
        return Ok(CrossingOutcome::NoneUpToBound { word_bound, power_bound });
    };
    let point = |i: usize| Point { value: action.points()[i].clone(), label: action.label(i).clone() };
    let (u, v, w) = (point(ui), point(vi), point(wi));
    let (f, g) = (elements[fi].clone(), elements[gi].clone());
    let first = |orbit: Vec<Option<BigRational>>, hit: &dyn Fn(&BigRational) -> bool| {
        orbit.iter().position(|y| y.as_ref().is_some_and(hit)).expect("extreme attained") + 1
    };
    let n = first(action.orbit(&f, &v.value, power_bound, false), &|y| y < &w.value);
    let m = first(action.orbit(&g, &u.value, power_bound, false), &|y| y > &w.value);
    Ok(CrossingOutcome::Found(CrossingWitness { f, g, u, v, w, n, m, n_max: power_bound }))
}

#[cfg(test)]
mod tests {
    use super::super::tests::{bs12, coset_action, q, word};
    use super::*;

    #[test]
    fn baumslag_solitar_witness() {
        let a = bs12(2);
        let CrossingOutcome::Found(x) = find_crossing(&a, 2, 8, false).unwrap() else { panic!("no crossing") };
        assert_eq!(x.f, word(&a, "a^-1"));
        assert_eq!(a.rws().normalize(&x.g).unwrap(), a.rws().normalize(&word(&a, "b a^-1 b^-1")).unwrap());
        assert_eq!((x.u.value.clone(), x.v.value.clone(), x.w.value.clone()), (q(0, 1), q(1, 1), q(1, 2)));
        assert_eq!((x.n, x.m), (2, 2));
        assert!(x.replay(&a));
        let mut bad = x.clone();
        bad.n = 1;
        assert!(!bad.replay(&a));
    }

    #[test]
    fn parallel_search_agrees() {
        let a = bs12(2);
        assert_eq!(find_crossing(&a, 2, 6, false).unwrap(), find_crossing(&a, 2, 6, true).unwrap());
    }

    #[test]
    fn abelian_cosets_have_none() {
        let a = coset_action("z2", 2, 0);
        assert_eq!(
            find_crossing(&a, 2, 4, false).unwrap(),
            CrossingOutcome::NoneUpToBound { word_bound: 2, power_bound: 4 }
        );
        assert_eq!(find_crossing(&a, 1, 0, false), Err(DynamicsError::ZeroBound));
    }
}
