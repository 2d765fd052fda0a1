use num::BigRational;

use super::{DynamicsError, OrderedAction};
use crate::ball::enumerate_ball;
use crate::word::Word;

/// Convex envelope of the known `<g>`-orbit of `x` for `|n| <= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Envelope {
    pub g: Word,
    pub x: BigRational,
    /// Known orbit points `(n, g^n(x))`, including `n = 0`.
    pub orbit: Vec<(i64, BigRational)>,
    pub lo: BigRational,
    pub hi: BigRational,
    /// The orbit leaves the sample going down (or up), monotonically.
    pub unbounded_below: bool,
    pub unbounded_above: bool,
    /// Every power up to the bound is known.
    pub complete: bool,
    /// Sample points inside the hull, as a range of `ascending()` positions.
    pub hull: std::ops::Range<usize>,
}

/// The one-sided orbit is strictly monotone in the given direction
/// and either stops being known or passes the sample's extreme.
fn leaves(side: &[Option<BigRational>], x: &BigRational, up: bool, extreme: &BigRational) -> bool {
    let mut prev = x.clone();
    for y in side {
        let Some(y) = y else { return true };
        if (up && y <= &prev) || (!up && y >= &prev) {
            return false;
        }
        if (up && y > extreme) || (!up && y < extreme) {
            return true;
        }
        prev = y.clone();
    }
    false
}

fn hull_range(action: &OrderedAction, lo: Option<&BigRational>, hi: Option<&BigRational>) -> std::ops::Range<usize> {
    let asc = action.ascending();
    let p = |i: usize| &action.points()[asc[i]];
    let start = lo.map_or(0, |lo| (0..asc.len()).find(|&i| p(i) >= lo).unwrap_or(asc.len()));
    let end = hi.map_or(asc.len(), |hi| (0..asc.len()).rev().find(|&i| p(i) <= hi).map_or(0, |i| i + 1));
    start..end.max(start)
}

pub fn convex_envelope(action: &OrderedAction, g: &Word, x: &BigRational, bound: usize) -> Envelope {
    let fwd = action.orbit(g, x, bound, false);
    let bwd = action.orbit(g, x, bound, true);
    let mut orbit = vec![(0, x.clone())];
    for (k, y) in fwd.iter().enumerate() {
        if let Some(y) = y {
            orbit.push((k as i64 + 1, y.clone()));
        }
    }
    for (k, y) in bwd.iter().enumerate() {
        if let Some(y) = y {
            orbit.push((-(k as i64) - 1, y.clone()));
        }
    }
    orbit.sort_by_key(|(n, _)| *n);
    let lo = orbit.iter().map(|(_, y)| y).min().expect("orbit contains x").clone();
    let hi = orbit.iter().map(|(_, y)| y).max().expect("orbit contains x").clone();
    let asc = action.ascending();
    let top = &action.points()[asc[asc.len() - 1]];
    let bottom = &action.points()[asc[0]];
    let unbounded_above = leaves(&fwd, x, true, top) || leaves(&bwd, x, true, top);
    let unbounded_below = leaves(&fwd, x, false, bottom) || leaves(&bwd, x, false, bottom);
    let complete = fwd.iter().chain(&bwd).all(Option::is_some);
    let hull = hull_range(action, (!unbounded_below).then_some(&lo), (!unbounded_above).then_some(&hi));
    Envelope { g: g.clone(), x: x.clone(), orbit, lo, hi, unbounded_below, unbounded_above, complete, hull }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PairClass {
    Disjoint,
    Nested,
    Overlapping,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TranslateClass {
    Equal,
    Disjoint,
    Overlapping,
}

fn classify(a: &std::ops::Range<usize>, b: &std::ops::Range<usize>) -> PairClass {
    if a.end <= b.start || b.end <= a.start {
        PairClass::Disjoint
    } else if (a.start <= b.start && b.end <= a.end) || (b.start <= a.start && a.end <= b.end) {
        PairClass::Nested
    } else {
        PairClass::Overlapping
    }
}

/// Pairwise comparison of envelopes over the sample, restricted to orbits
/// that are known for every power up to the bound.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NestingReport {
    pub disjoint: usize,
    pub nested: usize,
    pub overlapping: usize,
    /// `(g, x, f, y)` of the first overlapping pair of envelopes.
    pub first_overlap: Option<(Word, BigRational, Word, BigRational)>,
    pub translate_equal: usize,
    pub translate_disjoint: usize,
    pub translate_overlapping: usize,
    /// `(f, g, x)` where `f(I_g(x))` overlaps `I_g(x)` without coinciding.
    pub first_translate_overlap: Option<(Word, Word, BigRational)>,
    /// Envelopes left out because some power was unknown.
    pub skipped: usize,
}

impl NestingReport {
    pub fn has_overlap(&self) -> bool {
        self.overlapping > 0 || self.translate_overlapping > 0
    }
}

/// Classifies every pair of complete envelopes `I_g(x)`, `I_f(y)` for `f, g`
/// of length at most `word_bound` (identity included) and `x, y` in the
/// sample, and every translate `f(I_g(x))` against `I_g(x)`.
pub fn nesting_report(action: &OrderedAction, word_bound: usize, power_bound: usize) -> Result<NestingReport, DynamicsError> {
    if power_bound == 0 {
        return Err(DynamicsError::ZeroBound);
    }
    let elements = enumerate_ball(action.rws(), word_bound)?.elements().to_vec();
    let mut report = NestingReport::default();
    let mut envs = Vec::new();
    for g in &elements {
        for x in action.points() {
            let e = convex_envelope(action, g, x, power_bound);
            if e.complete {
                envs.push(e);
            } else {
                report.skipped += 1;
            }
        }
    }
    for (i, a) in envs.iter().enumerate() {
        for b in &envs[i + 1..] {
            match classify(&a.hull, &b.hull) {
                PairClass::Disjoint => report.disjoint += 1,
                PairClass::Nested => report.nested += 1,
                PairClass::Overlapping => {
                    report.overlapping += 1;
                    report.first_overlap.get_or_insert_with(|| (a.g.clone(), a.x.clone(), b.g.clone(), b.x.clone()));
                }
            }
        }
    }
    for e in &envs {
        for f in &elements {
            let image = |y: &BigRational| action.apply(f, y);
            let (lo, hi) = match (image(&e.lo), image(&e.hi)) {
                (Some(lo), Some(hi)) => (lo, hi),
                _ => {
                    report.skipped += 1;
                    continue;
                }
            };
            let moved = hull_range(action, (!e.unbounded_below).then_some(&lo), (!e.unbounded_above).then_some(&hi));
            let class = if moved == e.hull {
                TranslateClass::Equal
            } else if classify(&moved, &e.hull) == PairClass::Disjoint {
                TranslateClass::Disjoint
            } else {
                TranslateClass::Overlapping
            };
            match class {
                TranslateClass::Equal => report.translate_equal += 1,
                TranslateClass::Disjoint => report.translate_disjoint += 1,
                TranslateClass::Overlapping => {
                    report.translate_overlapping += 1;
                    report.first_translate_overlap.get_or_insert_with(|| (f.clone(), e.g.clone(), e.x.clone()));
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cofinality {
    /// Powers of `g` carry every sample point up to every larger one.
    CofinalInTruncation,
    /// `g` fixes a point, or its orbit through `x` is known and stays below `y`.
    NotCofinal { x: BigRational, bound: Option<BigRational> },
    Unknown,
}

pub fn cofinal_test(action: &OrderedAction, g: &Word, power_bound: usize) -> Cofinality {
    let pts = action.points();
    if let Some(x) = pts.iter().find(|x| action.apply(g, x).as_ref() == Some(*x)) {
        return Cofinality::NotCofinal { x: x.clone(), bound: None };
    }
    let mut all_swept = true;
    for x in pts {
        let powers: Vec<Option<BigRational>> = action
            .orbit(g, x, power_bound, false)
            .into_iter()
            .chain(action.orbit(g, x, power_bound, true))
            .collect();
        let known: Vec<&BigRational> = powers.iter().flatten().collect();
        for y in pts.iter().filter(|y| *y > x) {
            // the sample has a largest point, so reaching y is all it can show
            if known.iter().any(|z| *z >= y) {
                continue;
            }
            all_swept = false;
            if known.len() == powers.len() {
                return Cofinality::NotCofinal { x: x.clone(), bound: Some(y.clone()) };
            }
        }
    }
    if all_swept {
        Cofinality::CofinalInTruncation
    } else {
        Cofinality::Unknown
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{bs12, coset_action, q, word};
    use super::*;

    #[test]
    fn identity_envelope_is_a_point() {
        let a = bs12(2);
        let e = convex_envelope(&a, &Word::empty(), &q(1, 1), 4);
        assert_eq!((e.lo.clone(), e.hi.clone()), (q(1, 1), q(1, 1)));
        assert_eq!(e.hull.len(), 1);
        assert!(!e.unbounded_above && !e.unbounded_below);
    }

    #[test]
    fn contraction_is_bounded_below() {
        let a = bs12(2);
        let e = convex_envelope(&a, &word(&a, "a^-1"), &q(1, 1), 8);
        assert_eq!(e.lo, q(1, 256));
        assert!(!e.unbounded_below);
        assert!(e.unbounded_above);
        assert!(e.complete);
    }

    #[test]
    fn translation_on_a_chain_is_unbounded() {
        let a = coset_action("z", 3, 0);
        let e = convex_envelope(&a, &word(&a, "a"), &a.points()[0], 8);
        assert!(e.unbounded_above && e.unbounded_below);
        assert!(!e.complete);
        assert_eq!(e.hull.len(), a.points().len());
        assert_eq!(cofinal_test(&a, &word(&a, "a"), 8), Cofinality::CofinalInTruncation);
        assert!(matches!(cofinal_test(&a, &Word::empty(), 8), Cofinality::NotCofinal { .. }));
    }

    #[test]
    fn nesting_on_abelian_and_affine() {
        let z2 = coset_action("z2", 2, 0);
        assert!(!nesting_report(&z2, 1, 4).unwrap().has_overlap());
        let r = nesting_report(&bs12(2), 2, 6).unwrap();
        assert!(r.overlapping > 0 && r.translate_overlapping > 0);
        assert!(r.first_overlap.is_some());
    }
}
