//! Exact piecewise-linear actions on the line built from coset orders.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num::{BigRational, One, Zero};
use thiserror::Error;

use crate::orders::{CosetOrder, Sign, SignAssignment};
use crate::word::{Alphabet, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizationError {
    #[error("breakpoints or values are not strictly increasing at position {0}")]
    NotIncreasing(usize),
    #[error("breakpoint and value lists differ in length")]
    LengthMismatch,
    #[error("order incoherent: translation data of {letter} is not increasing")]
    OrderIncoherent { letter: String },
}

/// Increasing piecewise-affine map, extended with slope 1 past both ends.
/// With no breakpoints it is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLMap {
    breakpoints: Vec<BigRational>,
    values: Vec<BigRational>,
}

fn strictly_increasing(xs: &[BigRational]) -> Result<(), usize> {
    match xs.windows(2).position(|w| w[0] >= w[1]) {
        Some(i) => Err(i + 1),
        None => Ok(()),
    }
}

impl PLMap {
    pub fn new(breakpoints: Vec<BigRational>, values: Vec<BigRational>) -> Result<PLMap, RealizationError> {
        if breakpoints.len() != values.len() {
            return Err(RealizationError::LengthMismatch);
        }
        strictly_increasing(&breakpoints).map_err(RealizationError::NotIncreasing)?;
        strictly_increasing(&values).map_err(RealizationError::NotIncreasing)?;
        Ok(PLMap { breakpoints, values })
    }

    pub fn identity() -> PLMap {
        PLMap { breakpoints: Vec::new(), values: Vec::new() }
    }

    pub fn breakpoints(&self) -> &[BigRational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn evaluate(&self, x: &BigRational) -> BigRational {
        let (b, v) = (&self.breakpoints, &self.values);
        let Some(last) = b.len().checked_sub(1) else { return x.clone() };
        if x <= &b[0] {
            return &v[0] + (x - &b[0]);
        }
        if x >= &b[last] {
            return &v[last] + (x - &b[last]);
        }
        // first breakpoint above x; interior so 1 <= i <= last
        let i = b.partition_point(|p| p <= x);
        if b[i - 1] == *x {
            return v[i - 1].clone();
        }
        let s = (&v[i] - &v[i - 1]) / (&b[i] - &b[i - 1]);
        &v[i - 1] + s * (x - &b[i - 1])
    }

    /// The inverse map; exact because the extension rule has slope 1 on both sides.
    pub fn inverse(&self) -> PLMap {
        PLMap { breakpoints: self.values.clone(), values: self.breakpoints.clone() }
    }
}

/// Coordinates for the cosets of `order`, indexed by coset number.
///
/// Cosets are placed in numbering order (ball enumeration order of their
/// least member): the first at 0, a new maximum one above the current
/// maximum, a new minimum one below the current minimum, anything else at the
/// midpoint of its placed neighbours.
pub fn embed_cosets(order: &CosetOrder) -> Vec<BigRational> {
    insert_by_position(&(0..order.coset_count()).map(|c| order.position(c)).collect::<Vec<_>>())
}

/// Coordinates for items arriving in the given order with the given ranks.
fn insert_by_position(positions: &[usize]) -> Vec<BigRational> {
    let mut placed: BTreeMap<usize, BigRational> = BTreeMap::new();
    let mut t = Vec::with_capacity(positions.len());
    for &p in positions {
        let below = placed.range(..p).next_back().map(|(_, x)| x.clone());
        let above = placed.range(p + 1..).next().map(|(_, x)| x.clone());
        let x = match (below, above) {
            (None, None) => BigRational::zero(),
            (Some(lo), None) => lo + BigRational::one(),
            (None, Some(hi)) => hi - BigRational::one(),
            (Some(lo), Some(hi)) => (lo + hi) / BigRational::from_integer(2.into()),
        };
        placed.insert(p, x.clone());
        t.push(x);
    }
    t
}

/// A finite piecewise-linear shadow of the dynamical realization.
#[derive(Clone, Debug)]
pub struct LineAction {
    alphabet: Alphabet,
    /// Indexed by `Letter::index`.
    maps: Vec<PLMap>,
    p: BigRational,
    t: Vec<BigRational>,
}

impl LineAction {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn map(&self, l: Letter) -> &PLMap {
        &self.maps[l.index()]
    }

    pub fn reference_point(&self) -> &BigRational {
        &self.p
    }

    /// Same maps with a different reference point.
    pub fn with_reference_point(mut self, p: BigRational) -> LineAction {
        self.p = p;
        self
    }

    /// Coordinate of each coset.
    pub fn coordinates(&self) -> &[BigRational] {
        &self.t
    }

    /// `rho(w)(x)`; the rightmost letter acts first.
    pub fn apply(&self, w: &Word, x: &BigRational) -> BigRational {
        w.letters().iter().rev().fold(x.clone(), |y, &l| self.maps[l.index()].evaluate(&y))
    }

    /// Breakpoint tables per generator, one `x<TAB>y` line per breakpoint,
    /// every coordinate written `n/d`.
    pub fn to_text(&self) -> String {
        let frac = |x: &BigRational| format!("{}/{}", x.numer(), x.denom());
        let mut out = String::new();
        let _ = writeln!(out, "p\t{}", frac(&self.p));
        for g in 0..self.alphabet.rank() {
            let m = &self.maps[Letter::new(g, false).index()];
            let _ = writeln!(out, "generator\t{}\t{}", self.alphabet.name(g), m.breakpoints.len());
            for (x, y) in m.breakpoints.iter().zip(&m.values) {
                let _ = writeln!(out, "{}\t{}", frac(x), frac(y));
            }
        }
        out
    }
}

/// Builds one map per generator interpolating `t(X) -> t(sX)` over every
/// coset `X` whose translate is known; inverse letters get the inverse map.
pub fn realize(order: &CosetOrder) -> Result<LineAction, RealizationError> {
    let ball = order.ball();
    let alphabet = ball.alphabet().clone();
    let t = embed_cosets(order);
    let mut maps = vec![PLMap::identity(); 2 * alphabet.rank()];
    for g in 0..alphabet.rank() {
        let l = Letter::new(g, false);
        let mut data: Vec<(BigRational, BigRational)> = Vec::new();
        if let Some(s) = ball.letter(l) {
            for x in 0..order.coset_count() {
                if let Some(y) = order.translate(s, x) {
                    data.push((t[x].clone(), t[y].clone()));
                }
            }
        }
        data.sort();
        let (xs, ys): (Vec<_>, Vec<_>) = data.into_iter().unzip();
        let map = PLMap::new(xs, ys)
            .map_err(|_| RealizationError::OrderIncoherent { letter: alphabet.letter_name(l) })?;
        maps[l.inverse().index()] = map.inverse();
        maps[l.index()] = map;
    }
    let p = t[0].clone();
    Ok(LineAction { alphabet, maps, p, t })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealizationReport {
    Pass,
    /// The sign of `rho(g)(p) - p` disagrees with `phi(g)`.
    SignMismatch { element: usize },
    /// An element of C moves `p`.
    MovesReference { element: usize },
    /// `rho(g)` sends `t(X)` somewhere other than `t(gX)`.
    Composition { element: usize, coset: usize },
}

/// Checks the realization against the cone and the coset order it came from.
pub fn verify_realization(action: &LineAction, order: &CosetOrder, phi: &SignAssignment) -> RealizationReport {
    let ball = order.ball();
    let p = action.reference_point();
    for g in 0..ball.len() {
        let Some(s) = phi.sign(g) else { continue };
        let image = action.apply(ball.geodesic(g), p);
        let expected = match s {
            Sign::Pos => Ordering::Greater,
            Sign::Neg => Ordering::Less,
            Sign::Star => Ordering::Equal,
        };
        if s == Sign::Star && image != *p {
            return RealizationReport::MovesReference { element: g };
        }
        if image.cmp(p) != expected {
            return RealizationReport::SignMismatch { element: g };
        }
    }
    // words of length at most 2, wherever every intermediate coset is known
    for g in (0..ball.len()).filter(|&g| ball.length(g) <= 2) {
        let letters = ball.geodesic(g).letters();
        for x in 0..order.coset_count() {
            let mut coset = Some(x);
            for &l in letters.iter().rev() {
                coset = coset.and_then(|c| ball.letter(l).and_then(|s| order.translate(s, c)));
            }
            let Some(direct) = order.translate(g, x) else { continue };
            if coset.is_none() {
                continue;
            }
            let t = action.coordinates();
            if action.apply(ball.geodesic(g), &t[x]) != t[direct] {
                return RealizationReport::Composition { element: g, coset: x };
            }
        }
    }
    RealizationReport::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn evaluation_rules() {
        let m = PLMap::new(vec![q(0, 1), q(1, 1), q(3, 1)], vec![q(1, 1), q(2, 1), q(6, 1)]).unwrap();
        assert_eq!(m.evaluate(&q(1, 1)), q(2, 1));
        assert_eq!(m.evaluate(&q(1, 2)), q(3, 2));
        assert_eq!(m.evaluate(&q(2, 1)), q(4, 1));
        assert_eq!(m.evaluate(&q(5, 1)), q(8, 1));
        assert_eq!(m.evaluate(&q(-2, 1)), q(-1, 1));
        let inv = m.inverse();
        for x in [q(-3, 1), q(0, 1), q(1, 3), q(2, 1), q(7, 2), q(9, 1)] {
            assert_eq!(inv.evaluate(&m.evaluate(&x)), x);
        }
        assert_eq!(PLMap::identity().evaluate(&q(5, 7)), q(5, 7));
    }

    #[test]
    fn insertion_rule() {
        assert_eq!(insert_by_position(&[0]), vec![q(0, 1)]);
        assert_eq!(insert_by_position(&[0, 1, 2]), vec![q(0, 1), q(1, 1), q(2, 1)]);
        // id, a^2, a with C < aC < a^2C
        assert_eq!(insert_by_position(&[0, 2, 1]), vec![q(0, 1), q(1, 1), q(1, 2)]);
        assert_eq!(insert_by_position(&[1, 0, 2]), vec![q(0, 1), q(-1, 1), q(1, 1)]);
    }

    #[test]
    fn rejects_non_monotone_data() {
        assert_eq!(PLMap::new(vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]), Err(RealizationError::NotIncreasing(1)));
        assert_eq!(PLMap::new(vec![q(0, 1)], vec![]), Err(RealizationError::LengthMismatch));
    }
}
