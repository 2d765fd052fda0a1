//! Truncated relative cones: sign assignments on a ball and their verification.

mod coset;
mod relative;
mod search;
mod space;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ball::Ball;
use crate::presentation::parse_word;
use crate::word::Word;

pub use coset::{cone_to_coset_order, coset_order_to_cone, CosetError, CosetOrder};
pub use relative::{BallOrder, RelativeOrder};
pub use search::{search_cones, Constraints, SearchOptions, SearchOutcome};
pub use space::{
    conjugate, dist, in_neighborhood, limit_of_sequence, stabilizer_fixed_check, Distance, LimitOutcome,
    StabilizerReport,
};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Sign {
    Pos,
    Neg,
    Star,
}

impl Sign {
    pub fn negate(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
            Sign::Star => Sign::Star,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Pos => "+1",
            Sign::Neg => "-1",
            Sign::Star => "*",
        }
    }

    pub fn parse(s: &str) -> Option<Sign> {
        match s {
            "+1" | "+" | "1" => Some(Sign::Pos),
            "-1" | "-" => Some(Sign::Neg),
            "*" => Some(Sign::Star),
            _ => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("assignments live on different balls")]
    BallMismatch,
    #[error("empty sequence")]
    EmptySequence,
}

/// A map from ball elements to `{+1, -1, *}`; `None` marks an unknown value.
#[derive(Clone, Debug)]
pub struct SignAssignment {
    ball: Arc<Ball>,
    signs: Vec<Option<Sign>>,
}

impl PartialEq for SignAssignment {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ball, &other.ball) && self.signs == other.signs
    }
}

impl Eq for SignAssignment {}

impl SignAssignment {
    pub fn new(ball: Arc<Ball>, signs: Vec<Option<Sign>>) -> SignAssignment {
        assert_eq!(signs.len(), ball.len(), "one sign per ball element");
        SignAssignment { ball, signs }
    }

    pub fn total(ball: Arc<Ball>, signs: Vec<Sign>) -> SignAssignment {
        SignAssignment::new(ball, signs.into_iter().map(Some).collect())
    }

    /// Builds an assignment from a function of the element index.
    pub fn from_fn(ball: Arc<Ball>, f: impl Fn(usize) -> Option<Sign>) -> SignAssignment {
        let signs = (0..ball.len()).map(f).collect();
        SignAssignment { ball, signs }
    }

    pub fn ball(&self) -> &Arc<Ball> {
        &self.ball
    }

    pub fn sign(&self, i: usize) -> Option<Sign> {
        self.signs[i]
    }

    pub fn signs(&self) -> &[Option<Sign>] {
        &self.signs
    }

    pub fn with_sign(mut self, i: usize, s: Option<Sign>) -> SignAssignment {
        self.signs[i] = s;
        self
    }

    pub fn is_total(&self) -> bool {
        self.signs.iter().all(Option::is_some)
    }

    pub fn same_ball(&self, other: &SignAssignment) -> bool {
        Arc::ptr_eq(&self.ball, &other.ball)
    }

    /// Indices with the given sign.
    pub fn indices(&self, s: Sign) -> Vec<usize> {
        (0..self.signs.len()).filter(|&i| self.signs[i] == Some(s)).collect()
    }

    /// One `element<TAB>sign` line per ball element, `?` for unknown values.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, v) in self.signs.iter().enumerate() {
            let sym = v.map_or("?", Sign::symbol);
            s.push_str(&format!("{}\t{}\n", self.ball.display(i), sym));
        }
        s
    }

    /// Parses `element<TAB>sign` lines; elements absent from the text are unknown.
    pub fn from_text(ball: Arc<Ball>, text: &str) -> Result<SignAssignment, AssignmentError> {
        let mut signs = vec![None; ball.len()];
        for (li, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| AssignmentError::Format { line: li + 1, message };
            let (elem, sign) = line
                .rsplit_once(|c: char| c == '\t' || c.is_whitespace())
                .ok_or_else(|| err("expected `element<TAB>sign`".into()))?;
            let w = parse_word(elem.trim(), ball.alphabet()).map_err(|e| err(e.to_string()))?;
            let i = ball
                .locate(&w)
                .map_err(|e| err(e.to_string()))?
                .inside()
                .ok_or_else(|| err(format!("`{}` is outside the ball", elem.trim())))?;
            let s = match sign {
                "?" => None,
                other => Some(Sign::parse(other).ok_or_else(|| err(format!("bad sign `{other}`")))?),
            };
            signs[i] = s;
        }
        Ok(SignAssignment { ball, signs })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ViolationKind {
    Semigroup,
    Cpc,
    Partition,
    Properness,
    Inverse,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Semigroup => "SEMIGROUP",
            ViolationKind::Cpc => "CPC",
            ViolationKind::Partition => "PARTITION",
            ViolationKind::Properness => "PROPERNESS",
            ViolationKind::Inverse => "INVERSE",
        })
    }
}

/// A failed cone condition. For product conditions `witnesses` is the pair
/// `(x, y)` and `product` the normal form of `x y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeViolation {
    pub kind: ViolationKind,
    pub witnesses: Vec<usize>,
    pub product: Option<Word>,
}

impl ConeViolation {
    /// Re-derives the violation from `phi`.
    pub fn replay(&self, phi: &SignAssignment) -> bool {
        let ball = phi.ball();
        let s = |i: usize| phi.sign(i);
        match (self.kind, self.witnesses.as_slice()) {
            (ViolationKind::Partition, &[i]) => s(i).is_none(),
            (ViolationKind::Inverse, &[i]) => match (s(i), s(ball.invert(i))) {
                (Some(x), Some(y)) => y != x.negate() || (i == 0 && x != Sign::Star),
                _ => false,
            },
            (ViolationKind::Properness, _) => {
                ball.generator_elements().iter().all(|&g| s(g) == Some(Sign::Star))
            }
            (ViolationKind::Cpc, &[c, h, _]) => {
                s(c) == Some(Sign::Star)
                    && conjugate_index(ball, c, h).is_some_and(|k| s(k) != s(h))
            }
            (kind, &[x, y]) => {
                let Some(k) = ball.product(x, y) else { return false };
                match (kind, s(x), s(y)) {
                    (ViolationKind::Semigroup, Some(Sign::Pos), Some(Sign::Pos)) => s(k) != Some(Sign::Pos),
                    (ViolationKind::Cpc, Some(Sign::Star), Some(Sign::Star)) => s(k) != Some(Sign::Star),
                    (ViolationKind::Cpc, Some(Sign::Star), Some(Sign::Pos))
                    | (ViolationKind::Cpc, Some(Sign::Pos), Some(Sign::Star)) => s(k) != Some(Sign::Pos),
                    _ => false,
                }
            }
            _ => false,
        }
    }
}

/// Ball index of `c h c^-1`, if it lies in the ball.
pub(crate) fn conjugate_index(ball: &Ball, c: usize, h: usize) -> Option<usize> {
    let w = ball.element(c).concat(ball.element(h)).concat(&ball.element(c).inverse());
    ball.locate(&w).ok()?.inside()
}

/// Checks the relative-cone conditions on every in-ball product: `P P ⊂ P`,
/// `C P ⊂ P`, `P C ⊂ P`, `C C ⊂ C` and `c h c^-1` has the sign of `h` for
/// `c` in C, together with inverse symmetry and properness.
pub fn verify_relative_cone(phi: &SignAssignment) -> Result<(), ConeViolation> {
    let ball = phi.ball();
    let n = ball.len();
    let violation = |kind, witnesses: Vec<usize>| {
        let product = match witnesses.as_slice() {
            &[x, y] => ball.product(x, y).map(|k| ball.element(k).clone()),
            _ => None,
        };
        Err(ConeViolation { kind, witnesses, product })
    };
    if let Some(i) = (0..n).find(|&i| phi.sign(i).is_none()) {
        return violation(ViolationKind::Partition, vec![i]);
    }
    let s = |i: usize| phi.sign(i).expect("total");
    if s(0) != Sign::Star {
        return violation(ViolationKind::Inverse, vec![0]);
    }
    if let Some(i) = (0..n).find(|&i| s(ball.invert(i)) != s(i).negate()) {
        return violation(ViolationKind::Inverse, vec![i]);
    }
    let pos = phi.indices(Sign::Pos);
    let star = phi.indices(Sign::Star);
    for &x in &pos {
        for &y in &pos {
            if ball.product(x, y).is_some_and(|k| s(k) != Sign::Pos) {
                return violation(ViolationKind::Semigroup, vec![x, y]);
            }
        }
    }
    for &c in &star {
        for &p in &pos {
            if ball.product(c, p).is_some_and(|k| s(k) != Sign::Pos) {
                return violation(ViolationKind::Cpc, vec![c, p]);
            }
            if ball.product(p, c).is_some_and(|k| s(k) != Sign::Pos) {
                return violation(ViolationKind::Cpc, vec![p, c]);
            }
        }
        for &d in &star {
            if ball.product(c, d).is_some_and(|k| s(k) != Sign::Star) {
                return violation(ViolationKind::Cpc, vec![c, d]);
            }
        }
    }
    // c h c^-1 may be in the ball although c h is not
    for &c in &star {
        for h in 0..n {
            if let Some(k) = conjugate_index(ball, c, h) {
                if s(k) != s(h) {
                    return Err(ConeViolation {
                        kind: ViolationKind::Cpc,
                        witnesses: vec![c, h, ball.invert(c)],
                        product: Some(ball.element(k).clone()),
                    });
                }
            }
        }
    }
    if ball.generator_elements().iter().all(|&g| s(g) == Sign::Star) {
        return violation(ViolationKind::Properness, Vec::new());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::enumerate_ball;
    use crate::catalog;

    pub(crate) fn ball(name: &str, r: usize) -> Arc<Ball> {
        Arc::new(enumerate_ball(&catalog::lookup(name).unwrap().rewriting_system(), r).unwrap())
    }

    fn exps(ball: &Ball, i: usize) -> Vec<i64> {
        ball.element(i).exponent_sums(ball.alphabet().rank())
    }

    #[test]
    fn z2_relative_to_b_is_a_cone() {
        let b = ball("z2", 3);
        let phi = SignAssignment::from_fn(b.clone(), |i| {
            let e = exps(&b, i);
            Some(match e[0].signum() {
                1 => Sign::Pos,
                -1 => Sign::Neg,
                _ => Sign::Star,
            })
        });
        assert_eq!(verify_relative_cone(&phi), Ok(()));
    }

    #[test]
    fn semigroup_violation_on_z() {
        let b = ball("z", 2);
        // indices: id, a, a^-1, a^2, a^-2
        let phi = SignAssignment::total(b, vec![Sign::Star, Sign::Pos, Sign::Neg, Sign::Neg, Sign::Pos]);
        let v = verify_relative_cone(&phi).unwrap_err();
        assert_eq!(v.kind, ViolationKind::Semigroup);
        assert_eq!(v.witnesses, vec![1, 1]);
        assert!(v.replay(&phi));
    }

    #[test]
    fn all_star_is_improper() {
        let b = ball("z2", 2);
        let phi = SignAssignment::from_fn(b, |_| Some(Sign::Star));
        let v = verify_relative_cone(&phi).unwrap_err();
        assert_eq!(v.kind, ViolationKind::Properness);
        assert!(v.replay(&phi));
    }

    #[test]
    fn partial_and_asymmetric_assignments_rejected() {
        let b = ball("z", 1);
        let phi = SignAssignment::new(b.clone(), vec![Some(Sign::Star), Some(Sign::Pos), None]);
        assert_eq!(verify_relative_cone(&phi).unwrap_err().kind, ViolationKind::Partition);
        let phi = SignAssignment::total(b.clone(), vec![Sign::Star, Sign::Pos, Sign::Pos]);
        let v = verify_relative_cone(&phi).unwrap_err();
        assert_eq!(v.kind, ViolationKind::Inverse);
        assert!(v.replay(&phi));
        let phi = SignAssignment::total(b, vec![Sign::Pos, Sign::Pos, Sign::Neg]);
        assert_eq!(verify_relative_cone(&phi).unwrap_err().witnesses, vec![0]);
    }

    #[test]
    fn cpc_violation_replays() {
        let b = ball("z2", 2);
        // C = <b> but with a b marked negative
        let phi = SignAssignment::from_fn(b.clone(), |i| {
            let e = exps(&b, i);
            Some(match (e[0].signum(), e[1].signum()) {
                (0, _) => Sign::Star,
                (1, 1) => Sign::Neg,
                (-1, -1) => Sign::Pos,
                (1, _) => Sign::Pos,
                _ => Sign::Neg,
            })
        });
        let v = verify_relative_cone(&phi).unwrap_err();
        assert!(matches!(v.kind, ViolationKind::Cpc | ViolationKind::Semigroup));
        assert!(v.replay(&phi));
        assert!(v.product.is_some());
    }

    #[test]
    fn text_round_trip() {
        let b = ball("klein", 2);
        let phi = SignAssignment::from_fn(b.clone(), |i| Some([Sign::Pos, Sign::Neg, Sign::Star][i % 3]));
        let again = SignAssignment::from_text(b.clone(), &phi.to_text()).unwrap();
        assert_eq!(again, phi);
        assert!(SignAssignment::from_text(b.clone(), "a\tmaybe").is_err());
        assert!(SignAssignment::from_text(b, "a^5\t+1").is_err());
    }
}
