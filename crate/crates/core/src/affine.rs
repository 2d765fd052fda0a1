//! Exact affine actions `x -> s x + t` with rational coefficients.

use num::{BigRational, One, Signed, Zero};
use thiserror::Error;

use crate::presentation::GroupPresentation;
use crate::word::{Alphabet, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AffineError {
    #[error("generator {generator} has non-positive scale and does not preserve order")]
    NotIncreasing { generator: String },
    #[error("expected {expected} generator maps, got {got}")]
    WrongArity { expected: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    pub scale: BigRational,
    pub shift: BigRational,
}

impl AffineMap {
    pub fn new(scale: BigRational, shift: BigRational) -> AffineMap {
        AffineMap { scale, shift }
    }

    pub fn identity() -> AffineMap {
        AffineMap { scale: BigRational::one(), shift: BigRational::zero() }
    }

    pub fn apply(&self, x: &BigRational) -> BigRational {
        &self.scale * x + &self.shift
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        AffineMap { scale: &self.scale * &inner.scale, shift: &self.scale * &inner.shift + &self.shift }
    }

    pub fn inverse(&self) -> AffineMap {
        let scale = self.scale.recip();
        let shift = -(&self.shift * &scale);
        AffineMap { scale, shift }
    }

    pub fn is_identity(&self) -> bool {
        self.scale.is_one() && self.shift.is_zero()
    }
}

/// A left action of a presented group by increasing affine maps.
#[derive(Clone, Debug)]
pub struct AffineModel {
    alphabet: Alphabet,
    letters: Vec<AffineMap>,
}

impl AffineModel {
    pub fn new(alphabet: Alphabet, generators: Vec<AffineMap>) -> Result<AffineModel, AffineError> {
        if generators.len() != alphabet.rank() {
            return Err(AffineError::WrongArity { expected: alphabet.rank(), got: generators.len() });
        }
        let mut letters = Vec::with_capacity(2 * generators.len());
        for (g, m) in generators.into_iter().enumerate() {
            if !m.scale.is_positive() {
                return Err(AffineError::NotIncreasing { generator: alphabet.name(g).to_string() });
            }
            let inv = m.inverse();
            letters.push(m);
            letters.push(inv);
        }
        Ok(AffineModel { alphabet, letters })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn letter_map(&self, l: Letter) -> &AffineMap {
        &self.letters[l.index()]
    }

    /// The map of a word; the rightmost letter acts first.
    pub fn word_map(&self, w: &Word) -> AffineMap {
        w.letters().iter().fold(AffineMap::identity(), |acc, &l| acc.compose(self.letter_map(l)))
    }

    /// Index of the first relator that does not act as the identity.
    pub fn failing_relator(&self, presentation: &GroupPresentation) -> Option<usize> {
        presentation.relators.iter().position(|r| !self.word_map(r).is_identity())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{parse_presentation, parse_word};
    use num::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn bs12() -> (GroupPresentation, AffineModel) {
        let p = parse_presentation("< a, b | a b a^-1 = b^2 >").unwrap();
        let m = AffineModel::new(
            p.alphabet.clone(),
            vec![AffineMap::new(q(2, 1), q(0, 1)), AffineMap::new(q(1, 1), q(1, 1))],
        )
        .unwrap();
        (p, m)
    }

    #[test]
    fn relators_act_trivially() {
        let (p, m) = bs12();
        assert_eq!(m.failing_relator(&p), None);
    }

    #[test]
    fn words_act_right_to_left() {
        let (p, m) = bs12();
        let g = parse_word("a^-1 b", &p.alphabet).unwrap();
        // a^-1 b : x -> (x + 1) / 2
        assert_eq!(m.word_map(&g), AffineMap::new(q(1, 2), q(1, 2)));
        let h = parse_word("b a^-1 b^-1", &p.alphabet).unwrap();
        assert_eq!(m.word_map(&h), m.word_map(&g));
    }

    #[test]
    fn inverse_composes_to_identity() {
        let f = AffineMap::new(q(3, 5), q(-7, 2));
        assert!(f.compose(&f.inverse()).is_identity());
        assert!(f.inverse().compose(&f).is_identity());
    }

    #[test]
    fn decreasing_maps_rejected() {
        let al = Alphabet::new(vec!["a".into()]);
        let err = AffineModel::new(al, vec![AffineMap::new(q(-1, 1), q(0, 1))]).unwrap_err();
        assert!(matches!(err, AffineError::NotIncreasing { .. }));
    }
}
