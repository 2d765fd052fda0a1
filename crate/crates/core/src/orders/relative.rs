use std::cmp::Ordering;

use super::{Sign, SignAssignment};
use crate::word::{Alphabet, Word};

/// A relative order given by its sign oracle: `sign(g)` compares `gC` with `C`.
/// `None` means the comparison is not decidable from the available data.
pub trait RelativeOrder {
    fn alphabet(&self) -> &Alphabet;

    fn sign(&self, g: &Word) -> Option<Sign>;

    /// Compares `xC` with `yC` through the sign of `x^-1 y`.
    fn compare(&self, x: &Word, y: &Word) -> Option<Ordering> {
        self.sign(&x.inverse().concat(y)).map(|s| match s {
            Sign::Pos => Ordering::Less,
            Sign::Neg => Ordering::Greater,
            Sign::Star => Ordering::Equal,
        })
    }
}

/// The order of a sign assignment, decidable on words that normalize into its ball.
pub struct BallOrder<'a> {
    phi: &'a SignAssignment,
}

impl<'a> BallOrder<'a> {
    pub fn new(phi: &'a SignAssignment) -> BallOrder<'a> {
        BallOrder { phi }
    }
}

impl RelativeOrder for BallOrder<'_> {
    fn alphabet(&self) -> &Alphabet {
        self.phi.ball().alphabet()
    }

    fn sign(&self, g: &Word) -> Option<Sign> {
        let i = self.phi.ball().locate(g).ok()?.inside()?;
        self.phi.sign(i)
    }
}
