//! Ordered actions on coset spaces and on the line: crossings, envelopes,
//! cofinality, recurrence.

mod crossing;
mod envelope;
mod recurrence;

use std::collections::BTreeMap;

use num::{BigRational, Zero};
use thiserror::Error;

use crate::affine::AffineModel;
use crate::ball::{enumerate_ball, BallError};
use crate::orders::{CosetOrder, RelativeOrder, Sign};
use crate::realization::embed_cosets;
use crate::rewriting::RewritingSystem;
use crate::word::{Alphabet, Word};

pub use crossing::{find_crossing, CrossingOutcome, CrossingWitness, Point};
pub use envelope::{
    cofinal_test, convex_envelope, nesting_report, Cofinality, Envelope, NestingReport, PairClass, TranslateClass,
};
pub use recurrence::{conradian_violation, lemma_chain, lemma_contradiction, recurrence_check, ConradianOutcome, Recurrence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("chain is not strictly increasing at position {0}")]
    ChainNotIncreasing(usize),
    #[error("power bound must be positive")]
    ZeroBound,
    #[error(transparent)]
    Ball(#[from] BallError),
}

#[derive(Clone, Debug)]
enum Model {
    Cosets {
        order: CosetOrder,
        t: Vec<BigRational>,
        at: BTreeMap<BigRational, usize>,
        members: Vec<Vec<usize>>,
    },
    Affine(AffineModel),
}

/// A partial action by order-preserving bijections on a finite sample
/// `Omega` of a totally ordered space, with points encoded as rationals.
#[derive(Clone, Debug)]
pub struct OrderedAction {
    rws: RewritingSystem,
    model: Model,
    points: Vec<BigRational>,
    labels: Vec<Word>,
    /// `points` indices in increasing order.
    sorted: Vec<usize>,
}

/// Left action on the cosets of a coset order; a point is the coordinate
/// `embed_cosets` gives its coset.
pub fn build_action(order: &CosetOrder) -> OrderedAction {
    let ball = order.ball();
    let t = embed_cosets(order);
    let m = order.coset_count();
    let mut members = vec![Vec::new(); m];
    for i in 0..ball.len() {
        members[order.coset_of(i)].push(i);
    }
    let at = t.iter().cloned().enumerate().map(|(c, x)| (x, c)).collect();
    let labels = (0..m).map(|c| ball.element(order.representative(c)).clone()).collect();
    let points = t.clone();
    OrderedAction::assemble(ball.rws().clone(), Model::Cosets { order: order.clone(), t, at, members }, points, labels)
}

/// The affine model acting on the orbit of 0 under the radius-`radius` ball,
/// deduplicated by value in ball order.
pub fn build_affine_action(model: AffineModel, rws: RewritingSystem, radius: usize) -> Result<OrderedAction, DynamicsError> {
    let ball = enumerate_ball(&rws, radius)?;
    let mut seen = std::collections::BTreeSet::new();
    let (mut points, mut labels) = (Vec::new(), Vec::new());
    for w in ball.elements() {
        let x = model.word_map(w).apply(&BigRational::zero());
        if seen.insert(x.clone()) {
            points.push(x);
            labels.push(w.clone());
        }
    }
    Ok(OrderedAction::assemble(rws, Model::Affine(model), points, labels))
}

impl OrderedAction {
    fn assemble(rws: RewritingSystem, model: Model, points: Vec<BigRational>, labels: Vec<Word>) -> OrderedAction {
        let mut sorted: Vec<usize> = (0..points.len()).collect();
        sorted.sort_by(|&i, &j| points[i].cmp(&points[j]));
        OrderedAction { rws, model, points, labels, sorted }
    }

    pub fn rws(&self) -> &RewritingSystem {
        &self.rws
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.rws.alphabet()
    }

    /// Points of `Omega` in enumeration order.
    pub fn points(&self) -> &[BigRational] {
        &self.points
    }

    /// An element carrying the base point to each point.
    pub fn label(&self, i: usize) -> &Word {
        &self.labels[i]
    }

    /// Point indices in increasing order.
    pub fn ascending(&self) -> &[usize] {
        &self.sorted
    }

    /// Index of the point with this value.
    pub fn point_index(&self, x: &BigRational) -> Option<usize> {
        self.points.iter().position(|p| p == x)
    }

    pub fn is_affine(&self) -> bool {
        matches!(self.model, Model::Affine(_))
    }

    /// `g(x)`, where known.
    pub fn apply(&self, g: &Word, x: &BigRational) -> Option<BigRational> {
        match &self.model {
            Model::Affine(m) => Some(m.word_map(g).apply(x)),
            Model::Cosets { order, t, at, members } => {
                let c = *at.get(x)?;
                let ball = order.ball();
                members[c].iter().find_map(|&i| {
                    let k = ball.locate(&g.concat(ball.element(i))).ok()?.inside()?;
                    Some(t[order.coset_of(k)].clone())
                })
            }
        }
    }

    /// `g^n(x)` for `n = 1..=bound` (or `-1..=-bound` when `backward`).
    pub fn orbit(&self, g: &Word, x: &BigRational, bound: usize, backward: bool) -> Vec<Option<BigRational>> {
        let g = if backward { g.inverse() } else { g.clone() };
        match &self.model {
            Model::Affine(m) => {
                let f = m.word_map(&g);
                let mut y = x.clone();
                (0..bound)
                    .map(|_| {
                        y = f.apply(&y);
                        Some(y.clone())
                    })
                    .collect()
            }
            Model::Cosets { .. } => (1..=bound as i64)
                .map(|n| {
                    let gn = self.rws.normalize(&g.pow(n)).ok()?;
                    self.apply(&gn, x)
                })
                .collect(),
        }
    }

    /// The order on cosets the action comes from: `gC` against `C` through
    /// the image of the base point 0 of the sample.
    pub fn order(&self) -> ActionOrder<'_> {
        ActionOrder { action: self }
    }
}

/// Relative order read off an ordered action at its base point.
pub struct ActionOrder<'a> {
    action: &'a OrderedAction,
}

impl RelativeOrder for ActionOrder<'_> {
    fn alphabet(&self) -> &Alphabet {
        self.action.alphabet()
    }

    fn sign(&self, g: &Word) -> Option<Sign> {
        let base = &self.action.points[0];
        let y = self.action.apply(g, base)?;
        Some(match y.cmp(base) {
            std::cmp::Ordering::Greater => Sign::Pos,
            std::cmp::Ordering::Less => Sign::Neg,
            std::cmp::Ordering::Equal => Sign::Star,
        })
    }
}
