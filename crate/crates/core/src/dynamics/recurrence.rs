use std::cmp::Ordering;

use super::{CrossingWitness, DynamicsError};
use crate::orders::{RelativeOrder, Sign};
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recurrence {
    /// Every `n` at which the chain keeps its order.
    RecurrentUpToBound { witnesses: Vec<usize> },
    /// No `n` in the upper half of the range keeps the order, with enough
    /// of them decidable; `breaks` lists the decidable ones there.
    Fails { breaks: Vec<usize> },
    Undecided { decided: usize },
}

/// Samples `n = 1..=n_bound` for `lambda_1 h^n C < ... < lambda_k h^n C`.
///
/// Recurrence asks for arbitrarily large `n`, so the verdict looks at the
/// tail `n > n_bound / 2`: one order-keeping `n` there makes the chain
/// recurrent; otherwise it fails once at least half the tail is decidable.
pub fn recurrence_check(
    order: &dyn RelativeOrder,
    h: &Word,
    chain: &[Word],
    n_bound: usize,
) -> Result<Recurrence, DynamicsError> {
    if n_bound == 0 {
        return Err(DynamicsError::ZeroBound);
    }
    for (i, pair) in chain.windows(2).enumerate() {
        if order.compare(&pair[0], &pair[1]) != Some(Ordering::Less) {
            return Err(DynamicsError::ChainNotIncreasing(i));
        }
    }
    let tail_start = n_bound / 2 + 1;
    let (mut keep, mut breaks, mut decided_tail) = (Vec::new(), Vec::new(), 0);
    for n in 1..=n_bound {
        let hn = h.pow(n as i64);
        let mut state = Some(true);
        for pair in chain.windows(2) {
            match order.compare(&pair[0].concat(&hn), &pair[1].concat(&hn)) {
                None => state = None,
                Some(Ordering::Less) => {}
                Some(_) => {
                    if state.is_some() {
                        state = Some(false);
                    }
                }
            }
            if state.is_none() {
                break;
            }
        }
        match state {
            Some(true) => keep.push(n),
            Some(false) if n >= tail_start => breaks.push(n),
            _ => {}
        }
        if state.is_some() && n >= tail_start {
            decided_tail += 1;
        }
    }
    let tail_len = n_bound + 1 - tail_start;
    if keep.iter().any(|&n| n >= tail_start) {
        Ok(Recurrence::RecurrentUpToBound { witnesses: keep })
    } else if decided_tail >= tail_len.div_ceil(2) {
        Ok(Recurrence::Fails { breaks })
    } else {
        Ok(Recurrence::Undecided { decided: decided_tail })
    }
}

/// The element and chain used against recurrence for a crossing
/// `(f, g; u, v, w)`: `h = w^-1 f w` and `f^N g^M w C < w C`, where `w` is the
/// witness point's label.
pub fn lemma_chain(x: &CrossingWitness) -> (Word, Vec<Word>) {
    let w = &x.w.label;
    let h = w.inverse().concat(&x.f).concat(w).free_reduce();
    let first = x.f.pow(x.n as i64).concat(&x.g.pow(x.m as i64)).concat(w).free_reduce();
    (h, vec![first, w.clone()])
}

/// A power `k > N` at which the data decide both steps of the lemma's
/// argument, `wC < g^M f^k wC` and `f^k wC < f^N wC`, and yet the lemma chain
/// keeps its order at `h^k`. Invariance and transitivity rule this out, so any
/// hit means the order data are broken; a crossing alone is only known up to
/// the power bound and proves nothing.
pub fn lemma_contradiction(order: &dyn RelativeOrder, x: &CrossingWitness, n_bound: usize) -> Option<usize> {
    let w = &x.w.label;
    let (h, chain) = lemma_chain(x);
    let fn_w = x.f.pow(x.n as i64).concat(w);
    (x.n + 1..=n_bound).find(|&k| {
        let fk_w = x.f.pow(k as i64).concat(w);
        let step1 = order.compare(w, &x.g.pow(x.m as i64).concat(&fk_w)) == Some(Ordering::Less);
        let step2 = order.compare(&fk_w, &fn_w) == Some(Ordering::Less);
        let hk = h.pow(k as i64);
        let kept = order.compare(&chain[0].concat(&hk), &chain[1].concat(&hk)) == Some(Ordering::Less);
        step1 && step2 && kept
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConradianOutcome {
    /// `C <= fC < gC` with `f g^n C <= gC` at every decidable `n <= n_bound`.
    Candidate { f: Word, g: Word, n_bound: usize, decided: usize },
    NoneUpToBound,
}

/// Looks for `f, g` among `elements` breaking the Conradian condition up to
/// `n_bound`; at least half of the powers must be decidable.
pub fn conradian_violation(order: &dyn RelativeOrder, elements: &[Word], n_bound: usize) -> ConradianOutcome {
    let quorum = n_bound.div_ceil(2).max(1);
    for f in elements {
        if !matches!(order.sign(f), Some(Sign::Pos | Sign::Star)) {
            continue;
        }
        for g in elements {
            if order.compare(f, g) != Some(Ordering::Less) {
                continue;
            }
            let mut decided = 0;
            let mut escaped = false;
            for n in 1..=n_bound {
                match order.compare(&f.concat(&g.pow(n as i64)), g) {
                    Some(Ordering::Greater) => {
                        escaped = true;
                        break;
                    }
                    Some(_) => decided += 1,
                    None => {}
                }
            }
            if !escaped && decided >= quorum {
                return ConradianOutcome::Candidate { f: f.clone(), g: g.clone(), n_bound, decided };
            }
        }
    }
    ConradianOutcome::NoneUpToBound
}
