use std::cmp::Ordering;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use super::{abelianize, certify_surjection, Certificate};
use crate::ball::{enumerate_ball, Ball, BallError};
use crate::catalog::CatalogEntry;
use crate::dynamics::{
    build_action, conradian_violation, find_crossing, lemma_chain, lemma_contradiction,
    recurrence_check, ConradianOutcome,
    CrossingOutcome, DynamicsError, Recurrence,
};
use crate::orders::{cone_to_coset_order, search_cones, Constraints, RelativeOrder, SearchOptions, SignAssignment};
use crate::word::{Alphabet, Word};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[derive(Clone, Debug)]
pub struct PipelineBounds {
    pub word_bound: usize,
    pub power_bound: usize,
    pub recurrence_bound: usize,
    pub limit: usize,
    pub node_budget: Option<u64>,
}

impl Default for PipelineBounds {
    fn default() -> Self {
        PipelineBounds { word_bound: 2, power_bound: 8, recurrence_bound: 8, limit: 1000, node_budget: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Consistent,
    Undecided,
    /// A test verdict: evidence that contradicts a theorem points to a bug.
    Inconsistent,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::Undecided => "UNDECIDED",
            Verdict::Inconsistent => "INCONSISTENT",
        }
    }
}

/// Evidence gathered for one cone.
#[derive(Clone, Debug)]
pub struct ConeCheck {
    pub index: usize,
    /// The cone has no left-invariant coset order within the extension budget.
    pub no_coset_order: bool,
    pub recurrent: usize,
    pub fails: usize,
    pub undecided: usize,
    pub crossing: Option<CrossingOutcome>,
    /// Recurrence of the chain a found crossing implicates.
    pub lemma: Option<Recurrence>,
    /// A power where the lemma's deduction is decided in the data but its
    /// conclusion is not.
    pub contradiction: Option<usize>,
    /// Only sought when the group has no surjection onto Z.
    pub conradian: Option<ConradianOutcome>,
    pub verdict: Verdict,
}

impl ConeCheck {
    /// Some sampled chain recurs and none fails.
    pub fn passes_recurrence(&self) -> bool {
        self.fails == 0 && self.recurrent > 0
    }
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub group: String,
    pub alphabet: Alphabet,
    pub radius: usize,
    pub exploratory: bool,
    pub ball_size: usize,
    pub cones_found: usize,
    pub truncated: bool,
    pub budget_exhausted: bool,
    pub nodes: u64,
    pub certificate: Certificate,
    pub certificate_verified: bool,
    pub cones: Vec<ConeCheck>,
    pub verdict: Verdict,
}

impl PipelineReport {
    /// `key<TAB>value` lines in a fixed order.
    pub fn to_records(&self) -> String {
        let cert = self.certificate.display(&self.alphabet);
        let mut out = String::new();
        let _ = writeln!(out, "group\t{}", self.group);
        let _ = writeln!(out, "radius\t{}", self.radius);
        let _ = writeln!(out, "exploratory\t{}", self.exploratory);
        let _ = writeln!(out, "ball\t{}", self.ball_size);
        let _ = writeln!(out, "cones\t{}", self.cones_found);
        let _ = writeln!(out, "truncated\t{}", self.truncated);
        let _ = writeln!(out, "budget_exhausted\t{}", self.budget_exhausted);
        let _ = writeln!(out, "nodes\t{}", self.nodes);
        let _ = writeln!(out, "certificate\t{cert}");
        let _ = writeln!(out, "certificate_verified\t{}", self.certificate_verified);
        for c in &self.cones {
            let crossing = match &c.crossing {
                Some(CrossingOutcome::Found(x)) => format!("FOUND n={} m={}", x.n, x.m),
                Some(CrossingOutcome::NoneUpToBound { .. }) => "NONE-UP-TO-BOUND".to_string(),
                None => "-".to_string(),
            };
            let lemma = match &c.lemma {
                Some(Recurrence::RecurrentUpToBound { .. }) => "RECURRENT-UP-TO-BOUND",
                Some(Recurrence::Fails { .. }) => "FAILS",
                Some(Recurrence::Undecided { .. }) => "UNDECIDED",
                None => "-",
            };
            let conradian = match &c.conradian {
                Some(ConradianOutcome::Candidate { decided, .. }) => format!("CANDIDATE decided={decided}"),
                Some(ConradianOutcome::NoneUpToBound) => "NONE-UP-TO-BOUND".to_string(),
                None => "-".to_string(),
            };
            let _ = writeln!(
                out,
                "cone\t{}\tcoset_order={}\trecurrent={}\tfails={}\tundecided={}\tcrossing={}\tlemma={}\tcontradiction={}\tconradian={}\tverdict={}",
                c.index,
                !c.no_coset_order,
                c.recurrent,
                c.fails,
                c.undecided,
                crossing,
                lemma,
                c.contradiction.map_or("-".to_string(), |k| k.to_string()),
                conradian,
                c.verdict.as_str()
            );
        }
        let _ = writeln!(out, "verdict\t{}", self.verdict.as_str());
        out
    }
}

/// Chains `[x, y]` with `xC < yC` among the identity and the letters.
fn sample_chains(ball: &Ball, order: &dyn RelativeOrder) -> Vec<Vec<Word>> {
    let short: Vec<&Word> = ball.elements().iter().filter(|w| w.len() <= 1).collect();
    let mut out = Vec::new();
    for x in &short {
        for y in &short {
            if order.compare(x, y) == Some(Ordering::Less) {
                out.push(vec![(*x).clone(), (*y).clone()]);
            }
        }
    }
    out
}

fn check_cone(
    index: usize,
    phi: &SignAssignment,
    surjects: bool,
    bounds: &PipelineBounds,
) -> Result<ConeCheck, PipelineError> {
    let mut check = ConeCheck {
        index,
        no_coset_order: false,
        recurrent: 0,
        fails: 0,
        undecided: 0,
        crossing: None,
        lemma: None,
        contradiction: None,
        conradian: None,
        verdict: Verdict::Undecided,
    };
    let Ok(order) = cone_to_coset_order(phi) else {
        check.no_coset_order = true;
        return Ok(check);
    };
    let ball = phi.ball();
    let action = build_action(&order);
    let rel = action.order();
    let letters: Vec<Word> = ball.alphabet().letters().into_iter().map(Word::letter).collect();
    for chain in sample_chains(ball, &rel) {
        for h in &letters {
            match recurrence_check(&rel, h, &chain, bounds.recurrence_bound)? {
                Recurrence::RecurrentUpToBound { .. } => check.recurrent += 1,
                Recurrence::Fails { .. } => check.fails += 1,
                Recurrence::Undecided { .. } => check.undecided += 1,
            }
        }
    }
    let crossing = find_crossing(&action, bounds.word_bound, bounds.power_bound, false)?;
    if let CrossingOutcome::Found(x) = &crossing {
        // the chain breaks for every power past N, so the tail must lie beyond it
        let (h, chain) = lemma_chain(x);
        let n_bound = bounds.recurrence_bound.max(2 * x.n + 2);
        let r = recurrence_check(&rel, &h, &chain, n_bound)?;
        match r {
            Recurrence::RecurrentUpToBound { .. } => check.recurrent += 1,
            Recurrence::Fails { .. } => check.fails += 1,
            Recurrence::Undecided { .. } => check.undecided += 1,
        }
        check.lemma = Some(r);
        check.contradiction = lemma_contradiction(&rel, x, n_bound);
    }
    check.crossing = Some(crossing);
    check.verdict = if check.contradiction.is_some() {
        Verdict::Inconsistent
    } else if surjects {
        Verdict::Consistent
    } else {
        let elements = enumerate_ball(ball.rws(), bounds.word_bound)?.elements().to_vec();
        let c = conradian_violation(&rel, &elements, bounds.recurrence_bound);
        let explained = matches!(c, ConradianOutcome::Candidate { .. });
        check.conradian = Some(c);
        if explained {
            Verdict::Consistent
        } else {
            Verdict::Undecided
        }
    };
    Ok(check)
}

/// Search, then per cone: recurrence sampling, crossing search and (for
/// groups without a surjection onto Z) a Conradian-violation search; finally
/// the abelianization certificate.
///
/// A found crossing adds its lemma chain to the recurrence sample; the cone is
/// INCONSISTENT if the data decide the lemma's deduction at some power but
/// the chain still keeps its order there. Without a surjection onto Z, a cone with no Conradian
/// candidate stays UNDECIDED: crossing-freeness is only ever known up to the
/// bounds, so it never contradicts the certificate on its own.
pub fn pipeline_check(
    entry: &CatalogEntry,
    radius: usize,
    bounds: &PipelineBounds,
    exploratory: bool,
    parallel: bool,
) -> Result<PipelineReport, PipelineError> {
    let presentation = entry.presentation();
    let ball = Arc::new(enumerate_ball(&entry.rewriting_system(), radius)?);
    let options = SearchOptions { limit: bounds.limit, node_budget: bounds.node_budget, parallel, coset_check: true };
    let search = search_cones(&ball, &Constraints::default(), &options);
    let certificate = certify_surjection(&presentation);
    let certificate_verified = certificate.verify(&abelianize(&presentation));
    let surjects = certificate.surjects();
    let run = |(i, phi): (usize, &SignAssignment)| check_cone(i, phi, surjects, bounds);
    let cones: Vec<ConeCheck> = if parallel {
        search.cones.par_iter().enumerate().map(run).collect::<Result<_, _>>()?
    } else {
        search.cones.iter().enumerate().map(run).collect::<Result<_, _>>()?
    };
    let mut verdict = cones.iter().map(|c| c.verdict).max().unwrap_or(Verdict::Consistent);
    if !certificate_verified {
        verdict = Verdict::Inconsistent;
    } else if search.budget_exhausted && verdict == Verdict::Consistent && !surjects {
        verdict = Verdict::Undecided;
    }
    Ok(PipelineReport {
        group: entry.name.to_string(),
        alphabet: presentation.alphabet.clone(),
        radius,
        exploratory,
        ball_size: ball.len(),
        cones_found: search.cones.len(),
        truncated: search.truncated,
        budget_exhausted: search.budget_exhausted,
        nodes: search.nodes,
        certificate,
        certificate_verified,
        cones,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn abelian_and_klein_are_consistent() {
        for name in ["z2", "klein"] {
            let r = pipeline_check(catalog::lookup(name).unwrap(), 2, &PipelineBounds::default(), false, false).unwrap();
            assert_eq!(r.verdict, Verdict::Consistent, "{name}");
            assert!(r.certificate.surjects());
            assert!(r.cones.iter().all(|c| c.fails == 0 || !matches!(c.crossing, Some(CrossingOutcome::Found(_)))));
        }
    }
}
