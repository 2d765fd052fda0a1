use num::{BigRational, Zero};

use super::{verify_relative_cone, AssignmentError, ConeViolation, Sign, SignAssignment, ViolationKind};

/// Distance `2^-n` where `n` is the largest radius on which two assignments agree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distance {
    Exact { n: i64 },
    /// Agreement on the whole ball; the value is reported as 0.
    AtTruncation,
}

impl Distance {
    pub fn value(&self) -> BigRational {
        match *self {
            Distance::AtTruncation => BigRational::zero(),
            Distance::Exact { n } if n >= 0 => {
                BigRational::new(1.into(), num::BigInt::from(2).pow(n as u32))
            }
            Distance::Exact { n } => BigRational::from_integer(num::BigInt::from(2).pow((-n) as u32)),
        }
    }
}

pub fn dist(phi: &SignAssignment, psi: &SignAssignment) -> Result<Distance, AssignmentError> {
    if !phi.same_ball(psi) {
        return Err(AssignmentError::BallMismatch);
    }
    let ball = phi.ball();
    Ok(match (0..ball.len()).find(|&i| phi.sign(i) != psi.sign(i)) {
        Some(i) => Distance::Exact { n: ball.length(i) as i64 - 1 },
        None => Distance::AtTruncation,
    })
}

/// `phi^g(h) = phi(g h g^-1)`, unknown where the conjugate leaves the ball.
pub fn conjugate(phi: &SignAssignment, g: usize) -> SignAssignment {
    let ball = phi.ball().clone();
    let gw = ball.element(g).clone();
    let gi = gw.inverse();
    SignAssignment::from_fn(ball.clone(), |h| {
        let w = gw.concat(ball.element(h)).concat(&gi);
        let k = ball.locate(&w).ok()?.inside()?;
        phi.sign(k)
    })
}

/// Whether `psi` agrees with `phi` on every test element; `None` if some
/// value is unknown.
pub fn in_neighborhood(psi: &SignAssignment, phi: &SignAssignment, tests: &[usize]) -> Option<bool> {
    let mut all = true;
    for &t in tests {
        let (a, b) = (psi.sign(t)?, phi.sign(t)?);
        all &= a == b;
    }
    Some(all)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabilizerReport {
    Pass,
    /// `phi^c(h)` is defined and differs from `phi(h)`.
    Violation { c: usize, h: usize },
}

/// Checks that conjugation by each in-ball element of C fixes `phi`.
pub fn stabilizer_fixed_check(phi: &SignAssignment) -> StabilizerReport {
    for c in phi.indices(Sign::Star) {
        let conj = conjugate(phi, c);
        for h in 0..phi.ball().len() {
            if conj.sign(h).is_some() && conj.sign(h) != phi.sign(h) {
                return StabilizerReport::Violation { c, h };
            }
        }
    }
    StabilizerReport::Pass
}

#[derive(Clone, Debug)]
pub enum LimitOutcome {
    Limit(SignAssignment),
    /// The coordinate changes value inside the sampled tail.
    NoLimit { element: usize },
    /// The pointwise limit exists but every generator is `*`.
    Degenerate(SignAssignment),
    Invalid(SignAssignment, ConeViolation),
}

/// Pointwise eventual value of a sampled sequence. The tail is the last
/// `ceil(len / 2)` terms; every coordinate must be constant on it.
pub fn limit_of_sequence(seq: &[SignAssignment]) -> Result<LimitOutcome, AssignmentError> {
    let last = seq.last().ok_or(AssignmentError::EmptySequence)?;
    if seq.iter().any(|phi| !phi.same_ball(last)) {
        return Err(AssignmentError::BallMismatch);
    }
    let tail = &seq[seq.len() / 2..];
    for i in 0..last.ball().len() {
        if tail.iter().any(|phi| phi.sign(i) != last.sign(i)) {
            return Ok(LimitOutcome::NoLimit { element: i });
        }
    }
    let limit = last.clone();
    Ok(match verify_relative_cone(&limit) {
        Ok(()) => LimitOutcome::Limit(limit),
        Err(v) if v.kind == ViolationKind::Properness => LimitOutcome::Degenerate(limit),
        Err(v) => LimitOutcome::Invalid(limit, v),
    })
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.value().cmp(&other.value())
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::ball;
    use super::super::{search_cones, Constraints, SearchOptions};
    use super::*;
    use crate::word::Letter;
    use num::One;

    fn z_cone(r: usize, up: bool) -> SignAssignment {
        let b = ball("z", r);
        SignAssignment::from_fn(b.clone(), |i| {
            let e = b.element(i).exponent_sums(1)[0];
            Some(match (e.signum(), up) {
                (0, _) => Sign::Star,
                (1, true) | (-1, false) => Sign::Pos,
                _ => Sign::Neg,
            })
        })
    }

    #[test]
    fn distances() {
        let phi = z_cone(3, true);
        assert_eq!(dist(&phi, &phi).unwrap(), Distance::AtTruncation);
        assert_eq!(dist(&phi, &phi).unwrap().value(), BigRational::zero());
        let flipped = SignAssignment::from_fn(phi.ball().clone(), |i| phi.sign(i).map(Sign::negate));
        assert_eq!(dist(&phi, &flipped).unwrap().value(), BigRational::one());
        // flip a^3 and a^-3 only
        let far = SignAssignment::from_fn(phi.ball().clone(), |i| {
            let s = phi.sign(i);
            if phi.ball().length(i) == 3 { s.map(Sign::negate) } else { s }
        });
        assert_eq!(dist(&phi, &far).unwrap().value(), BigRational::new(1.into(), 4.into()));
        assert_eq!(dist(&phi, &z_cone(3, true)), Err(AssignmentError::BallMismatch));
    }

    #[test]
    fn conjugation_in_abelian_and_klein() {
        let b = ball("z2", 2);
        let cones = search_cones(&b, &Constraints::default(), &SearchOptions::default()).cones;
        for phi in &cones {
            for g in 0..b.len() {
                let c = conjugate(phi, g);
                for h in 0..b.len() {
                    assert_eq!(c.sign(h), phi.sign(h));
                }
            }
        }
        let k = ball("klein", 2);
        let a = k.letter(Letter::new(0, false)).unwrap();
        let cones = search_cones(&k, &Constraints { forced: vec![(a, Sign::Star)], ..Default::default() }, &SearchOptions::default()).cones;
        for phi in &cones {
            let c = conjugate(phi, a);
            for h in 0..k.len() {
                if c.sign(h).is_some() {
                    assert_eq!(c.sign(h), phi.sign(h));
                }
            }
            assert_eq!(stabilizer_fixed_check(phi), StabilizerReport::Pass);
            assert_eq!(conjugate(phi, 0), *phi);
        }
    }

    #[test]
    fn corrupted_cone_fails_stabilizer_check() {
        let k = ball("klein", 3);
        let a = k.letter(Letter::new(0, false)).unwrap();
        let bgen = k.letter(Letter::new(1, false)).unwrap();
        let phi = search_cones(&k, &Constraints { forced: vec![(a, Sign::Star)], ..Default::default() }, &SearchOptions::default())
            .cones
            .remove(0);
        // a b a^-1 is conjugate to b by an element of C
        let target = k.locate(&k.element(a).concat(k.element(bgen)).concat(&k.element(a).inverse())).unwrap().inside().unwrap();
        let bad = phi.clone().with_sign(target, phi.sign(target).map(Sign::negate));
        match stabilizer_fixed_check(&bad) {
            StabilizerReport::Violation { c, h } => {
                let conj = conjugate(&bad, c);
                assert_ne!(conj.sign(h), bad.sign(h));
            }
            StabilizerReport::Pass => panic!("corruption not detected"),
        }
    }

    #[test]
    fn limits() {
        let phi = z_cone(2, true);
        let psi = SignAssignment::from_fn(phi.ball().clone(), |i| phi.sign(i).map(Sign::negate));
        let seq = vec![psi.clone(), psi.clone(), phi.clone(), phi.clone(), phi.clone(), phi.clone()];
        assert!(matches!(limit_of_sequence(&seq).unwrap(), LimitOutcome::Limit(l) if l == phi));
        let alt: Vec<_> = (0..8).map(|k| if k % 2 == 0 { phi.clone() } else { psi.clone() }).collect();
        assert!(matches!(limit_of_sequence(&alt).unwrap(), LimitOutcome::NoLimit { .. }));
        let star = SignAssignment::from_fn(phi.ball().clone(), |_| Some(Sign::Star));
        assert!(matches!(limit_of_sequence(&[phi.clone(), star.clone(), star]).unwrap(), LimitOutcome::Degenerate(_)));
        assert_eq!(limit_of_sequence(&[]).unwrap_err(), AssignmentError::EmptySequence);
    }
}
