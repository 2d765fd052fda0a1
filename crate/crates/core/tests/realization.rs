use std::sync::Arc;

use num::{BigInt, BigRational};
use proptest::prelude::*;

use ordelab_core::ball::enumerate_ball;
use ordelab_core::catalog;
use ordelab_core::orders::{cone_to_coset_order, search_cones, Constraints, SearchOptions, Sign};
use ordelab_core::realization::{embed_cosets, realize, verify_realization, PLMap, RealizationReport};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Strictly increasing rationals built from positive gaps.
fn increasing(len: usize) -> impl Strategy<Value = Vec<BigRational>> {
    (-20i64..20, prop::collection::vec((1i64..9, 1i64..5), len)).prop_map(|(start, gaps)| {
        let mut x = q(start, 1);
        gaps.into_iter()
            .map(|(n, d)| {
                x = &x + q(n, d);
                x.clone()
            })
            .collect()
    })
}

fn plmap() -> impl Strategy<Value = PLMap> {
    (0usize..6).prop_flat_map(|n| (increasing(n), increasing(n))).prop_map(|(b, v)| PLMap::new(b, v).unwrap())
}

proptest! {
    #[test]
    fn maps_are_increasing_and_invertible(m in plmap(), xs in prop::collection::vec((-60i64..60, 1i64..7), 2..12)) {
        let mut pts: Vec<BigRational> = xs.into_iter().map(|(n, d)| q(n, d)).collect();
        pts.sort();
        pts.dedup();
        let inv = m.inverse();
        for w in pts.windows(2) {
            prop_assert!(m.evaluate(&w[0]) < m.evaluate(&w[1]));
        }
        for x in &pts {
            prop_assert_eq!(&inv.evaluate(&m.evaluate(x)), x);
        }
        for (b, v) in m.breakpoints().iter().zip(m.values()) {
            prop_assert_eq!(&m.evaluate(b), v);
        }
    }
}

#[test]
fn non_increasing_data_is_rejected() {
    assert!(PLMap::new(vec![q(0, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]).is_err());
    assert!(PLMap::new(vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]).is_err());
    assert!(PLMap::new(vec![q(0, 1)], vec![]).is_err());
}

#[test]
fn every_cone_is_realized_faithfully() {
    for (name, r) in [("z2", 2), ("klein", 2), ("f2", 2), ("heis", 1), ("bs12", 2)] {
        let ball = Arc::new(enumerate_ball(&catalog::lookup(name).unwrap().rewriting_system(), r).unwrap());
        for phi in search_cones(&ball, &Constraints::default(), &SearchOptions::default()).cones {
            let order = cone_to_coset_order(&phi).unwrap();
            let action = realize(&order).unwrap();
            assert_eq!(verify_realization(&action, &order, &phi), RealizationReport::Pass, "{name}");
            // the realization reads the cone back off the reference point
            let p = action.reference_point();
            for g in 0..ball.len() {
                let y = action.apply(ball.geodesic(g), p);
                let s = match y.cmp(p) {
                    std::cmp::Ordering::Greater => Sign::Pos,
                    std::cmp::Ordering::Less => Sign::Neg,
                    std::cmp::Ordering::Equal => Sign::Star,
                };
                assert_eq!(Some(s), phi.sign(g), "{name}");
            }
            // coordinates follow the coset order
            let t = embed_cosets(&order);
            let asc = order.ascending();
            assert!(asc.windows(2).all(|w| t[w[0]] < t[w[1]]), "{name}");
        }
    }
}

#[test]
fn text_tables_use_fractions() {
    let ball = Arc::new(enumerate_ball(&catalog::lookup("z").unwrap().rewriting_system(), 2).unwrap());
    let phi = &search_cones(&ball, &Constraints::default(), &SearchOptions::default()).cones[0];
    let text = realize(&cone_to_coset_order(phi).unwrap()).unwrap().to_text();
    assert!(text.starts_with("p\t0/1\n"));
    assert!(text.lines().skip(2).all(|l| l.split('\t').all(|x| x.contains('/'))));
}
