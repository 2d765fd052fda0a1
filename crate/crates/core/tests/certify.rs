use num::{BigInt, Zero};
use proptest::prelude::*;

use ordelab_core::catalog;
use ordelab_core::certify::{
    abelianize, certify_surjection, pipeline_check, smith_normal_form, Certificate, IntegerMatrix, PipelineBounds,
    Verdict,
};
use ordelab_core::parse_presentation;

fn matrix() -> impl Strategy<Value = IntegerMatrix> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-9i64..10, c), r).prop_map(move |rows| IntegerMatrix::from_rows(c, rows))
    })
}

proptest! {
    #[test]
    fn smith_form_remultiplies(m in matrix()) {
        let s = smith_normal_form(&m);
        prop_assert!(s.check(&m));
        // the transforms are invertible over Z: their own Smith forms are all ones
        for t in [&s.left, &s.right] {
            prop_assert!(smith_normal_form(t).diagonal.iter().all(|d| *d == BigInt::from(1)));
        }
    }

    #[test]
    fn certificates_verify(m in matrix()) {
        let cols = m.cols();
        let rows: Vec<String> = (0..m.rows())
            .map(|i| {
                let parts: Vec<String> = (0..cols)
                    .filter(|&j| !m.get(i, j).is_zero())
                    .map(|j| format!("{}^{}", ["a", "b", "c", "d"][j], m.get(i, j)))
                    .collect();
                // a zero row is written as an equation so the relator may be empty
                format!("{} = id", if parts.is_empty() { "id".to_string() } else { parts.join(" ") })
            })
            .collect();
        let names = ["a", "b", "c", "d"][..cols].join(", ");
        let p = parse_presentation(&format!("< {names} | {} >", rows.join(", "))).unwrap();
        prop_assert_eq!(&abelianize(&p), &m);
        let c = certify_surjection(&p);
        prop_assert!(c.verify(&m));
        let free_rank = smith_normal_form(&m).diagonal.iter().filter(|d| !d.is_zero()).count() < cols;
        prop_assert_eq!(c.surjects(), free_rank);
    }
}

#[test]
fn catalog_certificates() {
    for e in catalog::CATALOG {
        for (label, p) in e.all_presentations() {
            let c = certify_surjection(&p);
            assert!(c.verify(&abelianize(&p)), "{} {label}", e.name);
            assert_eq!(c.surjects(), e.name != "p237", "{} {label}", e.name);
        }
    }
    let p = parse_presentation("< a, b, c | a^2 = a b c ; b^3 = a b c ; c^7 = a b c >").unwrap();
    let ones = vec![BigInt::from(1); 3];
    assert_eq!(certify_surjection(&p), Certificate::NoSurjection { diagonal: ones });
}

#[test]
fn finite_abelian_quotient_is_no_surjection() {
    let p = parse_presentation("< a, b | a^2, b^3, a b a^-1 b^-1 >").unwrap();
    let c = certify_surjection(&p);
    assert_eq!(c.display(&p.alphabet), "NO-SURJECTION diag(1,6)");
}

#[test]
fn pipeline_on_small_groups() {
    let bounds = PipelineBounds::default();
    for name in ["z", "z2", "klein", "f2"] {
        let r = pipeline_check(catalog::lookup(name).unwrap(), 2, &bounds, false, false).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent, "{name}");
        assert!(r.certificate_verified);
    }
    let p = pipeline_check(catalog::lookup("p237").unwrap(), 2, &bounds, true, false).unwrap();
    assert_ne!(p.verdict, Verdict::Inconsistent);
    assert!(!p.certificate.surjects());
    let records = p.to_records();
    assert!(records.lines().all(|l| l.contains('\t')));
    assert!(records.ends_with(&format!("verdict\t{}\n", p.verdict.as_str())));
}
