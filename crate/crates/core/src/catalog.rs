//! Built-in groups with embedded confluent rewriting systems.

use num::{BigInt, BigRational};

use crate::affine::{AffineMap, AffineModel};
use crate::presentation::{parse_presentation, GroupPresentation};
use crate::rewriting::{parse_rules, RewritingSystem};

#[derive(Clone, Copy, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Presentation whose generators the rewriting system is written over.
    pub presentation: &'static str,
    pub rules: &'static str,
    /// Further presentations of the same group, labelled.
    pub alternates: &'static [(&'static str, &'static str)],
    /// Generator images `(scale, shift)` as `(numerator, denominator)` pairs.
    pub affine: Option<&'static [((i64, i64), (i64, i64))]>,
    pub notes: &'static str,
}

impl CatalogEntry {
    pub fn presentation(&self) -> GroupPresentation {
        parse_presentation(self.presentation).expect("catalog presentation parses")
    }

    pub fn rewriting_system(&self) -> RewritingSystem {
        parse_rules(self.rules, &self.presentation().alphabet).expect("catalog rules parse")
    }

    /// The primary presentation followed by the alternates, all labelled.
    pub fn all_presentations(&self) -> Vec<(&'static str, GroupPresentation)> {
        let mut out = vec![("primary", self.presentation())];
        for (label, text) in self.alternates {
            out.push((label, parse_presentation(text).expect("catalog presentation parses")));
        }
        out
    }

    pub fn affine_model(&self) -> Option<AffineModel> {
        let q = |(n, d): (i64, i64)| BigRational::new(BigInt::from(n), BigInt::from(d));
        self.affine.map(|gens| {
            let maps = gens.iter().map(|&(s, t)| AffineMap::new(q(s), q(t))).collect();
            AffineModel::new(self.presentation().alphabet, maps).expect("catalog affine model is increasing")
        })
    }
}

const FREE: &str = "%free\n";

const Z2_RULES: &str = "\
%free
b a -> a b
b a^-1 -> a^-1 b
b^-1 a -> a b^-1
b^-1 a^-1 -> a^-1 b^-1
";

const KLEIN_RULES: &str = "\
%free
b a -> a^-1 b
b a^-1 -> a b
b^-1 a -> a^-1 b^-1
b^-1 a^-1 -> a b^-1
";

// normal forms a^i b^j c^k
const HEIS_RULES: &str = "\
%order wreath c c^-1 | b b^-1 | a a^-1
%free
b a -> a b c
b a^-1 -> a^-1 b c^-1
b^-1 a -> a b^-1 c^-1
b^-1 a^-1 -> a^-1 b^-1 c
c a -> a c
c a^-1 -> a^-1 c
c^-1 a -> a c^-1
c^-1 a^-1 -> a^-1 c^-1
c b -> b c
c b^-1 -> b^-1 c
c^-1 b -> b c^-1
c^-1 b^-1 -> b^-1 c^-1
";

const BS12_RULES: &str = "\
%order wreath b b^-1 | a a^-1
%free
b^2 a -> a b
b a^-1 -> a^-1 b^2
b^-1 a -> b a b^-1
b^-1 a^-1 -> a^-1 b^-2
";

// z = a^2 = b^3 = c^7 = abc is central; the completion only terminates
// with z on its own bottom level.
const P237_RULES: &str = "\
%order wreath z z^-1 | c c^-1 b b^-1 a a^-1
a^-1 -> a z^-1
b^-2 -> b z^-1
b^-1 c^-1 -> c b z^-1
b^-1 a -> c
b^-1 b -> 1
b^-1 c -> b a z^-1
c^-1 b^-1 -> a z^-1
c^-1 c -> 1
z^-1 b^-1 -> b^-1 z^-1
z^-1 c^-1 -> c^-1 z^-1
z^-1 a -> a z^-1
z^-1 b -> b z^-1
z^-1 c -> c z^-1
z^-1 z -> 1
a b^-1 -> c^-1 b
a c^-1 -> b
a^2 -> z
a b -> c^-1 z
b b^-1 -> 1
b^2 -> b^-1 z
b c -> a
c c^-1 -> 1
c a -> b^-1 z
z b^-1 -> b^-1 z
z c^-1 -> c^-1 z
z z^-1 -> 1
z a -> a z
z b -> b z
z c -> c z
c^-1 b a -> a c
a c b -> c^-1 b c^-1 z
c^-4 -> c^3 z^-1
c^-3 a -> c^3 b^-1
c^-1 b c^-1 b -> a c b^-1
a c^3 -> b c^-3 z
c^4 -> c^-3 z
b a c^2 b^-1 -> c b c^-2 a
c b c^-3 -> b a c^2 z^-1
b a c^2 b a -> c b c^-2 a c z
c^-3 b c^-3 -> c^3 b a c^2 z^-2
a c^2 b c^-2 a -> c^-1 b c^-1 a c^2 b^-1 z
b a c^2 b c^-1 b -> c b c^-2 a c b^-1 z
a c^2 b c^-2 b c^-3 -> c^-1 b c^-1 a c^2 b a c^2 z^-1
";

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "z",
        summary: "infinite cyclic group",
        presentation: "< a | >",
        rules: FREE,
        alternates: &[],
        affine: None,
        notes: "Archimedean; two left orders.",
    },
    CatalogEntry {
        name: "z2",
        summary: "free abelian group of rank 2",
        presentation: "< a, b | a b = b a >",
        rules: Z2_RULES,
        alternates: &[],
        affine: None,
        notes: "Bi-invariant orders only, so no crossings.",
    },
    CatalogEntry {
        name: "f2",
        summary: "free group of rank 2",
        presentation: "< a, b | >",
        rules: FREE,
        alternates: &[],
        affine: None,
        notes: "Reduced words are the normal forms.",
    },
    CatalogEntry {
        name: "klein",
        summary: "Klein bottle group",
        presentation: "< a, b | b a b^-1 a >",
        rules: KLEIN_RULES,
        alternates: &[],
        affine: None,
        notes: "<a> is relatively convex; abelianization Z + Z/2.",
    },
    CatalogEntry {
        name: "heis",
        summary: "discrete Heisenberg group",
        presentation: "< a, b, c | c = b^-1 a^-1 b a ; a c = c a ; b c = c b >",
        rules: HEIS_RULES,
        alternates: &[("two-generator", "< a, b | a (b^-1 a^-1 b a) = (b^-1 a^-1 b a) a ; b (b^-1 a^-1 b a) = (b^-1 a^-1 b a) b >")],
        affine: None,
        notes: "Nilpotent; wreath order, normal forms a^i b^j c^k.",
    },
    CatalogEntry {
        name: "bs12",
        summary: "Baumslag-Solitar group BS(1,2)",
        presentation: "< a, b | a b a^-1 = b^2 >",
        rules: BS12_RULES,
        alternates: &[],
        affine: Some(&[((2, 1), (0, 1)), ((1, 1), (1, 1))]),
        notes: "Affine model a: x -> 2x, b: x -> x + 1 on the dyadic orbit of 0; the stabilizer of 0 is <a>.",
    },
    CatalogEntry {
        name: "p237",
        summary: "perfect group a^2 = b^3 = c^7 = abc",
        presentation: "< a, b, c, z | a^2 = z ; b^3 = z ; c^7 = z ; a b c = z ; z a = a z ; z b = b z ; z c = c z >",
        rules: P237_RULES,
        alternates: &[
            ("three-generator", "< a, b, c | a^2 = a b c ; b^3 = a b c ; c^7 = a b c >"),
            ("two-generator", "< a, b | a^2 = b^3 ; (b^-1 a)^7 = a^2 >"),
        ],
        affine: None,
        notes: "Central extension of the (2,3,7) triangle group; abelianization is trivial.",
    },
];

pub fn lookup(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewriting::ConfluenceReport;

    #[test]
    fn every_entry_is_confluent_and_kills_its_relators() {
        for e in CATALOG {
            let rws = e.rewriting_system();
            let report = rws.check_confluence(1_000_000).unwrap();
            assert!(matches!(report, ConfluenceReport::Confluent { .. }), "{}: {report:?}", e.name);
            for r in &e.presentation().relators {
                assert!(rws.normalize(r).unwrap().is_empty(), "{}: relator survives", e.name);
            }
        }
    }

    #[test]
    fn affine_models_satisfy_relators() {
        for e in CATALOG {
            if let Some(m) = e.affine_model() {
                assert_eq!(m.failing_relator(&e.presentation()), None, "{}", e.name);
            }
        }
    }

    #[test]
    fn alternates_parse() {
        for e in CATALOG {
            assert_eq!(e.all_presentations().len(), 1 + e.alternates.len());
        }
    }
}
