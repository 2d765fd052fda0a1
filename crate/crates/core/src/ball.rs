//! Cayley balls: the elements of word length at most `r`, interned by normal form.

use std::collections::HashMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use thiserror::Error;

use crate::rewriting::{canonical_cmp, RewriteError, RewritingSystem};
use crate::word::{Alphabet, Letter, Word};

pub const DEFAULT_BALL_CAP: usize = 200_000;

const OUTSIDE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BallError {
    #[error("ball exceeds the cap of {cap} elements")]
    TooManyElements { cap: usize },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

/// Result of a product that may leave the ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Product {
    Inside(usize),
    Outside(Word),
}

impl Product {
    pub fn inside(&self) -> Option<usize> {
        match self {
            Product::Inside(i) => Some(*i),
            Product::Outside(_) => None,
        }
    }
}

/// Elements are indexed by (length, shortlex of normal form); index 0 is the identity.
#[derive(Debug)]
pub struct Ball {
    rws: RewritingSystem,
    radius: usize,
    elements: Vec<Word>,
    geodesics: Vec<Word>,
    lengths: Vec<usize>,
    spheres: Vec<usize>,
    index: HashMap<Word, usize>,
    inverses: Vec<usize>,
    letters: Vec<Option<usize>>,
    table: OnceLock<Vec<u32>>,
}

pub fn enumerate_ball(rws: &RewritingSystem, radius: usize) -> Result<Ball, BallError> {
    enumerate_ball_capped(rws, radius, DEFAULT_BALL_CAP)
}

pub fn enumerate_ball_capped(rws: &RewritingSystem, radius: usize, cap: usize) -> Result<Ball, BallError> {
    let letters = rws.alphabet().letters();
    let mut elements = vec![Word::empty()];
    let mut geodesics = vec![Word::empty()];
    let mut lengths = vec![0];
    let mut spheres = vec![0, 1];
    let mut index: HashMap<Word, usize> = HashMap::from([(Word::empty(), 0)]);
    for k in 1..=radius {
        let prev = spheres[k - 1]..spheres[k];
        let mut fresh: Vec<(Word, Word)> = Vec::new();
        let mut seen: HashMap<Word, ()> = HashMap::new();
        for i in prev {
            for &l in &letters {
                let nf = rws.normalize(&elements[i].concat(&Word::letter(l)))?;
                if index.contains_key(&nf) || seen.contains_key(&nf) {
                    continue;
                }
                seen.insert(nf.clone(), ());
                fresh.push((nf, geodesics[i].concat(&Word::letter(l))));
            }
        }
        fresh.sort_by(|x, y| canonical_cmp(&x.0, &y.0));
        if elements.len() + fresh.len() > cap {
            return Err(BallError::TooManyElements { cap });
        }
        for (nf, geo) in fresh {
            index.insert(nf.clone(), elements.len());
            elements.push(nf);
            geodesics.push(geo);
            lengths.push(k);
        }
        spheres.push(elements.len());
    }
    let mut inverses = Vec::with_capacity(elements.len());
    for w in &elements {
        let inv = rws.normalize(&w.inverse())?;
        inverses.push(*index.get(&inv).expect("balls are closed under inversion"));
    }
    let letter_index = letters
        .iter()
        .map(|&l| rws.normalize(&Word::letter(l)).map(|nf| index.get(&nf).copied()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Ball {
        rws: rws.clone(),
        radius,
        elements,
        geodesics,
        lengths,
        spheres,
        index,
        inverses,
        letters: letter_index,
        table: OnceLock::new(),
    })
}

impl Ball {
    pub fn rws(&self) -> &RewritingSystem {
        &self.rws
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.rws.alphabet()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Normal form of element `i`.
    pub fn element(&self, i: usize) -> &Word {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[Word] {
        &self.elements
    }

    /// A geodesic word for element `i`, found by the breadth-first search.
    pub fn geodesic(&self, i: usize) -> &Word {
        &self.geodesics[i]
    }

    /// Word length of element `i` in the generating set.
    pub fn length(&self, i: usize) -> usize {
        self.lengths[i]
    }

    /// Indices of the sphere of radius `k`.
    pub fn sphere(&self, k: usize) -> std::ops::Range<usize> {
        self.spheres[k]..self.spheres[k + 1]
    }

    /// Number of elements of length at most `k`.
    pub fn size_at(&self, k: usize) -> usize {
        self.spheres[k.min(self.radius) + 1]
    }

    pub fn index_of(&self, normal_form: &Word) -> Option<usize> {
        self.index.get(normal_form).copied()
    }

    /// Normalizes an arbitrary word and locates it.
    pub fn locate(&self, w: &Word) -> Result<Product, RewriteError> {
        let nf = self.rws.normalize(w)?;
        Ok(match self.index.get(&nf) {
            Some(&i) => Product::Inside(i),
            None => Product::Outside(nf),
        })
    }

    /// Ball index of a single letter, when the radius is positive.
    pub fn letter(&self, l: Letter) -> Option<usize> {
        self.letters[l.index()]
    }

    /// Ball indices of the positive generators.
    pub fn generator_elements(&self) -> Vec<usize> {
        (0..self.alphabet().rank()).filter_map(|g| self.letter(Letter::new(g, false))).collect()
    }

    pub fn invert(&self, i: usize) -> usize {
        self.inverses[i]
    }

    /// # Panics
    /// Panics if the rewriting system exhausts its step budget on a product of
    /// two ball elements.
    pub fn multiply(&self, i: usize, j: usize) -> Product {
        if let Some(t) = self.table.get() {
            let k = t[i * self.len() + j];
            if k != OUTSIDE {
                return Product::Inside(k as usize);
            }
        }
        let nf = self.rws.multiply(&self.elements[i], &self.elements[j]).expect("rewrite budget exceeded in ball product");
        match self.index.get(&nf) {
            Some(&k) => Product::Inside(k),
            None => Product::Outside(nf),
        }
    }

    /// In-ball product from the cached table.
    pub fn product(&self, i: usize, j: usize) -> Option<usize> {
        let k = self.product_table()[i * self.len() + j];
        (k != OUTSIDE).then_some(k as usize)
    }

    /// `n × n` table of in-ball products, computed on first use.
    fn product_table(&self) -> &[u32] {
        self.table.get_or_init(|| {
            let n = self.len();
            (0..n)
                .into_par_iter()
                .flat_map_iter(|i| {
                    (0..n).map(move |j| {
                        let nf = self
                            .rws
                            .multiply(&self.elements[i], &self.elements[j])
                            .expect("rewrite budget exceeded in ball product");
                        self.index.get(&nf).map_or(OUTSIDE, |&k| k as u32)
                    })
                })
                .collect()
        })
    }

    pub fn display(&self, i: usize) -> String {
        self.elements[i].display(self.alphabet()).to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::presentation::parse_word;

    fn ball(name: &str, r: usize) -> Ball {
        enumerate_ball(&catalog::lookup(name).unwrap().rewriting_system(), r).unwrap()
    }

    #[test]
    fn sizes() {
        assert_eq!(ball("z2", 1).len(), 5);
        assert_eq!(ball("f2", 2).len(), 17);
        assert_eq!(ball("klein", 0).len(), 1);
        assert_eq!(ball("z", 3).len(), 7);
        assert_eq!(ball("z2", 2).len(), 13);
    }

    #[test]
    fn outside_products_carry_normal_form() {
        let b = ball("z", 2);
        let a2 = b.index_of(&parse_word("a^2", b.alphabet()).unwrap()).unwrap();
        let a = b.letter(Letter::new(0, false)).unwrap();
        assert_eq!(b.multiply(a2, a), Product::Outside(parse_word("a^3", b.alphabet()).unwrap()));
        assert_eq!(b.product(a2, a), None);
    }

    #[test]
    fn z2_commutes_in_ball() {
        let b = ball("z2", 2);
        let a = b.letter(Letter::new(0, false)).unwrap();
        let bb = b.letter(Letter::new(1, false)).unwrap();
        let ab = b.index_of(&parse_word("a b", b.alphabet()).unwrap()).unwrap();
        assert_eq!(b.multiply(a, bb), Product::Inside(ab));
        assert_eq!(b.multiply(bb, a), Product::Inside(ab));
    }

    #[test]
    fn inversion() {
        let b = ball("f2", 2);
        assert_eq!(b.invert(0), 0);
        let ab = b.index_of(&parse_word("a b", b.alphabet()).unwrap()).unwrap();
        assert_eq!(b.element(b.invert(ab)), &parse_word("b^-1 a^-1", b.alphabet()).unwrap());
        let k = ball("klein", 2);
        let ba = k.locate(&parse_word("b a", k.alphabet()).unwrap()).unwrap().inside().unwrap();
        let expect = k.rws().normalize(&parse_word("a^-1 b^-1", k.alphabet()).unwrap()).unwrap();
        assert_eq!(k.element(k.invert(ba)), &expect);
    }

    #[test]
    fn identity_first_and_lengths_sorted() {
        let b = ball("heis", 2);
        assert!(b.element(0).is_empty());
        for i in 1..b.len() {
            assert!(b.length(i - 1) <= b.length(i));
        }
        assert_eq!(b.sphere(1).len(), 6);
    }

    #[test]
    fn cap_is_enforced() {
        let rws = catalog::lookup("f2").unwrap().rewriting_system();
        assert_eq!(enumerate_ball_capped(&rws, 3, 20).unwrap_err(), BallError::TooManyElements { cap: 20 });
    }
}
