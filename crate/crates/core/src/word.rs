//! Letters, words and generator alphabets.

use std::fmt;

/// A generator symbol together with an exponent of +1 or -1.
///
/// Letters are packed as `2 * generator + inverse`, so the derived ordering
/// is `a < a^-1 < b < b^-1 < ...` in declaration order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter(u32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Letter {
        Letter((generator as u32) << 1 | inverse as u32)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    /// Dense index in `0..2 * rank`.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(index: usize) -> Letter {
        Letter(index as u32)
    }
}

/// A finite sequence of letters. Words need not be freely reduced.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `self^k` for any integer `k`; negative powers use the inverse word.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word(v)
    }

    /// Cancels adjacent `x x^-1` pairs until none remain.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Total exponent of each generator, indexed by generator.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut sums = vec![0i64; rank];
        for l in &self.0 {
            sums[l.generator()] += if l.is_inverse() { -1 } else { 1 };
        }
        sums
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> WordDisplay<'a> {
        WordDisplay { word: self, alphabet }
    }
}

/// Shortlex comparison relative to the letter ordering.
pub fn shortlex_cmp(x: &[Letter], y: &[Letter]) -> std::cmp::Ordering {
    x.len().cmp(&y.len()).then_with(|| x.cmp(y))
}

/// Generator names of a presentation, in declaration order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new(names: Vec<String>) -> Alphabet {
        Alphabet { names }
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, generator: usize) -> &str {
        &self.names[generator]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// All letters in the default order `a, a^-1, b, b^-1, ...`.
    pub fn letters(&self) -> Vec<Letter> {
        (0..2 * self.rank()).map(Letter::from_index).collect()
    }

    pub fn generator_word(&self, generator: usize) -> Word {
        Word::letter(Letter::new(generator, false))
    }

    pub fn letter_name(&self, l: Letter) -> String {
        if l.is_inverse() {
            format!("{}^-1", self.names[l.generator()])
        } else {
            self.names[l.generator()].clone()
        }
    }
}

/// Prints a word with runs collapsed to powers, e.g. `a^2 b^-1`; the identity
/// prints as `id`. The output parses back with [`crate::parse_word`].
pub struct WordDisplay<'a> {
    word: &'a Word,
    alphabet: &'a Alphabet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = self.word.letters();
        if letters.is_empty() {
            return f.write_str("id");
        }
        let mut i = 0;
        let mut first = true;
        while i < letters.len() {
            let l = letters[i];
            let mut run = 1;
            while i + run < letters.len() && letters[i + run] == l {
                run += 1;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let name = self.alphabet.name(l.generator());
            match (run, l.is_inverse()) {
                (1, false) => write!(f, "{name}")?,
                (1, true) => write!(f, "{name}^-1")?,
                (k, false) => write!(f, "{name}^{k}")?,
                (k, true) => write!(f, "{name}^-{k}")?,
            }
            i += run;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(vec!["a".into(), "b".into()])
    }

    fn w(spec: &str) -> Word {
        // lowercase = generator, uppercase = inverse
        Word::from_letters(
            spec.chars()
                .map(|c| Letter::new((c.to_ascii_lowercase() as u8 - b'a') as usize, c.is_uppercase()))
                .collect(),
        )
    }

    #[test]
    fn free_reduction_examples() {
        assert_eq!(w("aAb").free_reduce(), w("b"));
        assert_eq!(Word::empty().free_reduce(), Word::empty());
        assert_eq!(w("abBA").free_reduce(), Word::empty());
    }

    #[test]
    fn letter_order_puts_inverse_after_generator() {
        let a = Letter::new(0, false);
        assert!(a < a.inverse());
        assert!(a.inverse() < Letter::new(1, false));
    }

    #[test]
    fn display_collapses_runs() {
        assert_eq!(w("aaB").display(&ab()).to_string(), "a^2 b^-1");
        assert_eq!(w("AAAb").display(&ab()).to_string(), "a^-3 b");
        assert_eq!(Word::empty().display(&ab()).to_string(), "id");
    }

    #[test]
    fn pow_and_inverse() {
        assert_eq!(w("ab").pow(-2), w("BABA"));
        assert_eq!(w("ab").pow(0), Word::empty());
        assert_eq!(w("aB").inverse(), w("bA"));
    }

    #[test]
    fn exponent_sums_count_signed_letters() {
        assert_eq!(w("babA").exponent_sums(2), vec![0, 2]);
    }
}
