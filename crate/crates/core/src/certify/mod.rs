//! Surjections onto Z from the abelianized relator matrix.

mod pipeline;
mod snf;

use std::fmt;

use num::{BigInt, Integer, One, Zero};

use crate::presentation::GroupPresentation;
use crate::word::Alphabet;

pub use pipeline::{pipeline_check, ConeCheck, PipelineBounds, PipelineError, PipelineReport, Verdict};
pub use snf::{smith_normal_form, Snf};

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntegerMatrix {
        IntegerMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> IntegerMatrix {
        let mut m = IntegerMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<i64>>) -> IntegerMatrix {
        let n = rows.len();
        let data = rows
            .into_iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged matrix");
                r.into_iter().map(BigInt::from)
            })
            .collect();
        IntegerMatrix { rows: n, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", row.join(","))?;
        }
        write!(f, "]")
    }
}

/// Exponent sums of each relator: rows are relators, columns generators.
pub fn abelianize(p: &GroupPresentation) -> IntegerMatrix {
    let k = p.alphabet.rank();
    IntegerMatrix::from_rows(k, p.relators.iter().map(|r| r.exponent_sums(k)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Images of the generators in Z: content 1, killing every relator.
    Surjects { image: Vec<BigInt> },
    /// Smith diagonal, one entry per generator, none zero.
    NoSurjection { diagonal: Vec<BigInt> },
}

impl Certificate {
    pub fn surjects(&self) -> bool {
        matches!(self, Certificate::Surjects { .. })
    }

    /// Re-checks the certificate against the relator matrix.
    pub fn verify(&self, m: &IntegerMatrix) -> bool {
        match self {
            Certificate::Surjects { image } => {
                let content = image.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
                image.len() == m.cols() && content.is_one() && m.apply(image).iter().all(Zero::is_zero)
            }
            Certificate::NoSurjection { diagonal } => {
                let snf = smith_normal_form(m);
                diagonal.len() == m.cols()
                    && diagonal.iter().all(|d| !d.is_zero())
                    && diagonal.windows(2).all(|w| w[1].is_multiple_of(&w[0]))
                    && snf.diagonal.iter().zip(diagonal).all(|(a, b)| a == b)
            }
        }
    }

    pub fn display(&self, alphabet: &Alphabet) -> String {
        match self {
            Certificate::Surjects { image } => {
                let parts: Vec<String> =
                    image.iter().enumerate().map(|(j, x)| format!("{}->{}", alphabet.name(j), x)).collect();
                format!("SURJECTS {}", parts.join(" "))
            }
            Certificate::NoSurjection { diagonal } => {
                let d: Vec<String> = diagonal.iter().map(|x| x.to_string()).collect();
                format!("NO-SURJECTION diag({})", d.join(","))
            }
        }
    }
}

/// A surjection onto Z exists iff the abelianization has positive free rank;
/// the image vector is a column of the right Smith transform over a zero pivot.
pub fn certify_surjection(p: &GroupPresentation) -> Certificate {
    let m = abelianize(p);
    let snf = smith_normal_form(&m);
    let free = (0..m.cols()).find(|&j| snf.diagonal.get(j).is_none_or(Zero::is_zero));
    match free {
        Some(j) => Certificate::Surjects { image: snf.right.column(j) },
        None => Certificate::NoSurjection { diagonal: snf.diagonal },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::presentation::parse_presentation;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn abelianized_relators() {
        let klein = parse_presentation("< a, b | b a b^-1 a >").unwrap();
        assert_eq!(abelianize(&klein), IntegerMatrix::from_rows(2, vec![vec![2, 0]]));
        let z2 = parse_presentation("< a, b | a b a^-1 b^-1 >").unwrap();
        assert_eq!(abelianize(&z2), IntegerMatrix::from_rows(2, vec![vec![0, 0]]));
    }

    #[test]
    fn certificates() {
        let z2 = parse_presentation("< a, b | a b a^-1 b^-1 >").unwrap();
        assert_eq!(certify_surjection(&z2), Certificate::Surjects { image: ints(&[1, 0]) });
        let klein = parse_presentation("< a, b | b a b^-1 a >").unwrap();
        let c = certify_surjection(&klein);
        assert_eq!(c, Certificate::Surjects { image: ints(&[0, 1]) });
        assert!(c.verify(&abelianize(&klein)));
        let p = catalog::lookup("p237").unwrap();
        for (_, pres) in p.all_presentations() {
            let c = certify_surjection(&pres);
            assert!(!c.surjects());
            assert!(c.verify(&abelianize(&pres)));
        }
    }

    #[test]
    fn forged_certificates_fail() {
        let klein = parse_presentation("< a, b | b a b^-1 a >").unwrap();
        let m = abelianize(&klein);
        assert!(!Certificate::Surjects { image: ints(&[1, 0]) }.verify(&m));
        assert!(!Certificate::Surjects { image: ints(&[0, 2]) }.verify(&m));
        assert!(!Certificate::NoSurjection { diagonal: ints(&[2, 1]) }.verify(&m));
    }
}
