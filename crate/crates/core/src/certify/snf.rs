use num::{BigInt, Integer, Signed, Zero};

use super::IntegerMatrix;

/// `left * m * right` is diagonal with `diagonal[i] | diagonal[i + 1]`;
/// both transforms are unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    /// `min(rows, cols)` entries, non-negative.
    pub diagonal: Vec<BigInt>,
    pub left: IntegerMatrix,
    pub right: IntegerMatrix,
}

impl Snf {
    /// Recomputes `left * m * right` and compares it with the diagonal.
    pub fn check(&self, m: &IntegerMatrix) -> bool {
        let d = self.left.mul(m).mul(&self.right);
        let diagonal_ok = (0..d.rows()).all(|i| {
            (0..d.cols()).all(|j| if i == j { d.get(i, j) == &self.diagonal[i] } else { d.get(i, j).is_zero() })
        });
        let chain_ok = self.diagonal.windows(2).all(|w| w[1].is_multiple_of(&w[0]) || w[0].is_zero() && w[1].is_zero());
        diagonal_ok && chain_ok && self.diagonal.iter().all(|x| !x.is_negative())
    }
}

struct Work {
    a: IntegerMatrix,
    u: IntegerMatrix,
    v: IntegerMatrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        for m in [&mut self.a, &mut self.u] {
            for j in 0..m.cols() {
                let x = m.get(i, j).clone();
                let y = m.get(k, j).clone();
                m.set(i, j, y);
                m.set(k, j, x);
            }
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j == k {
            return;
        }
        for m in [&mut self.a, &mut self.v] {
            for i in 0..m.rows() {
                let x = m.get(i, j).clone();
                let y = m.get(i, k).clone();
                m.set(i, j, y);
                m.set(i, k, x);
            }
        }
    }

    /// row_i += q * row_k
    fn add_row(&mut self, i: usize, k: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            for j in 0..m.cols() {
                let x = m.get(i, j) + q * m.get(k, j);
                m.set(i, j, x);
            }
        }
    }

    /// col_j += q * col_k
    fn add_col(&mut self, j: usize, k: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.v] {
            for i in 0..m.rows() {
                let x = m.get(i, j) + q * m.get(i, k);
                m.set(i, j, x);
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for m in [&mut self.a, &mut self.u] {
            for j in 0..m.cols() {
                let x = -m.get(i, j);
                m.set(i, j, x);
            }
        }
    }
}

pub fn smith_normal_form(m: &IntegerMatrix) -> Snf {
    let (r, c) = (m.rows(), m.cols());
    let mut w = Work { a: m.clone(), u: IntegerMatrix::identity(r), v: IntegerMatrix::identity(c) };
    for t in 0..r.min(c) {
        loop {
            // smallest non-zero entry of the trailing block
            let pivot = (t..r)
                .flat_map(|i| (t..c).map(move |j| (i, j)))
                .filter(|&(i, j)| !w.a.get(i, j).is_zero())
                .min_by_key(|&(i, j)| w.a.get(i, j).abs());
            let Some((pi, pj)) = pivot else { break };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            let p = w.a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..r {
                let q = -w.a.get(i, t).div_floor(&p);
                w.add_row(i, t, &q);
                clean &= w.a.get(i, t).is_zero();
            }
            for j in t + 1..c {
                let q = -w.a.get(t, j).div_floor(&p);
                w.add_col(j, t, &q);
                clean &= w.a.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let stray = (t + 1..r).find(|&i| (t + 1..c).any(|j| !w.a.get(i, j).is_multiple_of(&p)));
            match stray {
                Some(i) => w.add_row(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if w.a.get(t, t).is_negative() {
            w.negate_row(t);
        }
    }
    let diagonal = (0..r.min(c)).map(|i| w.a.get(i, i).clone()).collect();
    Snf { diagonal, left: w.u, right: w.v }
}
