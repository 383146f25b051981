//! Smith and Hermite normal forms over the integers.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;
use crate::num::Int;

/// `p * m * q == d` with `p`, `q` unimodular and `d` diagonal, d₁ | d₂ | …
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub p: IntMatrix,
    pub q: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries, `min(rows, cols)` of them; zeros trail.
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

fn smallest_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < a[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut p = IntMatrix::identity(rows);
    let mut q = IntMatrix::identity(cols);
    let one = Int::one();

    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = smallest_nonzero(&a, t) else {
            break;
        };
        a.swap_rows(t, pi);
        p.swap_rows(t, pi);
        a.swap_cols(t, pj);
        q.swap_cols(t, pj);

        loop {
            let mut changed = false;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let f = -a[(i, t)].div_floor(&a[(t, t)]);
                a.add_row_multiple(i, t, &f);
                p.add_row_multiple(i, t, &f);
                if !a[(i, t)].is_zero() {
                    a.swap_rows(t, i);
                    p.swap_rows(t, i);
                    changed = true;
                }
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let f = -a[(t, j)].div_floor(&a[(t, t)]);
                a.add_col_multiple(j, t, &f);
                q.add_col_multiple(j, t, &f);
                if !a[(t, j)].is_zero() {
                    a.swap_cols(t, j);
                    q.swap_cols(t, j);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            let piv = a[(t, t)].clone();
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !(&a[(i, j)] % &piv).is_zero()));
            match offender {
                Some(i) => {
                    a.add_row_multiple(t, i, &one);
                    p.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            p.negate_row(t);
        }
    }
    SmithForm { d: a, p, q }
}

/// Row-style Hermite normal form of the row span; zero rows dropped.
pub fn hermite_rows(rows: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<Int>> = rows.to_vec();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        loop {
            // bring the smallest nonzero |a[i][c]|, i >= r, to row r
            let Some(best) = (r..a.len())
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&x, &y| a[x][c].abs().cmp(&a[y][c].abs()))
            else {
                break;
            };
            a.swap(r, best);
            let mut done = true;
            for i in r + 1..a.len() {
                if a[i][c].is_zero() {
                    continue;
                }
                let f = a[i][c].div_floor(&a[r][c]);
                for j in 0..ncols {
                    let v = &f * &a[r][j];
                    a[i][j] -= v;
                }
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < a.len() && !a[r][c].is_zero() {
            if a[r][c].is_negative() {
                for x in a[r].iter_mut() {
                    *x = -&*x;
                }
            }
            for i in 0..r {
                let f = a[i][c].div_floor(&a[r][c]);
                if f.is_zero() {
                    continue;
                }
                for j in 0..ncols {
                    let v = &f * &a[r][j];
                    a[i][j] -= v;
                }
            }
            r += 1;
        }
    }
    a.truncate(r);
    a
}
