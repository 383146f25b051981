//! Fincke–Pohst enumeration of lattice points in an ellipsoid, in exact
//! rational arithmetic.

use num_traits::{Signed, Zero};

use super::{signature, IntegerLattice, LatticeVector};
use crate::error::{input, Error, Result};
use crate::matrix::to_rat_rows;
use crate::num::{floor_sqrt_rat, Int, Rat};

pub const MAX_CELLS_ENV: &str = "WALLKIT_MAX_CELLS";
const DEFAULT_MAX_CELLS: u64 = 100_000_000;

/// Budget on the number of enumeration nodes visited.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub max_cells: u64,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            max_cells: DEFAULT_MAX_CELLS,
        }
    }
}

impl EnumerationLimits {
    /// Reads `WALLKIT_MAX_CELLS`, falling back to 10^8.
    pub fn from_env() -> Self {
        let max_cells = std::env::var(MAX_CELLS_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_CELLS);
        EnumerationLimits { max_cells }
    }

    pub(crate) fn charge(&self, used: &mut u64, n: u64) -> Result<()> {
        *used += n;
        if *used > self.max_cells {
            return Err(Error::LimitExceeded(format!(
                "more than {} cells; raise {MAX_CELLS_ENV} to continue",
                self.max_cells
            )));
        }
        Ok(())
    }
}

/// Quadratic completion Q(x) = Σ qᵢᵢ (xᵢ + Σ_{j>i} qᵢⱼ xⱼ)².
fn completion(gram: &[Vec<Rat>]) -> Result<Vec<Vec<Rat>>> {
    let k = gram.len();
    let mut q = gram.to_vec();
    for i in 0..k {
        if !q[i][i].is_positive() {
            return input("form is not positive definite");
        }
        for j in i + 1..k {
            q[j][i] = q[i][j].clone();
            let v = &q[i][j] / &q[i][i];
            q[i][j] = v;
        }
        for l in i + 1..k {
            for j in l..k {
                let v = &q[l][i] * &q[i][j];
                q[l][j] -= v;
            }
        }
    }
    Ok(q)
}

struct Ball<'a, F> {
    q: Vec<Vec<Rat>>,
    bound: Rat,
    limits: EnumerationLimits,
    used: u64,
    x: Vec<Int>,
    visit: &'a mut F,
}

impl<F: FnMut(&[Int], &Rat)> Ball<'_, F> {
    fn recurse(&mut self, i: usize, remaining: Rat) -> Result<()> {
        let k = self.x.len();
        let mut c = Rat::zero();
        for j in i + 1..k {
            if !self.x[j].is_zero() {
                c += &self.q[i][j] * Rat::from_integer(self.x[j].clone());
            }
        }
        let s = &remaining / &self.q[i][i];
        let r = floor_sqrt_rat(&s);
        let centre = -c.clone();
        let lo: Int = centre.floor().to_integer() - &r - 1;
        let hi: Int = centre.ceil().to_integer() + &r + 1;
        let mut xi = lo;
        while xi <= hi {
            self.limits.charge(&mut self.used, 1)?;
            let t = Rat::from_integer(xi.clone()) + &c;
            let val = &self.q[i][i] * &t * &t;
            if val <= remaining {
                self.x[i] = xi.clone();
                let rest = &remaining - &val;
                if i == 0 {
                    let norm = &self.bound - &rest;
                    (self.visit)(&self.x, &norm);
                } else {
                    self.recurse(i - 1, rest)?;
                }
            }
            xi += 1;
        }
        self.x[i] = Int::zero();
        Ok(())
    }
}

/// Calls `visit(x, Q(x))` for every integer vector with xᵀ·Q·x ≤ bound, for a
/// positive definite rational Gram matrix Q. Visiting order is unspecified.
pub fn enumerate_ball<F>(
    gram: &[Vec<Rat>],
    bound: &Rat,
    limits: EnumerationLimits,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&[Int], &Rat),
{
    let k = gram.len();
    if bound.is_negative() {
        return Ok(());
    }
    if k == 0 {
        visit(&[], &Rat::zero());
        return Ok(());
    }
    let q = completion(gram)?;
    let mut ball = Ball {
        q,
        bound: bound.clone(),
        limits,
        used: 0,
        x: vec![Int::zero(); k],
        visit: &mut visit,
    };
    ball.recurse(k - 1, bound.clone())
}

/// All x with (x, x) = target in a definite lattice, sorted lexicographically.
pub fn short_vectors(lattice: &IntegerLattice, target: &Int) -> Result<Vec<LatticeVector>> {
    short_vectors_with_limits(lattice, target, EnumerationLimits::from_env())
}

pub fn short_vectors_with_limits(
    lattice: &IntegerLattice,
    target: &Int,
    limits: EnumerationLimits,
) -> Result<Vec<LatticeVector>> {
    let rank = lattice.rank();
    let (p, n) = signature(lattice)?;
    let negate = if rank == 0 || p == rank {
        false
    } else if n == rank {
        true
    } else {
        return input(format!("short_vectors needs a definite lattice, got signature ({p},{n})"));
    };
    if (negate && target.is_positive()) || (!negate && target.is_negative()) {
        return input(format!("norm {target} is not attained by a lattice of this sign"));
    }
    let mut gram = to_rat_rows(lattice.gram());
    if negate {
        for row in gram.iter_mut() {
            for x in row.iter_mut() {
                *x = -&*x;
            }
        }
    }
    let want = Rat::from_integer(target.abs());
    let mut out = Vec::new();
    enumerate_ball(&gram, &want, limits, |x, norm| {
        if *norm == want {
            out.push(LatticeVector::new(x.to_vec()));
        }
    })?;
    out.sort();
    Ok(out)
}
