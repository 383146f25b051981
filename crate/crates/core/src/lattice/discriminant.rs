//! Discriminant groups L^∨/L with their finite quadratic forms.

use num_traits::{One, Zero};

use super::{divisibility, smith_normal_form, IntegerLattice, LatticeVector};
use crate::error::{input, Error, Result};
use crate::matrix::IntMatrix;
use crate::num::{int_mod, lcm, rat_mod, Int, Rat};

/// A_L = L^∨/L ≅ ⊕ Z/dᵢ with dᵢ | dᵢ₊₁, each dᵢ > 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantGroup {
    invariant_factors: Vec<Int>,
    /// Lifts of the generators in L ⊗ Q, coordinates reduced into [0, 1).
    generator_lifts: Vec<Vec<Rat>>,
    /// q(gᵢ) in [0, 2).
    q_values: Vec<Rat>,
    /// b(gᵢ, gⱼ) in [0, 1).
    bilinear: Vec<Vec<Rat>>,
    /// Rows of the left SNF transform for the nontrivial factors: the class of
    /// x ∈ L^∨ has exponents (reduction · G·x) mod dᵢ.
    reduction: IntMatrix,
    gram: IntMatrix,
}

/// An element of a discriminant group, as exponents on its generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiscClass {
    exponents: Vec<Int>,
}

impl DiscClass {
    pub fn exponents(&self) -> &[Int] {
        &self.exponents
    }

    pub fn is_identity(&self) -> bool {
        self.exponents.iter().all(Zero::is_zero)
    }
}

pub(super) fn compute(lattice: &IntegerLattice) -> Result<DiscriminantGroup> {
    lattice.require_nondegenerate("discriminant group")?;
    let g = lattice.gram();
    let r = g.rows();
    let s = smith_normal_form(g);
    let diag = s.diagonal();

    let mut invariant_factors = Vec::new();
    let mut lifts = Vec::new();
    let mut reduction_rows = Vec::new();
    for (i, d) in diag.iter().enumerate() {
        if d.is_one() {
            continue;
        }
        let lift: Vec<Rat> = (0..r)
            .map(|k| rat_mod(&Rat::new(s.q[(k, i)].clone(), d.clone()), &Rat::one()))
            .collect();
        invariant_factors.push(d.clone());
        lifts.push(lift);
        reduction_rows.push(s.p.row(i));
    }
    let reduction = if reduction_rows.is_empty() {
        IntMatrix::zeros(0, r)
    } else {
        IntMatrix::from_rows(reduction_rows)?
    };

    let two = Rat::from_integer(Int::from(2));
    let q_values = lifts
        .iter()
        .map(|x| rat_mod(&lattice.inner_rat(x, x), &two))
        .collect();
    let bilinear = lifts
        .iter()
        .map(|x| {
            lifts
                .iter()
                .map(|y| rat_mod(&lattice.inner_rat(x, y), &Rat::one()))
                .collect()
        })
        .collect();

    Ok(DiscriminantGroup {
        invariant_factors,
        generator_lifts: lifts,
        q_values,
        bilinear,
        reduction,
        gram: g.clone(),
    })
}

impl DiscriminantGroup {
    pub fn invariant_factors(&self) -> &[Int] {
        &self.invariant_factors
    }

    pub fn generator_lifts(&self) -> &[Vec<Rat>] {
        &self.generator_lifts
    }

    pub fn q_values(&self) -> &[Rat] {
        &self.q_values
    }

    pub fn bilinear_values(&self) -> &[Vec<Rat>] {
        &self.bilinear
    }

    pub fn order(&self) -> Int {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// Exponent of the group (lcm of the invariant factors).
    pub fn exponent(&self) -> Int {
        self.invariant_factors
            .iter()
            .fold(Int::one(), |acc, d| lcm(&acc, d))
    }

    pub fn identity(&self) -> DiscClass {
        DiscClass {
            exponents: vec![Int::zero(); self.invariant_factors.len()],
        }
    }

    /// Class of a rational vector x ∈ L^∨.
    pub fn class_of(&self, x: &[Rat]) -> Result<DiscClass> {
        if x.len() != self.gram.rows() {
            return input("vector length does not match the lattice rank");
        }
        let gx = self.gram.mul_rat_vec(x);
        if gx.iter().any(|c| !c.is_integer()) {
            return input("vector is not in the dual lattice");
        }
        let gx: Vec<Int> = gx.into_iter().map(|c| c.to_integer()).collect();
        let y = self.reduction.mul_vec(&gx);
        Ok(DiscClass {
            exponents: y
                .iter()
                .zip(&self.invariant_factors)
                .map(|(e, d)| int_mod(e, d))
                .collect(),
        })
    }

    /// A lift of the class into L ⊗ Q.
    pub fn lift(&self, c: &DiscClass) -> Vec<Rat> {
        let r = self.gram.rows();
        let mut out = vec![Rat::zero(); r];
        for (e, g) in c.exponents.iter().zip(&self.generator_lifts) {
            let e = Rat::from_integer(e.clone());
            for (o, x) in out.iter_mut().zip(g) {
                *o += &e * x;
            }
        }
        out
    }

    /// q(c) in [0, 2).
    pub fn q(&self, c: &DiscClass) -> Rat {
        let x = self.lift(c);
        let gx = self.gram.mul_rat_vec(&x);
        let v: Rat = x.iter().zip(&gx).map(|(a, b)| a * b).sum();
        rat_mod(&v, &Rat::from_integer(Int::from(2)))
    }

    pub fn add(&self, a: &DiscClass, b: &DiscClass) -> DiscClass {
        DiscClass {
            exponents: a
                .exponents
                .iter()
                .zip(&b.exponents)
                .zip(&self.invariant_factors)
                .map(|((x, y), d)| int_mod(&(x + y), d))
                .collect(),
        }
    }

    pub fn negate(&self, a: &DiscClass) -> DiscClass {
        DiscClass {
            exponents: a
                .exponents
                .iter()
                .zip(&self.invariant_factors)
                .map(|(x, d)| int_mod(&-x, d))
                .collect(),
        }
    }

    /// Order of an element.
    pub fn element_order(&self, c: &DiscClass) -> Int {
        use num_integer::Integer;
        c.exponents
            .iter()
            .zip(&self.invariant_factors)
            .fold(Int::one(), |acc, (e, d)| lcm(&acc, &(d / e.gcd(d))))
    }
}

/// The discriminant group of a nondegenerate lattice (cached per lattice value).
pub fn discriminant_group(lattice: &IntegerLattice) -> Result<DiscriminantGroup> {
    lattice.cached_discriminant().cloned()
}

/// Class of v/m in A_L, where m must be div(v).
pub fn disc_class(lattice: &IntegerLattice, v: &LatticeVector, m: &Int) -> Result<DiscClass> {
    let d = divisibility(lattice, v)?;
    if &d != m {
        return Err(Error::Input(format!(
            "divisor mismatch: div(v) = {d}, got {m}"
        )));
    }
    let x: Vec<Rat> = v
        .coords()
        .iter()
        .map(|c| Rat::new(c.clone(), m.clone()))
        .collect();
    lattice.cached_discriminant()?.class_of(&x)
}
