//! Orbit invariants under the stable orthogonal group.

use num_traits::Zero;

use crate::error::{input, Error, Result};
use crate::lattice::{
    disc_class, divisibility, inner, is_primitive, DiscClass, IntegerLattice, LatticeVector,
};
use crate::num::Int;

/// (v², div v, [v / div v] ∈ A_L).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EichlerInvariants {
    pub square: Int,
    pub div: Int,
    pub class: DiscClass,
}

pub fn eichler_invariants(lattice: &IntegerLattice, v: &LatticeVector) -> Result<EichlerInvariants> {
    if !is_primitive(lattice, v)? {
        return input(format!("{v} is not primitive"));
    }
    let square = inner(lattice, v, v)?;
    let div = divisibility(lattice, v)?;
    let class = disc_class(lattice, v, &div)?;
    Ok(EichlerInvariants { square, div, class })
}

/// Equality of the invariant triples. This decides the orbit only when the
/// lattice contains two orthogonal hyperbolic planes, so any other lattice is
/// refused.
pub fn same_orbit(lattice: &IntegerLattice, v: &LatticeVector, w: &LatticeVector) -> Result<bool> {
    if !lattice.has_two_hyperbolic_planes() {
        return Err(Error::Configuration(
            "lattice is not known to contain U ⊕ U; orbit test would only be necessary".into(),
        ));
    }
    Ok(eichler_invariants(lattice, v)? == eichler_invariants(lattice, w)?)
}

/// Eichler transvection x ↦ x − (a,x)e + (e,x)a − ½a²(e,x)e for isotropic e and a ⊥ e.
pub fn eichler_transvection(
    lattice: &IntegerLattice,
    e: &LatticeVector,
    a: &LatticeVector,
    x: &LatticeVector,
) -> Result<LatticeVector> {
    if !inner(lattice, e, e)?.is_zero() {
        return input("transvection needs an isotropic vector e");
    }
    if !inner(lattice, e, a)?.is_zero() {
        return input("transvection needs a ⊥ e");
    }
    let ax = inner(lattice, a, x)?;
    let ex = inner(lattice, e, x)?;
    let half_a2 = inner(lattice, a, a)? / 2;
    let scaled: Int = &half_a2 * &ex;
    let coeff_e: Int = -(ax + scaled);
    Ok(x.add(&e.scale(&coeff_e)).add(&a.scale(&ex)))
}
