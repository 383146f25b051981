//! Lattice theory specific to manifolds of K3^[n] type.
//!
//! `NContext` fixes the lattice L_n = U³ ⊕ E8(−1)² ⊕ ⟨−(2n−2)⟩, the Mukai
//! lattice Λ = U⁴ ⊕ E8(−1)², the Mukai vector v = e₄ + (n−1)f₄ in the fourth
//! hyperbolic plane, and the embedding of L_n onto v^⊥ sending the generator ℓ
//! of the rank-one summand to e₄ − (n−1)f₄.

mod criteria;
mod orbit;
mod types;

use num_traits::{One, Zero};

pub use criteria::{
    bm_wall_test, hyperbolic_t, isotropic_pair, markman_wall_test, wall_test, Condition,
    HyperbolicT, IsotropicPair, WallWitness, WitnessSpace,
};
pub use orbit::{
    eichler_invariants, eichler_transvection, same_orbit, EichlerInvariants,
};
pub use types::{
    enumerate_wall_types, enumerate_wall_types_with_witnesses, wall_type_exists, WallType,
};

use crate::error::{input, Result};
use crate::lattice::{
    direct_sum, divisibility, standard_lattice, Embedding, IntegerLattice, LatticeVector,
    StandardLattice,
};
use crate::matrix::IntMatrix;
use crate::num::{int, Int, Rat};

/// Index of ℓ in the L_n basis.
pub const DELTA_INDEX: usize = 22;
const LN_RANK: usize = 23;
const MUKAI_RANK: usize = 24;

#[derive(Clone, Debug)]
pub struct NContext {
    n: u64,
    ln: IntegerLattice,
    mukai: IntegerLattice,
    embedding: Embedding,
    v: LatticeVector,
}

impl NContext {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// 2n − 2 = v².
    pub fn v_square(&self) -> Int {
        Int::from(2 * self.n - 2)
    }

    pub fn ln(&self) -> &IntegerLattice {
        &self.ln
    }

    pub fn mukai(&self) -> &IntegerLattice {
        &self.mukai
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn v(&self) -> &LatticeVector {
        &self.v
    }

    /// The class δ = ℓ, with δ² = 2 − 2n and div(δ) = 2n − 2.
    pub fn delta(&self) -> LatticeVector {
        LatticeVector::unit(LN_RANK, DELTA_INDEX)
    }

    /// i(D) in Λ.
    pub fn to_mukai(&self, d: &LatticeVector) -> Result<LatticeVector> {
        self.ln.check_vector(d)?;
        Ok(self.embedding.image(d))
    }
}

pub fn make_context(n: u64) -> Result<NContext> {
    if n < 2 {
        return input(format!("n must be at least 2, got {n}"));
    }
    let u = standard_lattice(StandardLattice::U)?;
    let e8 = standard_lattice(StandardLattice::E8Minus)?;
    let ell = standard_lattice(StandardLattice::Rank1(-Int::from(2 * n - 2)))?;
    let ln = direct_sum(&[u.clone(), u.clone(), u.clone(), e8.clone(), e8.clone(), ell])
        .with_label(format!("L_{n}"));
    let mukai = direct_sum(&[u.clone(), u.clone(), u.clone(), u, e8.clone(), e8])
        .with_label("Mukai");

    let mut coords = vec![Int::zero(); MUKAI_RANK];
    coords[6] = Int::one();
    coords[7] = Int::from(n - 1);
    let v = LatticeVector::new(coords);

    let mut m = IntMatrix::zeros(MUKAI_RANK, LN_RANK);
    for i in 0..6 {
        m[(i, i)] = Int::one();
    }
    for i in 6..DELTA_INDEX {
        m[(i + 2, i)] = Int::one();
    }
    m[(6, DELTA_INDEX)] = Int::one();
    m[(7, DELTA_INDEX)] = -Int::from(n - 1);
    let embedding = Embedding::new(ln.clone(), mukai.clone(), m, true)?;
    Ok(NContext {
        n,
        ln,
        mukai,
        embedding,
        v,
    })
}

/// r² ≥ −(n+3)/2.
pub fn ht_bound_ok(n: u64, ray_square: &Rat) -> bool {
    *ray_square >= -Rat::new(Int::from(n) + 3, int(2))
}

/// D^∨ = D / div(D).
pub fn dual_ray(lattice: &IntegerLattice, d: &LatticeVector) -> Result<Vec<Rat>> {
    let m = divisibility(lattice, d)?;
    Ok(d.coords()
        .iter()
        .map(|c| Rat::new(c.clone(), m.clone()))
        .collect())
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{
        discriminant_group, inner, orthogonal_complement, signature,
    };
    use crate::num::rat;

    #[test]
    fn context_invariants() {
        for n in 2..8u64 {
            let ctx = make_context(n).unwrap();
            let v = ctx.v();
            assert_eq!(inner(ctx.mukai(), v, v).unwrap(), ctx.v_square());
            assert!(ctx.embedding().is_primitive());
            for b in ctx.embedding().basis_images() {
                assert!(inner(ctx.mukai(), &b, v).unwrap().is_zero());
            }
            assert_eq!(signature(ctx.ln()).unwrap(), (3, 20));
            assert_eq!(ctx.ln().det(), Int::from(2 * n - 2));
            let d = ctx.delta();
            assert_eq!(inner(ctx.ln(), &d, &d).unwrap(), -Int::from(2 * n - 2));
            assert_eq!(divisibility(ctx.ln(), &d).unwrap(), Int::from(2 * n - 2));
            // image is all of v^⊥, not a finite-index sublattice
            let perp = orthogonal_complement(ctx.mukai(), &[v.clone()]).unwrap();
            for b in perp.basis_images() {
                assert!(ctx.embedding().preimage(&b).is_some());
            }
        }
    }

    #[test]
    fn small_contexts() {
        assert!(make_context(1).is_err());
        let c2 = make_context(2).unwrap();
        assert_eq!(
            discriminant_group(c2.ln()).unwrap().invariant_factors(),
            &[int(2)]
        );
        let c3 = make_context(3).unwrap();
        assert_eq!(c3.v_square(), int(4));
    }

    #[test]
    fn ht_bound() {
        assert!(ht_bound_ok(3, &rat(-3, 1)));
        assert!(ht_bound_ok(4, &rat(-7, 2)));
        assert!(!ht_bound_ok(2, &rat(-3, 1)));
        assert!(ht_bound_ok(2, &rat(-5, 2)));
    }

    #[test]
    fn dual_rays() {
        let ctx = make_context(4).unwrap();
        let d = dual_ray(ctx.ln(), &ctx.delta()).unwrap();
        assert_eq!(d[DELTA_INDEX], rat(1, 6));
        let root = LatticeVector::unit(LN_RANK, 6);
        assert_eq!(dual_ray(ctx.ln(), &root).unwrap(), root.to_rat());
        assert!(dual_ray(ctx.ln(), &LatticeVector::zero(LN_RANK)).is_err());

        // (2H − 3δ)^∨ in L_2 with H = e₁ + f₁
        let ctx = make_context(2).unwrap();
        let mut c = vec![0i64; LN_RANK];
        c[0] = 2;
        c[1] = 2;
        c[DELTA_INDEX] = -3;
        let x = LatticeVector::from_i64(&c);
        let r = dual_ray(ctx.ln(), &x).unwrap();
        assert_eq!(ctx.ln().inner_rat(&r, &r), rat(-5, 2));
        for i in 0..LN_RANK {
            let e = LatticeVector::unit(LN_RANK, i).to_rat();
            assert!(ctx.ln().inner_rat(&r, &e).is_integer());
        }
    }
}
