//! Walls and chambers in the positive cone of a Picard lattice embedded in L_n.
//!
//! All classes are rational vectors in the Picard basis. Wall types are
//! always evaluated in L_n through the embedding.

mod between;
mod support;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

pub use between::{same_chamber, walls_between, walls_between_bound};
pub use support::{
    extremal_rays, supporting_walls, ChamberReport, Completeness, ExtremalRay, SupportingWall,
    SupportingWalls, MAX_RHO,
};

use crate::error::{input, Error, Result};
use crate::io::{rat_array, vector_value};
use crate::k3n::{NContext, WallType};
use crate::lattice::{signature, Embedding, IntegerLattice, LatticeVector};
use crate::matrix::IntMatrix;
use crate::num::{format_rat, gcd_all, Int, Rat};

/// A Picard lattice of signature (1, ρ−1) primitively embedded in L_n.
#[derive(Clone, Debug)]
pub struct PicardData {
    ctx: NContext,
    embed: Embedding,
    /// Columns: images in L_n of the Picard basis, paired against L_n.
    pairing: IntMatrix,
    omega_ref: Option<Vec<Rat>>,
}

impl PicardData {
    /// `embed` is 23×ρ; its columns are the images of the Picard basis.
    pub fn new(ctx: NContext, pic_gram: IntMatrix, embed: IntMatrix) -> Result<Self> {
        let pic = IntegerLattice::new(pic_gram)?;
        let rho = pic.rank();
        if rho == 0 || rho > MAX_RHO {
            return input(format!("Picard rank must be in 1..={MAX_RHO}, got {rho}"));
        }
        let sig = signature(&pic)?;
        if sig != (1, rho - 1) {
            return input(format!(
                "Picard lattice must have signature (1, {}), got {sig:?}",
                rho - 1
            ));
        }
        let embed = Embedding::new(pic, ctx.ln().clone(), embed, true)?;
        let pairing = ctx.ln().gram().mul(embed.matrix());
        Ok(PicardData {
            ctx,
            embed,
            pairing,
            omega_ref: None,
        })
    }

    /// Sets the reference positive class that fixes the cone component.
    pub fn with_reference(mut self, omega: Vec<Rat>) -> Result<Self> {
        self.check_len(&omega)?;
        if !self.square(&omega).is_positive() {
            return input("reference class must have positive square");
        }
        self.omega_ref = Some(omega);
        Ok(self)
    }

    pub fn ctx(&self) -> &NContext {
        &self.ctx
    }

    pub fn pic(&self) -> &IntegerLattice {
        self.embed.source()
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embed
    }

    pub fn rho(&self) -> usize {
        self.pic().rank()
    }

    pub fn omega_ref(&self) -> Option<&[Rat]> {
        self.omega_ref.as_deref()
    }

    pub fn inner(&self, x: &[Rat], y: &[Rat]) -> Rat {
        self.pic().inner_rat(x, y)
    }

    pub fn square(&self, x: &[Rat]) -> Rat {
        self.inner(x, x)
    }

    /// div of D computed in L_n, not in the Picard lattice.
    pub fn div_in_ln(&self, d: &LatticeVector) -> Result<Int> {
        self.pic().check_vector(d)?;
        let g = gcd_all(&self.pairing.mul_vec(d.coords()));
        if g.is_zero() {
            return input("divisibility of the zero vector");
        }
        Ok(g)
    }

    pub fn wall_type_of(&self, d: &LatticeVector) -> Result<WallType> {
        let sq = crate::lattice::inner(self.pic(), d, d)?;
        WallType::new(sq, self.div_in_ln(d)?)
    }

    pub(crate) fn check_len(&self, x: &[Rat]) -> Result<()> {
        if x.len() != self.rho() {
            return input(format!("class has {} coordinates, Picard rank is {}", x.len(), self.rho()));
        }
        Ok(())
    }

    pub(crate) fn check_positive(&self, x: &[Rat], what: &str) -> Result<()> {
        self.check_len(x)?;
        if !self.square(x).is_positive() {
            return input(format!("{what} is not a positive class"));
        }
        Ok(())
    }
}

/// A primitive wall divisor oriented positively against a reference class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Wall {
    pub d: LatticeVector,
    pub wall_type: WallType,
}

impl Wall {
    /// D / div(D) with div taken in L_n.
    pub fn ray(&self) -> Vec<Rat> {
        self.d
            .coords()
            .iter()
            .map(|c| Rat::new(c.clone(), self.wall_type.div.clone()))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "D": vector_value(&self.d),
            "square": crate::io::int_value(&self.wall_type.square),
            "div": crate::io::int_value(&self.wall_type.div),
            "ray": rat_array(&self.ray()),
            "ray_square": format_rat(&self.wall_type.ray_square),
            "type_minus2": self.wall_type.square == Int::from(-2),
        })
    }
}

pub(crate) fn pair_int(p: &PicardData, d: &LatticeVector, x: &[Rat]) -> Rat {
    p.inner(&d.to_rat(), x)
}

/// x² > 0 and (x, ω_ref) > 0.
pub fn is_positive_class(p: &PicardData, x: &[Rat]) -> Result<bool> {
    let omega = p
        .omega_ref()
        .ok_or_else(|| Error::Configuration("no reference positive class set".into()))?;
    p.check_len(x)?;
    Ok(p.square(x).is_positive() && p.inner(x, omega).is_positive())
}

/// (D, x) > 0 for every wall and (x, ω_ref) ≥ 0.
pub fn in_dual_cone(p: &PicardData, walls: &[Wall], omega_ref: &[Rat], x: &[Rat]) -> Result<bool> {
    p.check_len(x)?;
    p.check_len(omega_ref)?;
    Ok(walls.iter().all(|w| pair_int(p, &w.d, x).is_positive())
        && !p.inner(x, omega_ref).is_negative())
}

/// Picard lattice ⟨2d⟩ ⊕ ⟨−(2n−2)⟩ = ZH ⊕ Zδ of the Hilbert scheme of a
/// K3 surface of degree 2d, with H ↦ e₁ + d·f₁ and δ ↦ ℓ.
pub fn polarized_hilbert_scheme(ctx: NContext, d: i64) -> Result<PicardData> {
    if d < 1 {
        return input(format!("degree parameter d must be positive, got {d}"));
    }
    let big = ctx.v_square();
    let gram = IntMatrix::from_rows(vec![
        vec![Int::from(2 * d), Int::zero()],
        vec![Int::zero(), -big],
    ])?;
    let mut e = IntMatrix::zeros(ctx.ln().rank(), 2);
    e[(0, 0)] = Int::from(1);
    e[(1, 0)] = Int::from(d);
    e[(crate::k3n::DELTA_INDEX, 1)] = Int::from(1);
    PicardData::new(ctx, gram, e)
}
