//! Numerical wall-divisor types (D², div D).

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{ht_bound_ok, NContext, DELTA_INDEX, LN_RANK};
use crate::error::{input, Error, Result};
use crate::lattice::{divisibility, inner, is_primitive, LatticeVector};
use crate::num::{format_rat, Int, Rat};

/// A pair (D², div D) with ray square D²/div².
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WallType {
    pub square: Int,
    pub div: Int,
    pub ray_square: Rat,
}

impl WallType {
    pub fn new(square: Int, div: Int) -> Result<Self> {
        if !square.is_negative() || square.is_odd() {
            return input(format!("wall square must be negative and even, got {square}"));
        }
        if !div.is_positive() {
            return input(format!("divisibility must be positive, got {div}"));
        }
        let ray_square = Rat::new(square.clone(), &div * &div);
        Ok(WallType {
            square,
            div,
            ray_square,
        })
    }

    pub fn from_i64(square: i64, div: i64) -> Result<Self> {
        Self::new(Int::from(square), Int::from(div))
    }
}

impl fmt::Display for WallType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.square, self.div)
    }
}

impl Serialize for WallType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("WallType", 3)?;
        st.serialize_field("square", &crate::io::IntJson(&self.square))?;
        st.serialize_field("div", &crate::io::IntJson(&self.div))?;
        st.serialize_field("ray_square", &format_rat(&self.ray_square))?;
        st.end()
    }
}

fn witness(m: &Int, k: &Int, c: &Int) -> LatticeVector {
    let mut coords = vec![Int::zero(); LN_RANK];
    coords[0] = m.clone();
    coords[1] = m * k;
    coords[DELTA_INDEX] = c.clone();
    LatticeVector::new(coords)
}

/// Decides whether L_n has a primitive D with D² = `square` and div D = `m`,
/// returning such a D when it does.
///
/// A primitive D of divisibility m exists iff m | 2n−2 and
/// square ≡ −c²(2n−2) (mod 2m²) for some c coprime to m. The witness is
/// D = m(e₁ + k f₁) + cℓ with k = (square + c²(2n−2)) / 2m².
pub fn wall_type_exists(ctx: &NContext, square: &Int, m: &Int) -> Result<Option<LatticeVector>> {
    if square.is_odd() {
        return input(format!("square {square} is odd; L_n is even"));
    }
    if !square.is_negative() {
        return input(format!("wall square must be negative, got {square}"));
    }
    if !m.is_positive() {
        return input(format!("divisibility must be positive, got {m}"));
    }
    let big_n = ctx.v_square();
    if !big_n.is_multiple_of(m) {
        return Ok(None);
    }
    let modulus: Int = Int::from(2) * m * m;
    let mut c = Int::zero();
    while c < modulus {
        if c.gcd(m).is_one() {
            let num: Int = square + &c * &c * &big_n;
            if num.is_multiple_of(&modulus) {
                let d = witness(m, &(num / &modulus), &c);
                let ok = inner(ctx.ln(), &d, &d)? == *square
                    && divisibility(ctx.ln(), &d)? == *m
                    && is_primitive(ctx.ln(), &d)?;
                if !ok {
                    return Err(Error::Input(format!(
                        "internal witness check failed for ({square}, {m})"
                    )));
                }
                return Ok(Some(d));
            }
        }
        c += 1;
    }
    Ok(None)
}

/// Smallest admissible c for each residue −c²(2n−2) mod 2m².
fn residue_table(big_n: u64, m: u64) -> HashMap<u64, u64> {
    let modulus = 2 * m * m;
    let mut table = HashMap::new();
    for c in 0..modulus {
        if num_integer::gcd(c, m) == 1 {
            let (c2, md) = ((c as u128 * c as u128) % modulus as u128, modulus as u128);
            let r = ((md - c2 * (big_n as u128 % md) % md) % md) as u64;
            table.entry(r).or_insert(c);
        }
    }
    table
}

/// Every type (square, m) with m | 2n−2, square/m² ≥ −(n+3)/2 and a primitive
/// representative, sorted by (m, −square), paired with that representative.
///
/// For n ≥ 5 this is a candidate list: some of these types are not realised
/// by extremal rays.
pub fn enumerate_wall_types_with_witnesses(ctx: &NContext) -> Vec<(WallType, LatticeVector)> {
    let n = ctx.n();
    let big_n = 2 * n - 2;
    let mut out = Vec::new();
    for m in (1..=big_n).filter(|m| big_n.is_multiple_of(*m)) {
        let table = residue_table(big_n, m);
        let modulus = 2 * m * m;
        let m_int = Int::from(m);
        let mut square: i64 = -2;
        loop {
            let t = WallType::new(Int::from(square), m_int.clone()).expect("negative even square");
            if !ht_bound_ok(n, &t.ray_square) {
                break;
            }
            let r = square.rem_euclid(modulus as i64) as u64;
            if let Some(&c) = table.get(&r) {
                let c = Int::from(c);
                let num: Int = Int::from(square) + &c * &c * Int::from(big_n);
                out.push((t, witness(&m_int, &(num / Int::from(modulus)), &c)));
            }
            square -= 2;
        }
    }
    out
}

pub fn enumerate_wall_types(ctx: &NContext) -> Vec<WallType> {
    enumerate_wall_types_with_witnesses(ctx)
        .into_iter()
        .map(|(t, _)| t)
        .collect()
}
