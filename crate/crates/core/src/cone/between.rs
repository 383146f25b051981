//! Walls separating two positive classes.
//!
//! Write q_α(x) = −x² + 2(x,α)²/α², positive definite when α² > 0. If D has
//! D² = s < 0 and (D,α) > 0 > (D,β), splitting D and β along α and applying
//! Cauchy–Schwarz on the negative definite α^⊥ gives
//!
//!   q_α(D) < |s| · (2(α,β)² / (α²β²) − 1),
//!
//! so enumerating the q_α-ball of that radius for the largest |s| is complete.

use std::collections::BTreeSet;

use num_traits::{One, Signed};

use super::{PicardData, Wall};
use crate::error::{input, Result};
use crate::k3n::WallType;
use crate::lattice::{enumerate_ball, EnumerationLimits, LatticeVector};
use crate::num::{Int, Rat};

/// Radius of the q_α-ball containing every wall of the given types that
/// separates α from β.
pub fn walls_between_bound(p: &PicardData, alpha: &[Rat], beta: &[Rat], types: &[WallType]) -> Result<Rat> {
    let smax = types
        .iter()
        .map(|t| t.square.abs())
        .max()
        .unwrap_or_default();
    Ok(Rat::from_integer(smax) * separation_factor(p, alpha, beta))
}

/// 2(α,β)²/(α²β²) − 1.
fn separation_factor(p: &PicardData, alpha: &[Rat], beta: &[Rat]) -> Rat {
    let ab = p.inner(alpha, beta);
    let ratio = &ab * &ab / (p.square(alpha) * p.square(beta));
    Rat::from_integer(Int::from(2)) * ratio - Rat::one()
}

fn q_alpha(p: &PicardData, alpha: &[Rat], x: &[Rat]) -> Rat {
    let a = p.inner(x, alpha);
    -p.square(x) + Rat::from_integer(Int::from(2)) * &a * &a / p.square(alpha)
}

/// Every primitive D with (D², div D) in `types` and (D,α) > 0 > (D,β),
/// sorted by coordinates.
pub fn walls_between(p: &PicardData, alpha: &[Rat], beta: &[Rat], types: &[WallType]) -> Result<Vec<Wall>> {
    p.check_positive(alpha, "alpha")?;
    p.check_positive(beta, "beta")?;
    if !p.inner(alpha, beta).is_positive() {
        return input("alpha and beta lie in different components of the positive cone");
    }
    if types.is_empty() {
        return Ok(Vec::new());
    }
    let wanted: BTreeSet<(Int, Int)> = types
        .iter()
        .map(|t| (t.square.clone(), t.div.clone()))
        .collect();
    let squares: BTreeSet<Int> = types.iter().map(|t| t.square.clone()).collect();
    let bound = walls_between_bound(p, alpha, beta, types)?;
    let factor = separation_factor(p, alpha, beta);

    let rho = p.rho();
    let alpha_dual: Vec<Rat> = (0..rho)
        .map(|i| p.inner(&LatticeVector::unit(rho, i).to_rat(), alpha))
        .collect();
    let a2 = p.square(alpha);
    let two = Rat::from_integer(Int::from(2));
    let gram: Vec<Vec<Rat>> = (0..rho)
        .map(|i| {
            (0..rho)
                .map(|j| {
                    -Rat::from_integer(p.pic().gram()[(i, j)].clone())
                        + &two * &alpha_dual[i] * &alpha_dual[j] / &a2
                })
                .collect()
        })
        .collect();

    let mut hits = Vec::new();
    enumerate_ball(&gram, &bound, EnumerationLimits::from_env(), |x, _| {
        let d = LatticeVector::new(x.to_vec());
        if d.is_zero() || !d.content().is_one() {
            return;
        }
        let dr = d.to_rat();
        let sq = p.square(&dr);
        if !sq.is_integer() || !squares.contains(sq.numer()) {
            return;
        }
        if p.inner(&dr, alpha).is_positive() && p.inner(&dr, beta).is_negative() {
            hits.push(d);
        }
    })?;

    let mut out = Vec::new();
    for d in hits {
        let t = p.wall_type_of(&d)?;
        if !wanted.contains(&(t.square.clone(), t.div.clone())) {
            continue;
        }
        let q = q_alpha(p, alpha, &d.to_rat());
        let own = Rat::from_integer(t.square.abs()) * &factor;
        assert!(q < own, "separating wall {d} violates the majorant bound");
        out.push(Wall { d, wall_type: t });
    }
    out.sort();
    Ok(out)
}

/// True iff no wall of the given types separates α and β.
pub fn same_chamber(p: &PicardData, alpha: &[Rat], beta: &[Rat], types: &[WallType]) -> Result<bool> {
    Ok(walls_between(p, alpha, beta, types)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::fixtures::{hilbert_square, r};
    use crate::k3n::enumerate_wall_types;
    use crate::num::rat;
    use proptest::prelude::*;

    fn brute(p: &PicardData, alpha: &[Rat], beta: &[Rat], types: &[WallType], h: i64) -> Vec<Wall> {
        let wanted: BTreeSet<_> = types.iter().cloned().collect();
        let mut out = Vec::new();
        for a in -h..=h {
            for b in -h..=h {
                let d = LatticeVector::from_i64(&[a, b]);
                if d.is_zero() || !d.content().is_one() {
                    continue;
                }
                let dr = d.to_rat();
                if !(p.inner(&dr, alpha).is_positive() && p.inner(&dr, beta).is_negative()) {
                    continue;
                }
                let sq = p.square(&dr);
                if !sq.is_negative() || !sq.is_integer() || sq.numer().is_odd() {
                    continue;
                }
                let t = p.wall_type_of(&d).unwrap();
                if wanted.contains(&t) {
                    out.push(Wall { d, wall_type: t });
                }
            }
        }
        out.sort();
        out
    }

    use num_integer::Integer;

    #[test]
    fn degree_two_examples() {
        let p = hilbert_square(2, 1);
        let types = enumerate_wall_types(p.ctx());
        let alpha = r(&[2, -1]);
        assert!(walls_between(&p, &alpha, &alpha, &types).unwrap().is_empty());

        // reflection of α in (2H − 3δ)^⊥
        let d = r(&[2, -3]);
        let k = Rat::from_integer(Int::from(2)) * p.inner(&alpha, &d) / p.square(&d);
        let beta: Vec<Rat> = alpha.iter().zip(&d).map(|(a, x)| a - &k * x).collect();
        let w = walls_between(&p, &alpha, &beta, &types).unwrap();
        assert!(w.iter().any(|w| w.d == LatticeVector::from_i64(&[2, -3])));

        let w = walls_between(&p, &alpha, &r(&[2, 1]), &types).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].d, LatticeVector::from_i64(&[0, 1]));
        assert_eq!(w[0].wall_type, WallType::from_i64(-2, 2).unwrap());
        assert!(!same_chamber(&p, &alpha, &r(&[2, 1]), &types).unwrap());
    }

    #[test]
    fn same_chamber_examples() {
        let p = hilbert_square(2, 1);
        let types = enumerate_wall_types(p.ctx());
        let alpha = r(&[2, -1]);
        assert!(same_chamber(&p, &alpha, &r(&[6, -3]), &types).unwrap());
        let nudged = vec![rat(2, 1) + rat(1, 1000), rat(-1, 1) - rat(1, 997)];
        assert!(same_chamber(&p, &alpha, &nudged, &types).unwrap());
    }

    #[test]
    fn rejects_non_positive() {
        let p = hilbert_square(2, 1);
        let types = enumerate_wall_types(p.ctx());
        assert!(walls_between(&p, &r(&[1, 1]), &r(&[2, -1]), &types).is_err());
        assert!(walls_between(&p, &r(&[-2, 1]), &r(&[2, -1]), &types).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn agrees_with_box_and_is_symmetric(n in 2u64..5, d in 1i64..4, a1 in 1i64..6, b1 in -4i64..=4, a2 in 1i64..6, b2 in -4i64..=4) {
            let p = hilbert_square(n, d);
            let types = enumerate_wall_types(p.ctx());
            let alpha = r(&[a1, b1]);
            let beta = r(&[a2, b2]);
            prop_assume!(p.square(&alpha).is_positive() && p.square(&beta).is_positive());
            let fast = walls_between(&p, &alpha, &beta, &types).unwrap();
            let h = fast.iter().map(|w| w.d.height()).max().unwrap_or_default();
            let slow = brute(&p, &alpha, &beta, &types, 30);
            // the box is complete only when it strictly contains what the ball found
            prop_assume!(h < Int::from(30));
            prop_assert_eq!(&fast, &slow);
            let back: Vec<LatticeVector> = walls_between(&p, &beta, &alpha, &types).unwrap().into_iter().map(|w| w.d.neg()).collect();
            let mut back = back;
            back.sort();
            let fwd: Vec<LatticeVector> = fast.iter().map(|w| w.d.clone()).collect();
            prop_assert_eq!(fwd, back);
        }
    }
}
