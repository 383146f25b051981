//! Sufficient criteria for a class to be a wall divisor: the Markman tests in
//! L_n and the four Bayer–Macrì conditions on a rank-two hyperbolic T ⊂ Λ.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use super::NContext;
use crate::error::{input, Result};
use crate::io::{int_array, matrix_value, vector_value};
use crate::lattice::{
    divisibility, inner, is_primitive, primitive_part, saturation, span_embedding, Embedding,
    IntegerLattice, LatticeVector,
};
use crate::matrix::rank_int;
use crate::num::{exact_sqrt_rat, floor_sqrt_rat, Int, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Condition {
    #[serde(rename = "MK_minus2")]
    MkMinus2,
    #[serde(rename = "MK_isotropic")]
    MkIsotropic,
    #[serde(rename = "BM_orth_root")]
    BmOrthRoot,
    #[serde(rename = "BM_isotropic")]
    BmIsotropic,
    #[serde(rename = "BM_bounded_root")]
    BmBoundedRoot,
    #[serde(rename = "BM_sum_decomposition")]
    BmSumDecomposition,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::MkMinus2 => "MK_minus2",
            Condition::MkIsotropic => "MK_isotropic",
            Condition::BmOrthRoot => "BM_orth_root",
            Condition::BmIsotropic => "BM_isotropic",
            Condition::BmBoundedRoot => "BM_bounded_root",
            Condition::BmSumDecomposition => "BM_sum_decomposition",
        }
    }

    /// Position 1..4 among the Bayer–Macrì conditions.
    pub fn bm_index(self) -> Option<u8> {
        match self {
            Condition::BmOrthRoot => Some(1),
            Condition::BmIsotropic => Some(2),
            Condition::BmBoundedRoot => Some(3),
            Condition::BmSumDecomposition => Some(4),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessSpace {
    Mukai,
    T,
}

/// Self-certifying witness. `pairing_data` is (w², (w,v)) for one vector and
/// (w², t², (w,v), (t,v)) for two.
#[derive(Clone, Debug)]
pub struct WallWitness {
    pub condition: Condition,
    pub space: WitnessSpace,
    pub vectors: Vec<LatticeVector>,
    pub pairing_data: Vec<Int>,
    /// Images of `vectors` in Λ when the witness lives in a sublattice T.
    pub mukai_vectors: Option<Vec<LatticeVector>>,
    lattice: IntegerLattice,
    v: LatticeVector,
}

impl WallWitness {
    fn new(
        condition: Condition,
        space: WitnessSpace,
        lattice: &IntegerLattice,
        v: &LatticeVector,
        vectors: Vec<LatticeVector>,
    ) -> Result<Self> {
        let pairing_data = pairings(lattice, v, &vectors)?;
        Ok(WallWitness {
            condition,
            space,
            vectors,
            pairing_data,
            mukai_vectors: None,
            lattice: lattice.clone(),
            v: v.clone(),
        })
    }

    /// The lattice the vectors live in.
    pub fn lattice(&self) -> &IntegerLattice {
        &self.lattice
    }

    pub fn v(&self) -> &LatticeVector {
        &self.v
    }

    /// Recomputes every pairing from the vectors and re-checks the condition.
    pub fn verify(&self) -> bool {
        let Ok(p) = pairings(&self.lattice, &self.v, &self.vectors) else {
            return false;
        };
        if p != self.pairing_data {
            return false;
        }
        let Ok(vv) = inner(&self.lattice, &self.v, &self.v) else {
            return false;
        };
        let one_or_two = |x: &Int| *x == Int::one() || *x == Int::from(2);
        match (self.condition, p.as_slice()) {
            (Condition::MkMinus2 | Condition::BmOrthRoot, [sq, pv]) => {
                *sq == Int::from(-2) && pv.is_zero()
            }
            (Condition::MkIsotropic, [s1, s2, p1, _]) => {
                s1.is_zero()
                    && s2.is_zero()
                    && one_or_two(p1)
                    && self.vectors.iter().all(|w| w.content().is_one())
            }
            (Condition::BmIsotropic, [sq, pv]) => sq.is_zero() && one_or_two(pv),
            (Condition::BmBoundedRoot, [sq, pv]) => {
                *sq == Int::from(-2) && pv.is_positive() && Int::from(2) * pv <= vv
            }
            (Condition::BmSumDecomposition, [sw, st, pw, pt]) => {
                self.vectors[0].add(&self.vectors[1]) == self.v
                    && !sw.is_negative()
                    && !st.is_negative()
                    && pw.is_positive()
                    && pt.is_positive()
            }
            _ => false,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut out = json!({
            "condition": self.condition.name(),
            "space": self.space,
            "v": vector_value(&self.v),
            "vectors": self.vectors.iter().map(vector_value).collect::<Vec<_>>(),
            "pairing_data": int_array(&self.pairing_data),
            "verified": self.verify(),
        });
        if self.space == WitnessSpace::T {
            out["gram"] = matrix_value(self.lattice.gram());
        }
        if let Some(m) = &self.mukai_vectors {
            out["mukai_vectors"] = Value::Array(m.iter().map(vector_value).collect());
        }
        out
    }
}

fn pairings(lattice: &IntegerLattice, v: &LatticeVector, vectors: &[LatticeVector]) -> Result<Vec<Int>> {
    match vectors {
        [w] => Ok(vec![inner(lattice, w, w)?, inner(lattice, w, v)?]),
        [w, t] => Ok(vec![
            inner(lattice, w, w)?,
            inner(lattice, t, t)?,
            inner(lattice, w, v)?,
            inner(lattice, t, v)?,
        ]),
        _ => input("a witness carries one or two vectors"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropicPair {
    pub w1: LatticeVector,
    pub w2: LatticeVector,
    /// ((v, w₁), (v, w₂)).
    pub pairings: (Int, Int),
}

/// The primitive isotropic classes on the lines through v ± i(D), for D² = 2 − 2n.
pub fn isotropic_pair(ctx: &NContext, d: &LatticeVector) -> Result<IsotropicPair> {
    let sq = inner(ctx.ln(), d, d)?;
    if sq != -ctx.v_square() {
        return input(format!("isotropic pair needs D² = {}, got {sq}", -ctx.v_square()));
    }
    if !is_primitive(ctx.ln(), d)? {
        return input(format!("{d} is not primitive"));
    }
    let id = ctx.to_mukai(d)?;
    let lam = ctx.mukai();
    let w1 = primitive_part(lam, &ctx.v().add(&id))?;
    let w2 = primitive_part(lam, &ctx.v().sub(&id))?;
    let pairings = (inner(lam, ctx.v(), &w1)?, inner(lam, ctx.v(), &w2)?);
    Ok(IsotropicPair { w1, w2, pairings })
}

fn check_divisor(ctx: &NContext, d: &LatticeVector) -> Result<Int> {
    ctx.ln().check_vector(d)?;
    if d.is_zero() {
        return input("wall test of the zero vector");
    }
    let sq = inner(ctx.ln(), d, d)?;
    if !sq.is_negative() {
        return input(format!("wall test needs D² < 0, got {sq}"));
    }
    if !is_primitive(ctx.ln(), d)? {
        return input(format!("{d} is not primitive"));
    }
    Ok(sq)
}

/// D² = −2, or D² = 2 − 2n with (n−1) | div D and an isotropic class pairing
/// to 1 or 2 with v. `None` does not mean D is not a wall divisor.
pub fn markman_wall_test(ctx: &NContext, d: &LatticeVector) -> Result<Option<WallWitness>> {
    let sq = check_divisor(ctx, d)?;
    let lam = ctx.mukai();
    if sq == Int::from(-2) {
        let w = ctx.to_mukai(d)?;
        return WallWitness::new(Condition::MkMinus2, WitnessSpace::Mukai, lam, ctx.v(), vec![w])
            .map(Some);
    }
    let n1 = Int::from(ctx.n() - 1);
    if sq != -ctx.v_square() || !divisibility(ctx.ln(), d)?.is_multiple_of(&n1) {
        return Ok(None);
    }
    let pair = isotropic_pair(ctx, d)?;
    let hit = |p: &Int| *p == Int::one() || *p == Int::from(2);
    let vectors = if hit(&pair.pairings.0) {
        vec![pair.w1, pair.w2]
    } else if hit(&pair.pairings.1) {
        vec![pair.w2, pair.w1]
    } else {
        return Ok(None);
    };
    WallWitness::new(Condition::MkIsotropic, WitnessSpace::Mukai, lam, ctx.v(), vectors).map(Some)
}

/// The primitive rank-two sublattice T ⊂ Λ containing v and s.
#[derive(Clone, Debug)]
pub struct HyperbolicT {
    pub lattice: IntegerLattice,
    pub embedding: Embedding,
    pub v: LatticeVector,
    pub s: LatticeVector,
    pub hyperbolic: bool,
}

pub fn hyperbolic_t(ctx: &NContext, s: &LatticeVector) -> Result<HyperbolicT> {
    let lam = ctx.mukai();
    lam.check_vector(s)?;
    if rank_int(&[ctx.v().coords().to_vec(), s.coords().to_vec()]) < 2 {
        return input("s is a rational multiple of v");
    }
    let span = span_embedding(lam, &[ctx.v().clone(), s.clone()])?;
    let sat = saturation(lam, &span)?;
    let v = sat.preimage(ctx.v()).expect("v lies in its saturation");
    let s_in_t = sat.preimage(s).expect("s lies in its saturation");
    let lattice = sat.source().clone();
    let hyperbolic = lattice.det().is_negative();
    Ok(HyperbolicT {
        lattice,
        embedding: sat,
        v,
        s: s_in_t,
        hyperbolic,
    })
}

/// Coordinates of T split along v and the primitive g spanning v^⊥ ∩ T.
struct Plane<'a> {
    t: &'a IntegerLattice,
    v: &'a LatticeVector,
    vv: Int,
    g: LatticeVector,
    gg: Int,
}

impl Plane<'_> {
    /// The w ∈ T ⊗ Q with (w, v) = k and (w, g) = m, if it is integral.
    fn point(&self, k: &Int, m: &Int) -> Option<LatticeVector> {
        let a = Rat::new(k.clone(), self.vv.clone());
        let b = Rat::new(m.clone(), self.gg.clone());
        let mut out = Vec::with_capacity(2);
        for (vi, gi) in self.v.coords().iter().zip(self.g.coords()) {
            let x = &a * Rat::from_integer(vi.clone()) + &b * Rat::from_integer(gi.clone());
            if !x.is_integer() {
                return None;
            }
            out.push(x.to_integer());
        }
        Some(LatticeVector::new(out))
    }

    /// Integral w with (w, v) = k and w² = target.
    fn with_square(&self, k: &Int, target: &Int) -> Option<LatticeVector> {
        // w² = k²/V + m²/g²
        let k2v = Rat::new(k * k, self.vv.clone());
        let m2 = (k2v - Rat::from_integer(target.clone())) * Rat::from_integer(-&self.gg);
        let m = exact_sqrt_rat(&m2)?;
        if !m.is_integer() {
            return None;
        }
        let m = m.to_integer();
        [-m.clone(), m].iter().find_map(|m| self.point(k, m))
    }
}

/// Runs the four Bayer–Macrì searches on T in order and returns the first
/// witness. Each search is over a finite box that provably contains every
/// solution.
pub fn bm_wall_test(t: &IntegerLattice, v: &LatticeVector) -> Result<Option<WallWitness>> {
    if t.rank() != 2 {
        return input(format!("T must have rank 2, got {}", t.rank()));
    }
    let vv = inner(t, v, v)?;
    if !vv.is_positive() {
        return input(format!("v must have positive square in T, got {vv}"));
    }
    if !t.det().is_negative() {
        return input("T is not hyperbolic");
    }
    let gv = t.gram().mul_vec(v.coords());
    let g = LatticeVector::new(vec![gv[1].clone(), -gv[0].clone()]);
    let g = primitive_part(t, &g)?;
    let gg = inner(t, &g, &g)?;
    let plane = Plane {
        t,
        v,
        vv: vv.clone(),
        g,
        gg: gg.clone(),
    };
    let witness = |c, vectors| WallWitness::new(c, WitnessSpace::T, t, v, vectors).map(Some);

    if gg == Int::from(-2) {
        return witness(Condition::BmOrthRoot, vec![plane.g.clone()]);
    }
    for k in [Int::one(), Int::from(2)] {
        if let Some(w) = plane.with_square(&k, &Int::zero()) {
            return witness(Condition::BmIsotropic, vec![w]);
        }
    }
    let mut k = Int::one();
    while Int::from(2) * &k <= vv {
        if let Some(w) = plane.with_square(&k, &Int::from(-2)) {
            return witness(Condition::BmBoundedRoot, vec![w]);
        }
        k += 1;
    }
    // w, t = v − w both in P_T forces 0 < k < V and m² ≤ |g²|·min(k, V−k)²/V
    let mut k = Int::one();
    while k < vv {
        let short = std::cmp::min(k.clone(), &vv - &k);
        let bound = Rat::new(&short * &short * (-&gg), vv.clone());
        let big_m = floor_sqrt_rat(&bound);
        let mut m = -big_m.clone();
        while m <= big_m {
            if let Some(w) = plane.point(&k, &m) {
                let rest = v.sub(&w);
                if !inner(plane.t, &w, &w)?.is_negative() && !inner(t, &rest, &rest)?.is_negative() {
                    return witness(Condition::BmSumDecomposition, vec![w, rest]);
                }
            }
            m += 1;
        }
        k += 1;
    }
    Ok(None)
}

/// Markman's tests on D, then the Bayer–Macrì tests on the saturation of
/// span{v, i(D)}.
pub fn wall_test(ctx: &NContext, d: &LatticeVector) -> Result<Option<WallWitness>> {
    if let Some(w) = markman_wall_test(ctx, d)? {
        return Ok(Some(w));
    }
    let id = ctx.to_mukai(d)?;
    let ht = hyperbolic_t(ctx, &id)?;
    let Some(mut w) = bm_wall_test(&ht.lattice, &ht.v)? else {
        return Ok(None);
    };
    w.mukai_vectors = Some(w.vectors.iter().map(|x| ht.embedding.image(x)).collect());
    Ok(Some(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::k3n::{make_context, wall_type_exists, DELTA_INDEX, LN_RANK};
    use crate::num::int;
    use proptest::prelude::*;

    fn ln_vec(pairs: &[(usize, i64)]) -> LatticeVector {
        let mut c = vec![0i64; LN_RANK];
        for &(i, x) in pairs {
            c[i] = x;
        }
        LatticeVector::from_i64(&c)
    }

    #[test]
    fn isotropic_pair_of_delta() {
        for n in 2..7u64 {
            let ctx = make_context(n).unwrap();
            let p = isotropic_pair(&ctx, &ctx.delta()).unwrap();
            let lam = ctx.mukai();
            assert!(inner(lam, &p.w1, &p.w1).unwrap().is_zero());
            assert!(inner(lam, &p.w2, &p.w2).unwrap().is_zero());
            let hits = [&p.pairings.0, &p.pairings.1]
                .iter()
                .filter(|x| ***x == int(1) || ***x == int(2))
                .count();
            assert!(hits >= 1);
            // w₁ and w₂ span the same plane as v and i(δ)
            let id = ctx.to_mukai(&ctx.delta()).unwrap();
            let rows = vec![
                ctx.v().coords().to_vec(),
                id.coords().to_vec(),
                p.w1.coords().to_vec(),
                p.w2.coords().to_vec(),
            ];
            assert_eq!(rank_int(&rows), 2);
        }
        let ctx = make_context(3).unwrap();
        assert!(isotropic_pair(&ctx, &ln_vec(&[(0, 1), (1, -1)])).is_err());
    }

    #[test]
    fn markman_examples() {
        let ctx = make_context(3).unwrap();
        let root = ln_vec(&[(0, 1), (1, -1)]);
        let w = markman_wall_test(&ctx, &root).unwrap().unwrap();
        assert_eq!(w.condition, Condition::MkMinus2);
        assert!(w.verify());

        let w = markman_wall_test(&ctx, &ctx.delta()).unwrap().unwrap();
        assert_eq!(w.condition, Condition::MkIsotropic);
        assert!(w.verify());

        let d = wall_type_exists(&ctx, &int(-12), &int(2)).unwrap().unwrap();
        assert!(markman_wall_test(&ctx, &d).unwrap().is_none());
        assert!(markman_wall_test(&ctx, &ln_vec(&[(0, 1), (1, 1)])).is_err());
        assert!(markman_wall_test(&ctx, &ln_vec(&[(0, 2), (1, -2)])).is_err());
    }

    #[test]
    fn roots_of_every_divisibility_are_detected() {
        // div-2 roots: e₁ − f₁ + ... need (D, L) = 2Z; at n=2, 2e₁ + δ has square −2, div 2
        let ctx = make_context(2).unwrap();
        let d = ln_vec(&[(0, 2), (DELTA_INDEX, 1)]);
        assert_eq!(inner(ctx.ln(), &d, &d).unwrap(), int(-2));
        assert_eq!(divisibility(ctx.ln(), &d).unwrap(), int(2));
        assert_eq!(markman_wall_test(&ctx, &d).unwrap().unwrap().condition, Condition::MkMinus2);
    }

    #[test]
    fn hyperbolic_t_examples() {
        // n = 3, D = 4(e₁ − f₁) + δ: a = (v − D)/4 lies in T
        let ctx = make_context(3).unwrap();
        let d = ln_vec(&[(0, 4), (1, -4), (DELTA_INDEX, 1)]);
        let id = ctx.to_mukai(&d).unwrap();
        let ht = hyperbolic_t(&ctx, &id).unwrap();
        assert!(ht.hyperbolic);
        assert!(ht.v.content().is_one());
        let a = ctx.v().sub(&id);
        let a = LatticeVector::new(a.coords().iter().map(|x| x / 4).collect());
        assert_eq!(ctx.v().sub(&id), a.scale(&int(4)));
        let a_t = ht.embedding.preimage(&a).expect("a ∈ T");
        assert_eq!(inner(&ht.lattice, &a_t, &a_t).unwrap(), int(-2));
        assert_eq!(inner(&ht.lattice, &a_t, &ht.v).unwrap(), int(1));

        // n = 4, D = 2e₁ + δ: a = (v + D)/2 has a² = 0, (a, v) = 3
        let ctx = make_context(4).unwrap();
        let d = ln_vec(&[(0, 2), (DELTA_INDEX, 1)]);
        let id = ctx.to_mukai(&d).unwrap();
        let ht = hyperbolic_t(&ctx, &id).unwrap();
        let a = ctx.v().add(&id);
        let a = LatticeVector::new(a.coords().iter().map(|x| x / 2).collect());
        let a_t = ht.embedding.preimage(&a).expect("a ∈ T");
        assert_eq!(inner(&ht.lattice, &a_t, &a_t).unwrap(), int(0));
        assert_eq!(inner(&ht.lattice, &a_t, &ht.v).unwrap(), int(3));

        assert!(hyperbolic_t(&ctx, &ctx.v().scale(&int(3))).is_err());
    }

    #[test]
    fn bm_pn1_bundle_condition_three() {
        let ctx = make_context(3).unwrap();
        let d = ln_vec(&[(0, 4), (1, -4), (DELTA_INDEX, 1)]);
        let w = wall_test(&ctx, &d).unwrap().unwrap();
        assert_eq!(w.condition, Condition::BmBoundedRoot);
        assert_eq!(w.pairing_data, vec![int(-2), int(1)]);
        assert!(w.verify());
    }

    #[test]
    fn bm_n4_div2_condition_four() {
        let ctx = make_context(4).unwrap();
        let d = ln_vec(&[(0, 2), (DELTA_INDEX, 1)]);
        let w = wall_test(&ctx, &d).unwrap().unwrap();
        assert_eq!(w.condition, Condition::BmSumDecomposition);
        assert!(w.verify());
        let p = &w.pairing_data;
        assert_eq!((&p[0], &p[1]), (&int(0), &int(0)));
        assert_eq!((&p[2], &p[3]), (&int(3), &int(3)));
    }

    #[test]
    fn bm_orth_root() {
        let t = IntegerLattice::from_i64(&[&[2, 0], &[0, -2]]).unwrap();
        let w = bm_wall_test(&t, &LatticeVector::from_i64(&[1, 0])).unwrap().unwrap();
        assert_eq!(w.condition, Condition::BmOrthRoot);
        assert!(w.verify());
    }

    #[test]
    fn bm_rejects_bad_input() {
        let t = IntegerLattice::from_i64(&[&[2, 0], &[0, 2]]).unwrap();
        assert!(bm_wall_test(&t, &LatticeVector::from_i64(&[1, 0])).is_err());
        let t = IntegerLattice::from_i64(&[&[2, 0], &[0, -2]]).unwrap();
        assert!(bm_wall_test(&t, &LatticeVector::from_i64(&[0, 1])).is_err());
    }

    #[test]
    fn tampered_witness_fails_verification() {
        let ctx = make_context(3).unwrap();
        let mut w = markman_wall_test(&ctx, &ctx.delta()).unwrap().unwrap();
        w.pairing_data[2] += 1;
        assert!(!w.verify());
    }

    /// Brute-force oracle for the four conditions over a coordinate box.
    fn brute_detects(t: &IntegerLattice, v: &LatticeVector, r: i64) -> bool {
        let vv = inner(t, v, v).unwrap();
        for x in -r..=r {
            for y in -r..=r {
                let w = LatticeVector::from_i64(&[x, y]);
                let sq = inner(t, &w, &w).unwrap();
                let k = inner(t, &w, v).unwrap();
                if sq == int(-2) && k.is_zero() {
                    return true;
                }
                if sq.is_zero() && (k == int(1) || k == int(2)) {
                    return true;
                }
                if sq == int(-2) && k.is_positive() && int(2) * &k <= vv {
                    return true;
                }
                let rest = v.sub(&w);
                let st = inner(t, &rest, &rest).unwrap();
                if !sq.is_negative() && !st.is_negative() && k.is_positive() && k < vv {
                    return true;
                }
            }
        }
        false
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn bm_matches_box_oracle(a in 1i64..5, b in -4i64..=4, c in -6i64..=-1) {
            let t = IntegerLattice::from_i64(&[&[2 * a, b], &[b, 2 * c]]).unwrap();
            prop_assume!(t.det().is_negative());
            let v = LatticeVector::from_i64(&[1, 0]);
            let got = bm_wall_test(&t, &v).unwrap();
            if let Some(w) = &got {
                prop_assert!(w.verify());
            }
            prop_assert_eq!(got.is_some(), brute_detects(&t, &v, 30));
        }
    }
}
