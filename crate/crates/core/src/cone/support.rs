//! Supporting walls of the chamber containing a positive class ω.
//!
//! A candidate wall D supports a facet when some x ∈ D^⊥ has x² > 0 and
//! (D', x) > 0 for every other candidate D'. Inside D^⊥ we slice by
//! (x, ω_H) = 1, where ω_H is the projection of ω, and write
//! x = c₀ + Σ tₗ yₗ with c₀ = ω_H/ω_H² and y a basis of {D, ω}^⊥. Then
//! x² = c₀² − tᵀNt for the positive definite N = −Gram(y), and every other
//! wall becomes a half-space aⱼ·t > bⱼ. D is a facet iff the open polyhedron
//! meets the open ellipsoid tᵀNt < c₀², decided by the minimum-norm point of
//! the closed polyhedron plus a strictly interior direction at that point.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{pair_int, walls_between, PicardData, Wall};
use crate::error::{input, Error, Result};
use crate::io::{rat_array, vector_value};
use crate::k3n::WallType;
use crate::lattice::{orthogonal_complement, LatticeVector};
use crate::matrix::{dot_rat, solve_rat};
use crate::num::{clear_denominators, format_rat, gcd_all, Int, Rat};

/// Largest Picard rank accepted for facet certification.
pub const MAX_RHO: usize = 5;
const SHUFFLE_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Completeness {
    /// Every wall of the given types bounding the chamber is listed.
    Exact,
    /// Complete among candidates of coefficient height at most the bound.
    UpToHeight(u64),
}

impl Completeness {
    pub fn label(&self) -> String {
        match self {
            Completeness::Exact => "exact".into(),
            Completeness::UpToHeight(b) => format!("complete up to height {b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportingWall {
    pub wall: Wall,
    /// x with (D, x) = 0, (D', x) > 0 for the other candidates and x² > 0.
    pub certificate: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportingWalls {
    pub walls: Vec<SupportingWall>,
    pub completeness: Completeness,
    pub candidates: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalRay {
    pub wall: Wall,
    pub ray: Vec<Rat>,
    pub ray_square: Rat,
}

/// Supporting walls, rays and optionally the walls crossed from α to β.
#[derive(Clone, Debug)]
pub struct ChamberReport {
    pub n: u64,
    pub reference: Vec<Rat>,
    pub walls_crossed: Option<Vec<Wall>>,
    pub supporting: SupportingWalls,
    pub rays: Vec<ExtremalRay>,
}

impl ChamberReport {
    pub fn build(
        p: &PicardData,
        omega: &[Rat],
        alpha_beta: Option<(&[Rat], &[Rat])>,
        types: &[WallType],
        search_bound: u64,
    ) -> Result<Self> {
        let supporting = supporting_walls(p, omega, types, search_bound)?;
        let rays = rays_of(&supporting);
        let walls_crossed = match alpha_beta {
            Some((a, b)) => Some(walls_between(p, a, b, types)?),
            None => None,
        };
        Ok(ChamberReport {
            n: p.ctx().n(),
            reference: omega.to_vec(),
            walls_crossed,
            supporting,
            rays,
        })
    }

    pub fn to_json(&self) -> Value {
        let supporting: Vec<Value> = self
            .supporting
            .walls
            .iter()
            .map(|s| {
                let mut v = s.wall.to_json();
                v["certificate"] = rat_array(&s.certificate);
                v
            })
            .collect();
        let rays: Vec<Value> = self
            .rays
            .iter()
            .map(|r| {
                json!({
                    "D": vector_value(&r.wall.d),
                    "ray": rat_array(&r.ray),
                    "ray_square": format_rat(&r.ray_square),
                })
            })
            .collect();
        let mut out = json!({
            "n": self.n,
            "reference": rat_array(&self.reference),
            "supporting": supporting,
            "rays": rays,
            "completeness": self.supporting.completeness.label(),
            "candidates": self.supporting.candidates,
            "candidate_arrangement_only": self.n >= 5,
        });
        if let Some(w) = &self.walls_crossed {
            out["walls_crossed"] = Value::Array(w.iter().map(Wall::to_json).collect());
        }
        out
    }
}

/// Walls of the given types and coefficient height ≤ `search_bound`, oriented
/// so that (D, ω) > 0. Errors if ω lies on one of them.
fn candidates(p: &PicardData, omega: &[Rat], types: &[WallType], search_bound: u64) -> Result<Vec<Wall>> {
    let wanted: BTreeSet<(Int, Int)> = types
        .iter()
        .map(|t| (t.square.clone(), t.div.clone()))
        .collect();
    let squares: BTreeSet<Int> = types.iter().map(|t| t.square.clone()).collect();
    let rho = p.rho();
    let (omega_int, _) = clear_denominators(omega);
    let box_iter = BoxIter::new(rho, search_bound)?;
    let fast = FastForm::new(p, &omega_int);
    let mut out = Vec::new();
    for x in box_iter {
        let (sq, side) = match fast.as_ref().and_then(|f| f.eval(&x)) {
            Some((sq, side)) => (Int::from(sq), side.signum() as i8),
            None => {
                let d = LatticeVector::from_i64(&x);
                let side = p.inner(&d.to_rat(), omega);
                let s = if side.is_positive() { 1 } else if side.is_negative() { -1 } else { 0 };
                (crate::lattice::inner(p.pic(), &d, &d)?, s)
            }
        };
        if side < 0 || !squares.contains(&sq) {
            continue;
        }
        let d = LatticeVector::from_i64(&x);
        if d.is_zero() || !gcd_all(d.coords()).eq(&Int::from(1)) {
            continue;
        }
        let div = p.div_in_ln(&d)?;
        if !wanted.contains(&(sq.clone(), div.clone())) {
            continue;
        }
        if side == 0 {
            return Err(Error::OnWall { wall: d.to_string() });
        }
        out.push(Wall {
            d,
            wall_type: WallType::new(sq, div)?,
        });
    }
    out.sort();
    Ok(out)
}

/// xᵀGx and (x, ω) in i128 when the inputs are small enough.
struct FastForm {
    gram: Vec<Vec<i128>>,
    omega: Vec<i128>,
}

impl FastForm {
    fn new(p: &PicardData, omega_int: &[Int]) -> Option<Self> {
        let rho = p.rho();
        let mut gram = vec![vec![0i128; rho]; rho];
        for (i, row) in gram.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = i64::try_from(&p.pic().gram()[(i, j)]).ok()? as i128;
            }
        }
        let omega = omega_int
            .iter()
            .map(|w| i64::try_from(w).ok().map(i128::from))
            .collect::<Option<Vec<_>>>()?;
        Some(FastForm { gram, omega })
    }

    fn eval(&self, x: &[i64]) -> Option<(i128, i128)> {
        let mut sq: i128 = 0;
        let mut side: i128 = 0;
        for (i, row) in self.gram.iter().enumerate() {
            let xi = x[i] as i128;
            let mut gx: i128 = 0;
            for (j, g) in row.iter().enumerate() {
                gx = gx.checked_add(g.checked_mul(x[j] as i128)?)?;
            }
            sq = sq.checked_add(xi.checked_mul(gx)?)?;
            let mut gw: i128 = 0;
            for (j, g) in row.iter().enumerate() {
                gw = gw.checked_add(g.checked_mul(self.omega[j])?)?;
            }
            side = side.checked_add(xi.checked_mul(gw)?)?;
        }
        Some((sq, side))
    }
}

/// Odometer over [−b, b]^ρ.
struct BoxIter {
    bound: i64,
    cur: Option<Vec<i64>>,
}

impl BoxIter {
    fn new(rho: usize, bound: u64) -> Result<Self> {
        let bound = i64::try_from(bound).map_err(|_| Error::Input("search bound too large".into()))?;
        Ok(BoxIter {
            bound,
            cur: Some(vec![-bound; rho]),
        })
    }
}

impl Iterator for BoxIter {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let cur = self.cur.take()?;
        let mut nxt = cur.clone();
        let mut i = nxt.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if nxt[i] < self.bound {
                nxt[i] += 1;
                self.cur = Some(nxt);
                break;
            }
            nxt[i] = -self.bound;
        }
        Some(cur)
    }
}

struct Slice {
    c0: Vec<Rat>,
    basis: Vec<Vec<Rat>>,
    n_mat: Vec<Vec<Rat>>,
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
}

impl Slice {
    fn point(&self, t: &[Rat]) -> Vec<Rat> {
        let mut x = self.c0.clone();
        for (tl, y) in t.iter().zip(&self.basis) {
            for (xi, yi) in x.iter_mut().zip(y) {
                *xi += tl * yi;
            }
        }
        x
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn norm(&self, t: &[Rat]) -> Rat {
        let nt: Vec<Rat> = self.n_mat.iter().map(|r| dot_rat(r, t)).collect();
        dot_rat(t, &nt)
    }

    /// Minimum-norm point of {aⱼ·t = bⱼ : j ∈ eq}, or `None` if inconsistent.
    fn project(&self, eq: &[usize]) -> Option<Vec<Rat>> {
        let dim = self.dim();
        if eq.is_empty() {
            return Some(vec![Rat::zero(); dim]);
        }
        // columns of N⁻¹Aᵀ
        let mut ninv_at = Vec::with_capacity(eq.len());
        for &j in eq {
            ninv_at.push(solve_rat(&self.n_mat, &self.rows[j])?);
        }
        let m: Vec<Vec<Rat>> = eq
            .iter()
            .map(|&i| ninv_at.iter().map(|c| dot_rat(&self.rows[i], c)).collect())
            .collect();
        let b: Vec<Rat> = eq.iter().map(|&j| self.rhs[j].clone()).collect();
        let lambda = solve_rat(&m, &b)?;
        let mut t = vec![Rat::zero(); dim];
        for (l, c) in lambda.iter().zip(&ninv_at) {
            for (ti, ci) in t.iter_mut().zip(c) {
                *ti += l * ci;
            }
        }
        eq.iter()
            .all(|&j| dot_rat(&self.rows[j], &t) == self.rhs[j])
            .then_some(t)
    }

    fn violates(&self, j: usize, t: &[Rat]) -> bool {
        dot_rat(&self.rows[j], t) < self.rhs[j]
    }

    /// Seidel's randomized recursion for the minimum-norm feasible point.
    fn min_norm(&self, order: &[usize], eq: &mut Vec<usize>) -> Option<Vec<Rat>> {
        let mut t = self.project(eq)?;
        if eq.len() >= self.dim() {
            return order.iter().all(|&j| !self.violates(j, &t)).then_some(t);
        }
        for (pos, &j) in order.iter().enumerate() {
            if self.violates(j, &t) {
                eq.push(j);
                let sub = self.min_norm(&order[..pos], eq);
                eq.pop();
                t = sub?;
            }
        }
        Some(t)
    }
}

/// Some d with a·d ≥ c for every row, by Fourier–Motzkin elimination.
fn fourier_motzkin(rows: &[(Vec<Rat>, Rat)], dim: usize) -> Option<Vec<Rat>> {
    if dim == 0 {
        return rows.iter().all(|(_, c)| !c.is_positive()).then(Vec::new);
    }
    let k = dim - 1;
    let (mut lower, mut upper, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    for (a, c) in rows {
        if a[k].is_positive() {
            lower.push((a, c));
        } else if a[k].is_negative() {
            upper.push((a, c));
        } else {
            rest.push((a[..k].to_vec(), c.clone()));
        }
    }
    for (ap, cp) in &lower {
        for (aq, cq) in &upper {
            let (sp, sq) = (ap[k].clone(), -aq[k].clone());
            let a: Vec<Rat> = (0..k).map(|i| &sq * &ap[i] + &sp * &aq[i]).collect();
            rest.push((a, &sq * *cp + &sp * *cq));
        }
    }
    let mut d = fourier_motzkin(&rest, k)?;
    let bound = |a: &Vec<Rat>, c: &Rat| (c - dot_rat(&a[..k], &d)) / &a[k];
    let lo = lower.iter().map(|(a, c)| bound(a, c)).max();
    let hi = upper.iter().map(|(a, c)| bound(a, c)).min();
    d.push(lo.or(hi).unwrap_or_default());
    Some(d)
}

/// A point certifying that `walls[i]` supports a facet, if it does.
fn facet_certificate(p: &PicardData, omega: &[Rat], walls: &[Wall], i: usize) -> Result<Option<Vec<Rat>>> {
    let d = walls[i].d.to_rat();
    let dd = p.square(&d);
    let k = p.inner(&d, omega) / &dd;
    let omega_h: Vec<Rat> = omega.iter().zip(&d).map(|(w, x)| w - &k * x).collect();
    let oh2 = p.square(&omega_h);
    let c0: Vec<Rat> = omega_h.iter().map(|x| x / &oh2).collect();

    let basis: Vec<Vec<Rat>> = if p.rho() <= 2 {
        Vec::new()
    } else {
        let (w_int, _) = clear_denominators(omega);
        let comp = orthogonal_complement(p.pic(), &[walls[i].d.clone(), LatticeVector::new(w_int)])?;
        comp.basis_images().iter().map(LatticeVector::to_rat).collect()
    };
    let n_mat: Vec<Vec<Rat>> = basis
        .iter()
        .map(|a| basis.iter().map(|b| -p.inner(a, b)).collect())
        .collect();
    let others: Vec<usize> = (0..walls.len()).filter(|&j| j != i).collect();
    let rows: Vec<Vec<Rat>> = others
        .iter()
        .map(|&j| basis.iter().map(|y| pair_int(p, &walls[j].d, y)).collect())
        .collect();
    let rhs: Vec<Rat> = others.iter().map(|&j| -pair_int(p, &walls[j].d, &c0)).collect();
    let slice = Slice {
        c0,
        basis,
        n_mat,
        rows,
        rhs,
    };

    let mut order: Vec<usize> = (0..others.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(SHUFFLE_SEED));
    let Some(t_star) = slice.min_norm(&order, &mut Vec::new()) else {
        return Ok(None);
    };
    if slice.norm(&t_star) >= p.square(&slice.c0) {
        return Ok(None);
    }
    let active: Vec<(Vec<Rat>, Rat)> = (0..others.len())
        .filter(|&j| dot_rat(&slice.rows[j], &t_star) == slice.rhs[j])
        .map(|j| (slice.rows[j].clone(), Rat::from_integer(Int::from(1))))
        .collect();
    let Some(dir) = fourier_motzkin(&active, slice.dim()) else {
        return Ok(None);
    };

    let mut eps = Rat::from_integer(Int::from(1));
    for _ in 0..256 {
        let t: Vec<Rat> = t_star.iter().zip(&dir).map(|(a, b)| a + &eps * b).collect();
        let x = slice.point(&t);
        let strict = others.iter().all(|&j| pair_int(p, &walls[j].d, &x).is_positive());
        if strict && p.square(&x).is_positive() {
            debug_assert!(pair_int(p, &walls[i].d, &x).is_zero());
            return Ok(Some(x));
        }
        eps /= Int::from(2);
    }
    Err(Error::Input("facet certificate did not converge".into()))
}

/// For ρ = 2: the nearest wall of any height on the far side of `wall`, with
/// the crossing point as certificate.
fn refine_rank_two(p: &PicardData, omega: &[Rat], types: &[WallType], sw: &SupportingWall) -> Result<SupportingWall> {
    let d = sw.wall.d.to_rat();
    let mut eps = Rat::from_integer(Int::from(1));
    let beta = loop {
        let b: Vec<Rat> = sw.certificate.iter().zip(&d).map(|(x, y)| x + &eps * y).collect();
        if p.square(&b).is_positive() {
            break b;
        }
        eps /= Int::from(2);
    };
    let crossed = walls_between(p, omega, &beta, types)?;
    let crossing = |w: &Wall| {
        let a = pair_int(p, &w.d, omega);
        let b = pair_int(p, &w.d, &beta);
        &a / (&a - b)
    };
    let nearest = crossed
        .iter()
        .min_by(|a, b| crossing(a).cmp(&crossing(b)))
        .ok_or_else(|| Error::Input("refinement lost the wall it started from".into()))?;
    let tau = crossing(nearest);
    let point: Vec<Rat> = omega.iter().zip(&beta).map(|(w, b)| w + &tau * (b - w)).collect();
    Ok(SupportingWall {
        wall: nearest.clone(),
        certificate: point,
    })
}

/// Errors when ω is orthogonal to a wall of the given types.
fn check_off_walls_rank_two(p: &PicardData, omega: &[Rat], types: &[WallType]) -> Result<()> {
    let (w, _) = clear_denominators(omega);
    let gw = p.pic().gram().mul_vec(&w);
    let g = LatticeVector::new(vec![gw[1].clone(), -gw[0].clone()]);
    if g.is_zero() {
        return Ok(());
    }
    let c = g.content();
    let g = LatticeVector::new(g.coords().iter().map(|x| x / &c).collect());
    let sq = crate::lattice::inner(p.pic(), &g, &g)?;
    if !sq.is_negative() {
        return Ok(());
    }
    let t = p.wall_type_of(&g)?;
    if types.contains(&t) {
        return Err(Error::OnWall { wall: g.to_string() });
    }
    Ok(())
}

/// Walls bounding a facet of the chamber of ω, each with a certificate point.
///
/// For ρ = 2 each side is re-examined with an exact walls_between query, so
/// the answer does not depend on `search_bound` once both sides are found.
pub fn supporting_walls(p: &PicardData, omega: &[Rat], types: &[WallType], search_bound: u64) -> Result<SupportingWalls> {
    p.check_positive(omega, "omega")?;
    if p.rho() > MAX_RHO {
        return input(format!("supporting walls are certified only for ρ ≤ {MAX_RHO}"));
    }
    if search_bound == 0 {
        return input("search bound must be at least 1");
    }
    if p.rho() == 2 {
        check_off_walls_rank_two(p, omega, types)?;
    }
    let cands = candidates(p, omega, types, search_bound)?;
    let mut walls = Vec::new();
    for i in 0..cands.len() {
        if let Some(x) = facet_certificate(p, omega, &cands, i)? {
            walls.push(SupportingWall {
                wall: cands[i].clone(),
                certificate: x,
            });
        }
    }
    let completeness = match p.rho() {
        1 => Completeness::Exact,
        2 => {
            let mut refined = Vec::with_capacity(walls.len());
            for sw in &walls {
                refined.push(refine_rank_two(p, omega, types, sw)?);
            }
            let exact = refined.len() == 2;
            walls = refined;
            if exact {
                Completeness::Exact
            } else {
                Completeness::UpToHeight(search_bound)
            }
        }
        _ => Completeness::UpToHeight(search_bound),
    };
    walls.sort_by(|a, b| a.wall.cmp(&b.wall));
    Ok(SupportingWalls {
        walls,
        completeness,
        candidates: cands.len(),
    })
}

fn rays_of(s: &SupportingWalls) -> Vec<ExtremalRay> {
    s.walls
        .iter()
        .map(|sw| ExtremalRay {
            ray: sw.wall.ray(),
            ray_square: sw.wall.wall_type.ray_square.clone(),
            wall: sw.wall.clone(),
        })
        .collect()
}

/// r = D / div(D) for each supporting wall D, tagged with r².
pub fn extremal_rays(p: &PicardData, omega: &[Rat], types: &[WallType], search_bound: u64) -> Result<Vec<ExtremalRay>> {
    Ok(rays_of(&supporting_walls(p, omega, types, search_bound)?))
}
