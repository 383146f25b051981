use super::{hermite_rows, smith_normal_form, Embedding, IntegerLattice, LatticeVector};
use crate::error::{input, Result};
use crate::matrix::{rank_int, IntMatrix};
use crate::num::Int;

/// Integer kernel {x : a·x = 0} of an integer matrix, as a saturated basis in
/// Hermite form.
fn integer_kernel(a: &IntMatrix) -> Vec<Vec<Int>> {
    let n = a.cols();
    if a.rows() == 0 {
        return (0..n)
            .map(|i| LatticeVector::unit(n, i).into_coords())
            .collect();
    }
    let s = smith_normal_form(a);
    let r = s.rank();
    let basis: Vec<Vec<Int>> = (r..n).map(|j| s.q.col(j)).collect();
    hermite_rows(&basis)
}

/// The saturated sublattice {x : (x, s) = 0 for all s ∈ S}, with its induced
/// (possibly degenerate) Gram matrix.
pub fn orthogonal_complement(lattice: &IntegerLattice, s: &[LatticeVector]) -> Result<Embedding> {
    for v in s {
        lattice.check_vector(v)?;
    }
    let rows: Vec<Vec<Int>> = s
        .iter()
        .map(|v| lattice.gram().mul_vec(v.coords()))
        .collect();
    let a = if rows.is_empty() {
        IntMatrix::zeros(0, lattice.rank())
    } else {
        IntMatrix::from_rows(rows)?
    };
    let basis: Vec<LatticeVector> = integer_kernel(&a)
        .into_iter()
        .map(LatticeVector::new)
        .collect();
    Embedding::from_columns(lattice, &basis)
}

/// Sublattice spanned by the given vectors (no saturation).
pub fn span_embedding(lattice: &IntegerLattice, vectors: &[LatticeVector]) -> Result<Embedding> {
    Embedding::from_columns(lattice, vectors)
}

/// Primitive closure (Q-span ∩ L) of a full-column-rank sublattice. Already
/// saturated input is returned unchanged.
pub fn saturation(lattice: &IntegerLattice, sub: &Embedding) -> Result<Embedding> {
    if sub.target() != lattice {
        return input("sublattice does not live in this lattice");
    }
    let b = sub.matrix();
    let k = b.cols();
    let cols: Vec<Vec<Int>> = (0..k).map(|j| b.col(j)).collect();
    if rank_int(&cols) != k {
        return input("sublattice generators are linearly dependent");
    }
    if sub.is_primitive() {
        return Ok(sub.clone());
    }
    // (left kernel of B)^⊥ in the standard dot product
    let left = integer_kernel(&b.transpose());
    let left = if left.is_empty() {
        IntMatrix::zeros(0, lattice.rank())
    } else {
        IntMatrix::from_rows(left)?
    };
    let basis: Vec<LatticeVector> = integer_kernel(&left)
        .into_iter()
        .map(LatticeVector::new)
        .collect();
    debug_assert_eq!(basis.len(), k);
    Embedding::from_columns(lattice, &basis)
}
