//! Exact arithmetic on even integral lattices.
//!
//! A lattice is a free Z-module with an even symmetric integer Gram matrix.
//! Vectors are integer coordinate vectors in the lattice basis. Nothing here
//! touches floating point.

mod discriminant;
mod enumerate;
mod snf;
mod sublattice;

use std::fmt;
use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use discriminant::{disc_class, discriminant_group, DiscClass, DiscriminantGroup};
pub use enumerate::{
    enumerate_ball, short_vectors, short_vectors_with_limits, EnumerationLimits, MAX_CELLS_ENV,
};
pub use snf::{hermite_rows, smith_normal_form, SmithForm};
pub use sublattice::{orthogonal_complement, saturation, span_embedding};

use crate::error::{input, Error, Result};
use crate::matrix::{inertia, to_rat_rows, IntMatrix};
use crate::num::{gcd_all, Int, Rat};

/// Finite-rank lattice with an even symmetric Gram matrix.
#[derive(Clone)]
pub struct IntegerLattice {
    gram: IntMatrix,
    label: Option<String>,
    degenerate: bool,
    eichler: bool,
    disc: OnceLock<DiscriminantGroup>,
}

impl PartialEq for IntegerLattice {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

impl Eq for IntegerLattice {}

impl fmt::Debug for IntegerLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntegerLattice")
            .field("label", &self.label)
            .field("rank", &self.rank())
            .field("gram", &self.gram)
            .finish()
    }
}

fn check_even_symmetric(gram: &IntMatrix) -> Result<()> {
    if !gram.is_square() {
        return input("Gram matrix must be square");
    }
    if !gram.is_symmetric() {
        return input("Gram matrix must be symmetric");
    }
    if let Some(i) = (0..gram.rows()).find(|&i| gram[(i, i)].is_odd()) {
        return input(format!("diagonal entry {i} is odd; lattice is not even"));
    }
    Ok(())
}

impl IntegerLattice {
    /// Nondegenerate even lattice.
    pub fn new(gram: IntMatrix) -> Result<Self> {
        check_even_symmetric(&gram)?;
        if gram.det().is_zero() {
            return Err(Error::Degenerate("Gram matrix is singular".into()));
        }
        Ok(Self::raw(gram, false))
    }

    /// Even lattice that may be degenerate; degenerate ones carry a flag and
    /// are refused by operations that need a nondegenerate form.
    pub fn new_possibly_degenerate(gram: IntMatrix) -> Result<Self> {
        check_even_symmetric(&gram)?;
        let degenerate = gram.det().is_zero();
        Ok(Self::raw(gram, degenerate))
    }

    fn raw(gram: IntMatrix, degenerate: bool) -> Self {
        IntegerLattice {
            gram,
            label: None,
            degenerate,
            eichler: false,
            disc: OnceLock::new(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(IntMatrix::from_i64(rows))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Caller asserts the lattice splits off two hyperbolic planes, U ⊕ U ⊕ N.
    pub fn assume_two_hyperbolic_planes(mut self) -> Self {
        self.eichler = true;
        self
    }

    /// True when the lattice is known to contain U ⊕ U as an orthogonal summand,
    /// either by construction through [`direct_sum`] or by caller assertion.
    pub fn has_two_hyperbolic_planes(&self) -> bool {
        self.eichler
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn det(&self) -> Int {
        self.gram.det()
    }

    pub(crate) fn require_nondegenerate(&self, what: &str) -> Result<()> {
        if self.degenerate {
            Err(Error::Degenerate(format!("{what} needs a nondegenerate lattice")))
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_vector(&self, v: &LatticeVector) -> Result<()> {
        if v.len() != self.rank() {
            return input(format!(
                "vector has {} coordinates, lattice has rank {}",
                v.len(),
                self.rank()
            ));
        }
        Ok(())
    }

    /// (x, y) for rational coordinate vectors.
    pub fn inner_rat(&self, x: &[Rat], y: &[Rat]) -> Rat {
        let gy = self.gram.mul_rat_vec(y);
        x.iter().zip(&gy).map(|(a, b)| a * b).sum()
    }

    pub(crate) fn cached_discriminant(&self) -> Result<&DiscriminantGroup> {
        if let Some(d) = self.disc.get() {
            return Ok(d);
        }
        let d = discriminant::compute(self)?;
        Ok(self.disc.get_or_init(|| d))
    }
}

/// Integer coordinate vector in some lattice basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector {
    coords: Vec<Int>,
}

impl LatticeVector {
    pub fn new(coords: Vec<Int>) -> Self {
        LatticeVector { coords }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&c| Int::from(c)).collect())
    }

    pub fn zero(rank: usize) -> Self {
        Self::new(vec![Int::zero(); rank])
    }

    /// Basis vector `i` of a rank-`rank` lattice.
    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = Self::zero(rank);
        v.coords[i] = Int::one();
        v
    }

    pub fn coords(&self) -> &[Int] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Int> {
        self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// gcd of the coordinates.
    pub fn content(&self) -> Int {
        gcd_all(&self.coords)
    }

    pub fn scale(&self, k: &Int) -> Self {
        Self::new(self.coords.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coords.iter().map(|c| -c).collect())
    }

    pub fn to_rat(&self) -> Vec<Rat> {
        self.coords.iter().map(|c| Rat::from_integer(c.clone())).collect()
    }

    /// Largest absolute coordinate.
    pub fn height(&self) -> Int {
        self.coords.iter().map(|c| c.abs()).max().unwrap_or_default()
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Isometric embedding of `source` into `target`; columns of `matrix` are the
/// images of the source basis.
#[derive(Clone, Debug)]
pub struct Embedding {
    source: IntegerLattice,
    target: IntegerLattice,
    matrix: IntMatrix,
    primitive: bool,
}

impl Embedding {
    /// Checks Gram compatibility; when `require_primitive` is set also checks
    /// that the image is saturated.
    pub fn new(
        source: IntegerLattice,
        target: IntegerLattice,
        matrix: IntMatrix,
        require_primitive: bool,
    ) -> Result<Self> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return input(format!(
                "embedding matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            ));
        }
        let induced = matrix.transpose().mul(target.gram()).mul(&matrix);
        if &induced != source.gram() {
            return input("embedding is not Gram compatible");
        }
        let primitive = image_is_saturated(&matrix);
        if require_primitive && !primitive {
            return input("embedding image is not primitive");
        }
        Ok(Embedding {
            source,
            target,
            matrix,
            primitive,
        })
    }

    /// Embedding spanned by the given target vectors, with the induced Gram.
    pub fn from_columns(target: &IntegerLattice, columns: &[LatticeVector]) -> Result<Self> {
        for c in columns {
            target.check_vector(c)?;
        }
        let cols: Vec<Vec<Int>> = columns.iter().map(|c| c.coords().to_vec()).collect();
        let matrix = IntMatrix::from_columns(target.rank(), &cols)?;
        let induced = matrix.transpose().mul(target.gram()).mul(&matrix);
        let source = IntegerLattice::new_possibly_degenerate(induced)?;
        let primitive = image_is_saturated(&matrix);
        Ok(Embedding {
            source,
            target: target.clone(),
            matrix,
            primitive,
        })
    }

    pub fn source(&self) -> &IntegerLattice {
        &self.source
    }

    pub fn target(&self) -> &IntegerLattice {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn image(&self, x: &LatticeVector) -> LatticeVector {
        LatticeVector::new(self.matrix.mul_vec(x.coords()))
    }

    pub fn image_rat(&self, x: &[Rat]) -> Vec<Rat> {
        self.matrix.mul_rat_vec(x)
    }

    pub fn basis_images(&self) -> Vec<LatticeVector> {
        (0..self.matrix.cols())
            .map(|j| LatticeVector::new(self.matrix.col(j)))
            .collect()
    }

    /// Coordinates in the source basis of a target vector lying in the image.
    pub fn preimage(&self, y: &LatticeVector) -> Option<LatticeVector> {
        let a: Vec<Vec<Rat>> = to_rat_rows(&self.matrix);
        let b = y.to_rat();
        let x = crate::matrix::solve_rat(&a, &b)?;
        if x.iter().any(|c| !c.is_integer()) {
            return None;
        }
        let x = LatticeVector::new(x.into_iter().map(|c| c.to_integer()).collect());
        (self.image(&x) == *y).then_some(x)
    }
}

fn image_is_saturated(matrix: &IntMatrix) -> bool {
    let s = smith_normal_form(matrix);
    s.rank() == matrix.cols() && s.diagonal().iter().all(One::is_one)
}

/// (x, y) = xᵀ·G·y.
pub fn inner(lattice: &IntegerLattice, x: &LatticeVector, y: &LatticeVector) -> Result<Int> {
    lattice.check_vector(x)?;
    lattice.check_vector(y)?;
    let gy = lattice.gram.mul_vec(y.coords());
    Ok(crate::matrix::dot_int(x.coords(), &gy))
}

/// Orthogonal direct sum with block-diagonal Gram matrix.
pub fn direct_sum(parts: &[IntegerLattice]) -> IntegerLattice {
    let blocks: Vec<&IntMatrix> = parts.iter().map(|p| &p.gram).collect();
    let gram = IntMatrix::block_diag(&blocks);
    let u = standard_lattice(StandardLattice::U).expect("U is valid");
    let planes = parts.iter().filter(|p| p.gram == u.gram).count();
    let mut out = IntegerLattice::raw(gram, parts.iter().any(|p| p.degenerate));
    out.eichler = planes >= 2 || parts.iter().any(|p| p.eichler);
    let labels: Vec<String> = parts
        .iter()
        .map(|p| p.label.clone().unwrap_or_else(|| format!("rank{}", p.rank())))
        .collect();
    if !labels.is_empty() {
        out.label = Some(labels.join(" + "));
    }
    out
}

/// Named lattices with repository-fixed Gram matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardLattice {
    /// Hyperbolic plane, Gram [[0,1],[1,0]].
    U,
    /// Negative definite E8, in the basis of simple roots ordered as in
    /// Bourbaki's labelling (1-3-4-5-6-7-8 chain, node 2 attached to 4).
    E8Minus,
    /// ⟨k⟩ for even nonzero k.
    Rank1(Int),
}

impl std::str::FromStr for StandardLattice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "U" => Ok(StandardLattice::U),
            "E8_minus" | "E8(-1)" => Ok(StandardLattice::E8Minus),
            _ => {
                let inner = t
                    .strip_prefix("rank1(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("unknown standard lattice `{t}`")))?;
                let k: Int = inner
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad rank-1 entry `{inner}`")))?;
                Ok(StandardLattice::Rank1(k))
            }
        }
    }
}

const E8_EDGES: [(usize, usize); 7] = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];

pub fn standard_lattice(name: StandardLattice) -> Result<IntegerLattice> {
    match name {
        StandardLattice::U => {
            Ok(IntegerLattice::from_i64(&[&[0, 1], &[1, 0]])?.with_label("U"))
        }
        StandardLattice::E8Minus => {
            let mut g = IntMatrix::zeros(8, 8);
            for i in 0..8 {
                g[(i, i)] = Int::from(-2);
            }
            for (a, b) in E8_EDGES {
                g[(a, b)] = Int::one();
                g[(b, a)] = Int::one();
            }
            Ok(IntegerLattice::new(g)?.with_label("E8(-1)"))
        }
        StandardLattice::Rank1(k) => {
            if k.is_zero() || k.is_odd() {
                return input(format!("rank-1 lattice needs an even nonzero entry, got {k}"));
            }
            let label = format!("<{k}>");
            let g = IntMatrix::from_rows(vec![vec![k]])?;
            Ok(IntegerLattice::new(g)?.with_label(label))
        }
    }
}

/// Positive generator of the ideal (v, L).
pub fn divisibility(lattice: &IntegerLattice, v: &LatticeVector) -> Result<Int> {
    lattice.check_vector(v)?;
    if v.is_zero() {
        return input("divisibility of the zero vector");
    }
    let g = gcd_all(&lattice.gram.mul_vec(v.coords()));
    if g.is_zero() {
        return Err(Error::Degenerate(format!("{v} lies in the radical")));
    }
    Ok(g)
}

pub fn is_primitive(lattice: &IntegerLattice, v: &LatticeVector) -> Result<bool> {
    lattice.check_vector(v)?;
    if v.is_zero() {
        return input("primitivity of the zero vector");
    }
    Ok(v.content().is_one())
}

pub fn primitive_part(lattice: &IntegerLattice, v: &LatticeVector) -> Result<LatticeVector> {
    lattice.check_vector(v)?;
    if v.is_zero() {
        return input("primitive part of the zero vector");
    }
    let c = v.content();
    Ok(LatticeVector::new(v.coords().iter().map(|x| x / &c).collect()))
}

/// (positive, negative) eigenvalue counts, computed by exact congruence
/// diagonalization.
pub fn signature(lattice: &IntegerLattice) -> Result<(usize, usize)> {
    let (p, n, z) = inertia(&to_rat_rows(&lattice.gram));
    if z > 0 {
        return Err(Error::Degenerate(format!("form has a {z}-dimensional radical")));
    }
    Ok((p, n))
}
