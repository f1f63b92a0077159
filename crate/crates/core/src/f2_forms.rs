//! Linear algebra over the two-element field.
//!
//! Vectors are bit-packed into a single `u64` (bit `i` is coordinate `i`), so
//! every space here has dimension at most 64. Matrices are stored as packed
//! rows. The *standard* pairing of dimension `2k` pairs `e_{2i}` with
//! `e_{2i+1}`, i.e. its Gram matrix is block diagonal with `[[0,1],[1,0]]`
//! blocks.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Add;

use thiserror::Error;

/// Largest dimension a packed vector can carry.
pub const MAX_DIM: usize = 64;

/// Largest `k` for which the full group `Sp(2k, 2)` is enumerated.
pub const MAX_ENUM_RANK: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum F2Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("dimension {0} is outside the supported range 1..=64")]
    UnsupportedDimension(usize),
    #[error("odd dimension {0} admits no nondegenerate alternating pairing")]
    OddDimension(usize),
    #[error("Gram matrix is not alternating at entry ({row}, {col})")]
    NotAlternating { row: usize, col: usize },
    #[error("pairing is degenerate")]
    Degenerate,
    #[error("value {0} is not a bit")]
    NotABit(u8),
    #[error("matrix does not preserve the pairing")]
    NotSymplectic,
    #[error("full symplectic enumeration supports k in 1..={max}, got k = {k}")]
    UnsupportedRank { k: usize, max: usize },
    #[error("invalid symplectic basis: {0}")]
    InvalidBasis(&'static str),
}

pub type Result<T> = std::result::Result<T, F2Error>;

#[inline]
fn parity(x: u64) -> u8 {
    (x.count_ones() & 1) as u8
}

#[inline]
fn low_mask(dim: usize) -> u64 {
    if dim == 64 {
        u64::MAX
    } else {
        (1u64 << dim) - 1
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(F2Error::UnsupportedDimension(dim));
    }
    Ok(())
}

fn pack_bits(bits: &[u8]) -> Result<u64> {
    let mut packed = 0u64;
    for (i, &b) in bits.iter().enumerate() {
        match b {
            0 => {}
            1 => packed |= 1 << i,
            other => return Err(F2Error::NotABit(other)),
        }
    }
    Ok(packed)
}

fn unpack_bits(packed: u64, dim: usize) -> Vec<u8> {
    (0..dim).map(|i| ((packed >> i) & 1) as u8).collect()
}

/// A vector of GF(2)^dim.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Vector {
    dim: usize,
    bits: u64,
}

impl F2Vector {
    pub fn zero(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, bits: 0 })
    }

    /// The `i`-th standard basis vector.
    pub fn unit(dim: usize, i: usize) -> Result<Self> {
        check_dim(dim)?;
        if i >= dim {
            return Err(F2Error::DimensionMismatch { expected: dim, actual: i + 1 });
        }
        Ok(Self { dim, bits: 1 << i })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        check_dim(bits.len())?;
        Ok(Self { dim: bits.len(), bits: pack_bits(bits)? })
    }

    pub fn from_packed(dim: usize, bits: u64) -> Result<Self> {
        check_dim(dim)?;
        if bits & !low_mask(dim) != 0 {
            return Err(F2Error::DimensionMismatch { expected: dim, actual: 64 - bits.leading_zeros() as usize });
        }
        Ok(Self { dim, bits })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn packed(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, i: usize) -> u8 {
        ((self.bits >> i) & 1) as u8
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn to_bits(&self) -> Vec<u8> {
        unpack_bits(self.bits, self.dim)
    }

    /// Every vector of GF(2)^dim in increasing packed order.
    pub fn all(dim: usize) -> Result<impl Iterator<Item = F2Vector>> {
        if dim == 0 || dim > 32 {
            return Err(F2Error::UnsupportedDimension(dim));
        }
        Ok((0..(1u64 << dim)).map(move |bits| F2Vector { dim, bits }))
    }
}

impl Add for F2Vector {
    type Output = F2Vector;

    fn add(self, rhs: F2Vector) -> F2Vector {
        assert_eq!(self.dim, rhs.dim, "adding vectors of different dimension");
        F2Vector { dim: self.dim, bits: self.bits ^ rhs.bits }
    }
}

impl fmt::Display for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.to_bits() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// An even-dimensional space with a nondegenerate alternating pairing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymplecticSpaceF2 {
    dim: usize,
    gram: Vec<u64>,
}

impl SymplecticSpaceF2 {
    /// The standard pairing on GF(2)^{2k}.
    pub fn standard(k: usize) -> Result<Self> {
        let dim = 2 * k;
        check_dim(dim)?;
        let gram = (0..dim).map(|i| 1u64 << (i ^ 1)).collect();
        Ok(Self { dim, gram })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        let mut gram = Vec::with_capacity(dim);
        for row in rows {
            if row.len() != dim {
                return Err(F2Error::DimensionMismatch { expected: dim, actual: row.len() });
            }
            gram.push(pack_bits(row)?);
        }
        Self::from_packed(dim, gram)
    }

    pub fn from_packed(dim: usize, gram: Vec<u64>) -> Result<Self> {
        check_dim(dim)?;
        if gram.len() != dim {
            return Err(F2Error::DimensionMismatch { expected: dim, actual: gram.len() });
        }
        for i in 0..dim {
            if gram[i] & !low_mask(dim) != 0 {
                return Err(F2Error::DimensionMismatch { expected: dim, actual: 64 - gram[i].leading_zeros() as usize });
            }
            if (gram[i] >> i) & 1 == 1 {
                return Err(F2Error::NotAlternating { row: i, col: i });
            }
            for j in (i + 1)..dim {
                if (gram[i] >> j) & 1 != (gram[j] >> i) & 1 {
                    return Err(F2Error::NotAlternating { row: i, col: j });
                }
            }
        }
        if dim % 2 == 1 {
            return Err(F2Error::OddDimension(dim));
        }
        let space = Self { dim, gram };
        space.hyperbolic_pairs((0..dim).map(|i| 1u64 << i).collect())?;
        Ok(space)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.dim / 2
    }

    pub fn gram_rows(&self) -> Vec<Vec<u8>> {
        self.gram.iter().map(|&r| unpack_bits(r, self.dim)).collect()
    }

    pub fn is_standard(&self) -> bool {
        self.gram.iter().enumerate().all(|(i, &r)| r == 1u64 << (i ^ 1))
    }

    #[inline]
    fn pair_packed(&self, v: u64, w: u64) -> u8 {
        let mut acc = 0u64;
        let mut rest = v;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            acc ^= self.gram[i];
            rest &= rest - 1;
        }
        parity(acc & w)
    }

    /// The pairing `<v, w>`.
    pub fn pair(&self, v: &F2Vector, w: &F2Vector) -> Result<u8> {
        self.check_vector(v)?;
        self.check_vector(w)?;
        Ok(self.pair_packed(v.bits, w.bits))
    }

    fn check_vector(&self, v: &F2Vector) -> Result<()> {
        if v.dim != self.dim {
            return Err(F2Error::DimensionMismatch { expected: self.dim, actual: v.dim });
        }
        Ok(())
    }

    /// Symplectic Gram–Schmidt over the given spanning sequence.
    fn hyperbolic_pairs(&self, mut pool: Vec<u64>) -> Result<Vec<(u64, u64)>> {
        let mut pairs = Vec::with_capacity(self.dim / 2);
        loop {
            pool.retain(|&v| v != 0);
            if pool.is_empty() {
                break;
            }
            let a = pool.remove(0);
            let j = pool
                .iter()
                .position(|&w| self.pair_packed(a, w) == 1)
                .ok_or(F2Error::Degenerate)?;
            let b = pool.remove(j);
            for w in pool.iter_mut() {
                let wa = self.pair_packed(*w, a);
                let wb = self.pair_packed(*w, b);
                if wb == 1 {
                    *w ^= a;
                }
                if wa == 1 {
                    *w ^= b;
                }
            }
            pairs.push((a, b));
        }
        if 2 * pairs.len() != self.dim {
            return Err(F2Error::Degenerate);
        }
        Ok(pairs)
    }

    /// A hyperbolic basis `(a_i, b_i)` obtained from the standard basis.
    pub fn symplectic_basis(&self) -> Vec<(F2Vector, F2Vector)> {
        self.symplectic_basis_from(&self.standard_basis())
            .expect("validated space admits a symplectic basis")
    }

    /// A hyperbolic basis obtained by Gram–Schmidt over `seq`, which must span.
    pub fn symplectic_basis_from(&self, seq: &[F2Vector]) -> Result<Vec<(F2Vector, F2Vector)>> {
        for v in seq {
            self.check_vector(v)?;
        }
        let packed: Vec<u64> = seq.iter().map(|v| v.bits).collect();
        if rank_of(&packed) != self.dim {
            return Err(F2Error::InvalidBasis("sequence does not span the space"));
        }
        let dim = self.dim;
        Ok(self
            .hyperbolic_pairs(packed)?
            .into_iter()
            .map(|(a, b)| (F2Vector { dim, bits: a }, F2Vector { dim, bits: b }))
            .collect())
    }

    /// Checks `<a_i, b_j> = δ_ij` and `<a_i, a_j> = <b_i, b_j> = 0`.
    pub fn is_symplectic_basis(&self, pairs: &[(F2Vector, F2Vector)]) -> bool {
        if 2 * pairs.len() != self.dim || pairs.iter().any(|(a, b)| a.dim != self.dim || b.dim != self.dim) {
            return false;
        }
        for (i, (ai, bi)) in pairs.iter().enumerate() {
            for (j, (aj, bj)) in pairs.iter().enumerate() {
                let delta = u8::from(i == j);
                if self.pair_packed(ai.bits, bj.bits) != delta
                    || self.pair_packed(ai.bits, aj.bits) != 0
                    || self.pair_packed(bi.bits, bj.bits) != 0
                {
                    return false;
                }
            }
        }
        true
    }

    fn standard_basis(&self) -> Vec<F2Vector> {
        (0..self.dim).map(|i| F2Vector { dim: self.dim, bits: 1 << i }).collect()
    }

    /// The change-of-basis matrix whose columns are `a_1, b_1, a_2, b_2, ...`.
    fn basis_matrix(&self) -> F2Matrix {
        let cols: Vec<u64> = self
            .symplectic_basis()
            .into_iter()
            .flat_map(|(a, b)| [a.bits, b.bits])
            .collect();
        F2Matrix::from_columns(self.dim, &cols)
    }
}

fn rank_of(vectors: &[u64]) -> usize {
    let mut rows: Vec<u64> = vectors.to_vec();
    let mut rank = 0;
    for bit in 0..64 {
        let Some(p) = (rank..rows.len()).find(|&r| (rows[r] >> bit) & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && (*row >> bit) & 1 == 1 {
                *row ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

/// Square matrix over GF(2) with packed rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct F2Matrix {
    dim: usize,
    rows: Vec<u64>,
}

impl F2Matrix {
    fn identity(dim: usize) -> Self {
        Self { dim, rows: (0..dim).map(|i| 1 << i).collect() }
    }

    fn from_columns(dim: usize, cols: &[u64]) -> Self {
        let mut rows = vec![0u64; dim];
        for (j, &c) in cols.iter().enumerate() {
            for (i, row) in rows.iter_mut().enumerate() {
                *row |= ((c >> i) & 1) << j;
            }
        }
        Self { dim, rows }
    }

    fn apply(&self, v: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &r)| acc | (u64::from(parity(r & v)) << i))
    }

    fn column(&self, j: usize) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &r)| acc | (((r >> j) & 1) << i))
    }

    fn mul(&self, rhs: &F2Matrix) -> F2Matrix {
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                let mut acc = 0u64;
                let mut rest = r;
                while rest != 0 {
                    let j = rest.trailing_zeros() as usize;
                    acc ^= rhs.rows[j];
                    rest &= rest - 1;
                }
                acc
            })
            .collect();
        F2Matrix { dim: self.dim, rows }
    }

    fn inverse(&self) -> Option<F2Matrix> {
        let n = self.dim;
        let mut a = self.rows.clone();
        let mut inv = F2Matrix::identity(n).rows;
        for col in 0..n {
            let p = (col..n).find(|&r| (a[r] >> col) & 1 == 1)?;
            a.swap(col, p);
            inv.swap(col, p);
            for r in 0..n {
                if r != col && (a[r] >> col) & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Some(F2Matrix { dim: n, rows: inv })
    }
}

/// An isometry of a symplectic space over GF(2), acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpElement {
    matrix: F2Matrix,
}

impl SpElement {
    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { matrix: F2Matrix::identity(dim) })
    }

    /// Builds an element from 0/1 rows, checking `S^T G S = G` for `space`.
    pub fn from_rows(space: &SymplecticSpaceF2, rows: &[Vec<u8>]) -> Result<Self> {
        if rows.len() != space.dim {
            return Err(F2Error::DimensionMismatch { expected: space.dim, actual: rows.len() });
        }
        let mut packed = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != space.dim {
                return Err(F2Error::DimensionMismatch { expected: space.dim, actual: row.len() });
            }
            packed.push(pack_bits(row)?);
        }
        let s = Self { matrix: F2Matrix { dim: space.dim, rows: packed } };
        if !s.preserves(space) {
            return Err(F2Error::NotSymplectic);
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.matrix.rows.iter().map(|&r| unpack_bits(r, self.dim())).collect()
    }

    pub fn apply(&self, v: &F2Vector) -> Result<F2Vector> {
        if v.dim != self.dim() {
            return Err(F2Error::DimensionMismatch { expected: self.dim(), actual: v.dim });
        }
        Ok(F2Vector { dim: v.dim, bits: self.matrix.apply(v.bits) })
    }

    pub fn compose(&self, rhs: &SpElement) -> Result<SpElement> {
        if rhs.dim() != self.dim() {
            return Err(F2Error::DimensionMismatch { expected: self.dim(), actual: rhs.dim() });
        }
        Ok(SpElement { matrix: self.matrix.mul(&rhs.matrix) })
    }

    pub fn inverse(&self) -> SpElement {
        SpElement { matrix: self.matrix.inverse().expect("symplectic matrices are invertible") }
    }

    /// Whether `<S e_i, S e_j> = G_ij` for all `i, j`.
    pub fn preserves(&self, space: &SymplecticSpaceF2) -> bool {
        if self.dim() != space.dim {
            return false;
        }
        let cols: Vec<u64> = (0..self.dim()).map(|j| self.matrix.column(j)).collect();
        (0..self.dim()).all(|i| {
            (0..self.dim()).all(|j| space.pair_packed(cols[i], cols[j]) == ((space.gram[i] >> j) & 1) as u8)
        })
    }
}

impl fmt::Display for SpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(|b| b.to_string()).collect::<String>())
            .collect();
        write!(f, "[{}]", rows.join(" "))
    }
}

/// A quadratic refinement `q` of a symplectic pairing, determined by its
/// values on the standard basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticRefinement {
    space: SymplecticSpaceF2,
    values: u64,
}

impl QuadraticRefinement {
    pub fn new(space: SymplecticSpaceF2, basis_values: &[u8]) -> Result<Self> {
        if basis_values.len() != space.dim {
            return Err(F2Error::DimensionMismatch { expected: space.dim, actual: basis_values.len() });
        }
        let values = pack_bits(basis_values)?;
        Ok(Self { space, values })
    }

    /// A refinement of the standard pairing of dimension `basis_values.len()`.
    pub fn standard(basis_values: &[u8]) -> Result<Self> {
        if basis_values.len() % 2 == 1 {
            return Err(F2Error::OddDimension(basis_values.len()));
        }
        Self::new(SymplecticSpaceF2::standard(basis_values.len() / 2)?, basis_values)
    }

    /// All `2^dim` refinements of `space`, ordered by packed basis values.
    pub fn all(space: &SymplecticSpaceF2) -> Result<Vec<Self>> {
        if space.dim > 20 {
            return Err(F2Error::UnsupportedDimension(space.dim));
        }
        Ok((0..(1u64 << space.dim))
            .map(|values| Self { space: space.clone(), values })
            .collect())
    }

    pub fn space(&self) -> &SymplecticSpaceF2 {
        &self.space
    }

    pub fn basis_values(&self) -> Vec<u8> {
        unpack_bits(self.values, self.space.dim)
    }

    fn eval_packed(&self, v: u64) -> u8 {
        let mut acc = parity(v & self.values);
        let mut rest = v;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            // only pairs i < j contribute
            acc ^= parity(self.space.gram[i] & rest);
        }
        acc
    }

    /// `q(v) = Σ v_i q(e_i) + Σ_{i<j} v_i v_j <e_i, e_j>`.
    pub fn eval(&self, v: &F2Vector) -> Result<u8> {
        self.space.check_vector(v)?;
        Ok(self.eval_packed(v.bits))
    }

    /// Arf invariant `Σ q(a_i) q(b_i)` over a symplectic basis.
    pub fn arf(&self) -> u8 {
        self.arf_packed(&self.space.symplectic_basis())
    }

    /// Arf invariant computed from a caller-supplied symplectic basis.
    pub fn arf_with_basis(&self, pairs: &[(F2Vector, F2Vector)]) -> Result<u8> {
        if !self.space.is_symplectic_basis(pairs) {
            return Err(F2Error::InvalidBasis("pairs are not hyperbolic"));
        }
        Ok(self.arf_packed(pairs))
    }

    fn arf_packed(&self, pairs: &[(F2Vector, F2Vector)]) -> u8 {
        pairs
            .iter()
            .fold(0, |acc, (a, b)| acc ^ (self.eval_packed(a.bits) & self.eval_packed(b.bits)))
    }
}

impl fmt::Display for QuadraticRefinement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.basis_values().iter().map(u8::to_string).collect();
        write!(f, "({})", vals.join(","))
    }
}

/// `|Sp(2k, 2)| = 2^{k^2} Π_{i=1..k} (4^i - 1)`, or `None` past `u128`.
pub fn sp_order(k: u32) -> Option<u128> {
    let start = 1u128.checked_shl(k.checked_mul(k)?)?;
    (1..=k).try_fold(start, |acc, i| acc.checked_mul(1u128.checked_shl(2 * i)? - 1))
}

fn check_enum_rank(k: usize) -> Result<()> {
    if k == 0 || k > MAX_ENUM_RANK {
        return Err(F2Error::UnsupportedRank { k, max: MAX_ENUM_RANK });
    }
    Ok(())
}

/// Visits every element of `Sp(2k, 2)` for the standard pairing by choosing
/// images of the hyperbolic pairs one at a time.
fn for_each_standard_sp(k: usize, mut visit: impl FnMut(F2Matrix)) -> Result<()> {
    check_enum_rank(k)?;
    let space = SymplecticSpaceF2::standard(k)?;
    let dim = 2 * k;
    let mut cols: Vec<u64> = Vec::with_capacity(dim);

    fn recurse(space: &SymplecticSpaceF2, cols: &mut Vec<u64>, visit: &mut dyn FnMut(F2Matrix)) {
        let dim = space.dim;
        if cols.len() == dim {
            visit(F2Matrix::from_columns(dim, cols));
            return;
        }
        let orthogonal = |v: u64, cols: &[u64]| cols.iter().all(|&c| space.pair_packed(v, c) == 0);
        for a in 1..(1u64 << dim) {
            if !orthogonal(a, cols) {
                continue;
            }
            for b in 1..(1u64 << dim) {
                if space.pair_packed(a, b) != 1 || !orthogonal(b, cols) {
                    continue;
                }
                cols.push(a);
                cols.push(b);
                recurse(space, cols, visit);
                cols.truncate(cols.len() - 2);
            }
        }
    }

    recurse(&space, &mut cols, &mut visit);
    Ok(())
}

/// All of `Sp(2k, 2)` for the standard pairing, sorted, for `k <= 3`.
pub fn enumerate_sp(k: usize) -> Result<Vec<SpElement>> {
    let mut out = Vec::new();
    for_each_standard_sp(k, |matrix| out.push(SpElement { matrix }))?;
    out.sort_unstable();
    Ok(out)
}

/// Every isometry of `space` (dimension at most 6), sorted.
pub fn enumerate_isometries(space: &SymplecticSpaceF2) -> Result<Vec<SpElement>> {
    check_enum_rank(space.rank())?;
    if space.is_standard() {
        return enumerate_sp(space.rank());
    }
    let basis = space.basis_matrix();
    let basis_inv = basis.inverse().expect("a symplectic basis is invertible");
    let mut out = Vec::new();
    for_each_standard_sp(space.rank(), |m| {
        out.push(SpElement { matrix: basis.mul(&m).mul(&basis_inv) });
    })?;
    out.sort_unstable();
    Ok(out)
}

/// Pullback `q'(v) = q(S v)`.
pub fn transport(q: &QuadraticRefinement, s: &SpElement) -> Result<QuadraticRefinement> {
    if s.dim() != q.space.dim {
        return Err(F2Error::DimensionMismatch { expected: q.space.dim, actual: s.dim() });
    }
    if !s.preserves(&q.space) {
        return Err(F2Error::NotSymplectic);
    }
    let values = (0..s.dim()).fold(0u64, |acc, j| {
        acc | (u64::from(q.eval_packed(s.matrix.column(j))) << j)
    });
    Ok(QuadraticRefinement { space: q.space.clone(), values })
}

/// All isometries `S` with `q ∘ S = q`.
pub fn stabilizer(q: &QuadraticRefinement) -> Result<Vec<SpElement>> {
    let group = enumerate_isometries(&q.space)?;
    Ok(group
        .into_iter()
        .filter(|s| transport(q, s).map(|t| t.values == q.values).unwrap_or(false))
        .collect())
}

/// The orbit of `q` under the full isometry group.
pub fn orbit(q: &QuadraticRefinement) -> Result<BTreeSet<QuadraticRefinement>> {
    let group = enumerate_isometries(&q.space)?;
    group.iter().map(|s| transport(q, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_sp(k: usize) -> Vec<Vec<u64>> {
        // filter every binary matrix (as packed rows) by S^T J S = J
        let dim = 2 * k;
        let j = SymplecticSpaceF2::standard(k).unwrap();
        let mut out = Vec::new();
        for bits in 0u64..(1 << (dim * dim)) {
            let rows: Vec<u64> = (0..dim).map(|i| (bits >> (i * dim)) & low_mask(dim)).collect();
            let s = SpElement { matrix: F2Matrix { dim, rows: rows.clone() } };
            if s.preserves(&j) {
                out.push(rows);
            }
        }
        out
    }

    fn majority(q: &QuadraticRefinement) -> u8 {
        let dim = q.space.dim();
        let ones = F2Vector::all(dim).unwrap().filter(|v| q.eval(v).unwrap() == 1).count();
        u8::from(2 * ones > 1 << dim)
    }

    #[test]
    fn eval_examples() {
        let q = QuadraticRefinement::standard(&[0, 0]).unwrap();
        let v = F2Vector::from_bits(&[1, 1]).unwrap();
        assert_eq!(q.eval(&v).unwrap(), 1);
        assert_eq!(q.eval(&F2Vector::zero(2).unwrap()).unwrap(), 0);
        let q11 = QuadraticRefinement::standard(&[1, 1]).unwrap();
        assert_eq!(q11.eval(&v).unwrap(), 1);
        assert_eq!(
            q.eval(&F2Vector::zero(4).unwrap()),
            Err(F2Error::DimensionMismatch { expected: 2, actual: 4 })
        );
    }

    #[test]
    fn refinement_identity_small() {
        let space = SymplecticSpaceF2::standard(2).unwrap();
        for q in QuadraticRefinement::all(&space).unwrap() {
            for v in F2Vector::all(4).unwrap() {
                for w in F2Vector::all(4).unwrap() {
                    let lhs = q.eval(&(v + w)).unwrap();
                    let rhs = q.eval(&v).unwrap() ^ q.eval(&w).unwrap() ^ space.pair(&v, &w).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn standard_basis_is_already_hyperbolic() {
        let space = SymplecticSpaceF2::standard(3).unwrap();
        let pairs = space.symplectic_basis();
        for (i, (a, b)) in pairs.iter().enumerate() {
            assert_eq!(*a, F2Vector::unit(6, 2 * i).unwrap());
            assert_eq!(*b, F2Vector::unit(6, 2 * i + 1).unwrap());
        }
    }

    #[test]
    fn permuted_gram_gives_valid_basis() {
        // e0<->e2 and e1<->e3 paired
        let rows = vec![vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![1, 0, 0, 0], vec![0, 1, 0, 0]];
        let space = SymplecticSpaceF2::from_rows(&rows).unwrap();
        let pairs = space.symplectic_basis();
        assert!(space.is_symplectic_basis(&pairs));
        assert!(!space.is_standard());
    }

    #[test]
    fn degenerate_and_malformed_grams() {
        let zero_row = vec![vec![0, 0, 0, 0], vec![0, 0, 1, 0], vec![0, 1, 0, 0], vec![0, 0, 0, 0]];
        assert_eq!(SymplecticSpaceF2::from_rows(&zero_row), Err(F2Error::Degenerate));
        let odd = vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 0]];
        assert_eq!(SymplecticSpaceF2::from_rows(&odd), Err(F2Error::OddDimension(3)));
        let diag = vec![vec![1, 1], vec![1, 0]];
        assert_eq!(SymplecticSpaceF2::from_rows(&diag), Err(F2Error::NotAlternating { row: 0, col: 0 }));
        let asym = vec![vec![0, 1], vec![0, 0]];
        assert_eq!(SymplecticSpaceF2::from_rows(&asym), Err(F2Error::NotAlternating { row: 0, col: 1 }));
    }

    #[test]
    fn arf_examples() {
        assert_eq!(QuadraticRefinement::standard(&[0, 0]).unwrap().arf(), 0);
        assert_eq!(QuadraticRefinement::standard(&[1, 1]).unwrap().arf(), 1);
        assert_eq!(QuadraticRefinement::standard(&[1, 1, 1, 1]).unwrap().arf(), 0);
        for vals in [[0u8, 0], [1, 0], [0, 1], [1, 1]] {
            let q = QuadraticRefinement::standard(&vals).unwrap();
            assert_eq!(q.arf(), majority(&q));
        }
        let q = QuadraticRefinement::standard(&[1, 1, 1, 1]).unwrap();
        assert_eq!(majority(&q), 0);
    }

    #[test]
    fn arf_on_nonstandard_space_matches_majority() {
        let rows = vec![
            vec![0, 1, 1, 0],
            vec![1, 0, 0, 1],
            vec![1, 0, 0, 0],
            vec![0, 1, 0, 0],
        ];
        let space = SymplecticSpaceF2::from_rows(&rows).unwrap();
        for q in QuadraticRefinement::all(&space).unwrap() {
            assert_eq!(q.arf(), majority(&q), "{q}");
        }
    }

    #[test]
    fn sp_counts_match_brute_force() {
        let sp1 = enumerate_sp(1).unwrap();
        let brute1 = brute_force_sp(1);
        assert_eq!(brute1.len(), 6);
        assert_eq!(sp1.len(), brute1.len());
        let mut sorted1: Vec<Vec<u64>> = sp1.iter().map(|s| s.matrix.rows.clone()).collect();
        sorted1.sort();
        let mut b1 = brute1.clone();
        b1.sort();
        assert_eq!(sorted1, b1);

        let sp2 = enumerate_sp(2).unwrap();
        let brute2 = brute_force_sp(2);
        assert_eq!(brute2.len(), 720);
        assert_eq!(sp2.len(), 720);
        let set: BTreeSet<_> = sp2.iter().collect();
        assert_eq!(set.len(), 720, "duplicates in enumeration");
        let j = SymplecticSpaceF2::standard(2).unwrap();
        assert!(sp2.iter().all(|s| s.preserves(&j)));
        assert!(sp2.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(sp_order(1), Some(6));
        assert_eq!(sp_order(2), Some(720));
        assert_eq!(sp_order(3), Some(1_451_520));
        assert_eq!(sp_order(8), None);
    }

    #[test]
    fn enumeration_rank_bounds() {
        assert_eq!(enumerate_sp(0), Err(F2Error::UnsupportedRank { k: 0, max: 3 }));
        assert_eq!(enumerate_sp(4), Err(F2Error::UnsupportedRank { k: 4, max: 3 }));
    }

    #[test]
    fn transport_examples() {
        let swap_space = SymplecticSpaceF2::standard(1).unwrap();
        let swap = SpElement::from_rows(&swap_space, &[vec![0, 1], vec![1, 0]]).unwrap();
        let id = SpElement::identity(2).unwrap();
        let q = QuadraticRefinement::standard(&[1, 0]).unwrap();
        assert_eq!(transport(&q, &id).unwrap(), q);
        let q00 = QuadraticRefinement::standard(&[0, 0]).unwrap();
        assert_eq!(transport(&q00, &swap).unwrap().basis_values(), vec![0, 0]);
        let moved = transport(&q, &swap).unwrap();
        assert_eq!(moved.basis_values(), vec![0, 1]);
        for v in F2Vector::all(2).unwrap() {
            assert_eq!(moved.eval(&v).unwrap(), q.eval(&swap.apply(&v).unwrap()).unwrap());
        }
    }

    #[test]
    fn transport_rejects_bad_input() {
        let q = QuadraticRefinement::standard(&[1, 0, 0, 0]).unwrap();
        let id2 = SpElement::identity(2).unwrap();
        assert!(matches!(transport(&q, &id2), Err(F2Error::DimensionMismatch { .. })));
        let space = SymplecticSpaceF2::standard(1).unwrap();
        assert_eq!(SpElement::from_rows(&space, &[vec![1, 1], vec![0, 0]]), Err(F2Error::NotSymplectic));
    }

    #[test]
    fn stabilizer_examples() {
        let st = stabilizer(&QuadraticRefinement::standard(&[0, 0]).unwrap()).unwrap();
        let rows: Vec<_> = st.iter().map(SpElement::rows).collect();
        assert_eq!(rows.len(), 2);
        assert!(rows.contains(&vec![vec![1, 0], vec![0, 1]]));
        assert!(rows.contains(&vec![vec![0, 1], vec![1, 0]]));
        assert_eq!(stabilizer(&QuadraticRefinement::standard(&[1, 1]).unwrap()).unwrap().len(), 6);
        let st4 = stabilizer(&QuadraticRefinement::standard(&[0, 0, 0, 0]).unwrap()).unwrap();
        assert_eq!(st4.len(), 72);
        // closed under product and inverse
        let set: BTreeSet<_> = st4.iter().cloned().collect();
        for a in &st4 {
            assert!(set.contains(&a.inverse()));
            for b in st4.iter().take(12) {
                assert!(set.contains(&a.compose(b).unwrap()));
            }
        }
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(orbit(&QuadraticRefinement::standard(&[0, 0]).unwrap()).unwrap().len(), 3);
        assert_eq!(orbit(&QuadraticRefinement::standard(&[1, 1]).unwrap()).unwrap().len(), 1);
        assert_eq!(orbit(&QuadraticRefinement::standard(&[0, 0, 0, 0]).unwrap()).unwrap().len(), 10);
        assert_eq!(orbit(&QuadraticRefinement::standard(&[1, 1, 0, 0]).unwrap()).unwrap().len(), 6);
    }

    #[test]
    fn nonstandard_stabilizer_is_conjugate() {
        let rows = vec![vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![1, 0, 0, 0], vec![0, 1, 0, 0]];
        let space = SymplecticSpaceF2::from_rows(&rows).unwrap();
        let isos = enumerate_isometries(&space).unwrap();
        assert_eq!(isos.len(), 720);
        assert!(isos.iter().all(|s| s.preserves(&space)));
        let q = QuadraticRefinement::new(space, &[0, 0, 0, 0]).unwrap();
        assert_eq!(stabilizer(&q).unwrap().len() * orbit(&q).unwrap().len(), 720);
    }
}
