//! Orthogonal signed-permutation matrices acting on `R^{p+q+3}`, their
//! restriction to the standard `S^p × S^q`, and the induced automorphisms of
//! middle homology.
//!
//! Matrices act on row vectors from the right: row `i` of the matrix holds a
//! single `±1` in column `c_i`, so coordinate `x_i` lands in slot `c_i`.
//! Coordinates `1..=p+1` carry the first factor, `p+2..=p+q+2` the second,
//! and coordinate `0` is the extra ambient direction.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sl2z::{SlError, UniModMat2};
use crate::smallgrp::{GroupError, MulTableGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("parameters out of range: {0}")]
    OutOfDomain(String),
    #[error("not a signed permutation matrix: {0}")]
    NotSignedPermutation(String),
    #[error("matrix does not preserve or swap the factor blocks")]
    NotBlockStructured,
    #[error("induced action on a single 2x2 homology group needs p = q (got p = {p}, q = {q})")]
    UnequalFactors { p: usize, q: usize },
    #[error("malformed matrix JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

pub type Result<T> = std::result::Result<T, GeomError>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedPermMatrix {
    /// `image[i] = (column, sign)` for row `i`.
    image: Vec<(usize, i8)>,
}

impl SignedPermMatrix {
    pub fn new(image: Vec<(usize, i8)>) -> Result<Self> {
        let n = image.len();
        if n == 0 {
            return Err(GeomError::NotSignedPermutation("empty matrix".into()));
        }
        let mut seen = vec![false; n];
        for (row, &(col, sign)) in image.iter().enumerate() {
            if col >= n {
                return Err(GeomError::NotSignedPermutation(format!("row {row} points at column {col}")));
            }
            if sign != 1 && sign != -1 {
                return Err(GeomError::NotSignedPermutation(format!("row {row} has sign {sign}")));
            }
            if std::mem::replace(&mut seen[col], true) {
                return Err(GeomError::NotSignedPermutation(format!("column {col} is hit twice")));
            }
        }
        Ok(Self { image })
    }

    pub fn identity(n: usize) -> Self {
        Self { image: (0..n).map(|i| (i, 1)).collect() }
    }

    pub fn diagonal(signs: &[i8]) -> Result<Self> {
        Self::new(signs.iter().enumerate().map(|(i, &s)| (i, s)).collect())
    }

    pub fn size(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[(usize, i8)] {
        &self.image
    }

    pub fn entry(&self, row: usize, col: usize) -> i64 {
        let (c, s) = self.image[row];
        if c == col {
            s as i64
        } else {
            0
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let n = self.size();
        (0..n).map(|r| (0..n).map(|c| self.entry(r, c)).collect()).collect()
    }

    /// `x ↦ x·M` for a row vector `x`.
    pub fn apply_row(&self, x: &[i64]) -> Vec<i64> {
        let mut out = vec![0; self.size()];
        for (i, &(c, s)) in self.image.iter().enumerate() {
            out[c] = s as i64 * x[i];
        }
        out
    }

    /// Matrix product `self · rhs`, i.e. apply `self` first.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.size(), rhs.size(), "size mismatch");
        let image = self
            .image
            .iter()
            .map(|&(c, s)| {
                let (c2, s2) = rhs.image[c];
                (c2, s * s2)
            })
            .collect();
        Self { image }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.size()), |acc, _| acc.mul(self))
    }

    pub fn transpose(&self) -> Self {
        let mut image = vec![(0, 1); self.size()];
        for (r, &(c, s)) in self.image.iter().enumerate() {
            image[c] = (r, s);
        }
        Self { image }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &(c, s))| c == i && s == 1)
    }

    /// Checks `M·Mᵀ = I` on the dense matrix.
    pub fn is_orthogonal(&self) -> bool {
        let d = self.to_dense();
        let n = self.size();
        (0..n).all(|i| (0..n).all(|j| (0..n).map(|k| d[i][k] * d[j][k]).sum::<i64>() == i64::from(i == j)))
    }

    /// Product of signs times the sign of the underlying permutation.
    pub fn det(&self) -> i8 {
        let perm: Vec<usize> = self.image.iter().map(|&(c, _)| c).collect();
        let signs: i8 = self.image.iter().map(|&(_, s)| s).product();
        signs * permutation_sign(&perm)
    }

    /// Multiplicative order, if at most `limit`.
    pub fn order(&self, limit: u32) -> Option<u32> {
        let mut m = self.clone();
        for k in 1..=limit {
            if m.is_identity() {
                return Some(k);
            }
            m = m.mul(self);
        }
        None
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SparseJson {
            size: self.size(),
            entries: self.image.iter().enumerate().map(|(r, &(c, s))| (r, c, s)).collect(),
        })
        .expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SparseJson = serde_json::from_str(text).map_err(|e| GeomError::Json(e.to_string()))?;
        if raw.entries.len() != raw.size {
            return Err(GeomError::NotSignedPermutation(format!(
                "{} entries for size {}",
                raw.entries.len(),
                raw.size
            )));
        }
        let mut image = vec![None; raw.size];
        for (r, c, s) in raw.entries {
            if r >= raw.size {
                return Err(GeomError::NotSignedPermutation(format!("row {r} out of range")));
            }
            if image[r].replace((c, s)).is_some() {
                return Err(GeomError::NotSignedPermutation(format!("row {r} has two entries")));
            }
        }
        Self::new(image.into_iter().map(|e| e.expect("every row filled")).collect())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SparseJson {
    size: usize,
    entries: Vec<(usize, usize, i8)>,
}

fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

impl fmt::Display for SignedPermMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.to_dense().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>2}")).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// `Ω`: `(a, b) ↦ (R(b), a)` on `S^p × S^p`, with coordinate 0 scaled by `(-1)^p`.
pub fn build_omega(p: usize) -> Result<SignedPermMatrix> {
    if p < 1 {
        return Err(GeomError::OutOfDomain("Ω needs p ≥ 1".into()));
    }
    let m = p + 1;
    let mut image = vec![(0, if p.is_multiple_of(2) { 1 } else { -1 })];
    image.extend((1..=m).map(|i| (i + m, 1)));
    image.extend((1..=m).map(|i| (i, if i == 1 { -1 } else { 1 })));
    SignedPermMatrix::new(image)
}

/// `Ω̂`: interchange of the factors, with coordinate 0 negated.
///
/// The determinant is `(-1)^p`, so only even `p` gives an orientation
/// preserving map.
pub fn build_omega_hat(p: usize) -> Result<SignedPermMatrix> {
    if p < 2 || p % 2 == 1 {
        return Err(GeomError::OutOfDomain(format!("Ω̂ needs even p ≥ 2 (got {p})")));
    }
    let m = p + 1;
    let mut image = vec![(0, -1)];
    image.extend((1..=m).map(|i| (i + m, 1)));
    image.extend((1..=m).map(|i| (i, 1)));
    SignedPermMatrix::new(image)
}

/// `Ω′`: reflection of both factors of `S^p × S^q`, `2 ≤ p < q`.
pub fn build_omega_prime(p: usize, q: usize) -> Result<SignedPermMatrix> {
    if p < 2 || p >= q {
        return Err(GeomError::OutOfDomain(format!("Ω′ needs 2 ≤ p < q (got p = {p}, q = {q})")));
    }
    reflect_both(p, q)
}

/// The same simultaneous reflection on `S^p × S^p`; equals `Ω²`.
pub fn build_double_reflection(p: usize) -> Result<SignedPermMatrix> {
    if p < 1 {
        return Err(GeomError::OutOfDomain("double reflection needs p ≥ 1".into()));
    }
    reflect_both(p, p)
}

fn reflect_both(p: usize, q: usize) -> Result<SignedPermMatrix> {
    let signs: Vec<i8> = (0..p + q + 3).map(|i| if i == 1 || i == p + 2 { -1 } else { 1 }).collect();
    SignedPermMatrix::diagonal(&signs)
}

/// Restriction of a block-structured matrix to `S^p × S^q`.
///
/// `first_block_det` is the determinant of the block landing in the first
/// factor's coordinates, `second_block_det` of the one landing in the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductMapDescriptor {
    pub swaps_factors: bool,
    pub first_block_det: i8,
    pub second_block_det: i8,
    pub p: usize,
    pub q: usize,
}

fn block_det(m: &SignedPermMatrix, rows: std::ops::Range<usize>, col_offset: usize) -> i8 {
    let perm: Vec<usize> = rows.clone().map(|r| m.image[r].0 - col_offset).collect();
    let signs: i8 = rows.map(|r| m.image[r].1).product();
    signs * permutation_sign(&perm)
}

pub fn restrict_to_product(m: &SignedPermMatrix, p: usize, q: usize) -> Result<ProductMapDescriptor> {
    if m.size() != p + q + 3 {
        return Err(GeomError::OutOfDomain(format!("size {} does not match p + q + 3 = {}", m.size(), p + q + 3)));
    }
    let a = 1..p + 2;
    let b = p + 2..p + q + 3;
    let lands_in = |rows: &std::ops::Range<usize>, cols: &std::ops::Range<usize>| {
        rows.clone().all(|r| cols.contains(&m.image[r].0))
    };
    if lands_in(&a, &a) && lands_in(&b, &b) {
        Ok(ProductMapDescriptor {
            swaps_factors: false,
            first_block_det: block_det(m, a.clone(), a.start),
            second_block_det: block_det(m, b.clone(), b.start),
            p,
            q,
        })
    } else if p == q && lands_in(&a, &b) && lands_in(&b, &a) {
        Ok(ProductMapDescriptor {
            swaps_factors: true,
            first_block_det: block_det(m, b.clone(), a.start),
            second_block_det: block_det(m, a.clone(), b.start),
            p,
            q,
        })
    } else {
        Err(GeomError::NotBlockStructured)
    }
}

/// Automorphism of `H_p(S^p × S^p) = Z²` in the basis `([S^p × pt], [pt × S^p])`,
/// columns holding images.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HomologyAction(pub [[i64; 2]; 2]);

impl HomologyAction {
    pub fn identity() -> Self {
        Self([[1, 0], [0, 1]])
    }

    pub fn det(&self) -> i64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        let mut out = [[0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self(out)
    }

    /// As an element of `SL(2, Z)`; fails for orientation-reversing actions.
    pub fn to_unimod(&self) -> std::result::Result<UniModMat2, SlError> {
        let m = self.0;
        UniModMat2::from_i64(m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl fmt::Display for HomologyAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.0;
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

/// An orthogonal self-map of a sphere has degree equal to its determinant.
pub fn induced_homology_action(d: &ProductMapDescriptor) -> Result<HomologyAction> {
    if d.p != d.q {
        return Err(GeomError::UnequalFactors { p: d.p, q: d.q });
    }
    let (d1, d2) = (d.first_block_det as i64, d.second_block_det as i64);
    Ok(if d.swaps_factors {
        HomologyAction([[0, d1], [d2, 0]])
    } else {
        HomologyAction([[d1, 0], [0, d2]])
    })
}

/// Closure of a set of actions under multiplication, as a table group.
/// Elements are listed in the order they are discovered, identity first.
pub fn generated_action_group(gens: &[HomologyAction]) -> Result<(Vec<HomologyAction>, MulTableGroup)> {
    let mut elements = vec![HomologyAction::identity()];
    let mut i = 0;
    while i < elements.len() {
        for g in gens {
            let x = elements[i].mul(g);
            if !elements.contains(&x) {
                if elements.len() == crate::smallgrp::MAX_TABLE_ORDER {
                    return Err(GroupError::Oversize { order: elements.len() + 1, max: crate::smallgrp::MAX_TABLE_ORDER }.into());
                }
                elements.push(x);
            }
        }
        i += 1;
    }
    let n = elements.len();
    let index = |x: &HomologyAction| elements.iter().position(|e| e == x).expect("closed set");
    let table = (0..n * n).map(|k| index(&elements[k / n].mul(&elements[k % n]))).collect();
    let group = MulTableGroup::from_table(n, table)?;
    Ok((elements, group))
}

/// Image group generated by the interchange and the double reflection.
pub fn even_image_group(p: usize) -> Result<(Vec<HomologyAction>, MulTableGroup)> {
    let swap = induced_homology_action(&restrict_to_product(&build_omega_hat(p)?, p, p)?)?;
    let reflect = induced_homology_action(&restrict_to_product(&build_double_reflection(p)?, p, p)?)?;
    generated_action_group(&[swap, reflect])
}
