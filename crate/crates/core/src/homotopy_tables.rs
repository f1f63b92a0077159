//! Tabulated homotopy groups of rotation groups, as finitely generated
//! abelian groups.
//!
//! Lookups are restricted to the tabulated domains; anything else is an
//! error rather than an extrapolation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomotopyError {
    #[error("{table} is not tabulated for p = {p}")]
    OutOfDomain { table: &'static str, p: u64 },
    #[error("invalid shift {0} (expected 1 or 2)")]
    BadShift(u8),
    #[error("torsion coefficient {0} must be at least 1")]
    BadTorsion(u64),
    #[error("malformed group JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, HomotopyError>;

/// `Z^rank ⊕ Z/t1 ⊕ ... ⊕ Z/tk` with `t1 | t2 | ... | tk`, each `ti ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FinAbGroup {
    rank: u32,
    torsion: Vec<u64>,
}

fn prime_powers(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut q = 1;
            while n.is_multiple_of(p) {
                n /= p;
                q *= p;
            }
            out.push((p, q));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, n));
    }
    out
}

impl FinAbGroup {
    /// Normalizes arbitrary cyclic factors into invariant-factor form.
    pub fn new(rank: u32, cyclic_orders: &[u64]) -> Result<Self> {
        let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for &t in cyclic_orders {
            if t == 0 {
                return Err(HomotopyError::BadTorsion(t));
            }
            for (p, q) in prime_powers(t) {
                by_prime.entry(p).or_default().push(q);
            }
        }
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut torsion = vec![1u64; len];
        for powers in by_prime.values_mut() {
            powers.sort_unstable_by(|a, b| b.cmp(a));
            for (i, q) in powers.iter().enumerate() {
                torsion[len - 1 - i] *= q;
            }
        }
        Ok(Self { rank, torsion })
    }

    pub fn trivial() -> Self {
        Self { rank: 0, torsion: Vec::new() }
    }

    pub fn integers() -> Self {
        Self { rank: 1, torsion: Vec::new() }
    }

    pub fn z2() -> Self {
        Self { rank: 0, torsion: vec![2] }
    }

    pub fn z2_z2() -> Self {
        Self { rank: 0, torsion: vec![2, 2] }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn torsion(&self) -> &[u64] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// `None` for infinite groups.
    pub fn order(&self) -> Option<u64> {
        (self.rank == 0).then(|| self.torsion.iter().product())
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let all: Vec<u64> = self.torsion.iter().chain(&other.torsion).copied().collect();
        Self::new(self.rank + other.rank, &all).expect("factors are already valid")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    /// Accepts any cyclic factors and returns the canonical form.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            rank: u32,
            torsion: Vec<u64>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| HomotopyError::Json(e.to_string()))?;
        Self::new(raw.rank, &raw.torsion)
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("⊕"))
        }
    }
}

/// `Sπ_p(SO(p))`, the image of `π_p(SO(p)) → π_p(SO(p+1))`, for `p ≥ 3`.
pub fn s_pi_p_so_p(p: u64) -> Result<FinAbGroup> {
    if p < 3 {
        return Err(HomotopyError::OutOfDomain { table: "Sπ_p(SO(p))", p });
    }
    if p == 6 {
        return Ok(FinAbGroup::trivial());
    }
    Ok(match p % 8 {
        0 => FinAbGroup::z2_z2(),
        1 | 2 | 4 | 6 => FinAbGroup::z2(),
        3 | 7 => FinAbGroup::integers(),
        _ => FinAbGroup::trivial(),
    })
}

/// `π_p(SO(p + shift))` for even `p ≥ 4` and `shift ∈ {1, 2}`.
pub fn pi_p_so_p_plus(p: u64, shift: u8) -> Result<FinAbGroup> {
    if p < 4 || p % 2 == 1 {
        return Err(HomotopyError::OutOfDomain { table: "π_p(SO(p+k))", p });
    }
    let zero_mod_8 = p.is_multiple_of(8);
    match (shift, zero_mod_8) {
        (1, true) => Ok(FinAbGroup::z2_z2()),
        (1, false) => Ok(FinAbGroup::z2()),
        (2, true) => Ok(FinAbGroup::z2()),
        (2, false) => Ok(FinAbGroup::trivial()),
        (s, _) => Err(HomotopyError::BadShift(s)),
    }
}

/// `π_{p-1}(SO(p-1))`, recorded only for `p ≥ 9` with `p ≡ 6 (mod 8)`.
pub fn pi_p_minus_1_so_p_minus_1(p: u64) -> Result<FinAbGroup> {
    if p >= 9 && p % 8 == 6 {
        Ok(FinAbGroup::z2())
    } else {
        Err(HomotopyError::OutOfDomain { table: "π_{p-1}(SO(p-1))", p })
    }
}

/// `Hom(Z^rank, target)`: `rank` copies of the target.
pub fn hom_to(source_rank: u32, target: &FinAbGroup) -> FinAbGroup {
    (0..source_rank).fold(FinAbGroup::trivial(), |acc, _| acc.direct_sum(target))
}
