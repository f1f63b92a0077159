//! Exact 2x2 unimodular matrices and the subgroup `Γ_V(2)` generated by
//! `V = [[0,-1],[1,0]]` and `T = [[1,2],[0,1]]`.
//!
//! Words are read left to right and multiplied left to right, so the word
//! `T V` evaluates to the matrix product `T · V`.

use std::collections::HashSet;
use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest letter length accepted by [`verify_presentation`].
pub const MAX_PRESENTATION_BOUND: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlError {
    #[error("matrix has determinant {0}, expected 1")]
    NotUnimodular(BigInt),
    #[error("matrix is not in Γ_V(2): {product} = {value} is odd")]
    NotMember { product: &'static str, value: BigInt },
    #[error("word bound {0} outside 1..=12")]
    BoundOutOfRange(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, SlError>;

/// A 2x2 integer matrix `[[d1, d2], [d3, d4]]` of determinant one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniModMat2 {
    d: [BigInt; 4],
}

impl UniModMat2 {
    pub fn new(d1: BigInt, d2: BigInt, d3: BigInt, d4: BigInt) -> Result<Self> {
        let det = &d1 * &d4 - &d2 * &d3;
        if !det.is_one() {
            return Err(SlError::NotUnimodular(det));
        }
        Ok(Self { d: [d1, d2, d3, d4] })
    }

    pub fn from_i64(d1: i64, d2: i64, d3: i64, d4: i64) -> Result<Self> {
        Self::new(d1.into(), d2.into(), d3.into(), d4.into())
    }

    fn raw(d1: BigInt, d2: BigInt, d3: BigInt, d4: BigInt) -> Self {
        debug_assert!((&d1 * &d4 - &d2 * &d3).is_one());
        Self { d: [d1, d2, d3, d4] }
    }

    pub fn identity() -> Self {
        Self::raw(BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one())
    }

    pub fn v() -> Self {
        Self::raw(BigInt::zero(), -BigInt::one(), BigInt::one(), BigInt::zero())
    }

    pub fn t() -> Self {
        Self::raw(BigInt::one(), BigInt::from(2), BigInt::zero(), BigInt::one())
    }

    /// `T^k = [[1, 2k], [0, 1]]`.
    pub fn t_pow(k: &BigInt) -> Self {
        Self::raw(BigInt::one(), k * 2, BigInt::zero(), BigInt::one())
    }

    /// `V^e`, using `V^4 = 1`.
    pub fn v_pow(e: &BigInt) -> Self {
        match e.mod_floor(&BigInt::from(4)).to_u8().unwrap_or(0) {
            0 => Self::identity(),
            1 => Self::v(),
            2 => -Self::identity(),
            _ => -Self::v(),
        }
    }

    pub fn entries(&self) -> &[BigInt; 4] {
        &self.d
    }

    pub fn rows(&self) -> [[BigInt; 2]; 2] {
        [[self.d[0].clone(), self.d[1].clone()], [self.d[2].clone(), self.d[3].clone()]]
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = &self.d;
        Self::raw(d.clone(), -b, -c, a.clone())
    }

    /// Entries reduced mod 2, row-major.
    pub fn mod2(&self) -> [u8; 4] {
        let two = BigInt::from(2);
        self.d.clone().map(|x| if x.mod_floor(&two).is_zero() { 0 } else { 1 })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows = self.rows().map(|r| r.map(|x| big_to_json(&x)));
        serde_json::json!({ "rows": rows })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct MatrixJson {
            rows: [[serde_json::Number; 2]; 2],
        }
        let parsed: MatrixJson = serde_json::from_str(text).map_err(|e| SlError::Parse(e.to_string()))?;
        let [[a, b], [c, d]] = parsed.rows.map(|r| r.map(|n| json_to_big(&n)));
        Self::new(a?, b?, c?, d?)
    }
}

pub(crate) fn big_to_json(x: &BigInt) -> serde_json::Value {
    serde_json::Value::Number(serde_json::Number::from_str(&x.to_string()).expect("integers are valid JSON numbers"))
}

pub(crate) fn json_to_big(n: &serde_json::Number) -> Result<BigInt> {
    BigInt::from_str(&n.to_string()).map_err(|_| SlError::Parse(format!("{n} is not an integer")))
}

impl Mul for &UniModMat2 {
    type Output = UniModMat2;

    fn mul(self, rhs: &UniModMat2) -> UniModMat2 {
        let [a, b, c, d] = &self.d;
        let [e, f, g, h] = &rhs.d;
        UniModMat2::raw(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }
}

impl Mul for UniModMat2 {
    type Output = UniModMat2;

    fn mul(self, rhs: UniModMat2) -> UniModMat2 {
        &self * &rhs
    }
}

impl Neg for UniModMat2 {
    type Output = UniModMat2;

    fn neg(self) -> UniModMat2 {
        let [a, b, c, d] = self.d;
        UniModMat2::raw(-a, -b, -c, -d)
    }
}

impl fmt::Display for UniModMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.d;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

impl Serialize for UniModMat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// Parity class of a unimodular matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mod2Class {
    IdClass,
    VClass,
    Other,
}

impl fmt::Display for Mod2Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mod2Class::IdClass => "IdClass",
            Mod2Class::VClass => "VClass",
            Mod2Class::Other => "Other",
        };
        f.write_str(s)
    }
}

/// Membership in `Γ_V(2)`: both `d1·d2` and `d3·d4` are even.
pub fn is_member(m: &UniModMat2) -> bool {
    offending_product(m).is_none()
}

fn offending_product(m: &UniModMat2) -> Option<(&'static str, BigInt)> {
    let [a, b, c, d] = &m.d;
    let top = a * b;
    if top.is_odd() {
        return Some(("d1*d2", top));
    }
    let bottom = c * d;
    if bottom.is_odd() {
        return Some(("d3*d4", bottom));
    }
    None
}

pub fn reduce_mod2(m: &UniModMat2) -> Mod2Class {
    match m.mod2() {
        [1, 0, 0, 1] => Mod2Class::IdClass,
        [0, 1, 1, 0] => Mod2Class::VClass,
        _ => Mod2Class::Other,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gen {
    V,
    T,
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gen::V => "V",
            Gen::T => "T",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    pub gen: Gen,
    pub exp: BigInt,
}

impl Token {
    pub fn new(gen: Gen, exp: impl Into<BigInt>) -> Self {
        Self { gen, exp: exp.into() }
    }

    fn eval(&self) -> UniModMat2 {
        match self.gen {
            Gen::V => UniModMat2::v_pow(&self.exp),
            Gen::T => UniModMat2::t_pow(&self.exp),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp.is_one() {
            write!(f, "{}", self.gen)
        } else {
            write!(f, "{}^{}", self.gen, self.exp)
        }
    }
}

/// A word in `V` and `T` times a central sign `±1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenWord {
    pub tokens: Vec<Token>,
    pub negative: bool,
}

impl GenWord {
    pub fn identity() -> Self {
        Self { tokens: Vec::new(), negative: false }
    }

    pub fn new(tokens: Vec<Token>, negative: bool) -> Self {
        Self { tokens, negative }
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    /// Number of generator letters, counting `T^k` as `|k|` letters.
    pub fn letter_length(&self) -> BigInt {
        self.tokens.iter().map(|t| t.exp.abs()).sum()
    }

    /// Alternating generators, every `V` exponent equal to one, no zero exponents.
    pub fn is_normal(&self) -> bool {
        self.tokens.iter().all(|t| !t.exp.is_zero() && (t.gen == Gen::T || t.exp.is_one()))
            && self.tokens.windows(2).all(|w| w[0].gen != w[1].gen)
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        if self.tokens.is_empty() {
            return f.write_str("I");
        }
        let parts: Vec<String> = self.tokens.iter().map(Token::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for GenWord {
    type Err = SlError;

    /// Whitespace-separated `V`, `T`, `V^<int>`, `T^<int>` (braces around the
    /// exponent allowed), `I` for the identity, optional leading `-`.
    fn from_str(s: &str) -> Result<Self> {
        let mut rest = s.trim();
        let mut negative = false;
        if let Some(r) = rest.strip_prefix('-').or_else(|| rest.strip_prefix('\u{2212}')) {
            negative = true;
            rest = r.trim_start();
        }
        let mut tokens = Vec::new();
        for raw in rest.split_whitespace() {
            if raw == "I" || raw == "Id" {
                continue;
            }
            let (head, exp) = match raw.split_once('^') {
                Some((h, e)) => {
                    let e = e.trim_start_matches('{').trim_end_matches('}').replace('\u{2212}', "-");
                    let exp = BigInt::from_str(&e).map_err(|_| SlError::Parse(format!("bad exponent in `{raw}`")))?;
                    (h, exp)
                }
                None => (raw, BigInt::one()),
            };
            let gen = match head {
                "V" => Gen::V,
                "T" => Gen::T,
                _ => return Err(SlError::Parse(format!("unknown generator `{head}`"))),
            };
            tokens.push(Token { gen, exp });
        }
        Ok(GenWord { tokens, negative })
    }
}

/// Product of the word's tokens, left to right, times its central sign.
pub fn eval_word(w: &GenWord) -> UniModMat2 {
    let product = w.tokens.iter().fold(UniModMat2::identity(), |acc, t| &acc * &t.eval());
    if w.negative {
        -product
    } else {
        product
    }
}

/// Free-product normal form, pulling central signs out through `V^2 = -1`.
pub fn normal_form(w: &GenWord) -> GenWord {
    let four = BigInt::from(4);
    let mut negative = w.negative;
    let mut stack: Vec<Token> = Vec::with_capacity(w.tokens.len());
    for tok in &w.tokens {
        match tok.gen {
            Gen::T => {
                if tok.exp.is_zero() {
                    continue;
                }
                match stack.last_mut() {
                    Some(top) if top.gen == Gen::T => {
                        top.exp += &tok.exp;
                        if top.exp.is_zero() {
                            stack.pop();
                        }
                    }
                    _ => stack.push(tok.clone()),
                }
            }
            Gen::V => {
                let e = tok.exp.mod_floor(&four).to_u8().expect("residue mod 4");
                if e >= 2 {
                    negative = !negative;
                }
                if e % 2 == 1 {
                    match stack.last() {
                        Some(top) if top.gen == Gen::V => {
                            stack.pop();
                            negative = !negative;
                        }
                        _ => stack.push(Token::new(Gen::V, 1)),
                    }
                }
            }
        }
    }
    GenWord { tokens: stack, negative }
}

/// Writes a member of `Γ_V(2)` as a normal-form word.
///
/// Left-multiplies by `T^k` to shrink `|d1|` below `|d3|` and by `V` to swap
/// the rows, until `d3 = 0`; the residue is `±T^k`.
pub fn decompose(m: &UniModMat2) -> Result<GenWord> {
    if let Some((product, value)) = offending_product(m) {
        return Err(SlError::NotMember { product, value });
    }
    let [mut a, mut b, mut c, mut d] = m.d.clone();
    // inverses of the applied operations, in application order
    let mut prefix: Vec<Token> = Vec::new();
    while !c.is_zero() {
        if a.abs() <= c.abs() {
            // V·M = [[-c, -d], [a, b]]
            let (na, nb) = (-&c, -&d);
            c = std::mem::replace(&mut a, na);
            d = std::mem::replace(&mut b, nb);
            prefix.push(Token::new(Gen::V, -1));
        } else {
            let m2 = c.abs() * 2;
            let (q, r) = a.div_mod_floor(&m2);
            // signed multiple of 2|c| to add to a
            let shift = if &r * 2 > m2 { -q - 1 } else { -q };
            let k = if c.is_negative() { -shift } else { shift };
            a += &k * &c * 2;
            b += &k * &d * 2;
            prefix.push(Token::new(Gen::T, -k));
        }
    }
    // [[±1, b], [0, ±1]] = ±T^{±b/2}
    let half: BigInt = &b / 2;
    let (residue, negative) = if a.is_one() { (half, false) } else { (-half, true) };
    prefix.push(Token::new(Gen::T, residue));
    Ok(normal_form(&GenWord { tokens: prefix, negative }))
}

/// Outcome of checking the presentation `⟨V, T | V^4, V^2 T V^-2 T^-1⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PresentationReport {
    pub bound: usize,
    pub relators: Vec<RelatorCheck>,
    pub words_checked: usize,
    pub collisions: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelatorCheck {
    pub relator: String,
    pub is_identity: bool,
}

impl PresentationReport {
    pub fn passed(&self) -> bool {
        self.collisions == 0 && self.relators.iter().all(|r| r.is_identity)
    }
}

/// Every signed normal-form word of letter length at most `bound`.
pub fn normal_forms_up_to(bound: usize) -> Vec<GenWord> {
    fn extend(budget: usize, tokens: &mut Vec<Token>, out: &mut Vec<Vec<Token>>) {
        out.push(tokens.clone());
        let last = tokens.last().map(|t| t.gen);
        if last != Some(Gen::V) && budget >= 1 {
            tokens.push(Token::new(Gen::V, 1));
            extend(budget - 1, tokens, out);
            tokens.pop();
        }
        if last != Some(Gen::T) {
            for k in 1..=budget as i64 {
                for e in [k, -k] {
                    tokens.push(Token::new(Gen::T, e));
                    extend(budget - k as usize, tokens, out);
                    tokens.pop();
                }
            }
        }
    }
    let mut bodies = Vec::new();
    extend(bound, &mut Vec::new(), &mut bodies);
    bodies
        .into_iter()
        .flat_map(|tokens| [GenWord::new(tokens.clone(), false), GenWord::new(tokens, true)])
        .collect()
}

pub fn verify_presentation(bound: usize) -> Result<PresentationReport> {
    if bound == 0 || bound > MAX_PRESENTATION_BOUND {
        return Err(SlError::BoundOutOfRange(bound));
    }
    let relators = ["V^4", "V^2 T V^-2 T^-1"]
        .into_iter()
        .map(|r| RelatorCheck {
            relator: r.to_string(),
            is_identity: eval_word(&r.parse().expect("relator literal parses")) == UniModMat2::identity(),
        })
        .collect();
    let words = normal_forms_up_to(bound);
    let mut seen = HashSet::with_capacity(words.len());
    let collisions = words.iter().filter(|w| !seen.insert(eval_word(w))).count();
    Ok(PresentationReport { bound, relators, words_checked: words.len(), collisions })
}
