//! Small finite groups.
//!
//! Finitely presented groups are turned into multiplication tables by
//! Todd–Coxeter coset enumeration over the trivial subgroup (HLT strategy,
//! coincidences processed in place, cosets scanned in creation order).
//! Table groups are capped at order 64 so that element subsets fit in a `u64`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest order of a multiplication-table group.
pub const MAX_TABLE_ORDER: usize = 64;

/// Default coset cap for enumeration.
pub const DEFAULT_MAX_COSETS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("presentation parse error: {0}")]
    Parse(String),
    #[error("coset enumeration exceeded {max} cosets (the group may be infinite)")]
    CapacityExceeded { max: usize },
    #[error("group of order {order} exceeds the supported maximum {max}")]
    Oversize { order: usize, max: usize },
    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
}

pub type Result<T> = std::result::Result<T, GroupError>;

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_TABLE_ORDER {
        return Err(GroupError::Oversize { order, max: MAX_TABLE_ORDER });
    }
    Ok(())
}

/// A letter `2*g` is generator `g`, `2*g + 1` its inverse.
type Letter = usize;

#[inline]
fn inv(x: Letter) -> Letter {
    x ^ 1
}

fn free_reduce(word: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for &x in word {
        if out.last() == Some(&inv(x)) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

fn invert_word(word: &[Letter]) -> Vec<Letter> {
    word.iter().rev().map(|&x| inv(x)).collect()
}

/// A finite presentation `⟨generators | relators⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<Vec<Letter>>,
}

impl Presentation {
    /// Relators are given as `(generator index, exponent)` runs.
    pub fn new(generators: Vec<String>, relators: Vec<Vec<(usize, i64)>>) -> Result<Self> {
        let mut words = Vec::with_capacity(relators.len());
        for rel in relators {
            let mut word = Vec::new();
            for (g, e) in rel {
                if g >= generators.len() {
                    return Err(GroupError::Parse(format!("relator uses undeclared generator #{g}")));
                }
                let letter = if e < 0 { 2 * g + 1 } else { 2 * g };
                word.extend(std::iter::repeat_n(letter, e.unsigned_abs() as usize));
            }
            words.push(free_reduce(&word));
        }
        Ok(Self { generators, relators: words })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    /// Relators as `(generator index, exponent)` runs.
    pub fn relator_runs(&self) -> Vec<Vec<(usize, i64)>> {
        self.relators
            .iter()
            .map(|word| {
                let mut runs: Vec<(usize, i64)> = Vec::new();
                for &x in word {
                    let (g, e) = (x / 2, if x % 2 == 1 { -1 } else { 1 });
                    match runs.last_mut() {
                        Some((last, exp)) if *last == g && exp.signum() == e => *exp += e,
                        _ => runs.push((g, e)),
                    }
                }
                runs
            })
            .collect()
    }

    /// Same generators and relators in a different order.
    pub fn with_relator_order(&self, order: &[usize]) -> Self {
        Self { generators: self.generators.clone(), relators: order.iter().map(|&i| self.relators[i].clone()).collect() }
    }

    /// Adds every commutator of generators.
    pub fn abelianized(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.generators.len() {
            for j in (i + 1)..self.generators.len() {
                out.relators.push(vec![2 * i, 2 * j, 2 * i + 1, 2 * j + 1]);
            }
        }
        out
    }

    fn format_word(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < word.len() {
            let x = word[i];
            let mut run = 1;
            while i + run < word.len() && word[i + run] == x {
                run += 1;
            }
            let name = &self.generators[x / 2];
            let exp = if x % 2 == 1 { -(run as i64) } else { run as i64 };
            parts.push(if exp == 1 { name.clone() } else { format!("{name}^{exp}") });
            i += run;
        }
        parts.join(" ")
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.format_word(r)).collect();
        write!(f, "gens: {}; rels: {}", self.generators.join(","), rels.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Caret,
    Open,
    Close,
    Comma,
    Equals,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() || c == '*' => i += 1,
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '[' => {
                out.push(Tok::Open);
                i += 1;
            }
            ']' => {
                out.push(Tok::Close);
                i += 1;
            }
            ',' => {
                out.push(Tok::Comma);
                i += 1;
            }
            '=' => {
                out.push(Tok::Equals);
                i += 1;
            }
            '-' | '0'..='9' => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let n = text.parse().map_err(|_| GroupError::Parse(format!("bad integer `{text}`")))?;
                out.push(Tok::Int(n));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(GroupError::Parse(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct WordParser<'a> {
    toks: &'a [Tok],
    pos: usize,
    gens: &'a [String],
}

impl WordParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    /// word := factor*, stopping at `,` `]` `=` or end
    fn word(&mut self) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        while let Some(t) = self.peek() {
            match t {
                Tok::Comma | Tok::Close | Tok::Equals => break,
                _ => out.extend(self.factor()?),
            }
        }
        Ok(out)
    }

    fn factor(&mut self) -> Result<Vec<Letter>> {
        let base = match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let g = self
                    .gens
                    .iter()
                    .position(|n| *n == name)
                    .ok_or_else(|| GroupError::Parse(format!("undeclared generator `{name}`")))?;
                vec![2 * g]
            }
            Some(Tok::Int(1)) => {
                self.pos += 1;
                vec![]
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let x = self.word()?;
                if self.peek() != Some(&Tok::Comma) {
                    return Err(GroupError::Parse("expected `,` in commutator".into()));
                }
                self.pos += 1;
                let y = self.word()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(GroupError::Parse("expected `]`".into()));
                }
                self.pos += 1;
                [x.clone(), y.clone(), invert_word(&x), invert_word(&y)].concat()
            }
            other => return Err(GroupError::Parse(format!("unexpected token {other:?}"))),
        };
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let Some(Tok::Int(e)) = self.peek().cloned() else {
                return Err(GroupError::Parse("expected integer exponent after `^`".into()));
            };
            self.pos += 1;
            let unit = if e < 0 { invert_word(&base) } else { base };
            return Ok(unit.repeat(e.unsigned_abs() as usize));
        }
        Ok(base)
    }
}

impl FromStr for Presentation {
    type Err = GroupError;

    /// `gens: a,b,u; rels: a^2, b^2, [a,b], a u b^-1 u^-1`. Relations of the
    /// form `lhs = rhs` are stored as `lhs rhs^-1`.
    fn from_str(s: &str) -> Result<Self> {
        let (gens_part, rels_part) = s
            .split_once(';')
            .ok_or_else(|| GroupError::Parse("expected `gens: ...; rels: ...`".into()))?;
        let gens_part = gens_part
            .trim()
            .strip_prefix("gens:")
            .ok_or_else(|| GroupError::Parse("missing `gens:`".into()))?;
        let rels_part = rels_part
            .trim()
            .strip_prefix("rels:")
            .ok_or_else(|| GroupError::Parse("missing `rels:`".into()))?;
        let generators: Vec<String> = gens_part
            .split(',')
            .map(|g| g.trim().to_string())
            .filter(|g| !g.is_empty())
            .collect();
        if generators.is_empty() {
            return Err(GroupError::Parse("no generators".into()));
        }
        for g in &generators {
            if !g.chars().all(|c| c.is_alphanumeric() || c == '_') || g.starts_with(|c: char| c.is_ascii_digit()) {
                return Err(GroupError::Parse(format!("bad generator name `{g}`")));
            }
        }
        if generators.iter().collect::<HashSet<_>>().len() != generators.len() {
            return Err(GroupError::Parse("duplicate generator".into()));
        }
        let toks = tokenize(rels_part)?;
        let mut parser = WordParser { toks: &toks, pos: 0, gens: &generators };
        let mut relators = Vec::new();
        while parser.pos < toks.len() {
            let mut word = parser.word()?;
            if parser.peek() == Some(&Tok::Equals) {
                parser.pos += 1;
                let rhs = parser.word()?;
                word.extend(invert_word(&rhs));
            }
            match parser.peek() {
                None => {}
                Some(Tok::Comma) => parser.pos += 1,
                Some(t) => return Err(GroupError::Parse(format!("unexpected token {t:?}"))),
            }
            relators.push(free_reduce(&word));
        }
        Ok(Self { generators, relators })
    }
}

const UNDEF: usize = usize::MAX;

/// Completed coset table: the right action of each generator on cosets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    /// `actions[g][c]` is `c · g`.
    pub actions: Vec<Vec<usize>>,
    /// Cosets defined during enumeration, including ones later merged away.
    pub defined: usize,
}

impl CosetTable {
    pub fn len(&self) -> usize {
        self.actions.first().map_or(1, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

struct Enumerator {
    cols: usize,
    table: Vec<usize>,
    parent: Vec<usize>,
    max: usize,
    queue: Vec<usize>,
}

impl Enumerator {
    fn new(ngens: usize, max: usize) -> Self {
        let cols = 2 * ngens;
        Self { cols, table: vec![UNDEF; cols], parent: vec![0], max, queue: Vec::new() }
    }

    #[inline]
    fn get(&self, c: usize, x: Letter) -> usize {
        self.table[c * self.cols + x]
    }

    #[inline]
    fn set(&mut self, c: usize, x: Letter, d: usize) {
        self.table[c * self.cols + x] = d;
    }

    fn count(&self) -> usize {
        self.parent.len()
    }

    fn define(&mut self, c: usize, x: Letter) -> Result<()> {
        let n = self.count();
        if n >= self.max {
            return Err(GroupError::CapacityExceeded { max: self.max });
        }
        self.parent.push(n);
        self.table.extend(std::iter::repeat_n(UNDEF, self.cols));
        self.set(c, x, n);
        self.set(n, inv(x), c);
        Ok(())
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut root = c;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = c;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn merge(&mut self, k: usize, l: usize) {
        let (k1, l1) = (self.rep(k), self.rep(l));
        if k1 == l1 {
            return;
        }
        let (lo, hi) = (k1.min(l1), k1.max(l1));
        self.parent[hi] = lo;
        self.queue.push(hi);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let e = self.queue[i];
            i += 1;
            for x in 0..self.cols {
                let f = self.get(e, x);
                if f == UNDEF {
                    continue;
                }
                self.set(f, inv(x), UNDEF);
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                let e1x = self.get(e1, x);
                if e1x != UNDEF {
                    self.merge(f1, e1x);
                } else {
                    let f1x = self.get(f1, inv(x));
                    if f1x != UNDEF {
                        self.merge(e1, f1x);
                    } else {
                        self.set(e1, x, f1);
                        self.set(f1, inv(x), e1);
                    }
                }
            }
        }
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn scan_and_fill(&mut self, c: usize, word: &[Letter]) -> Result<()> {
        if word.is_empty() {
            return Ok(());
        }
        let mut f = c;
        let mut b = c;
        let mut i: isize = 0;
        let mut j: isize = word.len() as isize - 1;
        loop {
            while i <= j && self.get(f, word[i as usize]) != UNDEF {
                f = self.get(f, word[i as usize]);
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i && self.get(b, inv(word[j as usize])) != UNDEF {
                b = self.get(b, inv(word[j as usize]));
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            } else if i == j {
                let x = word[i as usize];
                self.set(f, x, b);
                self.set(b, inv(x), f);
                return Ok(());
            } else {
                self.define(f, word[i as usize])?;
            }
        }
    }

    fn run(&mut self, relators: &[Vec<Letter>]) -> Result<()> {
        let mut c = 0;
        while c < self.count() {
            for rel in relators {
                if !self.is_live(c) {
                    break;
                }
                self.scan_and_fill(c, rel)?;
            }
            if self.is_live(c) {
                for x in 0..self.cols {
                    if self.get(c, x) == UNDEF {
                        self.define(c, x)?;
                    }
                }
            }
            c += 1;
        }
        Ok(())
    }

    fn compact(&self, ngens: usize) -> CosetTable {
        let live: Vec<usize> = (0..self.count()).filter(|&c| self.is_live(c)).collect();
        let mut index = vec![UNDEF; self.count()];
        for (i, &c) in live.iter().enumerate() {
            index[c] = i;
        }
        let actions = (0..ngens)
            .map(|g| live.iter().map(|&c| index[self.get(c, 2 * g)]).collect())
            .collect();
        CosetTable { actions, defined: self.count() }
    }
}

/// Enumerates the cosets of the trivial subgroup, i.e. the regular action.
pub fn enumerate_cosets(p: &Presentation, max_cosets: usize) -> Result<CosetTable> {
    if max_cosets == 0 {
        return Err(GroupError::CapacityExceeded { max: 0 });
    }
    let mut e = Enumerator::new(p.generators.len(), max_cosets);
    e.run(&p.relators)?;
    Ok(e.compact(p.generators.len()))
}

/// The presented group as a multiplication table (order at most 64).
pub fn todd_coxeter(p: &Presentation, max_cosets: usize) -> Result<MulTableGroup> {
    let table = enumerate_cosets(p, max_cosets)?;
    MulTableGroup::from_regular_action(&table)
}

/// A group given by its multiplication table; elements are `0..order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MulTableGroup {
    n: usize,
    table: Vec<usize>,
    identity: usize,
}

impl MulTableGroup {
    /// Validates Latin-square, identity, inverse and associativity conditions.
    pub fn from_table(n: usize, table: Vec<usize>) -> Result<Self> {
        check_order(n)?;
        if table.len() != n * n {
            return Err(GroupError::InvalidTable(format!("expected {} entries, got {}", n * n, table.len())));
        }
        if table.iter().any(|&x| x >= n) {
            return Err(GroupError::InvalidTable("entry out of range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e * n + a] == a && table[a * n + e] == a))
            .ok_or_else(|| GroupError::InvalidTable("no identity element".into()))?;
        let g = Self { n, table, identity };
        g.validate()?;
        Ok(g)
    }

    /// Re-checks every group axiom on the stored table.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        for a in 0..n {
            let mut row = 0u64;
            let mut col = 0u64;
            for b in 0..n {
                row |= 1 << self.mul(a, b);
                col |= 1 << self.mul(b, a);
            }
            let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            if row != full || col != full {
                return Err(GroupError::InvalidTable(format!("row or column {a} is not a permutation")));
            }
        }
        for a in 0..n {
            if self.mul(self.identity, a) != a || self.mul(a, self.identity) != a {
                return Err(GroupError::InvalidTable("identity fails".into()));
            }
            if !(0..n).any(|b| self.mul(a, b) == self.identity && self.mul(b, a) == self.identity) {
                return Err(GroupError::InvalidTable(format!("element {a} has no inverse")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(GroupError::InvalidTable(format!("({a}{b}){c} != {a}({b}{c})")));
                    }
                }
            }
        }
        Ok(())
    }

    fn from_regular_action(ct: &CosetTable) -> Result<Self> {
        let n = ct.len();
        check_order(n)?;
        let ngens = ct.actions.len();
        // inverse actions
        let mut inverse_actions = vec![vec![0; n]; ngens];
        for g in 0..ngens {
            for c in 0..n {
                inverse_actions[g][ct.actions[g][c]] = c;
            }
        }
        // shortest word (as letters) from coset 0 to each coset
        let mut words: Vec<Option<Vec<Letter>>> = vec![None; n];
        words[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for x in 0..2 * ngens {
                let d = if x % 2 == 0 { ct.actions[x / 2][c] } else { inverse_actions[x / 2][c] };
                if words[d].is_none() {
                    let mut w = words[c].clone().expect("visited");
                    w.push(x);
                    words[d] = Some(w);
                    queue.push_back(d);
                }
            }
        }
        let apply = |mut c: usize, w: &[Letter]| {
            for &x in w {
                c = if x % 2 == 0 { ct.actions[x / 2][c] } else { inverse_actions[x / 2][c] };
            }
            c
        };
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let w = words[b].as_ref().ok_or_else(|| GroupError::InvalidTable("disconnected coset table".into()))?;
                table[a * n + b] = apply(a, w);
            }
        }
        Self::from_table(n, table)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.n).find(|&b| self.mul(a, b) == self.identity).expect("validated group")
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn involution_count(&self) -> usize {
        (0..self.n).filter(|&a| self.element_order(a) == 2).count()
    }

    pub fn exponent(&self) -> usize {
        (0..self.n).map(|a| self.element_order(a)).fold(1, num_integer::lcm)
    }

    /// `counts[k]` = number of elements of order `k`.
    pub fn order_statistics(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n + 1];
        for a in 0..self.n {
            counts[self.element_order(a)] += 1;
        }
        counts
    }

    /// Bitmask of the subgroup generated by `elements`.
    pub fn generated_subgroup(&self, elements: &[usize]) -> u64 {
        let mut set = 1u64 << self.identity;
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in elements {
                let y = self.mul(x, g);
                if set & (1 << y) == 0 {
                    set |= 1 << y;
                    frontier.push(y);
                }
            }
        }
        set
    }

    fn closure(&self, mask: u64) -> u64 {
        self.generated_subgroup(&mask_elements(mask))
    }

    pub fn is_subgroup(&self, mask: u64) -> bool {
        mask & (1 << self.identity) != 0 && self.closure(mask) == mask
    }

    pub fn is_normal(&self, mask: u64) -> bool {
        self.is_subgroup(mask)
            && (0..self.n).all(|g| {
                let gi = self.inverse(g);
                mask_elements(mask).into_iter().all(|h| mask & (1 << self.mul(self.mul(g, h), gi)) != 0)
            })
    }

    /// A small generating set, chosen greedily by decreasing element order.
    pub fn generators(&self) -> Vec<usize> {
        let mut by_order: Vec<usize> = (0..self.n).collect();
        by_order.sort_by_key(|&a| (std::cmp::Reverse(self.element_order(a)), a));
        let full = full_mask(self.n);
        let mut gens = Vec::new();
        let mut current = 1u64 << self.identity;
        for a in by_order {
            if current == full {
                break;
            }
            if current & (1 << a) == 0 {
                gens.push(a);
                current = self.generated_subgroup(&gens);
            }
        }
        gens
    }

    /// Quotient by a normal subgroup; also returns the projection.
    pub fn quotient(&self, normal: &[usize]) -> Result<(MulTableGroup, Vec<usize>)> {
        let mask = self.subgroup_mask(normal)?;
        if !self.is_normal(mask) {
            return Err(GroupError::InvalidSubgroup("subgroup is not normal".into()));
        }
        let mut projection = vec![UNDEF; self.n];
        let mut reps = Vec::new();
        for g in 0..self.n {
            if projection[g] != UNDEF {
                continue;
            }
            let idx = reps.len();
            reps.push(g);
            for h in mask_elements(mask) {
                projection[self.mul(g, h)] = idx;
            }
        }
        let m = reps.len();
        let mut table = vec![0; m * m];
        for i in 0..m {
            for j in 0..m {
                table[i * m + j] = projection[self.mul(reps[i], reps[j])];
            }
        }
        Ok((MulTableGroup::from_table(m, table)?, projection))
    }

    /// Validates an index set and returns it as a subgroup mask.
    pub fn subgroup_mask(&self, elements: &[usize]) -> Result<u64> {
        let mut mask = 0u64;
        for &e in elements {
            if e >= self.n {
                return Err(GroupError::InvalidSubgroup(format!("element {e} out of range")));
            }
            mask |= 1 << e;
        }
        if !self.is_subgroup(mask) {
            return Err(GroupError::InvalidSubgroup("set is not closed under multiplication".into()));
        }
        Ok(mask)
    }
}

pub fn mask_elements(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask & (1 << i) != 0).collect()
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn trivial() -> MulTableGroup {
    cyclic(1).expect("order 1")
}

pub fn cyclic(n: usize) -> Result<MulTableGroup> {
    check_order(n)?;
    let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
    MulTableGroup::from_table(n, table)
}

/// Dihedral group of the given order (`2m`); element `i + m*j` is `r^i s^j`.
pub fn dihedral(order: usize) -> Result<MulTableGroup> {
    check_order(order)?;
    if order % 2 == 1 || order < 2 {
        return Err(GroupError::InvalidTable(format!("dihedral order {order} must be even")));
    }
    let m = order / 2;
    let mut table = vec![0; order * order];
    for a in 0..order {
        let (i, s) = (a % m, a / m);
        for b in 0..order {
            let (k, t) = (b % m, b / m);
            let rot = if s == 0 { (i + k) % m } else { (i + m - k) % m };
            table[a * order + b] = rot + m * ((s + t) % 2);
        }
    }
    MulTableGroup::from_table(order, table)
}

pub fn klein() -> MulTableGroup {
    let c2 = cyclic(2).expect("order 2");
    direct_product(&c2, &c2).expect("order 4")
}

/// Quaternion group `{±1, ±i, ±j, ±k}`; element `u + 4*s` is `(-1)^s u`.
pub fn quaternion() -> MulTableGroup {
    // unit products (sign, unit) for units 1, i, j, k
    const UNIT: [[(usize, usize); 4]; 4] = [
        [(0, 0), (0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 0), (0, 3), (1, 2)],
        [(0, 2), (1, 3), (1, 0), (0, 1)],
        [(0, 3), (0, 2), (1, 1), (1, 0)],
    ];
    let mut table = vec![0; 64];
    for a in 0..8 {
        for b in 0..8 {
            let (s, u) = UNIT[a % 4][b % 4];
            let sign = (s + a / 4 + b / 4) % 2;
            table[a * 8 + b] = u + 4 * sign;
        }
    }
    MulTableGroup::from_table(8, table).expect("quaternion table")
}

/// Element `(g, h)` has index `g * |H| + h`.
pub fn direct_product(g: &MulTableGroup, h: &MulTableGroup) -> Result<MulTableGroup> {
    let (a, b) = (g.order(), h.order());
    check_order(a * b)?;
    let n = a * b;
    let mut table = vec![0; n * n];
    for x in 0..n {
        for y in 0..n {
            table[x * n + y] = g.mul(x / b, y / b) * b + h.mul(x % b, y % b);
        }
    }
    MulTableGroup::from_table(n, table)
}

/// Checks that `map` is an automorphism of `g`.
pub fn is_automorphism(g: &MulTableGroup, map: &[usize]) -> bool {
    is_isomorphism(g, g, map)
}

/// `N ⋊ H` with `action[h]` the automorphism of `N` by which `h` acts.
/// Element `(n, h)` has index `n * |H| + h`; multiplication is
/// `(n1, h1)(n2, h2) = (n1 · action[h1](n2), h1 h2)`.
pub fn semidirect_product(n: &MulTableGroup, h: &MulTableGroup, action: &[Vec<usize>]) -> Result<MulTableGroup> {
    let (a, b) = (n.order(), h.order());
    check_order(a * b)?;
    if action.len() != b {
        return Err(GroupError::InvalidAction(format!("expected {b} automorphisms, got {}", action.len())));
    }
    for (i, phi) in action.iter().enumerate() {
        if phi.len() != a || !is_automorphism(n, phi) {
            return Err(GroupError::InvalidAction(format!("image of element {i} is not an automorphism")));
        }
    }
    for x in 0..b {
        for y in 0..b {
            let xy = h.mul(x, y);
            if (0..a).any(|m| action[xy][m] != action[x][action[y][m]]) {
                return Err(GroupError::InvalidAction(format!("action is not a homomorphism at ({x}, {y})")));
            }
        }
    }
    let total = a * b;
    let mut table = vec![0; total * total];
    for p in 0..total {
        let (n1, h1) = (p / b, p % b);
        for q in 0..total {
            let (n2, h2) = (q / b, q % b);
            table[p * total + q] = n.mul(n1, action[h1][n2]) * b + h.mul(h1, h2);
        }
    }
    MulTableGroup::from_table(total, table)
}

/// Whether `map: G -> H` is a bijective homomorphism.
pub fn is_isomorphism(g: &MulTableGroup, h: &MulTableGroup, map: &[usize]) -> bool {
    if g.order() != h.order() || map.len() != g.order() {
        return false;
    }
    let mut hit = vec![false; h.order()];
    for &y in map {
        if y >= h.order() || hit[y] {
            return false;
        }
        hit[y] = true;
    }
    (0..g.order()).all(|a| (0..g.order()).all(|b| map[g.mul(a, b)] == h.mul(map[a], map[b])))
}

/// Searches for an isomorphism `G -> H`, returning a verified witness.
pub fn find_isomorphism(g: &MulTableGroup, h: &MulTableGroup) -> Result<Option<Vec<usize>>> {
    check_order(g.order())?;
    check_order(h.order())?;
    if g.order() != h.order()
        || g.is_abelian() != h.is_abelian()
        || g.order_statistics() != h.order_statistics()
    {
        return Ok(None);
    }
    let gens = g.generators();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&x| (0..h.order()).filter(|&y| h.element_order(y) == g.element_order(x)).collect())
        .collect();

    // extends `images` over the subgroup generated by gens[..images.len()]
    let extend = |images: &[usize]| -> Option<Vec<usize>> {
        let mut map = vec![UNDEF; g.order()];
        let mut used = vec![false; h.order()];
        map[g.identity()] = h.identity();
        used[h.identity()] = true;
        let mut queue = vec![g.identity()];
        while let Some(x) = queue.pop() {
            for (k, &img) in images.iter().enumerate() {
                let y = g.mul(x, gens[k]);
                let fy = h.mul(map[x], img);
                if map[y] == UNDEF {
                    if used[fy] {
                        return None;
                    }
                    used[fy] = true;
                    map[y] = fy;
                    queue.push(y);
                } else if map[y] != fy {
                    return None;
                }
            }
        }
        Some(map)
    };

    fn search(
        depth: usize,
        images: &mut Vec<usize>,
        candidates: &[Vec<usize>],
        extend: &dyn Fn(&[usize]) -> Option<Vec<usize>>,
    ) -> Option<Vec<usize>> {
        let partial = extend(images)?;
        if depth == candidates.len() {
            return Some(partial);
        }
        for &c in &candidates[depth] {
            images.push(c);
            if let Some(found) = search(depth + 1, images, candidates, extend) {
                return Some(found);
            }
            images.pop();
        }
        None
    }

    let found = search(0, &mut Vec::new(), &candidates, &extend);
    Ok(found.filter(|map| is_isomorphism(g, h, map)))
}

pub fn is_isomorphic(g: &MulTableGroup, h: &MulTableGroup) -> Result<bool> {
    Ok(find_isomorphism(g, h)?.is_some())
}

/// A subgroup `H` with `H ∩ N = {e}` and `N H = G`, if one exists.
pub fn find_complement(g: &MulTableGroup, normal: &[usize]) -> Result<Option<u64>> {
    let n_mask = g.subgroup_mask(normal)?;
    if !g.is_normal(n_mask) {
        return Err(GroupError::InvalidSubgroup("subgroup is not normal".into()));
    }
    let target = g.order() / n_mask.count_ones() as usize;
    let e = 1u64 << g.identity();
    if target == 1 {
        return Ok(Some(e));
    }
    let mut seen = HashSet::from([e]);
    let mut frontier = vec![e];
    while let Some(s) = frontier.pop() {
        for x in 0..g.order() {
            if (s | n_mask) & (1 << x) != 0 {
                continue;
            }
            let t = g.closure(s | (1 << x));
            let size = t.count_ones() as usize;
            if t & n_mask != e || size > target || !seen.insert(t) {
                continue;
            }
            if size == target {
                return Ok(Some(t));
            }
            frontier.push(t);
        }
    }
    Ok(None)
}

pub fn has_complement(g: &MulTableGroup, normal: &[usize]) -> Result<bool> {
    Ok(find_complement(g, normal)?.is_some())
}

/// Named elements of the even-dimensional extension model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvenModelGenerators {
    pub delta1: usize,
    pub delta2: usize,
    pub u: usize,
    pub r: usize,
}

impl EvenModelGenerators {
    /// The kernel `⟨δ1, δ2⟩ ≅ Z2 ⊕ Z2`.
    pub fn kernel(&self, e: &MulTableGroup) -> Vec<usize> {
        mask_elements(e.generated_subgroup(&[self.delta1, self.delta2]))
    }
}

fn swap_action() -> Vec<Vec<usize>> {
    // klein element (a, b) has index 2a + b; the swap exchanges 1 and 2
    vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]]
}

/// `((Z2 × Z2) ⋊ Z2) × Z2` with `u` swapping the kernel factors and `r` central.
pub fn build_e_even() -> MulTableGroup {
    let inner = semidirect_product(&klein(), &cyclic(2).expect("order 2"), &swap_action()).expect("swap is an automorphism");
    direct_product(&inner, &cyclic(2).expect("order 2")).expect("order 16")
}

pub fn e_even_generators() -> EvenModelGenerators {
    // (n, h) in the semidirect product is 2n + h; (x, c) in the outer product is 2x + c
    let inner = |klein_idx: usize, h: usize| 2 * klein_idx + h;
    let outer = |x: usize, c: usize| 2 * x + c;
    EvenModelGenerators {
        delta1: outer(inner(2, 0), 0),
        delta2: outer(inner(1, 0), 0),
        u: outer(inner(0, 1), 0),
        r: outer(inner(0, 0), 1),
    }
}

/// Presentation of the quotient by the orientation reversal.
pub const QUOTIENT_PRESENTATION: &str = "gens: a,b,u; rels: a^2, b^2, u^2, [a,b], a u b^-1 u^-1";

/// Presentation of the full even-dimensional model.
pub const E_EVEN_PRESENTATION: &str =
    "gens: d1,d2,u,r; rels: d1^2, d2^2, u^2, r^2, [d1,d2], u d1 u^-1 d2^-1, [r,d1], [r,d2], [r,u]";

/// `⟨V, T | V^4, V^2 T V^-2 T^-1⟩`.
pub const GAMMA_V2_PRESENTATION: &str = "gens: V,T; rels: V^4, V^2 T V^-2 T^-1";

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(s: &str) -> Presentation {
        s.parse().unwrap()
    }

    #[test]
    fn cyclic_presentation() {
        let g = todd_coxeter(&pres("gens: a; rels: a^2"), 100).unwrap();
        assert_eq!(g.order(), 2);
        let g = todd_coxeter(&pres("gens: a; rels: a^7"), 100).unwrap();
        assert!(is_isomorphic(&g, &cyclic(7).unwrap()).unwrap());
    }

    #[test]
    fn quotient_presentation_is_dihedral() {
        let g = todd_coxeter(&pres(QUOTIENT_PRESENTATION), 1000).unwrap();
        assert_eq!(g.order(), 8);
        assert!(!g.is_abelian());
        assert!(is_isomorphic(&g, &dihedral(8).unwrap()).unwrap());
        assert!(!is_isomorphic(&g, &quaternion()).unwrap());
    }

    #[test]
    fn gamma_v2_does_not_close() {
        let err = todd_coxeter(&pres(GAMMA_V2_PRESENTATION), 10_000).unwrap_err();
        assert_eq!(err, GroupError::CapacityExceeded { max: 10_000 });
    }

    #[test]
    fn larger_enumerations() {
        // S4 = ⟨a, b | a^2, b^3, (ab)^4⟩
        let s4 = enumerate_cosets(&pres("gens: a,b; rels: a^2, b^3, a b a b a b a b"), 10_000).unwrap();
        assert_eq!(s4.len(), 24);
        // A5 = ⟨a, b | a^2, b^3, (ab)^5⟩
        let a5 = todd_coxeter(&pres("gens: a,b; rels: a^2, b^3, a b a b a b a b a b"), 10_000).unwrap();
        assert_eq!(a5.order(), 60);
        assert_eq!(a5.order_statistics()[5], 24);
        // order > 64 enumerates but has no table
        let big = pres("gens: a; rels: a^100");
        assert_eq!(enumerate_cosets(&big, 1000).unwrap().len(), 100);
        assert_eq!(todd_coxeter(&big, 1000).unwrap_err(), GroupError::Oversize { order: 100, max: 64 });
    }

    #[test]
    fn relator_order_does_not_matter() {
        let p = pres(E_EVEN_PRESENTATION);
        let base = todd_coxeter(&p, 10_000).unwrap();
        assert_eq!(base.order(), 16);
        let n = p.relator_count();
        let reversed: Vec<usize> = (0..n).rev().collect();
        let rotated: Vec<usize> = (0..n).map(|i| (i + 3) % n).collect();
        for order in [reversed, rotated] {
            let g = todd_coxeter(&p.with_relator_order(&order), 10_000).unwrap();
            assert_eq!(g.order(), 16);
            assert!(is_isomorphic(&g, &base).unwrap());
        }
    }

    #[test]
    fn parse_and_display() {
        let p = pres(QUOTIENT_PRESENTATION);
        assert_eq!(p.to_string(), "gens: a,b,u; rels: a^2, b^2, u^2, a b a^-1 b^-1, a u b^-1 u^-1");
        assert_eq!(pres(&p.to_string()), p);
        assert_eq!(pres("gens: a,b; rels: a b = b a"), pres("gens: a,b; rels: [a,b]"));
        assert!(matches!("gens: a; rels: b^2".parse::<Presentation>(), Err(GroupError::Parse(_))));
        assert!(matches!("gens: a rels: a".parse::<Presentation>(), Err(GroupError::Parse(_))));
        assert!(matches!("gens: a; rels: a^".parse::<Presentation>(), Err(GroupError::Parse(_))));
    }

    #[test]
    fn standard_groups() {
        assert_eq!(cyclic(2).unwrap().order(), 2);
        let d8 = dihedral(8).unwrap();
        assert_eq!(d8.order(), 8);
        assert_eq!(d8.involution_count(), 5);
        assert_eq!(quaternion().involution_count(), 1);
        let c2 = cyclic(2).unwrap();
        assert!(is_isomorphic(&klein(), &direct_product(&c2, &c2).unwrap()).unwrap());
        assert!(matches!(cyclic(65), Err(GroupError::Oversize { .. })));
        assert!(matches!(dihedral(128), Err(GroupError::Oversize { .. })));
        assert!(dihedral(7).is_err());
    }

    #[test]
    fn isomorphism_basics() {
        let d8 = dihedral(8).unwrap();
        let witness = find_isomorphism(&d8, &d8).unwrap().unwrap();
        assert!(is_isomorphism(&d8, &d8, &witness));
        assert!(!is_isomorphic(&d8, &quaternion()).unwrap());
        assert!(!is_isomorphic(&cyclic(4).unwrap(), &klein()).unwrap());
        let c2 = cyclic(2).unwrap();
        let c4 = cyclic(4).unwrap();
        let c8 = cyclic(8).unwrap();
        // same order statistics up to abelian check: Z4 x Z2 vs D8 differ; Z8 vs Z4xZ2 differ
        assert!(!is_isomorphic(&direct_product(&c4, &c2).unwrap(), &c8).unwrap());
    }

    #[test]
    fn products() {
        let d8 = dihedral(8).unwrap();
        let c2 = cyclic(2).unwrap();
        let p = direct_product(&d8, &c2).unwrap();
        assert_eq!(p.order(), 16);
        assert!(is_isomorphic(&direct_product(&d8, &trivial()).unwrap(), &d8).unwrap());
        let k = direct_product(&c2, &c2).unwrap();
        assert!(k.is_abelian());
        assert_eq!(k.exponent(), 2);
        assert!(matches!(direct_product(&cyclic(16).unwrap(), &cyclic(8).unwrap()), Err(GroupError::Oversize { .. })));
    }

    #[test]
    fn semidirect_examples() {
        let c2 = cyclic(2).unwrap();
        let sd = semidirect_product(&klein(), &c2, &swap_action()).unwrap();
        assert!(is_isomorphic(&sd, &dihedral(8).unwrap()).unwrap());
        let trivial_action = vec![vec![0, 1, 2, 3]; 2];
        assert_eq!(semidirect_product(&klein(), &c2, &trivial_action).unwrap(), direct_product(&klein(), &c2).unwrap());
        let full = direct_product(&sd, &c2).unwrap();
        assert_eq!(full.order(), 16);
        assert!(is_isomorphic(&full, &direct_product(&dihedral(8).unwrap(), &c2).unwrap()).unwrap());
        // not an automorphism
        let bad = vec![vec![0, 1, 2, 3], vec![1, 0, 2, 3]];
        assert!(matches!(semidirect_product(&klein(), &c2, &bad), Err(GroupError::InvalidAction(_))));
        // automorphisms but not a homomorphism from Z2
        let bad = vec![vec![0, 2, 1, 3], vec![0, 2, 1, 3]];
        assert!(matches!(semidirect_product(&klein(), &c2, &bad), Err(GroupError::InvalidAction(_))));
    }

    #[test]
    fn complements() {
        let k = klein();
        assert!(has_complement(&k, &[0, 1]).unwrap());
        assert!(has_complement(&k, &[0, 2]).unwrap());
        let d8 = dihedral(8).unwrap();
        // rotation by half a turn is r^2 = element 2
        let center: Vec<usize> = (0..8).filter(|&z| (0..8).all(|g| d8.mul(z, g) == d8.mul(g, z))).collect();
        assert_eq!(center, vec![0, 2]);
        assert!(!has_complement(&d8, &center).unwrap());
        assert!(has_complement(&d8, &[0]).unwrap());
        // rotations have the reflections as complements
        assert!(has_complement(&d8, &[0, 1, 2, 3]).unwrap());
        // non-normal subgroup rejected
        assert!(matches!(has_complement(&d8, &[0, 4]), Err(GroupError::InvalidSubgroup(_))));
        assert!(matches!(has_complement(&d8, &[0, 1]), Err(GroupError::InvalidSubgroup(_))));
    }

    #[test]
    fn e_even_model() {
        let e = build_e_even();
        assert_eq!(e.order(), 16);
        let g = e_even_generators();
        assert_eq!(e.mul(e.mul(g.u, g.delta1), g.u), g.delta2);
        for x in [g.delta1, g.delta2, g.u] {
            assert_eq!(e.mul(g.r, x), e.mul(x, g.r));
        }
        let (q, _) = e.quotient(&[e.identity(), g.r]).unwrap();
        assert!(is_isomorphic(&q, &dihedral(8).unwrap()).unwrap());
        let kernel = g.kernel(&e);
        assert_eq!(kernel.len(), 4);
        let (image, _) = e.quotient(&kernel).unwrap();
        assert!(is_isomorphic(&image, &klein()).unwrap());
        let ab = todd_coxeter(&pres(E_EVEN_PRESENTATION).abelianized(), 10_000).unwrap();
        assert_eq!(ab.order(), 8);
        assert!(ab.is_abelian());
        assert_eq!(ab.exponent(), 2);
        let presented = todd_coxeter(&pres(E_EVEN_PRESENTATION), 10_000).unwrap();
        assert!(is_isomorphic(&presented, &e).unwrap());
    }

    #[test]
    fn bad_tables() {
        assert!(matches!(MulTableGroup::from_table(2, vec![0, 1, 1, 1]), Err(GroupError::InvalidTable(_))));
        assert!(matches!(MulTableGroup::from_table(2, vec![0, 1, 1]), Err(GroupError::InvalidTable(_))));
        // Latin square with identity but not associative (order 5 loop)
        let loop5 = vec![
            0, 1, 2, 3, 4, //
            1, 0, 3, 4, 2, //
            2, 4, 0, 1, 3, //
            3, 2, 4, 0, 1, //
            4, 3, 1, 2, 0,
        ];
        assert!(matches!(MulTableGroup::from_table(5, loop5), Err(GroupError::InvalidTable(_))));
    }
}
