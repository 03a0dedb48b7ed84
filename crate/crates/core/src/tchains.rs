//! Hirzebruch–Jung continued fractions and class-T chains.
//!
//! A chain `[b1, .., bk]` (all `bi >= 2`) stands for the linear dual graph
//! `-b1 - -b2 - .. - -bk` and has value `b1 - 1/(b2 - 1/(.. - 1/bk))`.
//! Chains are stored in printed order; a chain and its reverse are distinct
//! values.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainError {
    #[error("invalid pair (p, q) = ({p}, {q}): need p > q > 0 and gcd(p, q) = 1")]
    InvalidPair { p: u64, q: u64 },
    #[error("chain entry {index} is {value}; entries must be >= 2")]
    EntryTooSmall { index: usize, value: u32 },
    #[error("empty chain")]
    Empty,
    #[error("chain {chain:?} has value {value}, not p^2/(pq-1) for (p, q) = ({p}, {q})")]
    ParamMismatch { chain: Vec<u32>, value: String, p: u64, q: u64 },
    #[error("value {0} is not > 1")]
    ValueTooSmall(String),
}

/// `(p, q)` of a configuration `C_{p,q}`: `p > q > 0`, coprime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WahlParams {
    pub p: u64,
    pub q: u64,
}

impl WahlParams {
    pub fn new(p: u64, q: u64) -> Result<Self, ChainError> {
        if q == 0 || p <= q || p.gcd(&q) != 1 {
            return Err(ChainError::InvalidPair { p, q });
        }
        Ok(WahlParams { p, q })
    }

    /// Order of the boundary lens space `L(p^2, 1 - pq)`.
    pub fn lens_order(&self) -> u64 {
        self.p * self.p
    }
}

/// `(d, n, a)` with value `dn^2 / (dna - 1)`, `0 < a < n`, `gcd(a, n) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassTParams {
    pub d: u64,
    pub n: u64,
    pub a: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TChain {
    bs: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<WahlParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    general_params: Option<ClassTParams>,
}

impl TChain {
    pub fn new(bs: Vec<u32>) -> Result<Self, ChainError> {
        check_entries(&bs)?;
        Ok(TChain { bs, params: None, general_params: None })
    }

    /// Attaches `(p, q)` after checking the value is exactly `p^2/(pq-1)`.
    pub fn with_params(mut self, p: u64, q: u64) -> Result<Self, ChainError> {
        let params = WahlParams::new(p, q)?;
        let value = hj_value(&self.bs)?;
        let expected = Rational::new(BigInt::from(p * p), BigInt::from(p * q - 1));
        if value != expected {
            return Err(ChainError::ParamMismatch { chain: self.bs.clone(), value: value.to_string(), p, q });
        }
        self.params = Some(params);
        Ok(self)
    }

    pub fn annotated(mut self) -> Self {
        self.general_params = class_t_params(&self.bs);
        if self.params.is_none() {
            self.params = wahl_params(&self.bs);
        }
        self
    }

    pub fn entries(&self) -> &[u32] {
        &self.bs
    }

    pub fn len(&self) -> usize {
        self.bs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bs.is_empty()
    }

    pub fn params(&self) -> Option<WahlParams> {
        self.params
    }

    pub fn general_params(&self) -> Option<ClassTParams> {
        self.general_params
    }

    /// Tridiagonal intersection matrix: `-b_i` on the diagonal, `1` beside it.
    pub fn intersection_matrix(&self) -> Vec<Vec<BigInt>> {
        let k = self.bs.len();
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| match i.abs_diff(j) {
                        0 => -BigInt::from(self.bs[i]),
                        1 => BigInt::one(),
                        _ => BigInt::zero(),
                    })
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for TChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.bs.iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

fn check_entries(bs: &[u32]) -> Result<(), ChainError> {
    match bs.iter().position(|&b| b < 2) {
        Some(index) => Err(ChainError::EntryTooSmall { index, value: bs[index] }),
        None => Ok(()),
    }
}

/// Continuant `K(b1, .., bk)` for the negative-regular bracket
/// (`K() = 1`, `K(b1) = b1`, `K(b1..bk) = bk K(b1..b_{k-1}) - K(b1..b_{k-2})`).
pub fn continuant(bs: &[u32]) -> BigInt {
    let (mut prev, mut cur) = (BigInt::zero(), BigInt::one());
    for &b in bs {
        let next = BigInt::from(b) * &cur - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// The exact value `[b1, .., bk]`; always `> 1` for entries `>= 2`.
pub fn hj_value(bs: &[u32]) -> Result<Rational, ChainError> {
    if bs.is_empty() {
        return Err(ChainError::Empty);
    }
    check_entries(bs)?;
    Ok(Rational::new(continuant(bs), continuant(&bs[1..])))
}

/// Negative-regular expansion of a rational `> 1`.
pub fn hj_expansion(value: &Rational) -> Result<Vec<u32>, ChainError> {
    if value <= &Rational::one() {
        return Err(ChainError::ValueTooSmall(value.to_string()));
    }
    let (mut num, mut den) = (value.numer().clone(), value.denom().clone());
    let mut out = Vec::new();
    while !den.is_zero() {
        // b = ceil(num / den), then num/den -> den / (b den - num)
        let b = num.div_ceil(&den);
        out.push(b.to_u32().expect("entry fits in u32"));
        let rest = &b * &den - &num;
        num = den;
        den = rest;
    }
    Ok(out)
}

/// The chain of the configuration `C_{p,q}`: expansion of `p^2/(pq-1)`.
pub fn hj_expand(p: u64, q: u64) -> Result<TChain, ChainError> {
    let params = WahlParams::new(p, q)?;
    let value = Rational::new(BigInt::from(p * p), BigInt::from(p * q - 1));
    let bs = hj_expansion(&value)?;
    Ok(TChain { bs, params: Some(params), general_params: Some(ClassTParams { d: 1, n: p, a: q }) })
}

/// `(p, q)` when the chain value is `p^2/(pq-1)` with `p > q > 0` coprime.
pub fn wahl_params(bs: &[u32]) -> Option<WahlParams> {
    let value = hj_value(bs).ok()?;
    let (num, den) = (value.numer(), value.denom());
    let p = num.sqrt();
    if &(&p * &p) != num {
        return None;
    }
    let (q, rem) = (den + BigInt::one()).div_rem(&p);
    if !rem.is_zero() {
        return None;
    }
    WahlParams::new(p.to_u64()?, q.to_u64()?).ok()
}

/// Arithmetic class-T test: value `dn^2/(dna-1)` with the usual constraints.
pub fn class_t_params(bs: &[u32]) -> Option<ClassTParams> {
    let value = hj_value(bs).ok()?;
    let (num, den) = (value.numer(), value.denom());
    // num = d n^2 and den + 1 = d n a with gcd(a, n) = 1 force gcd(num, den + 1) = d n.
    let m1 = den + BigInt::one();
    let g = num.gcd(&m1);
    let (n, rem) = num.div_rem(&g);
    if !rem.is_zero() || n < BigInt::from(2) {
        return None;
    }
    let (d, rem) = g.div_rem(&n);
    if !rem.is_zero() {
        return None;
    }
    let a = &m1 / &g;
    if a.is_zero() || a >= n || !a.gcd(&n).is_one() {
        return None;
    }
    Some(ClassTParams { d: d.to_u64()?, n: n.to_u64()?, a: a.to_u64()? })
}

/// Forward extension moves on class-T chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    /// `[b1..br] -> [2, b1, .., b_{r-1}, br + 1]`
    PrependTwo,
    /// `[b1..br] -> [b1 + 1, b2, .., br, 2]`
    AppendTwo,
}

impl Move {
    pub fn apply(self, bs: &[u32]) -> Vec<u32> {
        let mut out = Vec::with_capacity(bs.len() + 1);
        match self {
            Move::PrependTwo => {
                out.push(2);
                out.extend_from_slice(bs);
                *out.last_mut().expect("non-empty") += 1;
            }
            Move::AppendTwo => {
                out.extend_from_slice(bs);
                out[0] += 1;
                out.push(2);
            }
        }
        out
    }

    /// Undoes the move, if `bs` could have been produced by it.
    pub fn undo(self, bs: &[u32]) -> Option<Vec<u32>> {
        let k = bs.len();
        if k < 2 {
            return None;
        }
        match self {
            Move::PrependTwo if bs[0] == 2 && bs[k - 1] >= 3 => {
                let mut out = bs[1..].to_vec();
                *out.last_mut().expect("non-empty") -= 1;
                Some(out)
            }
            Move::AppendTwo if bs[k - 1] == 2 && bs[0] >= 3 => {
                let mut out = bs[..k - 1].to_vec();
                out[0] -= 1;
                Some(out)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Recognition {
    /// `[4]` or `[3, 2, .., 2, 3]`.
    BaseCase {
        base: Vec<u32>,
    },
    /// Reached from `base` by applying `moves` in order.
    Derived {
        base: Vec<u32>,
        moves: Vec<Move>,
    },
    /// All entries 2: an A_k rational double point, outside the recursion.
    RationalDoublePoint,
    NotClassT,
}

impl Recognition {
    pub fn is_class_t(&self) -> bool {
        matches!(self, Recognition::BaseCase { .. } | Recognition::Derived { .. })
    }
}

fn is_base(bs: &[u32]) -> bool {
    match bs {
        [4] => true,
        [3, middle @ .., 3] => middle.iter().all(|&b| b == 2),
        _ => false,
    }
}

/// Structural recognition with a witness derivation.
pub fn recognize(bs: &[u32]) -> Recognition {
    if bs.is_empty() || check_entries(bs).is_err() {
        return Recognition::NotClassT;
    }
    if bs.iter().all(|&b| b == 2) {
        return Recognition::RationalDoublePoint;
    }
    if is_base(bs) {
        return Recognition::BaseCase { base: bs.to_vec() };
    }
    let mut dead: HashSet<Vec<u32>> = HashSet::new();
    let mut undone = Vec::new();
    match reduce(bs.to_vec(), &mut dead, &mut undone) {
        Some(base) => {
            undone.reverse();
            Recognition::Derived { base, moves: undone }
        }
        None => Recognition::NotClassT,
    }
}

/// Memoized backtracking over the two reverse moves.
fn reduce(bs: Vec<u32>, dead: &mut HashSet<Vec<u32>>, path: &mut Vec<Move>) -> Option<Vec<u32>> {
    if is_base(&bs) {
        return Some(bs);
    }
    if dead.contains(&bs) {
        return None;
    }
    for mv in [Move::PrependTwo, Move::AppendTwo] {
        if let Some(prev) = mv.undo(&bs) {
            path.push(mv);
            if let Some(base) = reduce(prev, dead, path) {
                return Some(base);
            }
            path.pop();
        }
    }
    dead.insert(bs);
    None
}

/// Allocation-free structural test; same recursion as [`recognize`].
///
/// Entries below 2 need no separate scan: such an entry either becomes an
/// end, where no rule accepts it, or stays inside a would-be base.
#[inline]
pub fn is_class_t(bs: &[u32]) -> bool {
    if bs.is_empty() {
        return false;
    }
    // The two reverse moves need `first == 2` and `first >= 3` respectively,
    // so at most one applies and the walk never branches.
    let (mut lo, mut hi) = (0, bs.len() - 1);
    let (mut first, mut last) = (bs[lo], bs[hi]);
    loop {
        if lo == hi {
            return first == 4;
        }
        if first == 2 && last >= 3 {
            lo += 1;
            last -= 1;
            first = if lo == hi { last } else { bs[lo] };
        } else if last == 2 && first >= 3 {
            hi -= 1;
            first -= 1;
            last = if lo == hi { first } else { bs[hi] };
        } else {
            return first == 3 && last == 3 && bs[lo + 1..hi].iter().all(|&b| b == 2);
        }
    }
}

/// All class-T chains of length `<= max_len`, ordered by length then
/// lexicographically, annotated with `(d, n, a)` and `(p, q)` when `d = 1`.
pub fn generate_class_t(max_len: usize) -> Vec<TChain> {
    let mut seen: BTreeSet<(usize, Vec<u32>)> = BTreeSet::new();
    let mut frontier: Vec<Vec<u32>> = Vec::new();
    if max_len >= 1 {
        frontier.push(vec![4]);
    }
    for len in 2..=max_len {
        let mut base = vec![2; len];
        base[0] = 3;
        base[len - 1] = 3;
        frontier.push(base);
    }
    while let Some(bs) = frontier.pop() {
        if !seen.insert((bs.len(), bs.clone())) {
            continue;
        }
        if bs.len() < max_len {
            for mv in [Move::PrependTwo, Move::AppendTwo] {
                frontier.push(mv.apply(&bs));
            }
        }
    }
    seen.into_iter().map(|(_, bs)| TChain { bs, params: None, general_params: None }.annotated()).collect()
}

/// `|det|` of a chain's intersection matrix, which is the continuant.
pub fn chain_determinant_abs(bs: &[u32]) -> BigInt {
    continuant(bs).abs()
}
