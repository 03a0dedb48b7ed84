//! Contracting disjoint class-T chains inside a blown-up plane.
//!
//! For chains `G_1..G_k` the pullback of the canonical class of the
//! contraction is `K_Z + Σ d_i G_i`, where the `d_i` are fixed by
//! orthogonality to every `G_j`. All arithmetic is exact.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::lattice::{CurveOrigin, DivisorClass, LatticeError, SurfaceModel};
use crate::linalg::{self, LinalgError};
use crate::rational::{int, render, Rational};
use crate::tchains::{continuant, ChainError, TChain};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ContractionError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("chain {chain}: {curves} curves listed for {entries} entries")]
    LengthMismatch { chain: String, curves: usize, entries: usize },
    #[error("chain {chain}: [{curve}]^2 = {actual}, expected {expected}")]
    SelfIntersection { chain: String, curve: String, expected: i64, actual: String },
    #[error("chain {chain}: {a}.{b} = {actual}, expected {expected}")]
    Adjacency { chain: String, a: String, b: String, expected: i64, actual: String },
    #[error("chain {chain}: {curve} is not a smooth rational curve (K.C + C^2 = {value})")]
    NotRational { chain: String, curve: String, value: String },
    #[error("chains {a} and {b} meet: {ca}.{cb} = {value}")]
    NotDisjoint { a: String, b: String, ca: String, cb: String, value: String },
    #[error("chain {chain} is not negative definite (leading minors {minors:?})")]
    NotNegativeDefinite { chain: String, minors: Vec<String> },
    #[error("chain {chain}: |det| = {actual}, expected {expected}")]
    Determinant { chain: String, expected: String, actual: String },
    #[error("{what} = {value} is not an integer")]
    NonIntegral { what: String, value: String },
}

/// A chain of named curves in a model, listed in chain order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainEmbedding {
    pub name: String,
    pub curves: Vec<String>,
    pub chain: TChain,
}

impl ChainEmbedding {
    pub fn new(name: impl Into<String>, curves: Vec<String>, chain: TChain) -> Self {
        ChainEmbedding { name: name.into(), curves, chain }
    }
}

/// Signs and size of the chain's intersection matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArtinCertificate {
    pub leading_minors: Vec<String>,
    pub determinant: String,
}

/// Negative definiteness via alternating leading minors, plus `|det|`
/// against the continuant (and `p^2` when `(p, q)` is attached).
pub fn check_artin(name: &str, chain: &TChain) -> Result<ArtinCertificate, ContractionError> {
    let m = chain.intersection_matrix();
    let minors = linalg::leading_minors(&m)?;
    let alternating = minors.len() == chain.len()
        && minors.iter().enumerate().all(|(i, d)| if i % 2 == 0 { d.is_negative() } else { d.is_positive() });
    if !alternating {
        return Err(ContractionError::NotNegativeDefinite {
            chain: name.to_string(),
            minors: minors.iter().map(BigInt::to_string).collect(),
        });
    }
    let det = linalg::determinant(&m)?;
    let mut expected = continuant(chain.entries());
    if let Some(wp) = chain.params() {
        let p2 = BigInt::from(wp.lens_order());
        if p2 != expected {
            return Err(ContractionError::Determinant {
                chain: name.to_string(),
                expected: p2.to_string(),
                actual: expected.to_string(),
            });
        }
        expected = p2;
    }
    if det.abs() != expected {
        return Err(ContractionError::Determinant {
            chain: name.to_string(),
            expected: expected.to_string(),
            actual: det.abs().to_string(),
        });
    }
    Ok(ArtinCertificate {
        leading_minors: minors.iter().map(BigInt::to_string).collect(),
        determinant: det.to_string(),
    })
}

/// The `d_i` for an abstract chain: `Σ_i d_i (G_i.G_j) = 2 - b_j`.
///
/// The matrix is tridiagonal, so Cramer's rule gives
/// `d_i = 1 - ([b_1..b_{i-1}] + [b_{i+1}..b_k]) / [b_1..b_k]` in continuants.
pub fn discrepancies(chain: &TChain) -> Result<Vec<Rational>, ContractionError> {
    let bs = chain.entries();
    if bs.is_empty() {
        return Err(ChainError::Empty.into());
    }
    let step = |(prev, cur): (&BigInt, &BigInt), b: u32| BigInt::from(b) * cur - prev;
    let mut left = vec![BigInt::zero(), BigInt::one()];
    for &b in bs {
        let next = step((&left[left.len() - 2], &left[left.len() - 1]), b);
        left.push(next);
    }
    let mut right = vec![BigInt::zero(), BigInt::one()];
    for &b in bs.iter().rev() {
        let next = step((&right[right.len() - 2], &right[right.len() - 1]), b);
        right.push(next);
    }
    let k = bs.len();
    let total = &left[k + 1];
    Ok((0..k).map(|i| Rational::one() - Rational::new(&left[i + 1] + &right[k - i], total.clone())).collect())
}

/// Checks squares, adjacency, non-adjacency and adjunction inside the model.
pub fn validate_embedding(model: &SurfaceModel, emb: &ChainEmbedding) -> Result<(), ContractionError> {
    let bs = emb.chain.entries();
    if bs.len() != emb.curves.len() {
        return Err(ContractionError::LengthMismatch {
            chain: emb.name.clone(),
            curves: emb.curves.len(),
            entries: bs.len(),
        });
    }
    let k = model.canonical();
    for (i, name) in emb.curves.iter().enumerate() {
        let class = model.class(name)?;
        let sq = class.square();
        let expected = -i64::from(bs[i]);
        if sq != int(expected) {
            return Err(ContractionError::SelfIntersection {
                chain: emb.name.clone(),
                curve: name.clone(),
                expected,
                actual: render(&sq),
            });
        }
        let adj = model.intersect(k, class)? + &sq;
        if adj != int(-2) {
            return Err(ContractionError::NotRational {
                chain: emb.name.clone(),
                curve: name.clone(),
                value: render(&adj),
            });
        }
        for (j, other) in emb.curves.iter().enumerate().skip(i + 1) {
            let v = model.intersect_curves(name, other)?;
            let expected = i64::from(j == i + 1);
            if v != int(expected) {
                return Err(ContractionError::Adjacency {
                    chain: emb.name.clone(),
                    a: name.clone(),
                    b: other.clone(),
                    expected,
                    actual: render(&v),
                });
            }
        }
    }
    Ok(())
}

pub fn validate_disjoint(model: &SurfaceModel, embs: &[ChainEmbedding]) -> Result<(), ContractionError> {
    for (i, a) in embs.iter().enumerate() {
        for b in &embs[i + 1..] {
            for ca in &a.curves {
                for cb in &b.curves {
                    let v = model.intersect_curves(ca, cb)?;
                    if !v.is_zero() {
                        return Err(ContractionError::NotDisjoint {
                            a: a.name.clone(),
                            b: b.name.clone(),
                            ca: ca.clone(),
                            cb: cb.clone(),
                            value: render(&v),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// The `d_i` computed from the lattice itself: `Σ_i d_i (G_i.G_j) = -K_Z.G_j`.
pub fn discrepancies_in(model: &SurfaceModel, emb: &ChainEmbedding) -> Result<Vec<Rational>, ContractionError> {
    let classes: Vec<&DivisorClass> = emb.curves.iter().map(|c| model.class(c)).collect::<Result<_, _>>()?;
    let mut m = Vec::with_capacity(classes.len());
    let mut rhs = Vec::with_capacity(classes.len());
    for a in &classes {
        let row: Vec<BigInt> = classes.iter().map(|b| to_int(model.intersect(a, b)?)).collect::<Result<_, _>>()?;
        m.push(row);
        rhs.push(-to_int(model.intersect(model.canonical(), a)?)?);
    }
    Ok(linalg::solve(&m, &rhs)?)
}

fn to_int(r: Rational) -> Result<BigInt, LatticeError> {
    // Curve classes are integral, so their pairings are too.
    debug_assert!(r.is_integer());
    Ok(r.to_integer())
}

/// `K_Z + Σ d_i G_i` over all chains, with the discrepancies per chain.
pub fn pullback_canonical(
    model: &SurfaceModel,
    embs: &[ChainEmbedding],
) -> Result<(DivisorClass, Vec<Vec<Rational>>), ContractionError> {
    let mut pullback = model.canonical().clone();
    let mut all = Vec::with_capacity(embs.len());
    for emb in embs {
        let ds = discrepancies_in(model, emb)?;
        for (d, name) in ds.iter().zip(&emb.curves) {
            pullback = &pullback + &model.class(name)?.scale(d);
        }
        all.push(ds);
    }
    Ok((pullback, all))
}

pub fn integer_value(what: &str, r: &Rational) -> Result<BigInt, ContractionError> {
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(ContractionError::NonIntegral { what: what.to_string(), value: render(r) })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NefEntry {
    pub curve: String,
    pub value: String,
    pub positive: bool,
}

/// `f*K_X . C` for each listed curve.
pub fn nef_report(
    model: &SurfaceModel,
    pullback: &DivisorClass,
    curves: &[String],
) -> Result<Vec<NefEntry>, ContractionError> {
    curves
        .iter()
        .map(|c| {
            let v = model.intersect(pullback, model.class(c)?)?;
            Ok(NefEntry { curve: c.clone(), positive: v.is_positive(), value: render(&v) })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub name: String,
    pub entries: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    pub curves: Vec<String>,
    pub artin: ArtinCertificate,
    pub discrepancies: Vec<String>,
    /// `Σ d_i (b_i - 2)`: `k` for a length-`k` Wahl chain, `k - d + 1` for class T with parameter `d`.
    pub length_sum: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractionResult {
    pub chains: Vec<ChainReport>,
    pub pullback: Vec<String>,
    pub k_squared_z: String,
    pub k_squared: String,
    /// `f*K_X . G = 0` for every chain curve.
    pub orthogonal: bool,
    pub nef: Vec<NefEntry>,
}

impl ContractionResult {
    pub fn k_squared_int(&self) -> BigInt {
        self.k_squared.parse().expect("integral by construction")
    }
}

/// Validates the chains, solves for discrepancies and computes `K^2` and the
/// requested nef pairings.
pub fn contract(
    model: &SurfaceModel,
    embs: &[ChainEmbedding],
    nef_curves: &[String],
) -> Result<ContractionResult, ContractionError> {
    for emb in embs {
        validate_embedding(model, emb)?;
    }
    validate_disjoint(model, embs)?;
    let mut chains = Vec::with_capacity(embs.len());
    let (pullback, all_ds) = pullback_canonical(model, embs)?;
    for (emb, ds) in embs.iter().zip(&all_ds) {
        let artin = check_artin(&emb.name, &emb.chain)?;
        let length_sum: Rational = ds.iter().zip(emb.chain.entries()).map(|(d, &b)| d * int(i64::from(b) - 2)).sum();
        chains.push(ChainReport {
            name: emb.name.clone(),
            entries: emb.chain.entries().to_vec(),
            p: emb.chain.params().map(|w| w.p),
            q: emb.chain.params().map(|w| w.q),
            curves: emb.curves.clone(),
            artin,
            discrepancies: ds.iter().map(render).collect(),
            length_sum: render(&length_sum),
        });
    }
    let mut orthogonal = true;
    for emb in embs {
        for c in &emb.curves {
            orthogonal &= model.intersect(&pullback, model.class(c)?)?.is_zero();
        }
    }
    let k2 = pullback.square();
    integer_value("K^2", &k2)?;
    Ok(ContractionResult {
        chains,
        pullback: pullback.coeffs().iter().map(render).collect(),
        k_squared_z: render(&model.canonical().square()),
        k_squared: render(&k2),
        orthogonal,
        nef: nef_report(model, &pullback, nef_curves)?,
    })
}

/// `f*K_X` written as a combination of curves of the final model.
///
/// `base_terms` express the canonical class after `base_stage` blow-ups as a
/// combination of curves present at that stage. Each later blow-up adds its
/// exceptional curve with coefficient `1 + Σ m a`, and total transforms of the
/// base curves pick up their multiplicities at later centres.
pub fn canonical_expansion(
    model: &SurfaceModel,
    base_stage: usize,
    base_terms: &[(String, Rational)],
    embs: &[ChainEmbedding],
) -> Result<IndexMap<String, Rational>, ContractionError> {
    let history = model.history();
    let exceptional: BTreeMap<usize, String> = model
        .curves()
        .filter_map(|(n, c)| match c.origin {
            CurveOrigin::Exceptional(j) => Some((j, n.to_string())),
            CurveOrigin::Plane => None,
        })
        .collect();
    let later = |j: usize| -> &str { &exceptional[&j] };

    let mut terms: IndexMap<String, Rational> = IndexMap::new();
    let add = |terms: &mut IndexMap<String, Rational>, name: &str, v: Rational| {
        *terms.entry(name.to_string()).or_insert_with(Rational::zero) += v;
    };

    // Coefficient of each later E_j in the total transform of one base curve.
    let total_for = |base: &str| -> BTreeMap<usize, Rational> {
        let mut t: BTreeMap<usize, Rational> = BTreeMap::new();
        for j in base_stage + 1..=history.len() {
            let mut v = Rational::zero();
            for (name, m) in &history[j - 1].incidences {
                let m = int(i64::from(*m));
                if name == base {
                    v += &m;
                } else if let Some(i) = (base_stage + 1..j).find(|&i| later(i) == name) {
                    v += m * &t[&i];
                }
            }
            t.insert(j, v);
        }
        t
    };

    for (name, c) in base_terms {
        let key = model.resolve(name)?.to_string();
        add(&mut terms, &key, c.clone());
        for (j, t) in total_for(&key) {
            add(&mut terms, later(j), c * t);
        }
    }
    let mut a: BTreeMap<usize, Rational> = BTreeMap::new();
    for j in base_stage + 1..=history.len() {
        let mut v = Rational::one();
        for (name, m) in &history[j - 1].incidences {
            if let Some(i) = (base_stage + 1..j).find(|&i| later(i) == name) {
                v += int(i64::from(*m)) * &a[&i];
            }
        }
        add(&mut terms, later(j), v.clone());
        a.insert(j, v);
    }
    let (_, all_ds) = pullback_canonical(model, embs)?;
    for (emb, ds) in embs.iter().zip(all_ds) {
        for (c, d) in emb.curves.iter().zip(ds) {
            let key = model.resolve(c)?.to_string();
            add(&mut terms, &key, d);
        }
    }
    terms.retain(|_, v| !v.is_zero());
    Ok(terms)
}

/// The class `Σ c_C [C]` of an expansion.
pub fn expansion_class(
    model: &SurfaceModel,
    terms: &IndexMap<String, Rational>,
) -> Result<DivisorClass, ContractionError> {
    let mut acc = DivisorClass::zero(model.rank());
    for (name, c) in terms {
        acc = &acc + &model.class(name)?.scale(c);
    }
    Ok(acc)
}
