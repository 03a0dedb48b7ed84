//! Intersection lattice of an iterated blow-up of the projective plane.
//!
//! Classes are coordinate vectors in the basis `h, e1, .., en` of
//! `H2(P2 # n(-P2))`, with intersection form `diag(+1, -1, .., -1)`.
//! A [`SurfaceModel`] tracks named curves through blow-ups: each incident
//! curve `C` passing through the center with multiplicity `m` becomes its
//! strict transform `C - m e_new`, and the canonical class gains `+e_new`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{int, render, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("duplicate curve name `{0}`")]
    DuplicateName(String),
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("initial curve `{name}` must be a multiple of h (got {len} coordinates)")]
    NotPlanar { name: String, len: usize },
    #[error("blow-up step {step}: zero multiplicity for `{curve}`")]
    ZeroMultiplicity { step: usize, curve: String },
    #[error("blow-up step {step}: curve `{curve}` listed twice")]
    RepeatedIncidence { step: usize, curve: String },
    #[error("alias `{alias}` clashes with an existing curve or alias")]
    AliasClash { alias: String },
    #[error(
        "expectation failed after step {after_step}: {what} expected {expected}, got {actual}{}",
        citation.as_deref().map(|c| format!(" [{c}]")).unwrap_or_default()
    )]
    ExpectationMismatch {
        after_step: usize,
        what: String,
        expected: i64,
        /// Rendered value; the error stays small.
        actual: String,
        citation: Option<String>,
    },
    #[error("expectation refers to step {after_step} but the script has {steps} steps")]
    CheckpointOutOfRange { after_step: usize, steps: usize },
    #[error("malformed expectation for `{0}`: give either self_int or other+intersection")]
    MalformedExpectation(String),
}

/// An element of `H2 ⊗ Q`, coefficients of `h, e1, .., en`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    coeffs: Vec<Rational>,
}

impl DivisorClass {
    pub fn zero(rank: usize) -> Self {
        DivisorClass { coeffs: vec![Rational::zero(); rank] }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        DivisorClass { coeffs: coeffs.iter().map(|&c| int(c)).collect() }
    }

    pub fn from_rationals(coeffs: Vec<Rational>) -> Self {
        DivisorClass { coeffs }
    }

    pub fn hyperplane(rank: usize) -> Self {
        let mut c = Self::zero(rank);
        c.coeffs[0] = Rational::one();
        c
    }

    /// The class `e_index` (1-based, `index < rank`).
    pub fn exceptional(rank: usize, index: usize) -> Self {
        assert!(index >= 1 && index < rank, "exceptional index out of range");
        let mut c = Self::zero(rank);
        c.coeffs[index] = Rational::one();
        c
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Integer coordinates, if the class is integral.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.is_integral().then(|| self.coeffs.iter().map(|c| c.to_integer()).collect())
    }

    pub fn extended(&self, rank: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(rank.max(self.rank()), Rational::zero());
        DivisorClass { coeffs }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        DivisorClass { coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, LatticeError> {
        same_rank(self, other)?;
        Ok(DivisorClass { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn dot(&self, other: &Self) -> Result<Rational, LatticeError> {
        intersect(self, other)
    }

    pub fn square(&self) -> Rational {
        intersect(self, self).expect("same class")
    }
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let basis = if i == 0 { "h".to_string() } else { format!("e{i}") };
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            match (wrote, neg) {
                (false, true) => write!(f, "-")?,
                (true, true) => write!(f, " - ")?,
                (true, false) => write!(f, " + ")?,
                (false, false) => {}
            }
            if mag.is_one() {
                write!(f, "{basis}")?;
            } else {
                write!(f, "{mag}{basis}")?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        self.try_add(rhs).expect("rank mismatch in class addition")
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        self.try_add(&-rhs).expect("rank mismatch in class subtraction")
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

fn same_rank(a: &DivisorClass, b: &DivisorClass) -> Result<(), LatticeError> {
    if a.rank() != b.rank() {
        return Err(LatticeError::RankMismatch { left: a.rank(), right: b.rank() });
    }
    Ok(())
}

/// The pairing `diag(+1, -1, .., -1)`.
pub fn intersect(a: &DivisorClass, b: &DivisorClass) -> Result<Rational, LatticeError> {
    same_rank(a, b)?;
    let mut acc = Rational::zero();
    for (i, (x, y)) in a.coeffs.iter().zip(&b.coeffs).enumerate() {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        if i == 0 {
            acc += x * y;
        } else {
            acc -= x * y;
        }
    }
    Ok(acc)
}

/// One blow-up: the center lies on each listed curve with the given multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BlowupStep {
    #[serde(rename = "at", default)]
    pub incidences: Vec<(String, u32)>,
    #[serde(rename = "name", default, skip_serializing_if = "Option::is_none")]
    pub new_name: Option<String>,
}

impl BlowupStep {
    pub fn new<S: Into<String>>(incidences: impl IntoIterator<Item = (S, u32)>) -> Self {
        BlowupStep { incidences: incidences.into_iter().map(|(s, m)| (s.into(), m)).collect(), new_name: None }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.new_name = Some(name.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveOrigin {
    /// Given on the plane before any blow-up.
    Plane,
    /// Exceptional curve of the blow-up with this 1-based index.
    Exceptional(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    pub class: DivisorClass,
    pub origin: CurveOrigin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceModel {
    curves: IndexMap<String, Curve>,
    aliases: BTreeMap<String, String>,
    canonical: DivisorClass,
    history: Vec<BlowupStep>,
}

impl SurfaceModel {
    /// The plane with the given curves, all multiples of `h`.
    pub fn new_plane<S: Into<String>>(
        initial_curves: impl IntoIterator<Item = (S, DivisorClass)>,
    ) -> Result<Self, LatticeError> {
        let mut curves = IndexMap::new();
        for (name, class) in initial_curves {
            let name = name.into();
            if class.rank() != 1 {
                return Err(LatticeError::NotPlanar { name, len: class.rank() });
            }
            if curves.contains_key(&name) {
                return Err(LatticeError::DuplicateName(name));
            }
            curves.insert(name, Curve { class, origin: CurveOrigin::Plane });
        }
        Ok(SurfaceModel {
            curves,
            aliases: BTreeMap::new(),
            canonical: DivisorClass::from_ints(&[-3]),
            history: Vec::new(),
        })
    }

    /// Registers `alias` as another name for `target`. The target may be
    /// created by a later blow-up; lookups resolve lazily.
    pub fn with_alias(mut self, alias: impl Into<String>, target: impl Into<String>) -> Result<Self, LatticeError> {
        let alias = alias.into();
        if self.curves.contains_key(&alias) || self.aliases.contains_key(&alias) {
            return Err(LatticeError::AliasClash { alias });
        }
        self.aliases.insert(alias, target.into());
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.canonical.rank()
    }

    pub fn blowups(&self) -> usize {
        self.rank() - 1
    }

    pub fn canonical(&self) -> &DivisorClass {
        &self.canonical
    }

    pub fn history(&self) -> &[BlowupStep] {
        &self.history
    }

    pub fn aliases(&self) -> &BTreeMap<String, String> {
        &self.aliases
    }

    pub fn curve_names(&self) -> impl Iterator<Item = &str> {
        self.curves.keys().map(String::as_str)
    }

    pub fn curves(&self) -> impl Iterator<Item = (&str, &Curve)> {
        self.curves.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Canonical name behind a curve name or alias.
    pub fn resolve<'a>(&'a self, name: &'a str) -> Result<&'a str, LatticeError> {
        if let Some((k, _)) = self.curves.get_key_value(name) {
            return Ok(k);
        }
        match self.aliases.get(name) {
            Some(target) if self.curves.contains_key(target) => Ok(target),
            _ => Err(LatticeError::UnknownCurve(name.to_string())),
        }
    }

    pub fn curve(&self, name: &str) -> Result<&Curve, LatticeError> {
        let key = self.resolve(name)?;
        Ok(&self.curves[key])
    }

    pub fn class(&self, name: &str) -> Result<&DivisorClass, LatticeError> {
        Ok(&self.curve(name)?.class)
    }

    pub fn intersect(&self, a: &DivisorClass, b: &DivisorClass) -> Result<Rational, LatticeError> {
        for c in [a, b] {
            if c.rank() != self.rank() {
                return Err(LatticeError::RankMismatch { left: c.rank(), right: self.rank() });
            }
        }
        intersect(a, b)
    }

    pub fn intersect_curves(&self, a: &str, b: &str) -> Result<Rational, LatticeError> {
        intersect(self.class(a)?, self.class(b)?)
    }

    pub fn self_intersection(&self, name: &str) -> Result<Rational, LatticeError> {
        self.intersect_curves(name, name)
    }

    /// `-3h + Σ e_i` for the current rank.
    pub fn standard_canonical(&self) -> DivisorClass {
        let mut coeffs = vec![int(1); self.rank()];
        coeffs[0] = int(-3);
        DivisorClass::from_rationals(coeffs)
    }

    /// Applies a blow-up; the input model is left untouched.
    pub fn blow_up(&self, step: &BlowupStep) -> Result<SurfaceModel, LatticeError> {
        let index = self.rank();
        let step_no = self.history.len() + 1;
        let mut resolved: Vec<(String, u32)> = Vec::with_capacity(step.incidences.len());
        for (name, mult) in &step.incidences {
            if *mult == 0 {
                return Err(LatticeError::ZeroMultiplicity { step: step_no, curve: name.clone() });
            }
            let key = self.resolve(name)?.to_string();
            if resolved.iter().any(|(k, _)| *k == key) {
                return Err(LatticeError::RepeatedIncidence { step: step_no, curve: name.clone() });
            }
            resolved.push((key, *mult));
        }
        let new_name = step.new_name.clone().unwrap_or_else(|| format!("e{index}"));
        if self.curves.contains_key(&new_name) || self.aliases.contains_key(&new_name) {
            return Err(LatticeError::DuplicateName(new_name));
        }

        let rank = index + 1;
        let e_new = DivisorClass::exceptional(rank, index);
        let mut curves: IndexMap<String, Curve> = self
            .curves
            .iter()
            .map(|(k, c)| (k.clone(), Curve { class: c.class.extended(rank), origin: c.origin }))
            .collect();
        for (key, mult) in &resolved {
            let curve = curves.get_mut(key).expect("resolved above");
            curve.class = &curve.class - &e_new.scale(&int(i64::from(*mult)));
        }
        curves.insert(new_name, Curve { class: e_new.clone(), origin: CurveOrigin::Exceptional(index) });

        let mut history = self.history.clone();
        history.push(BlowupStep { incidences: resolved, new_name: step.new_name.clone() });
        Ok(SurfaceModel {
            curves,
            aliases: self.aliases.clone(),
            canonical: &self.canonical.extended(rank) + &e_new,
            history,
        })
    }
}

/// A self-intersection or pairwise intersection to check at a checkpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expectation {
    pub after_step: usize,
    pub curve: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_int: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersection: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
}

impl Expectation {
    pub fn self_int(after_step: usize, curve: impl Into<String>, value: i64) -> Self {
        Expectation {
            after_step,
            curve: curve.into(),
            self_int: Some(value),
            other: None,
            intersection: None,
            citation: None,
        }
    }

    fn check(&self, model: &SurfaceModel) -> Result<(), LatticeError> {
        let (what, expected, actual) = match (&self.self_int, &self.other, &self.intersection) {
            (Some(v), None, None) => (format!("[{}]^2", self.curve), *v, model.self_intersection(&self.curve)?),
            (None, Some(other), Some(v)) => {
                (format!("{}.{}", self.curve, other), *v, model.intersect_curves(&self.curve, other)?)
            }
            _ => return Err(LatticeError::MalformedExpectation(self.curve.clone())),
        };
        if actual != int(expected) {
            return Err(LatticeError::ExpectationMismatch {
                after_step: self.after_step,
                what,
                expected,
                actual: render(&actual),
                citation: self.citation.clone(),
            });
        }
        Ok(())
    }
}

/// Runs `script` from `base`, checking each expectation right after its
/// declared step (`after_step = 0` checks the base).
pub fn run_script(
    script: &[BlowupStep],
    base: &SurfaceModel,
    expectations: &[Expectation],
) -> Result<SurfaceModel, LatticeError> {
    run_script_with_snapshots(script, base, expectations).map(|mut v| v.pop().expect("base snapshot"))
}

/// Like [`run_script`] but returns the model after every step (index 0 is the base).
pub fn run_script_with_snapshots(
    script: &[BlowupStep],
    base: &SurfaceModel,
    expectations: &[Expectation],
) -> Result<Vec<SurfaceModel>, LatticeError> {
    if let Some(e) = expectations.iter().find(|e| e.after_step > script.len()) {
        return Err(LatticeError::CheckpointOutOfRange { after_step: e.after_step, steps: script.len() });
    }
    let check_at = |k: usize, model: &SurfaceModel| -> Result<(), LatticeError> {
        expectations.iter().filter(|e| e.after_step == k).try_for_each(|e| e.check(model))
    };
    let mut snapshots = vec![base.clone()];
    check_at(0, base)?;
    for (k, step) in script.iter().enumerate() {
        let next = snapshots.last().expect("non-empty").blow_up(step)?;
        check_at(k + 1, &next)?;
        snapshots.push(next);
    }
    Ok(snapshots)
}

/// A declarative blow-up script as stored on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupScript {
    #[serde(with = "ordered_pairs")]
    pub base_curves: Vec<(String, Vec<i64>)>,
    #[serde(default)]
    pub aliases: BTreeMap<String, String>,
    #[serde(default)]
    pub steps: Vec<BlowupStep>,
    #[serde(default)]
    pub expectations: Vec<Expectation>,
}

impl BlowupScript {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn base_model(&self) -> Result<SurfaceModel, LatticeError> {
        let mut model =
            SurfaceModel::new_plane(self.base_curves.iter().map(|(n, c)| (n.clone(), DivisorClass::from_ints(c))))?;
        for (alias, target) in &self.aliases {
            model = model.with_alias(alias.clone(), target.clone())?;
        }
        Ok(model)
    }

    pub fn run(&self) -> Result<SurfaceModel, LatticeError> {
        run_script(&self.steps, &self.base_model()?, &self.expectations)
    }

    pub fn snapshots(&self) -> Result<Vec<SurfaceModel>, LatticeError> {
        run_script_with_snapshots(&self.steps, &self.base_model()?, &self.expectations)
    }
}

/// JSON objects read as ordered `(key, value)` pairs so duplicate keys survive
/// parsing and can be rejected by [`SurfaceModel::new_plane`].
mod ordered_pairs {
    use std::fmt;

    use serde::de::{MapAccess, Visitor};
    use serde::ser::SerializeMap;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(pairs: &[(String, Vec<i64>)], s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(pairs.len()))?;
        for (k, v) in pairs {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(String, Vec<i64>)>, D::Error> {
        struct PairsVisitor;

        impl<'de> Visitor<'de> for PairsVisitor {
            type Value = Vec<(String, Vec<i64>)>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object mapping curve names to integer arrays")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, Vec<i64>>()? {
                    out.push((k, v));
                }
                Ok(out)
            }
        }

        d.deserialize_map(PairsVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(curves: &[(&str, i64)]) -> SurfaceModel {
        SurfaceModel::new_plane(curves.iter().map(|&(n, d)| (n, DivisorClass::from_ints(&[d])))).unwrap()
    }

    #[test]
    fn plane_pairings() {
        let m = plane(&[("A", 1), ("B", 2), ("L1", 1), ("L2", 1), ("L3", 1)]);
        assert_eq!(m.intersect_curves("A", "B").unwrap(), int(2));
        assert_eq!(m.canonical().square(), int(9));
        assert_eq!(m.intersect(m.class("A").unwrap(), m.canonical()).unwrap(), int(-3));
        assert_eq!(plane(&[]).canonical().square(), int(9));
    }

    #[test]
    fn new_plane_rejects_duplicates_and_non_planar() {
        let dup = SurfaceModel::new_plane([("A", DivisorClass::from_ints(&[1])), ("A", DivisorClass::from_ints(&[2]))]);
        assert_eq!(dup.unwrap_err(), LatticeError::DuplicateName("A".into()));
        let bad = SurfaceModel::new_plane([("A", DivisorClass::from_ints(&[1, 0]))]);
        assert!(matches!(bad, Err(LatticeError::NotPlanar { .. })));
    }

    #[test]
    fn basis_pairings() {
        let h = DivisorClass::hyperplane(4);
        assert_eq!(intersect(&h, &h).unwrap(), int(1));
        let e1 = DivisorClass::exceptional(4, 1);
        let e2 = DivisorClass::exceptional(4, 2);
        assert_eq!(intersect(&e1, &e2).unwrap(), int(0));
        assert_eq!(intersect(&e1, &e1).unwrap(), int(-1));
        let mut fiber = vec![-1; 10];
        fiber[0] = 3;
        assert_eq!(DivisorClass::from_ints(&fiber).square(), int(0));
        assert!(matches!(intersect(&h, &e1.extended(5)), Err(LatticeError::RankMismatch { .. })));
    }

    #[test]
    fn conic_loses_one_per_blowup_along_it() {
        let mut m = plane(&[("B", 2)]);
        m = m.blow_up(&BlowupStep::new([("B", 1)]).named("e1")).unwrap();
        m = m.blow_up(&BlowupStep::new([("B", 1), ("e1", 1)]).named("e2")).unwrap();
        m = m.blow_up(&BlowupStep::new([("B", 1), ("e2", 1)]).named("e3")).unwrap();
        assert_eq!(m.self_intersection("B").unwrap(), int(1));
        assert_eq!(m.self_intersection("e1").unwrap(), int(-2));
        assert_eq!(m.self_intersection("e3").unwrap(), int(-1));
    }

    #[test]
    fn empty_blowup_is_disjoint() {
        let m = plane(&[("A", 1), ("B", 2)]);
        let n = m.blow_up(&BlowupStep::default()).unwrap();
        assert_eq!(n.rank(), 2);
        assert_eq!(n.self_intersection("A").unwrap(), int(1));
        assert_eq!(n.self_intersection("B").unwrap(), int(4));
        assert_eq!(n.self_intersection("e1").unwrap(), int(-1));
        assert_eq!(m.rank(), 1, "input model untouched");
    }

    #[test]
    fn node_blowup_on_nodal_cubic() {
        // A nodal fiber of E(1): a cubic through the nine base points, then its node.
        let mut m = plane(&[("F", 3)]);
        for _ in 0..9 {
            m = m.blow_up(&BlowupStep::new([("F", 1)])).unwrap();
        }
        assert_eq!(m.self_intersection("F").unwrap(), int(0));
        m = m.blow_up(&BlowupStep::new([("F", 2)]).named("E")).unwrap();
        assert_eq!(m.self_intersection("F").unwrap(), int(-4));
        assert_eq!(m.intersect_curves("E", "F").unwrap(), int(2));
    }

    #[test]
    fn step_errors() {
        let m = plane(&[("A", 1)]);
        assert_eq!(m.blow_up(&BlowupStep::new([("Q", 1)])).unwrap_err(), LatticeError::UnknownCurve("Q".into()));
        assert!(matches!(m.blow_up(&BlowupStep::new([("A", 0)])), Err(LatticeError::ZeroMultiplicity { .. })));
        assert!(matches!(
            m.blow_up(&BlowupStep::new([("A", 1), ("A", 1)])),
            Err(LatticeError::RepeatedIncidence { .. })
        ));
        assert!(matches!(m.blow_up(&BlowupStep::default().named("A")), Err(LatticeError::DuplicateName(_))));
    }

    #[test]
    fn aliases_resolve_lazily() {
        let m = plane(&[("A", 1)]).with_alias("S", "e1").unwrap();
        assert!(m.class("S").is_err());
        let m = m.blow_up(&BlowupStep::new([("A", 1)])).unwrap();
        assert_eq!(m.self_intersection("S").unwrap(), int(-1));
        let m = m.blow_up(&BlowupStep::new([("S", 1)])).unwrap();
        assert_eq!(m.self_intersection("e1").unwrap(), int(-2));
        assert!(matches!(m.with_alias("A", "e1"), Err(LatticeError::AliasClash { .. })));
    }

    #[test]
    fn script_expectations() {
        let base = plane(&[("B", 2)]);
        let steps = vec![BlowupStep::new([("B", 1)]), BlowupStep::new([("B", 1)])];
        let ok = run_script(&steps, &base, &[Expectation::self_int(2, "B", 2)]).unwrap();
        assert_eq!(ok.blowups(), 2);
        let err = run_script(&steps, &base, &[Expectation::self_int(1, "B", 2)]).unwrap_err();
        match err {
            LatticeError::ExpectationMismatch { after_step, expected, actual, .. } => {
                assert_eq!((after_step, expected, actual.as_str()), (1, 2, "3"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(run_script(&[], &base, &[]).unwrap(), base);
    }

    #[test]
    fn script_json_keeps_duplicate_keys_for_rejection() {
        let text = r#"{"base_curves": {"A": [1], "A": [1]}, "steps": []}"#;
        let script = BlowupScript::from_json(text).unwrap();
        assert_eq!(script.base_model().unwrap_err(), LatticeError::DuplicateName("A".into()));
    }

    #[test]
    fn display_is_readable() {
        let c = DivisorClass::from_ints(&[3, -1, 0, -2]);
        assert_eq!(c.to_string(), "3h - e1 - 2e3");
        assert_eq!(DivisorClass::zero(3).to_string(), "0");
    }
}
