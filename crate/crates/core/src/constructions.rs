//! Built-in construction datasets and the end-to-end verification pipeline.
//!
//! A dataset is a blow-up script plus chain embeddings, a connection graph
//! and a block of expected values, each carrying a citation.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::contraction::{self, ChainEmbedding, ContractionError, ContractionResult};
use crate::lattice::{BlowupScript, LatticeError, SurfaceModel};
use crate::rational::{render, Exact, Rational};
use crate::tchains::{hj_expand, TChain};
use crate::topology::{
    self, BlowdownSpec, Configuration, ConnectionGraph, InvariantReport, Parity, Pi1Result, SurfaceSummary,
    TopologyError,
};

pub const DATA_DIR_ENV: &str = "BLOWDOWN_DATA_DIR";

const BUILTINS: &[(&str, &str)] = &[
    ("main_k3", include_str!("../data/main_k3.json")),
    ("pencil2_k3", include_str!("../data/pencil2_k3.json")),
    ("k4", include_str!("../data/k4.json")),
];

#[derive(Debug, thiserror::Error)]
pub enum ConstructionError {
    #[error("unknown construction `{0}` (known: {1})")]
    Unknown(String, String),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("cannot parse dataset {origin}: {message}")]
    Parse { origin: String, message: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cited<T> {
    pub value: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub reconstructed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Erratum {
    pub corrected: Exact,
    pub note: String,
}

/// One printed coefficient or pairing attached to a named curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitedCoefficient {
    pub curve: String,
    pub value: Exact,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub erratum: Option<Erratum>,
}

impl CitedCoefficient {
    /// The value the computation should reproduce.
    pub fn target(&self) -> &Rational {
        match &self.erratum {
            Some(e) => e.corrected.value(),
            None => self.value.value(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub name: String,
    pub curves: Vec<String>,
    pub entries: Vec<u32>,
    pub p: u64,
    pub q: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
}

/// The canonical class after `base_stage` blow-ups as a combination of curves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionBase {
    pub base_stage: usize,
    pub base_terms: IndexMap<String, Exact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowups: Option<Cited<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_squared: Option<Cited<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b2_plus: Option<Cited<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b2_minus: Option<Cited<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<Cited<i64>>,
    /// `χ(2K) = χ + K^2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationality: Option<Cited<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi1_trivial: Option<Cited<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<Cited<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub discrepancies: Vec<CitedCoefficient>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pullback: Vec<CitedCoefficient>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nef: Vec<CitedCoefficient>,
    /// Every curve in `nef_curves` pairs positively with `f*K_X`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nef_positive: Option<Cited<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construction {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comments: Vec<String>,
    #[serde(flatten)]
    pub script: BlowupScript,
    pub chains: Vec<ChainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical_expansion: Option<ExpansionBase>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<ConnectionGraph>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nef_curves: Vec<String>,
    /// Used when the lattice alone cannot decide the parity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity_override: Option<Cited<Parity>>,
    #[serde(default)]
    pub expected: Expected,
}

impl Construction {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, ConstructionError> {
        serde_json::from_str(text)
            .map_err(|e| ConstructionError::Parse { origin: origin.to_string(), message: e.to_string() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset serializes")
    }

    pub fn nef_targets(&self) -> Vec<String> {
        let mut out: Vec<String> = self.expected.nef.iter().map(|n| n.curve.clone()).collect();
        for c in &self.nef_curves {
            if !out.contains(c) {
                out.push(c.clone());
            }
        }
        out
    }

    /// Builds the chains without checking them against the model.
    pub fn embeddings(&self) -> Result<Vec<ChainEmbedding>, ConstructionError> {
        self.chains
            .iter()
            .map(|c| {
                let chain = TChain::new(c.entries.clone())
                    .and_then(|t| t.with_params(c.p, c.q))
                    .map_err(ContractionError::from)?;
                Ok(ChainEmbedding::new(c.name.clone(), c.curves.clone(), chain))
            })
            .collect()
    }

    /// Which expected values lack a citation.
    pub fn uncited(&self) -> Vec<String> {
        let mut out = Vec::new();
        let e = &self.expected;
        let scalars: [(&str, bool); 8] = [
            ("blowups", e.blowups.as_ref().is_some_and(|c| c.citation.is_none())),
            ("k_squared", e.k_squared.as_ref().is_some_and(|c| c.citation.is_none())),
            ("b2_plus", e.b2_plus.as_ref().is_some_and(|c| c.citation.is_none())),
            ("b2_minus", e.b2_minus.as_ref().is_some_and(|c| c.citation.is_none())),
            ("chi", e.chi.as_ref().is_some_and(|c| c.citation.is_none())),
            ("rationality", e.rationality.as_ref().is_some_and(|c| c.citation.is_none())),
            ("pi1_trivial", e.pi1_trivial.as_ref().is_some_and(|c| c.citation.is_none())),
            ("fingerprint", e.fingerprint.as_ref().is_some_and(|c| c.citation.is_none())),
        ];
        out.extend(scalars.iter().filter(|(_, missing)| *missing).map(|(n, _)| n.to_string()));
        if e.nef_positive.as_ref().is_some_and(|c| c.citation.is_none()) {
            out.push("nef_positive".into());
        }
        for (group, list) in [("discrepancies", &e.discrepancies), ("pullback", &e.pullback), ("nef", &e.nef)] {
            for c in list.iter().filter(|c| c.citation.is_none()) {
                out.push(format!("{group}.{}", c.curve));
            }
        }
        for c in self.chains.iter().filter(|c| c.citation.is_none()) {
            out.push(format!("chain {}", c.name));
        }
        for x in self.script.expectations.iter().filter(|x| x.citation.is_none()) {
            out.push(format!("expectation {} after step {}", x.curve, x.after_step));
        }
        if self.canonical_expansion.as_ref().is_some_and(|b| b.citation.is_none()) {
            out.push("canonical_expansion".into());
        }
        if self.parity_override.as_ref().is_some_and(|c| c.citation.is_none()) {
            out.push("parity_override".into());
        }
        out
    }
}

fn data_dir() -> Option<PathBuf> {
    std::env::var_os(DATA_DIR_ENV).map(PathBuf::from)
}

/// Names of the available datasets, in a stable order.
pub fn list_builtins() -> Vec<String> {
    match data_dir() {
        Some(dir) => {
            let mut names: Vec<String> = fs::read_dir(&dir)
                .into_iter()
                .flatten()
                .flatten()
                .filter_map(|e| {
                    let path = e.path();
                    (path.extension()? == "json").then(|| path.file_stem()?.to_str().map(str::to_string))?
                })
                .collect();
            names.sort();
            names
        }
        None => BUILTINS.iter().map(|(n, _)| n.to_string()).collect(),
    }
}

pub fn load_builtin(name: &str) -> Result<Construction, ConstructionError> {
    if let Some(dir) = data_dir() {
        let path = dir.join(format!("{name}.json"));
        if !path.is_file() {
            return Err(ConstructionError::Unknown(name.to_string(), list_builtins().join(", ")));
        }
        return load_path(&path);
    }
    let text = BUILTINS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| ConstructionError::Unknown(name.to_string(), list_builtins().join(", ")))?;
    Construction::from_json(text, name)
}

pub fn load_path(path: &Path) -> Result<Construction, ConstructionError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ConstructionError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    Construction::from_json(&text, &path.display().to_string())
}

/// Everything the pipeline computes for a construction.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub model: SurfaceModel,
    pub embeddings: Vec<ChainEmbedding>,
    pub contraction: ContractionResult,
    pub expansion: Option<IndexMap<String, Rational>>,
    pub spec: BlowdownSpec,
    pub parity_computed: Parity,
    pub invariants: InvariantReport,
    pub pi1: Option<Pi1Result>,
}

impl Analysis {
    /// Preferred display names for lattice curves: chain aliases first.
    pub fn display_names(&self, c: &Construction) -> BTreeMap<String, String> {
        let mut names = BTreeMap::new();
        let preferred = c
            .expected
            .pullback
            .iter()
            .map(|x| x.curve.as_str())
            .chain(c.chains.iter().flat_map(|ch| ch.curves.iter().map(String::as_str)));
        for n in preferred {
            if let Ok(key) = self.model.resolve(n) {
                names.entry(key.to_string()).or_insert_with(|| n.to_string());
            }
        }
        names
    }

    pub fn expansion_rendered(&self, c: &Construction) -> Vec<(String, String)> {
        let names = self.display_names(c);
        self.expansion
            .iter()
            .flatten()
            .map(|(k, v)| (names.get(k).cloned().unwrap_or_else(|| k.clone()), render(v)))
            .collect()
    }
}

/// Runs the full pipeline, stopping at the first error.
pub fn analyze(c: &Construction) -> Result<Analysis, ConstructionError> {
    let model = c.script.run()?;
    let embeddings = c.embeddings()?;
    let contraction = contraction::contract(&model, &embeddings, &c.nef_targets())?;
    let expansion = match &c.canonical_expansion {
        Some(base) => {
            let terms: Vec<(String, Rational)> =
                base.base_terms.iter().map(|(k, v)| (k.clone(), v.value().clone())).collect();
            Some(contraction::canonical_expansion(&model, base.base_stage, &terms, &embeddings)?)
        }
        None => None,
    };
    let parity_computed = topology::residual_parity(&model, &embeddings);
    let parity = match (parity_computed, &c.parity_override) {
        (Parity::Undetermined, Some(o)) => o.value,
        (p, _) => p,
    };
    let spec = BlowdownSpec {
        surface: SurfaceSummary::of_model(&model),
        configurations: c
            .chains
            .iter()
            .map(|ch| Configuration { name: ch.name.clone(), p: ch.p, q: ch.q, length: ch.entries.len() })
            .collect(),
        graph: c.graph.clone(),
        parity,
    };
    let invariants = topology::blowdown_invariants(&spec)?;
    let pi1 = c.graph.as_ref().map(topology::pi1_closure).transpose()?;
    Ok(Analysis { model, embeddings, contraction, expansion, spec, parity_computed, invariants, pi1 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub reconstructed: bool,
}

impl Check {
    fn new(id: impl Into<String>, pass: bool, detail: impl Into<String>, citation: Option<&String>) -> Self {
        Check { id: id.into(), pass, detail: detail.into(), citation: citation.cloned(), reconstructed: false }
    }

    fn reconstructed(mut self, flag: bool) -> Self {
        self.reconstructed = flag;
        self
    }

    /// One line: id, verdict, detail and citation.
    pub fn line(&self) -> String {
        let mut s = format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.detail);
        if let Some(c) = &self.citation {
            s.push_str(&format!(" [{c}]"));
        }
        if self.reconstructed {
            s.push_str(" (reconstructed data)");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub construction: String,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expansion: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariants: Option<InvariantReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi1: Option<Pi1Result>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }
}

fn compare_scalar<T: PartialEq + std::fmt::Display>(
    checks: &mut Vec<Check>,
    id: &str,
    expected: &Option<Cited<T>>,
    actual: &T,
) {
    if let Some(e) = expected {
        let pass = &e.value == actual;
        let detail = if pass { format!("{actual}") } else { format!("expected {}, got {actual}", e.value) };
        checks.push(Check::new(id, pass, detail, e.citation.as_ref()).reconstructed(e.reconstructed));
    }
}

fn compare_coefficient(checks: &mut Vec<Check>, id: String, e: &CitedCoefficient, actual: &Rational) {
    let pass = actual == e.target();
    let mut detail =
        if pass { render(actual) } else { format!("expected {}, got {}", render(e.target()), render(actual)) };
    if let Some(err) = &e.erratum {
        detail.push_str(&format!("; printed {} ({})", e.value, err.note));
    }
    checks.push(Check::new(id, pass, detail, e.citation.as_ref()));
}

/// Runs every check the dataset supports. Never panics on bad data; a
/// pipeline error becomes a failing check and ends the run.
pub fn verify(c: &Construction) -> VerificationReport {
    let mut checks = Vec::new();
    let report = |checks: Vec<Check>, expansion, invariants, pi1| VerificationReport {
        construction: c.name.clone(),
        checks,
        expansion,
        invariants,
        pi1,
    };

    let uncited = c.uncited();
    checks.push(Check::new(
        "citations",
        uncited.is_empty(),
        if uncited.is_empty() {
            "every expected value is cited".to_string()
        } else {
            format!("missing: {}", uncited.join(", "))
        },
        None,
    ));

    let model = match c.script.run() {
        Ok(m) => {
            let n = c.script.expectations.len();
            checks.push(Check::new("script", true, format!("{} steps, {n} checkpoints", m.blowups()), None));
            m
        }
        Err(e) => {
            let citation = match &e {
                LatticeError::ExpectationMismatch { citation, .. } => citation.clone(),
                _ => None,
            };
            checks.push(Check {
                id: "script".into(),
                pass: false,
                detail: e.to_string(),
                citation,
                reconstructed: false,
            });
            return report(checks, Vec::new(), None, None);
        }
    };
    compare_scalar(&mut checks, "blowups", &c.expected.blowups, &model.blowups());

    let mut chains_ok = true;
    for ch in &c.chains {
        let id = format!("chain:{}", ch.name);
        let printed = hj_expand(ch.p, ch.q).map(|t| t.entries().to_vec());
        let shape = match printed {
            Ok(bs) if bs == ch.entries => Ok(()),
            Ok(bs) => Err(format!("entries {:?} differ from C_{{{},{}}} = {bs:?}", ch.entries, ch.p, ch.q)),
            Err(e) => Err(e.to_string()),
        };
        let embedded = shape.and_then(|()| {
            let chain =
                TChain::new(ch.entries.clone()).and_then(|t| t.with_params(ch.p, ch.q)).map_err(|e| e.to_string())?;
            let emb = ChainEmbedding::new(ch.name.clone(), ch.curves.clone(), chain);
            contraction::validate_embedding(&model, &emb).map_err(|e| e.to_string())?;
            contraction::check_artin(&ch.name, &emb.chain).map_err(|e| e.to_string())
        });
        match embedded {
            Ok(cert) => checks.push(Check::new(
                id,
                true,
                format!("{:?} embedded, det {}", ch.entries, cert.determinant),
                ch.citation.as_ref(),
            )),
            Err(msg) => {
                chains_ok = false;
                checks.push(Check::new(id, false, msg, ch.citation.as_ref()));
            }
        }
    }
    if !chains_ok {
        return report(checks, Vec::new(), None, None);
    }

    let analysis = match analyze(c) {
        Ok(a) => a,
        Err(e) => {
            checks.push(Check::new("pipeline", false, e.to_string(), None));
            return report(checks, Vec::new(), None, None);
        }
    };
    let model = &analysis.model;
    let cr = &analysis.contraction;

    // Discrepancies keyed by every name the chain curve is known under.
    let mut ds: BTreeMap<String, Rational> = BTreeMap::new();
    for (chain, emb) in cr.chains.iter().zip(&analysis.embeddings) {
        for (name, d) in emb.curves.iter().zip(&chain.discrepancies) {
            if let Ok(key) = model.resolve(name) {
                ds.insert(key.to_string(), crate::rational::parse(d).expect("rendered rational"));
            }
        }
        let k = chain.entries.len().to_string();
        checks.push(Check::new(
            format!("length_sum:{}", chain.name),
            chain.length_sum == k,
            format!("sum d_i (b_i - 2) = {}, length {k}", chain.length_sum),
            None,
        ));
    }
    for e in &c.expected.discrepancies {
        let actual = model.resolve(&e.curve).ok().and_then(|k| ds.get(k)).cloned();
        match actual {
            Some(v) => compare_coefficient(&mut checks, format!("discrepancy:{}", e.curve), e, &v),
            None => checks.push(Check::new(
                format!("discrepancy:{}", e.curve),
                false,
                "not a chain curve",
                e.citation.as_ref(),
            )),
        }
    }

    if let Some(terms) = &analysis.expansion {
        let (pullback, _) = contraction::pullback_canonical(model, &analysis.embeddings).expect("computed in analyze");
        let cls = contraction::expansion_class(model, terms);
        checks.push(Check::new(
            "pullback:class",
            cls.as_ref().is_ok_and(|k| *k == pullback),
            "expansion sums to K_Z + sum d_i G_i",
            c.canonical_expansion.as_ref().and_then(|b| b.citation.as_ref()),
        ));
        let mut listed = Vec::new();
        for e in &c.expected.pullback {
            let key = model.resolve(&e.curve).map(str::to_string);
            let actual = key.as_ref().ok().and_then(|k| terms.get(k)).cloned().unwrap_or_else(Rational::zero);
            if let Ok(k) = key {
                listed.push(k);
            }
            compare_coefficient(&mut checks, format!("pullback:{}", e.curve), e, &actual);
        }
        if !c.expected.pullback.is_empty() {
            let extra: Vec<String> = terms.keys().filter(|k| !listed.contains(k)).cloned().collect();
            checks.push(Check::new(
                "pullback:complete",
                extra.is_empty(),
                if extra.is_empty() {
                    "no unlisted terms".to_string()
                } else {
                    format!("unlisted terms: {}", extra.join(", "))
                },
                c.canonical_expansion.as_ref().and_then(|b| b.citation.as_ref()),
            ));
        }
    }

    let k2: i64 = cr.k_squared.parse().expect("integral K^2");
    compare_scalar(&mut checks, "k_squared", &c.expected.k_squared, &k2);
    checks.push(Check::new(
        "k_squared:consistency",
        k2 == analysis.invariants.k_squared,
        format!("pullback square {k2}, K_Z^2 + sum k = {}", analysis.invariants.k_squared),
        None,
    ));
    checks.push(Check::new("orthogonal", cr.orthogonal, "f*K_X . G = 0 on every chain curve", None));

    let nef: BTreeMap<&str, &str> = cr.nef.iter().map(|n| (n.curve.as_str(), n.value.as_str())).collect();
    for e in &c.expected.nef {
        let v = crate::rational::parse(nef[e.curve.as_str()]).expect("rendered rational");
        compare_coefficient(&mut checks, format!("nef:{}", e.curve), e, &v);
    }
    if let Some(e) = &c.expected.nef_positive {
        let bad: Vec<String> =
            cr.nef.iter().filter(|n| !n.positive).map(|n| format!("{}={}", n.curve, n.value)).collect();
        let actual = bad.is_empty();
        let detail = if actual {
            format!("{} curves positive", cr.nef.len())
        } else {
            format!("not positive: {}", bad.join(", "))
        };
        checks.push(
            Check::new("nef_positive", actual == e.value, detail, e.citation.as_ref()).reconstructed(e.reconstructed),
        );
    }

    let inv = &analysis.invariants;
    checks.push(Check::new(
        "noether",
        inv.k_squared + inv.e == 12 * inv.chi,
        format!("{} + {} = 12 * {}", inv.k_squared, inv.e, inv.chi),
        None,
    ));
    compare_scalar(&mut checks, "b2_plus", &c.expected.b2_plus, &inv.b2_plus);
    compare_scalar(&mut checks, "b2_minus", &c.expected.b2_minus, &inv.b2_minus);
    compare_scalar(&mut checks, "chi", &c.expected.chi, &inv.chi);
    let (_, chi2k) = topology::rationality_exclusion(inv.k_squared, inv.chi);
    compare_scalar(&mut checks, "rationality", &c.expected.rationality, &chi2k);
    checks.push(Check::new(
        "parity",
        inv.parity == Parity::Odd,
        match analysis.parity_computed {
            Parity::Undetermined => format!("{} (from dataset override)", inv.parity),
            p => format!("{p} (odd class in the complement of the chains)"),
        },
        c.parity_override.as_ref().and_then(|o| o.citation.as_ref()),
    ));

    if let (Some(graph), Some(pi1)) = (&c.graph, &analysis.pi1) {
        for (i, e) in graph.edges.iter().enumerate() {
            if let Some(via) = &e.via {
                let id = format!("graph:edge{i}:{via}");
                match edge_powers(c, model, &e.a, &e.b, via) {
                    Ok((pa, pb)) => checks.push(
                        Check::new(
                            id,
                            (pa, pb) == (e.power_a, e.power_b),
                            format!("{via} cuts powers {pa}/{pb} (graph says {}/{})", e.power_a, e.power_b),
                            None,
                        )
                        .reconstructed(graph.reconstructed),
                    ),
                    Err(msg) => checks.push(Check::new(id, false, msg, None).reconstructed(graph.reconstructed)),
                }
            }
        }
        if let Some(e) = &c.expected.pi1_trivial {
            checks.push(
                Check::new(
                    "pi1_trivial",
                    pi1.trivial == e.value,
                    format!(
                        "closure {} after {} steps",
                        if pi1.trivial { "trivial" } else { "non-trivial" },
                        pi1.log.len()
                    ),
                    e.citation.as_ref(),
                )
                .reconstructed(graph.reconstructed || e.reconstructed),
            );
        }
    }
    let fp = inv.fingerprint.clone().unwrap_or_else(|| "none".to_string());
    compare_scalar(&mut checks, "fingerprint", &c.expected.fingerprint, &fp);

    let expansion = analysis.expansion_rendered(c);
    report(checks, expansion, Some(analysis.invariants.clone()), analysis.pi1.clone())
}

/// Meridian powers cut by the sphere `via` on the two chains it joins.
fn edge_powers(c: &Construction, model: &SurfaceModel, a: &str, b: &str, via: &str) -> Result<(u64, u64), String> {
    let power = |node: &str| -> Result<u64, String> {
        let ch = c.chains.iter().find(|ch| ch.name == node).ok_or_else(|| format!("no chain {node}"))?;
        let mut hits = Vec::new();
        for (i, curve) in ch.curves.iter().enumerate() {
            let v = model.intersect_curves(via, curve).map_err(|e| e.to_string())?;
            if !v.is_zero() {
                hits.push((i, v));
            }
        }
        match hits.as_slice() {
            [(i, v)] if *v == crate::rational::one() => {
                let mu = &topology::meridian_powers(&ch.entries)[*i];
                u64::try_from(mu).map_err(|e| e.to_string())
            }
            _ => Err(format!("{via} does not meet {node} transversally in exactly one curve")),
        }
    };
    Ok((power(a)?, power(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        for name in ["main_k3", "pencil2_k3", "k4"] {
            let c = load_builtin(name).unwrap();
            assert_eq!(c.name, name);
            assert!(c.uncited().is_empty(), "{name}: {:?}", c.uncited());
        }
        assert!(matches!(load_builtin("nosuch"), Err(ConstructionError::Unknown(..))));
    }

    #[test]
    fn dataset_round_trips() {
        let c = load_builtin("main_k3").unwrap();
        let back = Construction::from_json(&c.to_json(), "round trip").unwrap();
        assert_eq!(back, c);
    }
}
