//! JSON file formats.
//!
//! Numbers are written by `serde_json`, which emits the shortest decimal
//! that parses back to the same `f64`; reading and re-writing a file is
//! therefore byte-stable.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::certify::{LevelReport, LevelStatus};
use crate::error::{Error, Result};
use crate::gram::{CertMode, Certificate, GramBlock};
use crate::moments::MomentFunctional;
use crate::poly::{AlgebraKind, AlgebraSpec, MatrixPoly, Monomial};
use crate::qmodule::ConstraintSystem;
use crate::scalar::Real;
use crate::verify::VerifyReport;

pub const CERTIFICATE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub kind: String,
    pub vars: usize,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub exponents: Vec<u32>,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub poly: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    pub algebra: AlgebraDoc,
    #[serde(default)]
    pub p: Vec<TermDoc>,
    #[serde(default)]
    pub constraints: Vec<ConstraintDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDoc {
    pub k: usize,
    pub weight_size: usize,
    pub size: usize,
    pub basis: Vec<Vec<u32>>,
    pub gram: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub version: u32,
    pub mode: String,
    pub level: u32,
    pub epsilon: Option<f64>,
    pub theta: Option<u32>,
    pub shift: f64,
    pub blocks: Vec<BlockDoc>,
    pub transformer: Option<BlockDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDoc {
    pub version: u32,
    pub algebra: AlgebraDoc,
    pub level: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub values: Vec<TermDoc>,
}

/// Target polynomial and constraint system read from one file.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem<T: Real> {
    pub p: MatrixPoly<T>,
    pub system: ConstraintSystem<T>,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn parse<'a, D: Deserialize<'a>>(text: &'a str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| schema(e.to_string()))
}

fn render<S: Serialize>(doc: &S) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn algebra_from_doc(doc: &AlgebraDoc) -> Result<AlgebraSpec> {
    let kind = match doc.kind.as_str() {
        "poly" => AlgebraKind::FreePoly,
        "torus" => AlgebraKind::Torus,
        other => return Err(schema(format!("algebra.kind: unknown kind {other:?}"))),
    };
    AlgebraSpec::new(kind, doc.vars).map_err(|e| schema(format!("algebra: {e}")))
}

fn algebra_to_doc(alg: &AlgebraSpec, size: usize) -> AlgebraDoc {
    let kind = if alg.is_torus() { "torus" } else { "poly" };
    AlgebraDoc { kind: kind.into(), vars: alg.num_vars(), size }
}

fn matrix_from_rows<T: Real>(rows: &[Vec<f64>], path: &str) -> Result<DMatrix<T>> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if n == 0 || m == 0 {
        return Err(schema(format!("{path}: empty matrix")));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
        return Err(schema(format!("{path}: row {i} has {} entries, expected {m}", r.len())));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(schema(format!("{path}: non-finite entry")));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| T::lit(rows[i][j])))
}

fn matrix_to_rows<T: Real>(m: &DMatrix<T>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].as_f64()).collect()).collect()
}

fn monomial_from_doc(e: &[u32], alg: &AlgebraSpec, path: &str) -> Result<Monomial> {
    if e.len() != alg.num_generators() {
        return Err(schema(format!("{path}: {} exponents, expected {}", e.len(), alg.num_generators())));
    }
    Ok(Monomial::new(e.to_vec()))
}

fn poly_from_doc<T: Real>(
    terms: &[TermDoc],
    alg: AlgebraSpec,
    size: Option<usize>,
    path: &str,
) -> Result<MatrixPoly<T>> {
    let size = match size {
        Some(s) => s,
        None => terms.first().ok_or_else(|| schema(format!("{path}: empty polynomial")))?.matrix.len(),
    };
    let mut out = Vec::with_capacity(terms.len());
    for (i, t) in terms.iter().enumerate() {
        let here = format!("{path}[{i}]");
        let m = monomial_from_doc(&t.exponents, &alg, &format!("{here}.exponents"))?;
        let c: DMatrix<T> = matrix_from_rows(&t.matrix, &format!("{here}.matrix"))?;
        if c.nrows() != size || c.ncols() != size {
            return Err(schema(format!("{here}.matrix: {}x{}, expected {size}x{size}", c.nrows(), c.ncols())));
        }
        out.push((m, c));
    }
    MatrixPoly::from_terms(alg, size, size, out).map_err(|e| schema(format!("{path}: {e}")))
}

fn poly_to_doc<T: Real>(p: &MatrixPoly<T>) -> Vec<TermDoc> {
    p.terms().map(|(m, c)| TermDoc { exponents: m.exponents().to_vec(), matrix: matrix_to_rows(c) }).collect()
}

pub fn problem_from_doc<T: Real>(doc: &ProblemDoc) -> Result<Problem<T>> {
    let alg = algebra_from_doc(&doc.algebra)?;
    let nu = doc.algebra.size;
    if nu == 0 {
        return Err(schema("algebra.size: must be positive"));
    }
    let p = poly_from_doc(&doc.p, alg, Some(nu), "p")?;
    if !p.is_hermitian() {
        return Err(schema("p: polynomial is not hermitian"));
    }
    let mut system = ConstraintSystem::new(alg, nu);
    for (i, c) in doc.constraints.iter().enumerate() {
        let path = format!("constraints[{i}].poly");
        let g = poly_from_doc(&c.poly, alg, None, &path)?;
        system.push(g, c.name.clone()).map_err(|e| schema(format!("constraints[{i}]: {e}")))?;
    }
    Ok(Problem { p, system })
}

pub fn problem_to_doc<T: Real>(pr: &Problem<T>) -> ProblemDoc {
    ProblemDoc {
        algebra: algebra_to_doc(pr.p.algebra(), pr.p.size()),
        p: poly_to_doc(&pr.p),
        constraints: pr
            .system
            .user_generators()
            .iter()
            .enumerate()
            .map(|(i, g)| ConstraintDoc { name: pr.system.name(i + 1).map(String::from), poly: poly_to_doc(g) })
            .collect(),
    }
}

pub fn read_problem<T: Real>(text: &str) -> Result<Problem<T>> {
    problem_from_doc(&parse::<ProblemDoc>(text)?)
}

pub fn write_problem<T: Real>(pr: &Problem<T>) -> String {
    render(&problem_to_doc(pr))
}

fn block_to_doc<T: Real>(b: &GramBlock<T>) -> BlockDoc {
    BlockDoc {
        k: b.k,
        weight_size: b.weight_size,
        size: b.ambient_size,
        basis: b.basis.iter().map(|m| m.exponents().to_vec()).collect(),
        gram: matrix_to_rows(&b.gram),
    }
}

fn block_from_doc<T: Real>(d: &BlockDoc, path: &str) -> Result<GramBlock<T>> {
    let basis = d.basis.iter().map(|e| Monomial::new(e.clone())).collect::<Vec<_>>();
    if let Some(w) = basis.windows(2).position(|w| w[0].len() != w[1].len()) {
        return Err(schema(format!("{path}.basis[{}]: inconsistent exponent length", w + 1)));
    }
    let gram =
        if d.gram.is_empty() { DMatrix::zeros(0, 0) } else { matrix_from_rows(&d.gram, &format!("{path}.gram"))? };
    let b = GramBlock { k: d.k, basis, weight_size: d.weight_size, ambient_size: d.size, gram };
    if b.gram.nrows() != b.lift_dim() || b.gram.ncols() != b.lift_dim() {
        return Err(schema(format!(
            "{path}.gram: {}x{}, expected {n}x{n}",
            b.gram.nrows(),
            b.gram.ncols(),
            n = b.lift_dim()
        )));
    }
    Ok(b)
}

fn mode_name<T>(m: &CertMode<T>) -> &'static str {
    match m {
        CertMode::Strict { .. } => "strict",
        CertMode::Closure => "closure",
        CertMode::Reznick { .. } => "reznick",
        CertMode::Nnsd => "nnsd",
    }
}

pub fn certificate_to_doc<T: Real>(c: &Certificate<T>) -> CertificateDoc {
    CertificateDoc {
        version: CERTIFICATE_VERSION,
        mode: mode_name(&c.mode).into(),
        level: c.level,
        epsilon: c.epsilon().map(|e| e.as_f64()),
        theta: c.theta(),
        shift: c.shift.as_f64(),
        blocks: c.blocks.iter().map(block_to_doc).collect(),
        transformer: c.transformer.as_ref().map(block_to_doc),
    }
}

pub fn certificate_from_doc<T: Real>(d: &CertificateDoc) -> Result<Certificate<T>> {
    if d.version != CERTIFICATE_VERSION {
        return Err(schema(format!("version: unsupported certificate version {}", d.version)));
    }
    let mode = match (d.mode.as_str(), d.epsilon, d.theta) {
        ("strict", Some(e), None) => CertMode::Strict { epsilon: T::lit(e) },
        ("closure", None, None) => CertMode::Closure,
        ("reznick", None, Some(theta)) => CertMode::Reznick { theta },
        ("nnsd", None, None) => CertMode::Nnsd,
        ("strict" | "closure" | "reznick" | "nnsd", _, _) => {
            return Err(schema(format!("mode: epsilon/theta do not match mode {:?}", d.mode)))
        }
        (other, _, _) => return Err(schema(format!("mode: unknown mode {other:?}"))),
    };
    let blocks = d
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| block_from_doc(b, &format!("blocks[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let transformer = d.transformer.as_ref().map(|b| block_from_doc(b, "transformer")).transpose()?;
    Ok(Certificate { mode, level: d.level, blocks, transformer, shift: T::lit(d.shift) })
}

pub fn read_certificate<T: Real>(text: &str) -> Result<Certificate<T>> {
    certificate_from_doc(&parse::<CertificateDoc>(text)?)
}

pub fn write_certificate<T: Real>(c: &Certificate<T>) -> String {
    render(&certificate_to_doc(c))
}

pub fn witness_to_doc<T: Real>(l: &MomentFunctional<T>, value: Option<T>) -> WitnessDoc {
    WitnessDoc {
        version: CERTIFICATE_VERSION,
        algebra: algebra_to_doc(&l.algebra, l.size),
        level: l.level,
        value: value.map(|v| v.as_f64()),
        values: l
            .values
            .iter()
            .map(|(m, v)| TermDoc { exponents: m.exponents().to_vec(), matrix: matrix_to_rows(v) })
            .collect(),
    }
}

pub fn witness_from_doc<T: Real>(d: &WitnessDoc) -> Result<MomentFunctional<T>> {
    let alg = algebra_from_doc(&d.algebra)?;
    let mut l = MomentFunctional::new(alg, d.algebra.size, d.level);
    for (i, t) in d.values.iter().enumerate() {
        let here = format!("values[{i}]");
        let m = monomial_from_doc(&t.exponents, &alg, &format!("{here}.exponents"))?;
        let v = matrix_from_rows(&t.matrix, &format!("{here}.matrix"))?;
        l.insert(m, v).map_err(|e| schema(format!("{here}: {e}")))?;
    }
    Ok(l)
}

pub fn read_witness<T: Real>(text: &str) -> Result<MomentFunctional<T>> {
    witness_from_doc(&parse::<WitnessDoc>(text)?)
}

pub fn write_witness<T: Real>(l: &MomentFunctional<T>, value: Option<T>) -> String {
    render(&witness_to_doc(l, value))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReportDoc {
    pub accepted: bool,
    pub residual: f64,
    pub worst_monomial: Option<String>,
    pub min_eigs: Vec<f64>,
    pub reason: Option<String>,
}

pub fn write_verify_report<T: Real>(r: &VerifyReport<T>) -> String {
    render(&VerifyReportDoc {
        accepted: r.accepted,
        residual: r.residual.as_f64(),
        worst_monomial: r.worst_monomial.clone(),
        min_eigs: r.min_eigs.iter().map(|v| v.as_f64()).collect(),
        reason: r.reason.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelDoc {
    pub level: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<u32>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReportDoc {
    pub outcome: String,
    pub levels: Vec<LevelDoc>,
}

pub fn level_to_doc<T: Real>(r: &LevelReport<T>) -> LevelDoc {
    let (status, epsilon, reason) = match &r.status {
        LevelStatus::Infeasible { .. } => ("infeasible", None, None),
        LevelStatus::NoMargin { epsilon } => ("no_margin", Some(epsilon.as_f64()), None),
        LevelStatus::Stalled { reason } => ("stalled", None, Some(reason.clone())),
    };
    LevelDoc { level: r.level, theta: r.theta, status: status.into(), epsilon, reason, iterations: r.iterations }
}

pub fn write_search_report<T: Real>(outcome: &str, reports: &[LevelReport<T>]) -> String {
    render(&SearchReportDoc { outcome: outcome.into(), levels: reports.iter().map(level_to_doc).collect() })
}
