//! Command-line front end: ingest tiling, matrix and complex documents, run
//! the pipelines, and emit human-readable or machine-readable reports.
//!
//! Commands: `analyze`, `limit`, `snf`, `validate`, `corpus`.
//! Exit codes: 0 success, 1 input error, 2 mathematical validation failure.

use crate::abgroup::{
    limit_free_traced, limit_presented_traced, z_similarity_certificate, GroupExpression,
    LimitOptions,
};
use crate::chaincx::{
    stable_cohomology, stable_transpose_homology, uct_decomposition_check, validate, Diagnostics,
    HomologyResult, StableComplex,
};
use crate::exactmat::{cokernel, induced_map, snf, IntMatrix, PresentedGroup};
use crate::ktheory::{k_theory_report, torsion_placement_check};
use crate::tiling1d::{build_complex_1d, collared_complex_1d, perron_data, Substitution1D};
use crate::tiling2d::{build_complex_2d, BlockSubstitution2D};
use num::bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    /// Malformed input: wrong flags, unreadable files, schema violations.
    Input(String),
    /// Structurally valid input that fails a mathematical check.
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Validation(m) => m,
        }
    }
}

fn input_err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Input(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Stable,
    Collared,
    Both,
}

/// One parsed invocation: exactly one input document per run.
#[derive(Debug, Clone)]
pub struct JobSpec {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub kmax: usize,
    pub format: OutputFormat,
    pub route: Route,
    /// Subset of "SUA": which algebras to report.
    pub algebras: String,
    pub show_matrices: bool,
}

impl JobSpec {
    pub fn for_command(command: Command) -> JobSpec {
        JobSpec {
            command,
            input: None,
            kmax: 64,
            format: OutputFormat::Text,
            route: Route::Stable,
            algebras: "SUA".into(),
            show_matrices: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Limit,
    Snf,
    Validate,
    Corpus,
}

pub const USAGE: &str = "\
usage: tilekt <command> [input] [options]

commands:
  analyze <file>    full K-theory report for a substitution_1d, block_2d or
                    complex document
  limit <file>      evaluate a direct_limit document
  snf <file>        Smith normal form of a matrix (text format or JSON)
  validate <file>   structural checks for a tiling or complex document
  corpus            run the bundled corpus against its expected values

options:
  --kmax N            power bound for localization certificates (default 64)
  --format text|json  output format (default text)
  --route stable|collared|both   K0(U) route for 1D inputs (default stable)
  --algebras SUA      subset of algebras to report (default SUA)
  --matrices          include matrices in text output

environment:
  TILEKT_CORPUS_DIR   overrides the bundled corpus location
";

pub fn parse_args(args: &[String]) -> Result<JobSpec, CliError> {
    let mut it = args.iter();
    let command = match it.next().map(String::as_str) {
        Some("analyze") => Command::Analyze,
        Some("limit") => Command::Limit,
        Some("snf") => Command::Snf,
        Some("validate") => Command::Validate,
        Some("corpus") => Command::Corpus,
        Some(other) => return input_err(format!("unknown command {other:?}\n{USAGE}")),
        None => return input_err(format!("missing command\n{USAGE}")),
    };
    let mut spec = JobSpec::for_command(command);
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--kmax" => {
                let v = it
                    .next()
                    .ok_or(CliError::Input("--kmax needs a value".into()))?;
                spec.kmax = v
                    .parse()
                    .map_err(|e| CliError::Input(format!("bad --kmax {v:?}: {e}")))?;
            }
            "--format" => {
                spec.format = match it.next().map(String::as_str) {
                    Some("text") => OutputFormat::Text,
                    Some("json") => OutputFormat::Json,
                    other => return input_err(format!("bad --format {other:?}")),
                };
            }
            "--route" => {
                spec.route = match it.next().map(String::as_str) {
                    Some("stable") => Route::Stable,
                    Some("collared") => Route::Collared,
                    Some("both") => Route::Both,
                    other => return input_err(format!("bad --route {other:?}")),
                };
            }
            "--algebras" => {
                let v = it
                    .next()
                    .ok_or(CliError::Input("--algebras needs a value".into()))?;
                if !v.chars().all(|c| "SUA".contains(c)) || v.is_empty() {
                    return input_err(format!("bad --algebras {v:?}: expected a subset of SUA"));
                }
                spec.algebras = v.clone();
            }
            "--matrices" => spec.show_matrices = true,
            other if !other.starts_with("--") && spec.input.is_none() => {
                spec.input = Some(PathBuf::from(other));
            }
            other => return input_err(format!("unexpected argument {other:?}\n{USAGE}")),
        }
    }
    if command != Command::Corpus && spec.input.is_none() {
        return input_err(format!("command needs an input file\n{USAGE}"));
    }
    Ok(spec)
}

/// Entry point used by the binary: parses argv, runs, prints, and returns
/// the exit code.
pub fn run_main(args: &[String]) -> i32 {
    match parse_args(args) {
        Ok(spec) => match run(&spec) {
            Ok(output) => {
                println!("{output}");
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {}", e.message());
                e.exit_code()
            }
        },
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

pub fn run(spec: &JobSpec) -> Result<String, CliError> {
    match spec.command {
        Command::Analyze => cmd_analyze(spec),
        Command::Limit => cmd_limit(spec),
        Command::Snf => cmd_snf(spec),
        Command::Validate => cmd_validate(spec),
        Command::Corpus => cmd_corpus(spec),
    }
}

// ---------------------------------------------------------------------------
// documents

/// A parsed input document.
pub enum Document {
    Substitution1D(Substitution1D),
    Block2D(BlockSubstitution2D),
    Complex(StableComplex),
    DirectLimit {
        matrix: IntMatrix,
        torsion: Vec<BigInt>,
        free_rank: Option<usize>,
    },
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn parse_document(text: &str) -> Result<Document, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        CliError::Input(format!(
            "invalid JSON at line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    let obj = value
        .as_object()
        .ok_or(CliError::Input("document must be a JSON object".into()))?;
    let ty = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or(CliError::Input(
            "document is missing the \"type\" field".into(),
        ))?;
    match ty {
        "substitution_1d" => {
            let doc: Sub1DDoc = from_value(value.clone())?;
            let letters: Vec<&str> = doc.letters.iter().map(String::as_str).collect();
            let mut words = Vec::new();
            for l in &doc.letters {
                let w = doc
                    .rules
                    .get(l)
                    .ok_or_else(|| CliError::Input(format!("missing rule for letter {l:?}")))?;
                words.push(w.as_str());
            }
            let sub = Substitution1D::from_strings(&letters, &words)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            Ok(Document::Substitution1D(sub))
        }
        "block_2d" => {
            let doc: Block2DDoc = from_value(value.clone())?;
            let faces: Vec<&str> = doc.faces.iter().map(String::as_str).collect();
            let mut grids = Vec::new();
            for f in &doc.faces {
                let grid = doc
                    .rules
                    .get(f)
                    .ok_or_else(|| CliError::Input(format!("missing rule for face {f:?}")))?;
                grids.push(
                    grid.iter()
                        .map(|row| row.iter().map(String::as_str).collect())
                        .collect(),
                );
            }
            let sub = BlockSubstitution2D::from_grids(&faces, doc.lambda, &grids)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            Ok(Document::Block2D(sub))
        }
        "complex" => {
            let doc: ComplexDoc = from_value(value.clone())?;
            let se = doc.edges.len();
            let delta1 = match &doc.delta1 {
                Some(v) => value_to_matrix(v, "delta1")?,
                None => IntMatrix::zero(0, se),
            };
            let wf = match &doc.wf {
                Some(v) => value_to_matrix(v, "wf")?,
                None => IntMatrix::zero(0, 0),
            };
            Ok(Document::Complex(StableComplex {
                dim: doc.dim,
                vertex_labels: doc.vertices,
                edge_labels: doc.edges,
                face_labels: doc.faces.unwrap_or_default(),
                delta0: value_to_matrix(&doc.delta0, "delta0")?,
                delta1,
                wv: value_to_matrix(&doc.wv, "wv")?,
                we: value_to_matrix(&doc.we, "we")?,
                wf,
            }))
        }
        "direct_limit" => {
            let doc: DirectLimitDoc = from_value(value.clone())?;
            let matrix = value_to_matrix(&doc.matrix, "matrix")?;
            let torsion = doc
                .torsion
                .unwrap_or_default()
                .iter()
                .map(|t| parse_bigint(t, "torsion"))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Document::DirectLimit {
                matrix,
                torsion,
                free_rank: doc.free_rank,
            })
        }
        other => input_err(format!("unknown document type {other:?}")),
    }
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Input(format!("bad document: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Sub1DDoc {
    #[serde(rename = "type")]
    _type: String,
    letters: Vec<String>,
    rules: std::collections::BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Block2DDoc {
    #[serde(rename = "type")]
    _type: String,
    lambda: usize,
    faces: Vec<String>,
    /// rules[f][row][col], row 0 = bottom row
    rules: std::collections::BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexDoc {
    #[serde(rename = "type")]
    _type: String,
    dim: u8,
    vertices: Vec<String>,
    edges: Vec<String>,
    faces: Option<Vec<String>>,
    delta0: Value,
    delta1: Option<Value>,
    wv: Value,
    we: Value,
    wf: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DirectLimitDoc {
    #[serde(rename = "type")]
    _type: String,
    matrix: Value,
    torsion: Option<Vec<Value>>,
    free_rank: Option<usize>,
    #[allow(dead_code)]
    name: Option<String>,
}

fn parse_bigint(v: &Value, what: &str) -> Result<BigInt, CliError> {
    match v {
        Value::Number(n) => n
            .to_string()
            .parse::<BigInt>()
            .map_err(|e| CliError::Input(format!("bad integer in {what}: {e}"))),
        Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|e| CliError::Input(format!("bad integer {s:?} in {what}: {e}"))),
        other => input_err(format!("expected an integer in {what}, got {other}")),
    }
}

/// Matrices inside JSON documents: either an array of rows or a string in
/// the text format (`rows cols` then row-major entries).
pub fn value_to_matrix(v: &Value, what: &str) -> Result<IntMatrix, CliError> {
    match v {
        Value::String(s) => IntMatrix::parse_text(s)
            .map_err(|e| CliError::Input(format!("bad matrix text in {what}: {e}"))),
        Value::Array(rows) => {
            let mut parsed: Vec<Vec<BigInt>> = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                let row = row
                    .as_array()
                    .ok_or_else(|| CliError::Input(format!("{what}: row {i} is not an array")))?;
                let mut r = Vec::new();
                for (j, entry) in row.iter().enumerate() {
                    r.push(parse_bigint(entry, &format!("{what}[{i}][{j}]"))?);
                }
                parsed.push(r);
            }
            if let Some(w) = parsed.first() {
                let w = w.len();
                if parsed.iter().any(|r| r.len() != w) {
                    return input_err(format!("{what}: ragged rows"));
                }
            }
            Ok(IntMatrix::from_bigint_rows(parsed))
        }
        other => input_err(format!("{what}: expected a matrix, got {other}")),
    }
}

// ---------------------------------------------------------------------------
// group expression serialization and parsing

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct GroupDto {
    pub canonical: String,
    pub free_rank: usize,
    pub torsion: Vec<String>,
    pub localized: Vec<LocalizedDto>,
    pub residual: Vec<ResidualDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension: Option<Box<ExtensionDto>>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct LocalizedDto {
    pub radical: String,
    pub exponent: usize,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct ResidualDto {
    pub matrix: Vec<Vec<String>>,
    pub det: String,
    pub note: String,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct ExtensionDto {
    pub sub: GroupDto,
    pub quotient: GroupDto,
}

pub fn group_dto(g: &GroupExpression) -> GroupDto {
    GroupDto {
        canonical: g.canonical(),
        free_rank: g.free_rank,
        torsion: g.torsion.iter().map(|t| t.to_string()).collect(),
        localized: g
            .localized
            .iter()
            .map(|(rad, e)| LocalizedDto {
                radical: rad.to_string(),
                exponent: *e,
            })
            .collect(),
        residual: g
            .residual
            .iter()
            .map(|r| ResidualDto {
                matrix: matrix_rows(&r.matrix),
                det: r.det.to_string(),
                note: r.containment_note(),
            })
            .collect(),
        extension: g.extension.as_ref().map(|parts| {
            Box::new(ExtensionDto {
                sub: group_dto(&parts.0),
                quotient: group_dto(&parts.1),
            })
        }),
    }
}

/// Parses the canonical grammar
/// `Z^a (+ Z/d)* (+ Z[1/m]^b)* (+ lim[[..],[..]])*` and `ext(sub; quot)`.
pub fn parse_group_expression(s: &str) -> Result<GroupExpression, String> {
    let s = s.trim();
    if s == "0" {
        return Ok(GroupExpression::zero());
    }
    if let Some(body) = s.strip_prefix("ext(").and_then(|r| r.strip_suffix(')')) {
        let mut depth = 0usize;
        let mut split = None;
        for (i, c) in body.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                ';' if depth == 0 => {
                    split = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let i = split.ok_or("ext(...) needs a ';' separator")?;
        let sub = parse_group_expression(&body[..i])?;
        let quot = parse_group_expression(&body[i + 1..])?;
        return Ok(GroupExpression::extension_of(sub, quot));
    }
    let mut g = GroupExpression::zero();
    for term in s.split(" + ") {
        let term = term.trim();
        if term == "Z" {
            g = g.direct_sum(&GroupExpression::free(1));
        } else if let Some(k) = term.strip_prefix("Z^") {
            let k: usize = k.parse().map_err(|e| format!("bad free rank {k:?}: {e}"))?;
            g = g.direct_sum(&GroupExpression::free(k));
        } else if let Some(d) = term.strip_prefix("Z/") {
            let d: BigInt = d.parse().map_err(|e| format!("bad torsion {d:?}: {e}"))?;
            g = g.direct_sum(&GroupExpression::torsion_group(vec![d]));
        } else if let Some(rest) = term.strip_prefix("Z[1/") {
            let close = rest.find(']').ok_or("unterminated Z[1/..]")?;
            let m: BigInt = rest[..close]
                .parse()
                .map_err(|e| format!("bad radical: {e}"))?;
            let exp = match rest[close + 1..].strip_prefix('^') {
                Some(e) => e.parse().map_err(|e| format!("bad exponent: {e}"))?,
                None if rest[close + 1..].is_empty() => 1,
                None => return Err(format!("trailing characters in {term:?}")),
            };
            g = g.direct_sum(&GroupExpression::localization(&m, exp));
        } else if let Some(mat) = term.strip_prefix("lim") {
            let m = parse_bracket_matrix(mat)?;
            g = g.direct_sum(&GroupExpression::residual_term(m));
        } else {
            return Err(format!("unrecognized term {term:?}"));
        }
    }
    Ok(g)
}

fn parse_bracket_matrix(s: &str) -> Result<IntMatrix, String> {
    let s = s.trim();
    let inner = s
        .strip_prefix("[[")
        .and_then(|r| r.strip_suffix("]]"))
        .ok_or_else(|| format!("bad matrix literal {s:?}"))?;
    let mut rows = Vec::new();
    for row in inner.split("],[") {
        let mut r = Vec::new();
        for e in row.split(',') {
            r.push(
                e.trim()
                    .parse::<BigInt>()
                    .map_err(|err| format!("bad entry {e:?}: {err}"))?,
            );
        }
        rows.push(r);
    }
    let w = rows[0].len();
    if rows.iter().any(|r| r.len() != w) {
        return Err("ragged matrix literal".into());
    }
    Ok(IntMatrix::from_bigint_rows(rows))
}

/// Group-expression comparison: canonical-string equality, except that
/// residual terms are matched through Z-similarity certificates (the engine
/// may present a residual limit in any basis of the same Z-class).
pub fn expressions_match(a: &GroupExpression, b: &GroupExpression) -> bool {
    if a.canonical() == b.canonical() {
        return true;
    }
    match (&a.extension, &b.extension) {
        (Some(x), Some(y)) => {
            return expressions_match(&x.0, &y.0) && expressions_match(&x.1, &y.1)
        }
        (None, None) => {}
        _ => return false,
    }
    if a.free_rank != b.free_rank
        || a.torsion != b.torsion
        || a.localized != b.localized
        || a.residual.len() != b.residual.len()
    {
        return false;
    }
    let mut used = vec![false; b.residual.len()];
    for ra in &a.residual {
        let mut matched = false;
        for (i, rb) in b.residual.iter().enumerate() {
            if used[i] || ra.rank() != rb.rank() {
                continue;
            }
            if let Ok(Some(_)) = z_similarity_certificate(&ra.matrix, &rb.matrix) {
                used[i] = true;
                matched = true;
                break;
            }
        }
        if !matched {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// analyze

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct ReportDoc {
    pub input: String,
    pub kind: String,
    pub dim: u8,
    pub cells: CellCounts,
    pub validation: DiagnosticsDto,
    pub stable: RouteDto,
    pub transpose: RouteDto,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collared_k0u: Option<CollaredDto>,
    pub ktheory: KTheoryDto,
    pub torsion_placement: DiagnosticsDto,
    pub uct_finite_level: DiagnosticsDto,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perron: Option<PerronDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrices: Option<MatricesDto>,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct CellCounts {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct DiagnosticsDto {
    pub ok: bool,
    pub passed: Vec<String>,
    pub failed: Vec<String>,
}

impl From<&Diagnostics> for DiagnosticsDto {
    fn from(d: &Diagnostics) -> Self {
        DiagnosticsDto {
            ok: d.ok(),
            passed: d.passed.clone(),
            failed: d.failed.clone(),
        }
    }
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct RouteDto {
    pub h0: GroupDto,
    pub h1: GroupDto,
    pub h2: GroupDto,
    pub finite_level: Vec<FiniteLevelDto>,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct FiniteLevelDto {
    pub degree: usize,
    pub group: String,
    pub endo: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct CollaredDto {
    pub vertices: usize,
    pub edges: usize,
    pub k0_u: GroupDto,
    pub agrees_with_transpose_route: bool,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct KTheoryDto {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0_s: Option<GroupDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k1_s: Option<GroupDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0_u: Option<GroupDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k1_u: Option<GroupDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0_a: Option<GroupDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k1_a: Option<GroupDto>,
    pub notes: Vec<String>,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct PerronDto {
    pub inflation: f64,
    pub lengths: Vec<f64>,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct MatricesDto {
    pub delta0: Vec<Vec<String>>,
    pub delta1: Vec<Vec<String>>,
    pub wv: Vec<Vec<String>>,
    pub we: Vec<Vec<String>>,
    pub wf: Vec<Vec<String>>,
}

fn matrix_rows(m: &IntMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.to_string()).collect())
        .collect()
}

/// Full pipeline for one parsed document; shared by `analyze` and the
/// corpus runner.
pub fn analyze_document(doc: &Document, name: &str, spec: &JobSpec) -> Result<ReportDoc, CliError> {
    let opts = LimitOptions { kmax: spec.kmax };
    let (complex, kind, perron) = match doc {
        Document::Substitution1D(s) => {
            let c = build_complex_1d(s).map_err(|e| CliError::Validation(e.to_string()))?;
            let (inflation, lengths) =
                perron_data(s).map_err(|e| CliError::Validation(e.to_string()))?;
            (c, "substitution_1d", Some(PerronDto { inflation, lengths }))
        }
        Document::Block2D(s) => {
            let c = build_complex_2d(s).map_err(|e| CliError::Validation(e.to_string()))?;
            (c, "block_2d", None)
        }
        Document::Complex(c) => (c.clone(), "complex", None),
        Document::DirectLimit { .. } => {
            return input_err("direct_limit documents go through the `limit` command")
        }
    };

    let diagnostics = validate(&complex);
    if !diagnostics.ok() {
        return Err(CliError::Validation(format!(
            "complex fails validation: {}",
            diagnostics.failed.join("; ")
        )));
    }

    let stable =
        stable_cohomology(&complex, opts).map_err(|e| CliError::Validation(e.to_string()))?;
    let transpose = stable_transpose_homology(&complex, opts)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let report = k_theory_report(&stable, &transpose, complex.dim);
    let placement = torsion_placement_check(&report);
    let uct = uct_decomposition_check(&complex, opts);

    let collared_k0u = match (doc, spec.route) {
        (Document::Substitution1D(s), Route::Collared | Route::Both) => {
            let (expr, cv, ce) =
                collared_route_k0u(s, opts).map_err(|e| CliError::Validation(e.to_string()))?;
            let agrees = expressions_match(&expr, &report.k0_u);
            Some(CollaredDto {
                vertices: cv,
                edges: ce,
                k0_u: group_dto(&expr),
                agrees_with_transpose_route: agrees,
            })
        }
        _ => None,
    };

    let route_dto = |h: &HomologyResult| RouteDto {
        h0: group_dto(&h.h0),
        h1: group_dto(&h.h1),
        h2: group_dto(&h.h2),
        finite_level: h
            .finite
            .iter()
            .enumerate()
            .map(|(degree, f)| FiniteLevelDto {
                degree,
                group: f.describe(),
                endo: matrix_rows(&f.endo),
            })
            .collect(),
    };

    let (sv, se, sf) = complex.counts();
    let want = |c: char| spec.algebras.contains(c);
    Ok(ReportDoc {
        input: name.to_string(),
        kind: kind.to_string(),
        dim: complex.dim,
        cells: CellCounts {
            vertices: sv,
            edges: se,
            faces: sf,
        },
        validation: (&diagnostics).into(),
        stable: route_dto(&stable),
        transpose: route_dto(&transpose),
        collared_k0u,
        ktheory: KTheoryDto {
            k0_s: want('S').then(|| group_dto(&report.k0_s)),
            k1_s: want('S').then(|| group_dto(&report.k1_s)),
            k0_u: want('U').then(|| group_dto(&report.k0_u)),
            k1_u: want('U').then(|| group_dto(&report.k1_u)),
            k0_a: report
                .k0_a
                .as_ref()
                .filter(|_| want('A'))
                .map(group_dto),
            k1_a: report
                .k1_a
                .as_ref()
                .filter(|_| want('A'))
                .map(group_dto),
            notes: report.notes.clone(),
        },
        torsion_placement: (&placement).into(),
        uct_finite_level: (&uct).into(),
        perron,
        matrices: spec.show_matrices.then(|| MatricesDto {
            delta0: matrix_rows(&complex.delta0),
            delta1: matrix_rows(&complex.delta1),
            wv: matrix_rows(&complex.wv),
            we: matrix_rows(&complex.we),
            wf: matrix_rows(&complex.wf),
        }),
    })
}

/// The Anderson-Putnam route for 1D: K0(U) = lim(coker boundary1^t, omega_E^t).
pub fn collared_route_k0u(
    s: &Substitution1D,
    opts: LimitOptions,
) -> Result<(GroupExpression, usize, usize), crate::abgroup::AbGroupError> {
    let collared = collared_complex_1d(s)
        .map_err(|e| crate::abgroup::AbGroupError::DoesNotDescend(e.to_string()))?;
    let b1t = collared.boundary1.transpose();
    let group = cokernel(&b1t);
    let endo = induced_map(&collared.omega_e.transpose(), &group, &group)?;
    let (expr, _) = limit_presented_traced(&endo, &group, opts)?;
    Ok((expr, collared.vertices.len(), collared.edges.len()))
}

fn cmd_analyze(spec: &JobSpec) -> Result<String, CliError> {
    let path = spec.input.as_ref().expect("analyze requires input");
    let text = read_input(path)?;
    let doc = parse_document(&text)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let report = analyze_document(&doc, &name, spec)?;
    match spec.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Text => Ok(render_report_text(&report)),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Input(format!("serialization failed: {e}")))
}

fn render_report_text(r: &ReportDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "input: {} ({}, dim {})", r.input, r.kind, r.dim);
    let _ = writeln!(
        out,
        "cells: sV={} sE={} sF={}",
        r.cells.vertices, r.cells.edges, r.cells.faces
    );
    if let Some(p) = &r.perron {
        let lengths: Vec<String> = p.lengths.iter().map(|l| format!("{l:.4}")).collect();
        let _ = writeln!(
            out,
            "inflation: {:.4}  tile lengths: [{}]",
            p.inflation,
            lengths.join(", ")
        );
    }
    let _ = writeln!(
        out,
        "validation: {} checks passed",
        r.validation.passed.len()
    );
    let _ = writeln!(
        out,
        "stable cohomology:         H^0 = {}   H^1 = {}   H^2 = {}",
        r.stable.h0.canonical, r.stable.h1.canonical, r.stable.h2.canonical
    );
    let _ = writeln!(
        out,
        "stable-transpose homology: H_0 = {}   H_1 = {}   H_2 = {}",
        r.transpose.h0.canonical, r.transpose.h1.canonical, r.transpose.h2.canonical
    );
    let finite: Vec<String> = r
        .stable
        .finite_level
        .iter()
        .map(|f| format!("H^{} = {}", f.degree, f.group))
        .collect();
    let _ = writeln!(out, "finite level (stable):     {}", finite.join("   "));
    if let Some(c) = &r.collared_k0u {
        let _ = writeln!(
            out,
            "collared route: cV={} cE={}  K0(U) = {}  [{}]",
            c.vertices,
            c.edges,
            c.k0_u.canonical,
            if c.agrees_with_transpose_route {
                "agrees with stable-transpose route"
            } else {
                "DISAGREES with stable-transpose route"
            }
        );
    }
    let _ = writeln!(out, "K-theory:");
    let fmt_group = |g: &Option<GroupDto>| -> String {
        g.as_ref()
            .map(|g| g.canonical.clone())
            .unwrap_or_else(|| "(not computed)".into())
    };
    let _ = writeln!(
        out,
        "  K0(S) = {:<28} K1(S) = {}",
        fmt_group(&r.ktheory.k0_s),
        fmt_group(&r.ktheory.k1_s)
    );
    let _ = writeln!(
        out,
        "  K0(U) = {:<28} K1(U) = {}",
        fmt_group(&r.ktheory.k0_u),
        fmt_group(&r.ktheory.k1_u)
    );
    let _ = writeln!(
        out,
        "  K0(A) = {:<28} K1(A) = {}",
        fmt_group(&r.ktheory.k0_a),
        fmt_group(&r.ktheory.k1_a)
    );
    for note in &r.ktheory.notes {
        let _ = writeln!(out, "  note: {note}");
    }
    let _ = writeln!(
        out,
        "torsion placement: {}",
        if r.torsion_placement.ok { "ok" } else { "FAILED" }
    );
    for f in &r.torsion_placement.failed {
        let _ = writeln!(out, "  {f}");
    }
    let _ = writeln!(
        out,
        "UCT finite level: {}",
        if r.uct_finite_level.ok { "ok" } else { "FAILED" }
    );
    for f in &r.uct_finite_level.failed {
        let _ = writeln!(out, "  {f}");
    }
    if let Some(m) = &r.matrices {
        for (name, rows) in [
            ("delta0", &m.delta0),
            ("delta1", &m.delta1),
            ("wv", &m.wv),
            ("we", &m.we),
            ("wf", &m.wf),
        ] {
            let _ = writeln!(out, "{name}:");
            for row in rows.iter() {
                let _ = writeln!(out, "  [{}]", row.join(", "));
            }
        }
    }
    out.trim_end().to_string()
}

// ---------------------------------------------------------------------------
// limit

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct LimitDoc {
    pub input: String,
    pub group: GroupDto,
    pub described: String,
    pub trace: Vec<String>,
}

fn cmd_limit(spec: &JobSpec) -> Result<String, CliError> {
    let path = spec.input.as_ref().expect("limit requires input");
    let text = read_input(path)?;
    let doc = parse_document(&text)?;
    let Document::DirectLimit {
        matrix,
        torsion,
        free_rank,
    } = doc
    else {
        return input_err("the `limit` command expects a direct_limit document");
    };
    if !matrix.is_square() {
        return input_err(format!(
            "direct limit matrix must be square, got {}x{}",
            matrix.rows(),
            matrix.cols()
        ));
    }
    let opts = LimitOptions { kmax: spec.kmax };
    let (expr, trace) = if torsion.is_empty() && free_rank.is_none() {
        limit_free_traced(&matrix, opts)
    } else {
        let free = free_rank.unwrap_or_else(|| matrix.rows().saturating_sub(torsion.len()));
        if torsion.len() + free != matrix.rows() {
            return input_err(format!(
                "presentation (torsion {} + free {}) does not match the {}x{} matrix",
                torsion.len(),
                free,
                matrix.rows(),
                matrix.cols()
            ));
        }
        let group = PresentedGroup::from_parts(torsion, free);
        limit_presented_traced(&matrix, &group, opts)
            .map_err(|e| CliError::Validation(e.to_string()))?
    };
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let out = LimitDoc {
        input: name,
        group: group_dto(&expr),
        described: expr.describe(),
        trace,
    };
    match spec.format {
        OutputFormat::Json => to_json(&out),
        OutputFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "lim = {}", out.described);
            let _ = writeln!(s, "trace:");
            for t in &out.trace {
                let _ = writeln!(s, "  - {t}");
            }
            Ok(s.trim_end().to_string())
        }
    }
}

// ---------------------------------------------------------------------------
// snf

#[derive(Serialize, Deserialize, PartialEq, Debug)]
pub struct SnfDoc {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub invariant_factors: Vec<String>,
    pub p: Vec<Vec<String>>,
    pub q: Vec<Vec<String>>,
    pub d: Vec<Vec<String>>,
}

fn cmd_snf(spec: &JobSpec) -> Result<String, CliError> {
    let path = spec.input.as_ref().expect("snf requires input");
    let text = read_input(path)?;
    // accept the plain text format or a JSON document with a matrix field
    let matrix = if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("invalid JSON: {e}")))?;
        let field = v
            .get("matrix")
            .ok_or(CliError::Input("JSON input needs a \"matrix\" field".into()))?;
        value_to_matrix(field, "matrix")?
    } else {
        IntMatrix::parse_text(&text).map_err(CliError::Input)?
    };
    let s = snf(&matrix);
    debug_assert_eq!(&(&s.p * &matrix) * &s.q, s.d);
    let out = SnfDoc {
        rows: matrix.rows(),
        cols: matrix.cols(),
        rank: s.rank(),
        invariant_factors: s.invariant_factors.iter().map(|d| d.to_string()).collect(),
        p: matrix_rows(&s.p),
        q: matrix_rows(&s.q),
        d: matrix_rows(&s.d),
    };
    match spec.format {
        OutputFormat::Json => to_json(&out),
        OutputFormat::Text => {
            let mut sout = String::new();
            let _ = writeln!(
                sout,
                "{}x{} matrix, rank {}, invariant factors [{}]",
                out.rows,
                out.cols,
                out.rank,
                out.invariant_factors.join(", ")
            );
            let _ = writeln!(sout, "D = P A Q with");
            for (name, m) in [("P", &s.p), ("D", &s.d), ("Q", &s.q)] {
                let _ = writeln!(sout, "{name} = {}", m.bracket_string());
            }
            Ok(sout.trim_end().to_string())
        }
    }
}

// ---------------------------------------------------------------------------
// validate

fn cmd_validate(spec: &JobSpec) -> Result<String, CliError> {
    let path = spec.input.as_ref().expect("validate requires input");
    let text = read_input(path)?;
    let doc = parse_document(&text)?;
    let complex = match &doc {
        Document::Substitution1D(s) => {
            build_complex_1d(s).map_err(|e| CliError::Validation(e.to_string()))?
        }
        Document::Block2D(s) => {
            build_complex_2d(s).map_err(|e| CliError::Validation(e.to_string()))?
        }
        Document::Complex(c) => c.clone(),
        Document::DirectLimit { matrix, .. } => {
            if matrix.is_square() {
                return Ok("direct_limit document: matrix is square".into());
            }
            return input_err("direct_limit matrix is not square");
        }
    };
    let d = validate(&complex);
    let dto: DiagnosticsDto = (&d).into();
    let rendered = match spec.format {
        OutputFormat::Json => to_json(&dto)?,
        OutputFormat::Text => {
            let mut out = String::new();
            for p in &d.passed {
                let _ = writeln!(out, "pass: {p}");
            }
            for f in &d.failed {
                let _ = writeln!(out, "FAIL: {f}");
            }
            out.trim_end().to_string()
        }
    };
    if d.ok() {
        Ok(rendered)
    } else {
        Err(CliError::Validation(rendered))
    }
}

// ---------------------------------------------------------------------------
// corpus

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpectedFile {
    tilings: Vec<ExpectedTiling>,
    limits: Vec<ExpectedLimit>,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct ExpectedTiling {
    file: String,
    name: String,
    #[serde(default)]
    counts: Option<(usize, usize, usize)>,
    #[serde(default)]
    h0_s: Option<String>,
    #[serde(default)]
    k0_s: Option<String>,
    #[serde(default)]
    k1_s: Option<String>,
    #[serde(default)]
    k0_u: Option<String>,
    #[serde(default)]
    k1_u: Option<String>,
    #[serde(default)]
    k0_a: Option<String>,
    #[serde(default)]
    k1_a: Option<String>,
    /// Published table entries that disagree with the formula; reported as
    /// flagged mismatches instead of failures.
    #[serde(default)]
    k1_a_table: Option<String>,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct ExpectedLimit {
    file: String,
    name: String,
    expect: String,
}

pub fn corpus_dir() -> PathBuf {
    if let Ok(dir) = std::env::var("TILEKT_CORPUS_DIR") {
        return PathBuf::from(dir);
    }
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub struct CorpusRow {
    pub name: String,
    pub checks: Vec<(String, bool)>,
    pub flags: Vec<String>,
}

impl CorpusRow {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

fn check_group(
    checks: &mut Vec<(String, bool)>,
    what: &str,
    computed: Option<&GroupExpression>,
    expected: &Option<String>,
) {
    let Some(expected) = expected else { return };
    let ok = match (computed, parse_group_expression(expected)) {
        (Some(g), Ok(e)) => expressions_match(g, &e),
        _ => false,
    };
    let computed_str = computed
        .map(|g| g.canonical())
        .unwrap_or_else(|| "(none)".into());
    checks.push((format!("{what}: {computed_str} vs {expected}"), ok));
}

fn run_corpus_tiling(dir: &Path, exp: &ExpectedTiling, spec: &JobSpec) -> CorpusRow {
    let mut checks = Vec::new();
    let mut flags = Vec::new();
    let path = dir.join(&exp.file);
    let report = read_input(&path)
        .and_then(|text| parse_document(&text))
        .and_then(|doc| {
            let mut spec = spec.clone();
            spec.route = Route::Both;
            analyze_document(&doc, &exp.name, &spec)
        });
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            checks.push((format!("pipeline: {}", e.message()), false));
            return CorpusRow {
                name: exp.name.clone(),
                checks,
                flags,
            };
        }
    };
    if let Some((sv, se, sf)) = exp.counts {
        let got = (
            report.cells.vertices,
            report.cells.edges,
            report.cells.faces,
        );
        checks.push((
            format!("cells: {:?} vs {:?}", got, (sv, se, sf)),
            got == (sv, se, sf),
        ));
    }
    let parse = |dto: &Option<GroupDto>| -> Option<GroupExpression> {
        dto.as_ref()
            .and_then(|g| parse_group_expression(&g.canonical).ok())
    };
    let k0s = parse(&report.ktheory.k0_s);
    let k1s = parse(&report.ktheory.k1_s);
    let k0u = parse(&report.ktheory.k0_u);
    let k1u = parse(&report.ktheory.k1_u);
    let k0a = parse(&report.ktheory.k0_a);
    let k1a = parse(&report.ktheory.k1_a);
    let h0s = parse_group_expression(&report.stable.h0.canonical).ok();

    check_group(&mut checks, "H0_S", h0s.as_ref(), &exp.h0_s);
    check_group(&mut checks, "K0(S)", k0s.as_ref(), &exp.k0_s);
    check_group(&mut checks, "K1(S)", k1s.as_ref(), &exp.k1_s);
    check_group(&mut checks, "K0(U)", k0u.as_ref(), &exp.k0_u);
    check_group(&mut checks, "K1(U)", k1u.as_ref(), &exp.k1_u);
    check_group(&mut checks, "K0(A)", k0a.as_ref(), &exp.k0_a);
    check_group(&mut checks, "K1(A)", k1a.as_ref(), &exp.k1_a);

    if let Some(table_value) = &exp.k1_a_table {
        let formula = k1a
            .map(|g| g.canonical())
            .unwrap_or_else(|| "(none)".into());
        flags.push(format!(
            "paper-table mismatch: table lists K1(A) = {table_value}, formula gives {formula}"
        ));
    }
    if report.dim == 1 {
        if let Some(c) = &report.collared_k0u {
            checks.push((
                "collared route K0(U) agrees with stable-transpose route".into(),
                c.agrees_with_transpose_route,
            ));
        }
        let agree = match (&k0s, &k0u) {
            (Some(a), Some(b)) => expressions_match(a, b),
            _ => false,
        };
        checks.push(("K0(S) = K0(U)".into(), agree));
    }
    checks.push(("torsion placement".into(), report.torsion_placement.ok));
    checks.push(("UCT finite level".into(), report.uct_finite_level.ok));
    CorpusRow {
        name: exp.name.clone(),
        checks,
        flags,
    }
}

fn run_corpus_limit(dir: &Path, exp: &ExpectedLimit, spec: &JobSpec) -> CorpusRow {
    let mut checks = Vec::new();
    let opts = LimitOptions { kmax: spec.kmax };
    let outcome = read_input(&dir.join(&exp.file))
        .and_then(|text| parse_document(&text))
        .and_then(|doc| match doc {
            Document::DirectLimit {
                matrix,
                torsion,
                free_rank,
            } => {
                if torsion.is_empty() {
                    Ok(limit_free_traced(&matrix, opts).0)
                } else {
                    let free =
                        free_rank.unwrap_or_else(|| matrix.rows().saturating_sub(torsion.len()));
                    let group = PresentedGroup::from_parts(torsion, free);
                    limit_presented_traced(&matrix, &group, opts)
                        .map(|(e, _)| e)
                        .map_err(|e| CliError::Validation(e.to_string()))
                }
            }
            _ => input_err("limit fixtures must be direct_limit documents"),
        });
    match outcome {
        Ok(expr) => {
            let ok = parse_group_expression(&exp.expect)
                .map(|e| expressions_match(&expr, &e))
                .unwrap_or(false);
            checks.push((format!("{} vs {}", expr.canonical(), exp.expect), ok));
        }
        Err(e) => checks.push((format!("pipeline: {}", e.message()), false)),
    }
    CorpusRow {
        name: exp.name.clone(),
        checks,
        flags: Vec::new(),
    }
}

/// Runs every corpus row and returns them in deterministic order; rows are
/// independent pure jobs evaluated on worker threads.
pub fn run_corpus(spec: &JobSpec) -> Result<Vec<CorpusRow>, CliError> {
    let dir = corpus_dir();
    let expected_path = dir.join("expected.json");
    let expected: ExpectedFile = serde_json::from_str(&read_input(&expected_path)?)
        .map_err(|e| CliError::Input(format!("bad expected.json: {e}")))?;

    let mut rows: Vec<CorpusRow> = Vec::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for exp in &expected.tilings {
            let dir = dir.clone();
            handles.push(scope.spawn(move || run_corpus_tiling(&dir, exp, spec)));
        }
        for exp in &expected.limits {
            let dir = dir.clone();
            handles.push(scope.spawn(move || run_corpus_limit(&dir, exp, spec)));
        }
        for h in handles {
            rows.push(h.join().expect("corpus worker panicked"));
        }
    });
    Ok(rows)
}

fn cmd_corpus(spec: &JobSpec) -> Result<String, CliError> {
    let rows = run_corpus(spec)?;
    let mut out = String::new();
    let mut failures = 0usize;
    for row in &rows {
        let status = if row.ok() { "pass" } else { "FAIL" };
        if !row.ok() {
            failures += 1;
        }
        let _ = writeln!(out, "[{status}] {}", row.name);
        for (check, ok) in &row.checks {
            if !ok {
                let _ = writeln!(out, "       mismatch: {check}");
            }
        }
        for flag in &row.flags {
            let _ = writeln!(out, "       flagged: {flag}");
        }
    }
    let _ = writeln!(
        out,
        "{} of {} corpus rows pass",
        rows.len() - failures,
        rows.len()
    );
    if failures > 0 {
        Err(CliError::Validation(out.trim_end().to_string()))
    } else {
        Ok(out.trim_end().to_string())
    }
}
