//! Output schema, version "1". Numbers are binary64 and serialize with shortest round-trip digits.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Internal {
    pub beta: String,
    pub gamma: String,
    /// Rational, or `sqrt(d)-1/2`.
    pub ell: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Model {
    #[serde(rename = "B")]
    pub b: String,
    #[serde(rename = "C")]
    pub c: String,
    /// Exact when ℓ is rational.
    #[serde(rename = "D")]
    pub d: String,
    #[serde(rename = "G")]
    pub g: String,
    #[serde(rename = "L")]
    pub l: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Parameters {
    #[serde(rename = "N")]
    pub n: usize,
    pub internal: Internal,
    pub model: Model,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    #[serde(rename = "E_re")]
    pub e_re: f64,
    #[serde(rename = "E_im")]
    pub e_im: f64,
    #[serde(rename = "F_re")]
    pub f_re: f64,
    #[serde(rename = "F_im")]
    pub f_im: f64,
    #[serde(rename = "D")]
    pub d: f64,
    /// `[re, im]` pairs, largest entry 1.
    pub omega: Vec<[f64; 2]>,
    pub residual_norm: f64,
    pub real: bool,
    pub branch: Option<usize>,
    pub method: String,
    pub precision_bits: u32,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SolveDiagnostics {
    pub strategy: String,
    pub paths: usize,
    pub lost: usize,
    pub companions: usize,
    pub escalated: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SolveRecord {
    pub schema_version: String,
    pub command: Vec<String>,
    pub parameters: Parameters,
    pub solutions: Vec<SolutionRecord>,
    pub diagnostics: SolveDiagnostics,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct MultipletRecord {
    pub k: usize,
    pub t: i64,
    /// Exact rationals with `h_0 = 1`.
    pub h: Vec<String>,
    /// Leading-order `(E, F)` when ℓ was given.
    #[serde(rename = "E", skip_serializing_if = "Option::is_none", default)]
    pub e: Option<f64>,
    #[serde(rename = "F", skip_serializing_if = "Option::is_none", default)]
    pub f: Option<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct AsymptoticRecord {
    pub schema_version: String,
    pub command: Vec<String>,
    #[serde(rename = "N")]
    pub n: usize,
    pub ell: Option<String>,
    pub beta: String,
    pub gamma: String,
    pub multiplets: Vec<MultipletRecord>,
    /// Integer roots of the gcd of all maximal minors on `s = t`, when computed.
    pub root_scan: Option<Vec<i64>>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SweepPointRecord {
    pub ell: f64,
    #[serde(rename = "E_re")]
    pub e_re: f64,
    #[serde(rename = "E_im")]
    pub e_im: f64,
    #[serde(rename = "F_re")]
    pub f_re: f64,
    #[serde(rename = "F_im")]
    pub f_im: f64,
    pub s_re: f64,
    pub s_im: f64,
    pub t_re: f64,
    pub t_im: f64,
    pub residual_norm: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SweepFooter {
    pub t_k: i64,
    pub exponent_t: Option<f64>,
    pub exponent_s: Option<f64>,
    pub incomplete: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub schema_version: String,
    pub command: Vec<String>,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub beta: String,
    pub gamma: String,
    pub precision_bits: u32,
    pub points: Vec<SweepPointRecord>,
    pub footer: SweepFooter,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub index: usize,
    pub check: String,
    pub passed: bool,
    pub value: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub schema_version: String,
    pub source: String,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

/// Same digits as the JSON emission.
pub fn num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| "null".into())
}

pub fn solution_csv_header(n_omega: usize) -> Vec<String> {
    let mut h: Vec<String> = ["E_re", "E_im", "F_re", "F_im", "D", "residual_norm", "real", "branch", "method", "precision_bits"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for j in 0..n_omega {
        h.push(format!("omega{j}_re"));
        h.push(format!("omega{j}_im"));
    }
    h
}

pub fn solution_csv_row(s: &SolutionRecord) -> Vec<String> {
    let mut row = vec![
        num(s.e_re),
        num(s.e_im),
        num(s.f_re),
        num(s.f_im),
        num(s.d),
        num(s.residual_norm),
        s.real.to_string(),
        s.branch.map(|b| b.to_string()).unwrap_or_default(),
        s.method.clone(),
        s.precision_bits.to_string(),
    ];
    for w in &s.omega {
        row.push(num(w[0]));
        row.push(num(w[1]));
    }
    row
}

pub const SWEEP_CSV_HEADER: [&str; 10] = ["ell", "E_re", "E_im", "F_re", "F_im", "s_re", "s_im", "t_re", "t_im", "residual_norm"];

pub fn sweep_csv_row(p: &SweepPointRecord) -> Vec<String> {
    [p.ell, p.e_re, p.e_im, p.f_re, p.f_im, p.s_re, p.s_im, p.t_re, p.t_im, p.residual_norm]
        .iter()
        .map(|v| num(*v))
        .collect()
}
