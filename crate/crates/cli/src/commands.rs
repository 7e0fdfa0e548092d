use std::fs;
use std::io::{self, Write};

use num_complex::Complex64;
use num_rational::BigRational;

use qes_core::asymptotic::{asymptotic_spectrum, multiplets};
use qes_core::magyari::{kernel_of, MagyariSystem};
use qes_core::model::{d_coupling, format_rational, internal_from_model, model_from_internal, parse_rational, Ell, InternalParameters, ModelParameters};
use qes_core::oracle::{ode_certificate, rescaled_root_scan, MAX_SCAN_N};
use qes_core::scalar::{Mp128, Mp256, Real};
use qes_core::solver::{solve_all, sweep, SolveReport, Strategy, SweepRecord};
use qes_core::QesSolution;

use crate::args::{AsymptoticArgs, Couplings, Format, SolveArgs, StrategyArg, SweepArgs, VerifyArgs};
use crate::record::*;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_EMPTY: u8 = 2;
pub const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Debug)]
pub struct CliError(pub String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

type Outcome = std::result::Result<u8, CliError>;

fn argv() -> Vec<String> {
    std::env::args().collect()
}

fn rat(flag: &str, text: &str) -> std::result::Result<BigRational, CliError> {
    parse_rational(text).map_err(|e| CliError(format!("--{flag}: {e}")))
}

fn rat_or_zero(flag: &str, text: &Option<String>) -> std::result::Result<BigRational, CliError> {
    text.as_deref().map_or(Ok(BigRational::from_integer(0.into())), |t| rat(flag, t))
}

fn precision_checked(bits: u32) -> std::result::Result<u32, CliError> {
    match bits {
        64 | 128 | 256 => Ok(bits),
        other => Err(CliError(format!("--precision must be 64, 128 or 256, got {other}"))),
    }
}

/// Internal and model parameters from whichever convention the flags used.
pub fn resolve(n: usize, c: &Couplings) -> std::result::Result<(InternalParameters, ModelParameters), CliError> {
    let model_mode = c.b.is_some() || c.c.is_some() || c.g.is_some() || c.l.is_some();
    if model_mode {
        let model = ModelParameters::qes(rat_or_zero("B", &c.b)?, rat_or_zero("C", &c.c)?, rat_or_zero("G", &c.g)?, rat_or_zero("L", &c.l)?, n)?;
        let internal = internal_from_model(&model)?;
        return Ok((internal, model));
    }
    let Some(ell) = &c.ell else {
        return Err(CliError("give --ell (with optional --beta, --gamma) or the model couplings --B, --C, --G, --L".into()));
    };
    let ell: Ell = ell.parse().map_err(|e| CliError(format!("--ell: {e}")))?;
    let internal = InternalParameters::new(rat_or_zero("beta", &c.beta)?, rat_or_zero("gamma", &c.gamma)?, ell);
    let model = model_from_internal(&internal, BigRational::from_integer(0.into()), n);
    Ok((internal, model))
}

fn d_value(n: usize, p: &InternalParameters) -> f64 {
    d_coupling(p.ell.to_f64(), ratio_f64(&p.beta), ratio_f64(&p.gamma), n)
}

fn ratio_f64(r: &BigRational) -> f64 {
    f64::from_ratio(r)
}

fn parameters_record(n: usize, internal: &InternalParameters, model: &ModelParameters) -> Parameters {
    let d = match internal.ell.as_rational() {
        Some(_) => format_rational(&model.d),
        None => num(d_value(n, internal)),
    };
    Parameters {
        n,
        internal: Internal {
            beta: format_rational(&internal.beta),
            gamma: format_rational(&internal.gamma),
            ell: internal.ell.to_string(),
        },
        model: Model {
            b: format_rational(&model.b),
            c: format_rational(&model.c),
            d,
            g: format_rational(&model.g),
            l: format_rational(&model.l),
        },
    }
}

fn solution_record(s: &QesSolution, d: f64) -> SolutionRecord {
    SolutionRecord {
        e_re: s.energy.re,
        e_im: s.energy.im,
        f_re: s.charge.re,
        f_im: s.charge.im,
        d,
        omega: s.omega.iter().map(|w| [w.re, w.im]).collect(),
        residual_norm: s.residual_norm,
        real: s.is_real(),
        branch: s.branch,
        method: s.method.tag().to_string(),
        precision_bits: s.precision_bits,
    }
}

fn solve_at<T: Real>(n: usize, p: &InternalParameters, strategy: Strategy) -> qes_core::Result<SolveReport> {
    let sys = MagyariSystem::new(n, p.ell.to_real::<T>(), T::from_ratio(&p.beta), T::from_ratio(&p.gamma));
    solve_all(&sys, strategy)
}

fn emit_json<S: serde::Serialize>(value: &S) -> std::result::Result<(), CliError> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn emit_csv(header: Vec<String>, rows: Vec<Vec<String>>, footer: Option<String>) -> std::result::Result<(), CliError> {
    let stdout = io::stdout();
    {
        let mut w = csv::WriterBuilder::new().flexible(false).from_writer(stdout.lock());
        w.write_record(&header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
    }
    if let Some(f) = footer {
        writeln!(stdout.lock(), "# {f}")?;
    }
    Ok(())
}

pub fn solve(a: &SolveArgs) -> Outcome {
    let bits = precision_checked(a.precision)?;
    let (internal, model) = resolve(a.n, &a.couplings)?;
    let strategy = match a.strategy {
        StrategyArg::Continuation => Strategy::Continuation,
        StrategyArg::Scan => Strategy::Scan,
    };
    let report = match bits {
        64 => solve_at::<f64>(a.n, &internal, strategy)?,
        128 => solve_at::<Mp128>(a.n, &internal, strategy)?,
        _ => solve_at::<Mp256>(a.n, &internal, strategy)?,
    };
    if report.escalated > 0 {
        eprintln!("note: {} solution(s) needed 128-bit polishing; rerun with --precision 128 to work there throughout", report.escalated);
    }
    if report.lost > 0 {
        eprintln!("note: {} of {} continuation paths did not reach an accepted solution", report.lost, report.paths);
    }
    let d = d_value(a.n, &internal);
    let solutions: Vec<SolutionRecord> = report
        .solutions
        .iter()
        .filter(|s| !a.real_only || s.is_real())
        .map(|s| solution_record(s, d))
        .collect();
    let record = SolveRecord {
        schema_version: SCHEMA_VERSION.into(),
        command: argv(),
        parameters: parameters_record(a.n, &internal, &model),
        solutions,
        diagnostics: SolveDiagnostics {
            strategy: strategy.tag().into(),
            paths: report.paths,
            lost: report.lost,
            companions: report.companions,
            escalated: report.escalated,
        },
    };
    match a.format {
        Format::Json => emit_json(&record)?,
        Format::Csv => emit_csv(
            solution_csv_header(a.n + 1),
            record.solutions.iter().map(solution_csv_row).collect(),
            None,
        )?,
    }
    Ok(if record.solutions.is_empty() { EXIT_EMPTY } else { EXIT_OK })
}

pub fn asymptotic(a: &AsymptoticArgs) -> Outcome {
    let beta = ratio_f64(&rat("beta", &a.beta)?);
    let gamma = ratio_f64(&rat("gamma", &a.gamma)?);
    let ell = match &a.ell {
        Some(t) => Some(t.parse::<Ell>().map_err(|e| CliError(format!("--ell: {e}")))?),
        None => None,
    };
    let mut records = Vec::new();
    for m in multiplets(a.n)? {
        let (e, f) = match &ell {
            Some(l) => {
                let (e, f) = asymptotic_spectrum(a.n, m.k, l.to_f64(), beta, gamma)?;
                (Some(e), Some(f))
            }
            None => (None, None),
        };
        records.push(MultipletRecord {
            k: m.k,
            t: m.t_k,
            h: m.h.iter().map(format_rational).collect(),
            e,
            f,
        });
    }
    let root_scan = if a.n <= MAX_SCAN_N {
        rescaled_root_scan(a.n)?.integer_roots().map(|mut r| {
            r.dedup();
            r
        })
    } else {
        None
    };
    let record = AsymptoticRecord {
        schema_version: SCHEMA_VERSION.into(),
        command: argv(),
        n: a.n,
        ell: ell.map(|l| l.to_string()),
        beta: a.beta.clone(),
        gamma: a.gamma.clone(),
        multiplets: records,
        root_scan,
    };
    match a.format {
        Format::Json => emit_json(&record)?,
        Format::Csv => {
            let mut header: Vec<String> = ["k", "t", "E", "F"].iter().map(|s| s.to_string()).collect();
            header.extend((0..=a.n).map(|j| format!("h{j}")));
            let rows = record
                .multiplets
                .iter()
                .map(|m| {
                    let mut r = vec![m.k.to_string(), m.t.to_string(), opt(m.e), opt(m.f)];
                    r.extend(m.h.iter().cloned());
                    r
                })
                .collect();
            emit_csv(header, rows, None)?
        }
    }
    Ok(EXIT_OK)
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// `lo:hi:points` to a geometric grid.
pub fn parse_range(text: &str) -> std::result::Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, points] = parts.as_slice() else {
        return Err(CliError(format!("--ell-range expects lo:hi:points, got {text:?}")));
    };
    let lo = ratio_f64(&rat("ell-range", lo)?);
    let hi = ratio_f64(&rat("ell-range", hi)?);
    let points: usize = points
        .parse()
        .map_err(|_| CliError(format!("--ell-range: point count {points:?} is not a positive integer")))?;
    if points == 0 || !(lo > 0.0) || hi < lo || (points > 1 && hi == lo) {
        return Err(CliError(format!("--ell-range needs 0 < lo < hi and points >= 1, got {text:?}")));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let ratio = (hi / lo).ln();
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                hi
            } else {
                lo * (ratio * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect())
}

fn sweep_at<T: Real>(beta: &BigRational, gamma: &BigRational, n: usize, k: usize, grid: &[f64]) -> qes_core::Result<SweepRecord> {
    sweep(&T::from_ratio(beta), &T::from_ratio(gamma), n, k, grid)
}

pub fn sweep_cmd(a: &SweepArgs) -> Outcome {
    let bits = precision_checked(a.precision)?;
    let grid = parse_range(&a.ell_range)?;
    let (beta, gamma) = (rat("beta", &a.beta)?, rat("gamma", &a.gamma)?);
    let rec = match bits {
        64 => sweep_at::<f64>(&beta, &gamma, a.n, a.k, &grid)?,
        128 => sweep_at::<Mp128>(&beta, &gamma, a.n, a.k, &grid)?,
        _ => sweep_at::<Mp256>(&beta, &gamma, a.n, a.k, &grid)?,
    };
    if rec.incomplete {
        eprintln!("note: branch lost below l = {}", rec.points.first().map_or(f64::INFINITY, |p| p.ell));
    }
    let out = SweepOutput {
        schema_version: SCHEMA_VERSION.into(),
        command: argv(),
        n: a.n,
        k: a.k,
        beta: format_rational(&beta),
        gamma: format_rational(&gamma),
        precision_bits: bits,
        points: rec
            .points
            .iter()
            .map(|p| SweepPointRecord {
                ell: p.ell,
                e_re: p.solution.energy.re,
                e_im: p.solution.energy.im,
                f_re: p.solution.charge.re,
                f_im: p.solution.charge.im,
                s_re: p.s.re,
                s_im: p.s.im,
                t_re: p.t.re,
                t_im: p.t.im,
                residual_norm: p.solution.residual_norm,
            })
            .collect(),
        footer: SweepFooter {
            t_k: rec.t_k,
            exponent_t: rec.exponent_t,
            exponent_s: rec.exponent_s,
            incomplete: rec.incomplete,
        },
    };
    match a.format {
        Format::Json => emit_json(&out)?,
        Format::Csv => emit_csv(
            SWEEP_CSV_HEADER.iter().map(|s| s.to_string()).collect(),
            out.points.iter().map(sweep_csv_row).collect(),
            Some(serde_json::to_string(&out.footer)?),
        )?,
    }
    Ok(if out.points.is_empty() { EXIT_EMPTY } else { EXIT_OK })
}

fn check(out: &mut Vec<CheckOutcome>, index: usize, name: &str, value: f64, passed: bool) {
    out.push(CheckOutcome {
        index,
        check: name.into(),
        passed,
        value,
    });
}

fn sigma_ratio(k: &qes_core::magyari::Kernel<f64>) -> f64 {
    let sv = &k.singular_values;
    match (sv.first(), sv.last()) {
        (Some(&top), Some(&low)) if top > 0.0 => low / top,
        _ => 0.0,
    }
}

pub fn verify_record(record: &SolveRecord, tol: f64) -> std::result::Result<Vec<CheckOutcome>, CliError> {
    if record.schema_version != SCHEMA_VERSION {
        return Err(CliError(format!("unsupported schema_version {:?}", record.schema_version)));
    }
    let p = &record.parameters;
    let ell: Ell = p.internal.ell.parse()?;
    let (beta, gamma) = (ratio_f64(&parse_rational(&p.internal.beta)?), ratio_f64(&parse_rational(&p.internal.gamma)?));
    let n = p.n;
    let sys = MagyariSystem::new(n, ell.to_f64(), beta, gamma);
    let d_expected = d_coupling(ell.to_f64(), beta, gamma, n);
    let kernel_tol = 1e-8;
    let mut out = Vec::new();
    for (i, s) in record.solutions.iter().enumerate() {
        let e = Complex64::new(s.e_re, s.e_im);
        let f = Complex64::new(s.f_re, s.f_im);
        let omega: Vec<Complex64> = s.omega.iter().map(|w| Complex64::new(w[0], w[1])).collect();
        if omega.len() != n + 1 {
            check(&mut out, i, "omega-length", omega.len() as f64, false);
            continue;
        }
        let d_err = (s.d - d_expected).abs() / (1.0 + d_expected.abs());
        check(&mut out, i, "D", d_err, d_err <= 1e-12);
        let res = sys.residual_report(&e, &f, &omega)?.backward_error;
        check(&mut out, i, "residual", res, res <= tol);
        let k = sys.pivoted_kernel(&e, &f)?;
        let r = sigma_ratio(&k);
        check(&mut out, i, "pivoted-kernel", r, r <= kernel_tol);
        let cert = ode_certificate(&sys, &e, &f, &omega);
        let rel = if cert.scale > 0.0 { cert.max_abs_coefficient / cert.scale } else { cert.max_abs_coefficient };
        check(&mut out, i, "ode-certificate", rel, cert.passes(tol));
        let a = sys.assemble(&e, &f);
        let cols: Vec<usize> = (0..=n).collect();
        for (name, rows) in [("top-minor", (0..=n).collect::<Vec<usize>>()), ("bottom-minor", (1..=n + 1).collect())] {
            let r = sigma_ratio(&kernel_of(&a.select(&rows, &cols), kernel_tol)?);
            check(&mut out, i, name, r, r <= kernel_tol);
        }
    }
    Ok(out)
}

pub fn verify(a: &VerifyArgs) -> Outcome {
    let text = fs::read_to_string(&a.path).map_err(|e| CliError(format!("{}: {e}", a.path.display())))?;
    let record: SolveRecord = serde_json::from_str(&text)
        .map_err(|e| CliError(format!("{}: line {}, column {}: {e}", a.path.display(), e.line(), e.column())))?;
    let checks = verify_record(&record, a.tol)?;
    let passed = checks.iter().all(|c| c.passed);
    for c in checks.iter().filter(|c| !c.passed) {
        eprintln!("FAIL solution {}: {} ({:e})", c.index, c.check, c.value);
    }
    emit_json(&VerifyReport {
        schema_version: SCHEMA_VERSION.into(),
        source: a.path.display().to_string(),
        checks,
        passed,
    })?;
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}
