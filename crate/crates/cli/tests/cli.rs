use std::process::{Command, Output};

use qes_cli::record::{AsymptoticRecord, SolveRecord, SweepOutput, VerifyReport};

fn qes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qes")).args(args).output().expect("run qes")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn solve_json(args: &[&str]) -> (SolveRecord, Output) {
    let mut full = vec!["solve"];
    full.extend_from_slice(args);
    let o = qes(&full);
    let rec = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)));
    (rec, o)
}

#[test]
fn n0_closed_form() {
    let (rec, o) = solve_json(&["--N", "0", "--ell", "3", "--beta", "1", "--gamma", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(rec.schema_version, "1");
    assert_eq!(rec.solutions.len(), 1);
    let s = &rec.solutions[0];
    assert!((s.e_re + 1.0).abs() < 1e-12 && s.e_im.abs() < 1e-12);
    assert!((s.f_re - 12.0).abs() < 1e-12 && s.f_im.abs() < 1e-12);
    // D = 2(ℓ + βγ − N − 1) = 8
    assert_eq!(s.d, 8.0);
    assert_eq!(rec.parameters.model.d, "8");
    assert!(s.real);
}

#[test]
fn zero_ell_gives_zero_charge() {
    let (rec, o) = solve_json(&["--N", "2", "--ell", "0", "--beta", "1/2", "--gamma", "1/3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(rec.solutions.len(), 3);
    for s in &rec.solutions {
        assert!(s.f_re.hypot(s.f_im) < 1e-10 * (1.0 + s.e_re.hypot(s.e_im)));
    }
    let (rec, _) = solve_json(&["--N", "2", "--ell", "0"]);
    assert!(rec.solutions.iter().all(|s| s.f_re.hypot(s.f_im) < 1e-10));
}

#[test]
fn rational_model_couplings() {
    let (rec, o) = solve_json(&["--N", "2", "--g", "3/4", "--L", "0"]);
    assert!(code(&o) == 0 || code(&o) == 2);
    assert_eq!(rec.parameters.internal.ell, "1/2");
    assert_eq!(rec.parameters.model.g, "3/4");
}

#[test]
fn json_round_trip_and_csv_agree() {
    let args = ["--N", "2", "--ell", "5/2", "--beta", "1/2", "--gamma", "1/3"];
    let (rec, o) = solve_json(&args);
    let again: SolveRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
    assert_eq!(again, rec);
    assert_eq!(rec.solutions.len(), 6);
    assert_eq!(code(&o), 0);

    let mut full = vec!["solve"];
    full.extend_from_slice(&args);
    full.extend_from_slice(&["--format", "csv"]);
    let o = qes(&full);
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let header = reader.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), rec.solutions.len());
    for (row, s) in rows.iter().zip(&rec.solutions) {
        let v = |name: &str| row[col(name)].parse::<f64>().unwrap();
        assert_eq!(v("E_re"), s.e_re);
        assert_eq!(v("E_im"), s.e_im);
        assert_eq!(v("F_re"), s.f_re);
        assert_eq!(v("F_im"), s.f_im);
        assert_eq!(v("residual_norm"), s.residual_norm);
        for (j, w) in s.omega.iter().enumerate() {
            assert_eq!(v(&format!("omega{j}_re")), w[0]);
            assert_eq!(v(&format!("omega{j}_im")), w[1]);
        }
    }
}

#[test]
fn solutions_are_sorted_by_branch_then_modulus() {
    let (rec, _) = solve_json(&["--N", "3", "--ell", "5/2", "--beta", "1/2", "--gamma", "1/3"]);
    let key = |s: &qes_cli::record::SolutionRecord| (s.branch.unwrap_or(usize::MAX), s.e_re.hypot(s.e_im));
    for w in rec.solutions.windows(2) {
        let (a, b) = (key(&w[0]), key(&w[1]));
        assert!(a.0 < b.0 || (a.0 == b.0 && a.1 <= b.1 + 1e-12));
    }
}

#[test]
fn real_only_filter() {
    let (all, _) = solve_json(&["--N", "2", "--ell", "5/2", "--beta", "1/2", "--gamma", "1/3"]);
    let (real, _) = solve_json(&["--N", "2", "--ell", "5/2", "--beta", "1/2", "--gamma", "1/3", "--real-only"]);
    assert_eq!(real.solutions.len(), all.solutions.iter().filter(|s| s.real).count());
    assert!(real.solutions.iter().all(|s| s.real));
}

#[test]
fn higher_precision_is_reported() {
    let (rec, o) = solve_json(&["--N", "1", "--ell", "1", "--beta", "1/2", "--gamma", "1/3", "--precision", "128"]);
    assert_eq!(code(&o), 0);
    assert!(rec.solutions.iter().all(|s| s.precision_bits == 128));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["solve", "--N", "2"],
        vec!["solve", "--N", "2", "--ell", "x"],
        vec!["solve", "--N", "2", "--ell", "1", "--precision", "100"],
        vec!["solve", "--N", "2", "--ell", "1", "--G", "1"],
        vec!["sweep", "--N", "2", "--k", "0", "--ell-range", "1e3:1e2:3"],
        vec!["frobnicate"],
    ] {
        let o = qes(&args);
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(o.stdout.is_empty());
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn asymptotic_tables() {
    let rec: AsymptoticRecord = serde_json::from_slice(&qes(&["asymptotic", "--N", "5"]).stdout).unwrap();
    assert_eq!(rec.multiplets.iter().map(|m| m.t).collect::<Vec<_>>(), vec![5, 2, -1]);
    assert_eq!(rec.root_scan, Some(vec![-1, 2, 5]));

    let rec: AsymptoticRecord = serde_json::from_slice(&qes(&["asymptotic", "--N", "2"]).stdout).unwrap();
    assert_eq!(rec.multiplets[0].h, vec!["1", "-2", "1"]);
    assert_eq!(rec.multiplets[1].h, vec!["1", "1", "1"]);

    let rec: AsymptoticRecord = serde_json::from_slice(&qes(&["asymptotic", "--N", "0"]).stdout).unwrap();
    assert_eq!(rec.multiplets.len(), 1);
    assert_eq!((rec.multiplets[0].t, rec.multiplets[0].h.clone()), (0, vec!["1".to_string()]));

    let rec: AsymptoticRecord =
        serde_json::from_slice(&qes(&["asymptotic", "--N", "2", "--ell", "1000", "--beta", "1/2", "--gamma", "1/4"]).stdout).unwrap();
    // E ≈ −2βℓ + 2 t ℓ^{1/3}
    let e0 = rec.multiplets[0].e.unwrap();
    assert!((e0 - (-1000.0 + 2.0 * 2.0 * 10.0)).abs() < 1e-9);
}

#[test]
fn sweep_converges_to_multiplet() {
    let o = qes(&["sweep", "--N", "2", "--k", "0", "--ell-range", "1e2:1e6:9", "--beta", "1/2", "--gamma", "1/3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rec: SweepOutput = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rec.points.len(), 9);
    let d: Vec<f64> = rec.points.iter().map(|p| (p.t_re - 2.0).hypot(p.t_im)).collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    assert!(d[8] < 0.1);
    assert!(rec.footer.exponent_t.is_some());

    let o = qes(&["sweep", "--N", "2", "--k", "0", "--ell-range", "1e2:1e6:9", "--beta", "1/2", "--gamma", "1/3", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let footer = text.lines().last().unwrap();
    assert!(footer.starts_with("# {"));
    let body: String = text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    for (row, p) in rows.iter().zip(&rec.points) {
        assert_eq!(row[0].parse::<f64>().unwrap(), p.ell);
        assert_eq!(row[7].parse::<f64>().unwrap(), p.t_re);
    }
}

#[test]
fn verify_accepts_solver_output_and_rejects_perturbations() {
    let dir = tempfile::tempdir().unwrap();
    let (rec, _) = solve_json(&["--N", "0", "--ell", "3", "--beta", "1", "--gamma", "2"]);
    let good = dir.path().join("good.json");
    std::fs::write(&good, serde_json::to_string_pretty(&rec).unwrap()).unwrap();
    let o = qes(&["verify", good.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: VerifyReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report.passed && !report.checks.is_empty());

    let mut bad = rec.clone();
    bad.solutions[0].e_re += 1e-3;
    let path = dir.path().join("bad.json");
    std::fs::write(&path, serde_json::to_string(&bad).unwrap()).unwrap();
    let o = qes(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL"));

    let (rec, _) = solve_json(&["--N", "3", "--ell", "1", "--beta", "1/2", "--gamma", "1/3"]);
    let path = dir.path().join("n3.json");
    std::fs::write(&path, serde_json::to_string(&rec).unwrap()).unwrap();
    assert_eq!(code(&qes(&["verify", path.to_str().unwrap()])), 0);
}

#[test]
fn verify_reports_positions_on_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"schema_version\": \"1\",\n  oops\n}").unwrap();
    let o = qes(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let o = qes(&["verify", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}
