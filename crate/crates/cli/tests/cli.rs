use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qframe::{Distribution, ExtendedReal, RunReport};
use tempfile::TempDir;

fn qframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qframe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn write(&self, name: &str, contents: &str) -> String {
        let p = self.0.path().join(name);
        fs::write(&p, contents).unwrap();
        p.to_str().unwrap().to_string()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn read_report(p: &Path) -> RunReport {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn compute_entropy_of_fair_coin() {
    let f = Files::new();
    let x = f.write("x.json", r#"{"probs": [0.5, 0.5]}"#);
    let out = qframe(&["compute", "--x", &x, "--q", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "0.5\n");
}

#[test]
fn compute_classical_divergence_of_identical_pair_is_zero() {
    let f = Files::new();
    let x = f.write(
        "x.json",
        r#"{"labels": ["a", "b", "c"], "probs": [0.2, 0.3, 0.5]}"#,
    );
    let out = qframe(&[
        "compute",
        "--x",
        &x,
        "--y",
        &x,
        "--q",
        "1",
        "--quantity",
        "divergence",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "0\n");
}

#[test]
fn compute_reads_csv() {
    let f = Files::new();
    let x = f.write("x.csv", "label,prob\nheads,0.5\ntails,0.5\n");
    let out = qframe(&["compute", "--x", &x, "--q", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out).trim().parse::<f64>().unwrap(),
        std::f64::consts::LN_2
    );
}

#[test]
fn compute_prints_infinite_complexity() {
    let f = Files::new();
    let x = f.write("x.json", r#"{"probs": [0.5, 0.5]}"#);
    let y = f.write("y.json", r#"{"probs": [1, 0]}"#);
    let report = f.path("r.json");
    let out = qframe(&[
        "compute",
        "--x",
        &x,
        "--y",
        &y,
        "--q",
        "0.5",
        "--quantity",
        "complexity",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "+inf\n");
    let text = fs::read_to_string(&report).unwrap();
    assert!(text.contains(r#""value": "+inf""#));
    assert_eq!(read_report(&report).results[0].value, ExtendedReal::PosInf);
}

#[test]
fn domain_errors_exit_three() {
    let f = Files::new();
    let x = f.write("x.json", r#"{"probs": [0.5, 0.5, 0]}"#);
    let u = f.write("u.json", r#"{"probs": [0.25, 0.25, 0.5]}"#);
    let ab = f.write(
        "ab.json",
        r#"{"labels": ["a", "b", "c"], "probs": [0.25, 0.25, 0.5]}"#,
    );
    let two = f.write("two.json", r#"{"probs": [0.5, 0.5]}"#);

    let out = qframe(&["compute", "--x", &x, "--q", "-1"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("--q"));
    assert_eq!(code(&qframe(&["compute", "--x", &x, "--q", "nan"])), 3);

    // the belief misses the truth's support at q = 0
    let out = qframe(&[
        "compute",
        "--x",
        &u,
        "--y",
        &x,
        "--q",
        "0",
        "--quantity",
        "divergence",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("--y"));

    for y in [&ab, &two] {
        let out = qframe(&[
            "compute",
            "--x",
            &x,
            "--y",
            y,
            "--q",
            "1",
            "--quantity",
            "complexity",
        ]);
        assert_eq!(code(&out), 3, "{}", stderr(&out));
        assert!(stderr(&out).contains("alphabet mismatch"));
    }
}

#[test]
fn q_zero_divergence_counts_support_gap() {
    let f = Files::new();
    let x = f.write("x.json", r#"{"probs": [0.5, 0.5, 0]}"#);
    let u = f.write("u.json", r#"{"probs": [0.25, 0.25, 0.5]}"#);
    let out = qframe(&[
        "compute",
        "--x",
        &x,
        "--y",
        &u,
        "--q",
        "0",
        "--quantity",
        "divergence",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "1\n");
}

#[test]
fn malformed_files_exit_two() {
    let f = Files::new();
    let cases = [
        ("sum.json", r#"{"probs": [0.5, 0.6]}"#, "probs"),
        ("neg.json", r#"{"probs": [1.5, -0.5]}"#, "probs"),
        ("field.json", r#"{"prob": [0.5, 0.5]}"#, "prob"),
        ("syntax.json", r#"{"probs": [0.5, 0.5"#, "EOF"),
        (
            "labels.json",
            r#"{"labels": ["a"], "probs": [0.5, 0.5]}"#,
            "labels",
        ),
        (
            "dup.json",
            r#"{"labels": ["a", "a"], "probs": [0.5, 0.5]}"#,
            "labels",
        ),
        ("header.csv", "name,p\na,1\n", "header"),
        ("value.csv", "label,prob\na,half\nb,0.5\n", "line 2"),
        ("empty.json", r#"{"probs": []}"#, "at least one symbol"),
    ];
    for (name, body, needle) in cases {
        let x = f.write(name, body);
        let out = qframe(&["compute", "--x", &x, "--q", "1"]);
        assert_eq!(code(&out), 2, "{name}: {}", stderr(&out));
        assert!(stderr(&out).contains(needle), "{name}: {}", stderr(&out));
    }
    let missing = f.path("missing.json");
    assert_eq!(
        code(&qframe(&[
            "compute",
            "--x",
            missing.to_str().unwrap(),
            "--q",
            "1"
        ])),
        2
    );
}

#[test]
fn missing_belief_and_bad_usage_exit_two() {
    let f = Files::new();
    let x = f.write("x.json", r#"{"probs": [0.5, 0.5]}"#);
    let out = qframe(&["compute", "--x", &x, "--q", "1", "--quantity", "complexity"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--y"));
    assert_eq!(code(&qframe(&["frobnicate"])), 2);
    assert_eq!(code(&qframe(&["compute", "--x", &x])), 2);
    assert_eq!(code(&qframe(&["verify", "--jobs", "0"])), 2);
}

#[test]
fn normalize_flag_rescales_weights() {
    let f = Files::new();
    let x = f.write("x.json", r#"{"probs": [1, 1]}"#);
    assert_eq!(code(&qframe(&["compute", "--x", &x, "--q", "2"])), 2);
    let out = qframe(&["compute", "--x", &x, "--q", "2", "--normalize"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "0.5\n");
}

#[test]
fn sweep_rows_follow_closed_forms() {
    let f = Files::new();
    let x = f.write("x.json", r#"{"probs": [0.5, 0.5]}"#);
    let out = qframe(&[
        "sweep", "--x", &x, "--q-min", "0", "--q-max", "2", "--steps", "3",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        format!(
            "q,entropy,complexity,divergence\n0,1,,\n1,{},,\n2,0.5,,\n",
            std::f64::consts::LN_2
        )
    );

    let out = qframe(&[
        "sweep", "--x", &x, "--q-min", "0.5", "--q-max", "2", "--steps", "1",
    ]);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 2);
    let cells: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(cells[0], "0.5");
    // ln_{1/2}(2) = 2(√2 − 1)
    assert!((cells[1].parse::<f64>().unwrap() - 2.0 * (2f64.sqrt() - 1.0)).abs() <= 1e-15);
    assert_eq!(&cells[2..], ["", ""]);
}

#[test]
fn sweep_with_belief_and_infinity() {
    let f = Files::new();
    let x = f.write("x.json", r#"{"probs": [0.5, 0.5]}"#);
    let y = f.write("y.json", r#"{"probs": [1, 0]}"#);
    let out = qframe(&[
        "sweep", "--x", &x, "--y", &y, "--q-min", "0.5", "--q-max", "2", "--steps", "2",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert!(rows[1].starts_with("0.5,0.82842712474619") && rows[1].ends_with(",inf,inf"));
    // q = 2: κ(y) = 1 − y and π = 2x − y give Φ = 0·0 + 1·1
    assert_eq!(rows[2], "2,0.5,1,0.5");

    // q = 0 with the support missed is a domain error
    let out = qframe(&[
        "sweep", "--x", &x, "--y", &y, "--q-min", "0", "--q-max", "1", "--steps", "2",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn sweep_argument_errors_exit_three() {
    let f = Files::new();
    let x = f.write("x.json", r#"{"probs": [0.5, 0.5]}"#);
    for args in [["2", "1", "3"], ["0", "1", "0"], ["-1", "1", "3"]] {
        let out = qframe(&[
            "sweep", "--x", &x, "--q-min", args[0], "--q-max", args[1], "--steps", args[2],
        ]);
        assert_eq!(code(&out), 3, "{args:?}");
    }
}

#[test]
fn sweep_is_independent_of_jobs() {
    let f = Files::new();
    let x = f.write("x.json", r#"{"probs": [0.1, 0.2, 0.3, 0.4]}"#);
    let y = f.write("y.json", r#"{"probs": [0.25, 0.25, 0.25, 0.25]}"#);
    let run = |jobs: &str, report: &Path| {
        let out = qframe(&[
            "sweep",
            "--x",
            &x,
            "--y",
            &y,
            "--q-min",
            "0",
            "--q-max",
            "5",
            "--steps",
            "101",
            "--jobs",
            jobs,
            "--report",
            report.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        (out.stdout, fs::read(report).unwrap())
    };
    let (a, ra) = run("1", &f.path("a.json"));
    let (b, rb) = run("4", &f.path("b.json"));
    assert_eq!(a, b);
    assert_eq!(ra, rb);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 102);
}

#[test]
fn verify_consistency_reports_q2_witness() {
    let f = Files::new();
    let report = f.path("r.json");
    let out = qframe(&[
        "verify",
        "--suite",
        "consistency",
        "--seed",
        "42",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let r = read_report(&report);
    assert_eq!(r.seed, 42);
    assert!(r.all_passed());
    let w = r
        .suite_outcomes
        .iter()
        .flat_map(|o| &o.witnesses)
        .find(|w| w.q == Some(2.0))
        .expect("q = 2 witness");
    assert_eq!(w.offending_value, Some(-0.5));
    assert_eq!(w.x.as_deref(), Some(&[0.0, 1.0][..]));
    assert_eq!(w.y.as_deref(), Some(&[0.5, 0.5][..]));
}

#[test]
fn verify_variational_small_alphabet() {
    let out = qframe(&[
        "verify",
        "--suite",
        "variational",
        "--seed",
        "7",
        "--n-max",
        "3",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    for check in [
        "solver_oracle_value",
        "solver_oracle_minimizer",
        "oracle_minimizer_near_truth",
    ] {
        assert!(text.contains(&format!("PASS {check} ")), "{check}");
    }
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_rejects_large_alphabets() {
    let out = qframe(&["verify", "--n-max", "17"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("--n-max"));
    assert_eq!(code(&qframe(&["verify", "--n-max", "1"])), 3);
}

#[test]
fn verify_reports_ignore_jobs() {
    let f = Files::new();
    let run = |jobs: &str, name: &str| {
        let p = f.path(name);
        let out = qframe(&[
            "verify",
            "--suite",
            "quantities",
            "--seed",
            "5",
            "--n-max",
            "6",
            "--jobs",
            jobs,
            "--report",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        (out.stdout, fs::read(p).unwrap())
    };
    assert_eq!(run("1", "a.json"), run("3", "b.json"));
}

#[test]
fn minimize_recovers_truth() {
    let f = Files::new();
    let x = f.write("x.json", r#"{"labels": ["a", "b"], "probs": [0.3, 0.7]}"#);
    let report = f.path("r.json");
    let out = qframe(&[
        "minimize",
        "--x",
        &x,
        "--q",
        "2",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let field = |name: &str| -> String {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{name} ")))
            .unwrap()
            .to_string()
    };
    assert!((field("value").parse::<f64>().unwrap() - 0.42).abs() <= 1e-9);
    assert!(field("gap").parse::<f64>().unwrap().abs() <= 1e-9);
    assert_eq!(field("converged"), "true");
    assert_eq!(field("degenerate_minimum"), "false");
    assert!(field("minimizer").starts_with("a="));

    let r = read_report(&report);
    let rec = &r.results[0];
    assert_eq!(rec.quantity, "minimum_value");
    assert!(rec.residuals["gap"].abs() <= 1e-9);
    assert!(rec.flags.contains(&"converged".to_string()));
    let p = rec.point.as_ref().unwrap();
    assert!((p[0] - 0.3).abs() <= 1e-6 && (p[1] - 0.7).abs() <= 1e-6);
}

#[test]
fn minimize_point_mass_and_degenerate_case() {
    let f = Files::new();
    let pm = f.write("pm.json", r#"{"probs": [0, 1, 0]}"#);
    let out = qframe(&["minimize", "--x", &pm, "--q", "1.5"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("minimizer s0=0 s1=1 s2=0\nvalue 0\n"));

    let half = f.write("half.json", r#"{"probs": [0.5, 0.5, 0]}"#);
    let out = qframe(&["minimize", "--x", &half, "--q", "0"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("value 1\n"));
    assert!(text.contains("degenerate_minimum true\n"));
}

#[test]
fn minimize_non_convergence_exits_four() {
    let f = Files::new();
    let x = f.write("x.json", r#"{"probs": [0.1, 0.2, 0.7]}"#);
    let report = f.path("r.json");
    let out = qframe(&[
        "minimize",
        "--x",
        &x,
        "--q",
        "0.5",
        "--max-iterations",
        "1",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).contains("converged false"));
    assert!(stderr(&out).contains("did not converge"));
    let r = read_report(&report);
    assert!(r.results[0].flags.contains(&"not_converged".to_string()));
}

#[test]
fn minimize_rejects_bad_tolerance() {
    let f = Files::new();
    let x = f.write("x.json", r#"{"probs": [0.5, 0.5]}"#);
    assert_eq!(
        code(&qframe(&[
            "minimize",
            "--x",
            &x,
            "--q",
            "1",
            "--tolerance",
            "0"
        ])),
        3
    );
    assert_eq!(code(&qframe(&["minimize", "--x", &x, "--q", "-2"])), 3);
}

#[test]
fn minimizer_file_round_trips() {
    let f = Files::new();
    let x = f.write(
        "x.json",
        r#"{"labels": ["a", "b", "c"], "probs": [0.15, 0.35, 0.5]}"#,
    );
    let out_path = f.path("min.json");
    let out = qframe(&[
        "minimize",
        "--x",
        &x,
        "--q",
        "0.5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let written: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    let probs: Vec<f64> = serde_json::from_value(written["probs"].clone()).unwrap();
    let reread = Distribution::new(
        qframe::Alphabet::new(["a", "b", "c"]).unwrap(),
        &probs,
        false,
    )
    .unwrap();
    for (a, b) in probs.iter().zip(reread.probs()) {
        assert!((a - b).abs() <= f64::EPSILON * a.abs(), "{a} vs {b}");
    }

    // the written file is itself a valid input
    let again = qframe(&["compute", "--x", out_path.to_str().unwrap(), "--q", "0.5"]);
    assert_eq!(code(&again), 0);
}

#[test]
fn reports_round_trip_and_repeat() {
    let f = Files::new();
    let x = f.write("x.json", r#"{"probs": [0.2, 0.8]}"#);
    let y = f.write("y.json", r#"{"probs": [0.6, 0.4]}"#);
    let a = f.path("a.json");
    let b = f.path("b.json");
    for p in [&a, &b] {
        let out = qframe(&[
            "compute",
            "--x",
            &x,
            "--y",
            &y,
            "--q",
            "0.7",
            "--quantity",
            "divergence",
            "--report",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());

    let r = read_report(&a);
    assert_eq!(r.command, "compute --quantity divergence --q 0.7");
    assert_eq!(r.inputs.len(), 2);
    assert_eq!(r.inputs[0].role, "x");
    assert_eq!(r.inputs[0].sha256.len(), 64);
    assert_eq!(r.q_values, vec![0.7]);
    let again = serde_json::to_string_pretty(&r).unwrap() + "\n";
    assert_eq!(again.as_bytes(), &bytes[..]);
}
