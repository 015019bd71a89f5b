use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use qframe::verify::report_number;
use qframe::{
    complexity, divergence, entropy, minimize_complexity, run_suite, Distribution, ExtendedReal,
    InitialPoint, QParam, ResultRecord, RunReport, SolverConfig, Suite, SuiteOutcome, VerifyConfig,
};

use crate::args::{ComputeArgs, InitArg, MinimizeArgs, Quantity, SuiteArg, SweepArgs, VerifyArgs};
use crate::error::{CliError, CliResult};
use crate::input::{distribution_json, load, Loaded};
use crate::output::{csv_value, number, value, write_file, write_report};

fn q_param(field: &str, q: f64) -> CliResult<QParam> {
    QParam::new(q).map_err(|e| CliError::domain(field, e))
}

fn load_optional(role: &str, path: Option<&Path>, normalize: bool) -> CliResult<Option<Loaded>> {
    path.map(|p| load(role, p, normalize)).transpose()
}

fn evaluate(
    quantity: Quantity,
    q: QParam,
    x: &Distribution,
    y: Option<&Distribution>,
) -> CliResult<ExtendedReal> {
    let need_y =
        || y.ok_or_else(|| CliError::Parse(format!("--y is required for {}", quantity.name())));
    match quantity {
        Quantity::Entropy => Ok(ExtendedReal::Finite(entropy(q, x))),
        Quantity::Complexity => complexity(q, x, need_y()?).map_err(|e| CliError::domain("--y", e)),
        Quantity::Divergence => divergence(q, x, need_y()?).map_err(|e| CliError::domain("--y", e)),
    }
}

pub fn compute(args: &ComputeArgs, report_path: Option<&Path>) -> CliResult<()> {
    let q = q_param("--q", args.q)?;
    let x = load("x", &args.inputs.x, args.inputs.normalize)?;
    let y = load_optional("y", args.y.as_deref(), args.inputs.normalize)?;
    let v = evaluate(args.quantity, q, &x.dist, y.as_ref().map(|l| &l.dist))?;
    println!("{}", value(v));

    let mut report = RunReport::new(
        format!(
            "compute --quantity {} --q {}",
            args.quantity.name(),
            number(args.q)
        ),
        0,
    );
    report.inputs.push(x.digest);
    report.inputs.extend(y.map(|l| l.digest));
    report.q_values.push(q.value());
    report
        .results
        .push(ResultRecord::new(args.quantity.name(), q.value(), v));
    write_report(report_path, &report)
}

/// `steps` points from `q_min` to `q_max`, endpoints included.
fn q_grid(q_min: f64, q_max: f64, steps: i64) -> CliResult<Vec<f64>> {
    q_param("--q-min", q_min)?;
    q_param("--q-max", q_max)?;
    if q_min > q_max {
        return Err(CliError::Domain(format!(
            "--q-min: {} exceeds --q-max {}",
            number(q_min),
            number(q_max)
        )));
    }
    if steps < 1 {
        return Err(CliError::Domain(format!(
            "--steps: must be at least 1, got {steps}"
        )));
    }
    if steps == 1 {
        return Ok(vec![q_min]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                q_max
            } else {
                q_min + (q_max - q_min) * (i as f64 / last)
            }
        })
        .collect())
}

pub fn sweep(args: &SweepArgs, report_path: Option<&Path>) -> CliResult<()> {
    let qs = q_grid(args.q_min, args.q_max, args.steps)?;
    let x = load("x", &args.inputs.x, args.inputs.normalize)?;
    let y = load_optional("y", args.y.as_deref(), args.inputs.normalize)?;
    let yd = y.as_ref().map(|l| &l.dist);

    let rows: Vec<CliResult<[Option<ExtendedReal>; 3]>> = qs
        .par_iter()
        .map(|&qv| {
            let q = q_param("--q", qv)?;
            let h = evaluate(Quantity::Entropy, q, &x.dist, None)?;
            let (c, d) = match yd {
                Some(y) => (
                    Some(evaluate(Quantity::Complexity, q, &x.dist, Some(y))?),
                    Some(evaluate(Quantity::Divergence, q, &x.dist, Some(y))?),
                ),
                None => (None, None),
            };
            Ok([Some(h), c, d])
        })
        .collect();
    // report the error of the lowest q, whatever the thread count
    let rows = rows.into_iter().collect::<CliResult<Vec<_>>>()?;

    let mut out = csv::Writer::from_writer(std::io::stdout().lock());
    let csv_err = |e: csv::Error| CliError::Output(format!("stdout: {e}"));
    out.write_record(["q", "entropy", "complexity", "divergence"])
        .map_err(csv_err)?;
    let mut report = RunReport::new(
        format!(
            "sweep --q-min {} --q-max {} --steps {}",
            number(args.q_min),
            number(args.q_max),
            args.steps
        ),
        0,
    );
    for (&qv, row) in qs.iter().zip(&rows) {
        let mut record = vec![number(qv)];
        record.extend(row.iter().map(|v| v.map(csv_value).unwrap_or_default()));
        out.write_record(&record).map_err(csv_err)?;
        for (name, v) in ["entropy", "complexity", "divergence"].iter().zip(row) {
            if let Some(v) = v {
                report.results.push(ResultRecord::new(*name, qv, *v));
            }
        }
    }
    out.flush()
        .map_err(|e| CliError::Output(format!("stdout: {e}")))?;

    report.inputs.push(x.digest);
    report.inputs.extend(y.map(|l| l.digest));
    report.q_values = qs;
    write_report(report_path, &report)
}

pub fn verify(args: &VerifyArgs, report_path: Option<&Path>) -> CliResult<()> {
    let config =
        VerifyConfig::new(args.seed, args.n_max).map_err(|e| CliError::domain("--n-max", e))?;
    let suite = match args.suite {
        SuiteArg::Consistency => Suite::Consistency,
        SuiteArg::Quantities => Suite::Quantities,
        SuiteArg::Variational => Suite::Variational,
        SuiteArg::All => Suite::All,
    };
    let outcomes = run_suite(suite, &config);

    let mut report = RunReport::new(
        format!(
            "verify --suite {} --seed {} --n-max {}",
            suite.name(),
            args.seed,
            args.n_max
        ),
        args.seed,
    );
    report.suite_outcomes = outcomes;
    write_report(report_path, &report)?;
    summarize(&report.suite_outcomes, &mut std::io::stdout().lock())
}

/// One line per check, witnesses under failures; fails if any check did.
fn summarize(outcomes: &[SuiteOutcome], out: &mut impl Write) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::Output(format!("stdout: {e}"));
    for o in outcomes {
        writeln!(
            out,
            "{} {} residual={} threshold={} cases={}",
            if o.passed { "PASS" } else { "FAIL" },
            o.check,
            number(o.residual),
            number(o.threshold),
            o.cases
        )
        .map_err(io)?;
        if !o.passed {
            for w in &o.witnesses {
                let json = serde_json::to_string(w).map_err(|e| CliError::Output(e.to_string()))?;
                writeln!(out, "  witness: {json}").map_err(io)?;
            }
        }
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    writeln!(
        out,
        "{} of {} checks passed",
        outcomes.len() - failed,
        outcomes.len()
    )
    .map_err(io)?;
    if failed > 0 {
        return Err(CliError::VerificationFailed { failed });
    }
    Ok(())
}

pub fn minimize(args: &MinimizeArgs, report_path: Option<&Path>) -> CliResult<()> {
    let q = q_param("--q", args.q)?;
    let x = load("x", &args.inputs.x, args.inputs.normalize)?;
    let config = SolverConfig {
        max_iterations: args.max_iterations,
        step_tolerance: args.step_tolerance,
        value_tolerance: args.tolerance,
        initial_point: match args.init {
            InitArg::Uniform => InitialPoint::UniformOnSupport,
            InitArg::Random => InitialPoint::Random,
        },
        seed: args.seed,
        ..SolverConfig::default()
    };
    config
        .validate()
        .map_err(|e| CliError::domain("--tolerance", e))?;
    let result =
        minimize_complexity(q, &x.dist, &config).map_err(|e| CliError::domain("--x", e))?;
    let h = entropy(q, &x.dist);
    let gap = result.minimum_value - h;

    let minimizer: Vec<String> = result
        .minimizer
        .alphabet()
        .labels()
        .iter()
        .zip(result.minimizer.probs())
        .map(|(l, p)| format!("{l}={}", number(*p)))
        .collect();
    println!("minimizer {}", minimizer.join(" "));
    println!("value {}", number(result.minimum_value));
    println!("entropy {}", number(h));
    println!("gap {}", number(gap));
    println!("iterations {}", result.iterations_used);
    println!(
        "first_order_residual {}",
        number(result.first_order_residual)
    );
    println!("converged {}", result.converged);
    println!("degenerate_minimum {}", result.degenerate_minimum);

    if let Some(out) = &args.out {
        write_file(out, &distribution_json(&result.minimizer))?;
    }

    let mut record = ResultRecord::new(
        "minimum_value",
        q.value(),
        ExtendedReal::from_f64(result.minimum_value).unwrap_or(ExtendedReal::PosInf),
    )
    .with_residual("gap", report_number(gap))
    .with_residual(
        "first_order_residual",
        report_number(result.first_order_residual),
    )
    .with_residual("projected_step", report_number(result.projected_step))
    .with_residual(
        "predicted_decrease",
        report_number(result.predicted_decrease),
    )
    .with_residual("iterations", result.iterations_used as f64);
    record.point = Some(result.minimizer.probs().to_vec());
    record.flags.push(
        if result.converged {
            "converged"
        } else {
            "not_converged"
        }
        .to_string(),
    );
    if result.degenerate_minimum {
        record.flags.push("degenerate_minimum".to_string());
    }
    let mut report = RunReport::new(
        format!(
            "minimize --q {} --tolerance {} --step-tolerance {} --max-iterations {} --init {}",
            number(args.q),
            number(args.tolerance),
            number(args.step_tolerance),
            args.max_iterations,
            match args.init {
                InitArg::Uniform => "uniform",
                InitArg::Random => "random",
            }
        ),
        args.seed,
    );
    report.inputs.push(x.digest);
    report.q_values.push(q.value());
    report.results.push(record);
    report.results.push(ResultRecord::new(
        "entropy",
        q.value(),
        ExtendedReal::Finite(h),
    ));
    write_report(report_path, &report)?;

    if !result.converged {
        return Err(CliError::NotConverged(format!(
            "stopped ({:?}) after {} iterations, projected step {}, predicted decrease {}",
            result.stop_reason,
            result.iterations_used,
            number(result.projected_step),
            number(result.predicted_decrease)
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use qframe::Witness;

    fn outcome(check: &str, passed: bool) -> SuiteOutcome {
        SuiteOutcome {
            check: check.into(),
            passed,
            residual: if passed { 0.0 } else { 2.0 },
            threshold: 1.0,
            cases: 1,
            witnesses: if passed {
                vec![]
            } else {
                vec![Witness {
                    description: "demo".into(),
                    ..Witness::default()
                }]
            },
        }
    }

    #[test]
    fn failed_check_exits_one() {
        let mut buf = Vec::new();
        let err = summarize(&[outcome("a", true), outcome("b", false)], &mut buf).unwrap_err();
        assert_eq!(err.exit_code(), std::process::ExitCode::from(1));
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("FAIL b residual=2 threshold=1"));
        assert!(text.contains("witness: {\"description\":\"demo\"}"));
        assert!(text.ends_with("1 of 2 checks passed\n"));
    }

    #[test]
    fn passing_checks_exit_zero() {
        let mut buf = Vec::new();
        summarize(&[outcome("a", true)], &mut buf).unwrap();
    }

    #[test]
    fn grid_endpoints() {
        assert_eq!(q_grid(0.0, 2.0, 3).unwrap(), vec![0.0, 1.0, 2.0]);
        assert_eq!(q_grid(0.5, 0.7, 1).unwrap(), vec![0.5]);
        assert_eq!(*q_grid(0.1, 0.7, 7).unwrap().last().unwrap(), 0.7);
        assert!(q_grid(2.0, 1.0, 3).is_err());
        assert!(q_grid(0.0, 1.0, 0).is_err());
        assert!(q_grid(-1.0, 1.0, 3).is_err());
    }
}
