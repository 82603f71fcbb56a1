//! Command-line interface: evaluate catalog families, convert parameters,
//! solve maximum-entropy problems from JSON documents, and run the seeded
//! verification suites.
//!
//! Exit codes are a total function of the outcome class:
//! 0 success, 1 malformed input, 2 domain violation, 3 infeasible target,
//! 4 solver non-convergence, 5 invariant violation.

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use expfam::documents::{ProblemDocument, SolutionDocument};
use expfam::families::{CanonicalParams, ClosedFormFamily, FamilyKind, StandardParams};
use expfam::maxent::solve_dual;
use expfam::suites;
use expfam::{Error, Tolerance};

#[derive(Parser)]
#[command(
    name = "expfam",
    version,
    about = "Exponential families, entropy metrics, and finite-support maximum entropy"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate log-pdmf values; prints a CSV table with a summary header.
    Eval {
        /// One of: binomial, poisson, normal, gamma, sqrtgamma.
        family: String,
        /// Standard parameters, e.g. "lambda=2" or "n=10,theta=0.3".
        #[arg(long)]
        std: Option<String>,
        /// Canonical parameters, e.g. "eta1=0,eta2=-0.5" (binomial also needs n).
        #[arg(long)]
        canonical: Option<String>,
        /// Evaluation points, e.g. "0,1,2".
        #[arg(long)]
        x: String,
    },
    /// Convert between standard and canonical parameters.
    Convert {
        family: String,
        /// Standard parameters to convert, e.g. "alpha=2,theta=3".
        #[arg(long = "to-canonical")]
        to_canonical: Option<String>,
        /// Canonical parameters to convert, e.g. "eta=0,-0.5".
        #[arg(long = "to-standard")]
        to_standard: Option<String>,
    },
    /// Solve a maximum-entropy problem document and write the solution.
    Maxent {
        /// Path to a problem JSON document.
        problem: PathBuf,
        /// Path the solution JSON document is written to.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run a verification suite.
    Verify {
        /// One of: prop1, prop2, concavity, combinatorial, table2, transforms.
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Trial count; each suite has its own default.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Print the closed-form cross-validation table at reference parameters.
    Table2,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                Error::InvariantViolation(payload) => println!("{payload}"),
                Error::NotConverged(report) => {
                    eprintln!("error: {err}");
                    eprintln!("solver report: {report:?}");
                }
                _ => eprintln!("error: {err}"),
            }
            ExitCode::from(exit_class(&err))
        }
    }
}

fn exit_class(err: &Error) -> u8 {
    match err {
        Error::Invalid(_) | Error::InvalidDistribution(_) | Error::EmptyInput => 1,
        Error::Domain(_)
        | Error::OutOfSupport(..)
        | Error::Unsupported(_)
        | Error::IndexOutOfRange { .. }
        | Error::SupportMismatch(_)
        | Error::DimensionMismatch(_)
        | Error::NonFinite(_)
        | Error::QuadratureFailure(_)
        | Error::OracleScaleExceeded { .. }
        | Error::NonInjectiveOnSupport => 2,
        Error::Infeasible(_) | Error::DegenerateNullSpace => 3,
        Error::NotConverged(_) | Error::SingularHessian => 4,
        Error::InvariantViolation(_) => 5,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Eval {
            family,
            std,
            canonical,
            x,
        } => cmd_eval(&family, std.as_deref(), canonical.as_deref(), &x),
        Command::Convert {
            family,
            to_canonical,
            to_standard,
        } => cmd_convert(&family, to_canonical.as_deref(), to_standard.as_deref()),
        Command::Maxent { problem, output } => cmd_maxent(&problem, &output),
        Command::Verify {
            suite,
            seed,
            trials,
        } => cmd_verify(&suite, seed, trials),
        Command::Table2 => cmd_table2(),
    }
}

// ---------------------------------------------------------------------------
// Argument parsing helpers
// ---------------------------------------------------------------------------

fn parse_key_values(text: &str) -> Result<BTreeMap<String, f64>, Error> {
    let mut map = BTreeMap::new();
    for piece in text.split(',') {
        let (key, value) = piece
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("expected key=value, got {piece:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("{key}: {value:?} is not a number")))?;
        if map.insert(key.trim().to_string(), value).is_some() {
            return Err(Error::Invalid(format!("{key}: given more than once")));
        }
    }
    Ok(map)
}

fn parse_number_list(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("{piece:?} is not a number")))
        })
        .collect()
}

fn take(map: &mut BTreeMap<String, f64>, key: &str) -> Result<f64, Error> {
    map.remove(key)
        .ok_or_else(|| Error::Invalid(format!("{key}: required parameter missing")))
}

fn expect_empty(map: &BTreeMap<String, f64>) -> Result<(), Error> {
    if let Some(key) = map.keys().next() {
        return Err(Error::Invalid(format!("{key}: unknown parameter")));
    }
    Ok(())
}

fn family_by_name(name: &str, n: Option<f64>) -> Result<ClosedFormFamily, Error> {
    match name {
        "binomial" => {
            let n = n.ok_or_else(|| Error::Invalid("n: binomial requires a trial count".into()))?;
            if n < 1.0 || n.fract() != 0.0 || n > u64::MAX as f64 {
                return Err(Error::Invalid(format!(
                    "n: must be a positive integer (got {n})"
                )));
            }
            ClosedFormFamily::binomial(n as u64)
        }
        "poisson" => Ok(ClosedFormFamily::poisson()),
        "normal" => Ok(ClosedFormFamily::normal()),
        "gamma" => Ok(ClosedFormFamily::gamma()),
        "sqrtgamma" => Ok(ClosedFormFamily::sqrt_gamma()),
        other => Err(Error::Invalid(format!(
            "family: unknown name {other:?} (expected binomial, poisson, normal, gamma, sqrtgamma)"
        ))),
    }
}

fn standard_from_map(
    family: &ClosedFormFamily,
    map: &mut BTreeMap<String, f64>,
) -> Result<StandardParams, Error> {
    let std = match family.kind() {
        FamilyKind::Binomial => StandardParams::Binomial {
            theta: take(map, "theta")?,
        },
        FamilyKind::Poisson => StandardParams::Poisson {
            lambda: take(map, "lambda")?,
        },
        FamilyKind::Normal => StandardParams::Normal {
            mu: take(map, "mu")?,
            sigma2: take(map, "sigma2")?,
        },
        FamilyKind::Gamma => StandardParams::Gamma {
            alpha: take(map, "alpha")?,
            theta: take(map, "theta")?,
        },
        FamilyKind::SqrtGamma => StandardParams::SqrtGamma {
            alpha: take(map, "alpha")?,
            theta: take(map, "theta")?,
        },
    };
    expect_empty(map)?;
    Ok(std)
}

fn canonical_from_map(
    family: &ClosedFormFamily,
    map: &mut BTreeMap<String, f64>,
) -> Result<CanonicalParams, Error> {
    let mut eta = vec![take(map, "eta1")?];
    if family.dim() == 2 {
        eta.push(take(map, "eta2")?);
    }
    expect_empty(map)?;
    Ok(CanonicalParams::new(eta))
}

fn join_numbers(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn describe_standard(std: &StandardParams) -> String {
    match std {
        StandardParams::Binomial { theta } => format!("theta = {theta}"),
        StandardParams::Poisson { lambda } => format!("lambda = {lambda}"),
        StandardParams::Normal { mu, sigma2 } => format!("mu = {mu}, sigma2 = {sigma2}"),
        StandardParams::Gamma { alpha, theta } | StandardParams::SqrtGamma { alpha, theta } => {
            format!("alpha = {alpha}, theta = {theta}")
        }
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_eval(
    family_name: &str,
    std: Option<&str>,
    canonical: Option<&str>,
    x: &str,
) -> Result<(), Error> {
    let (family, eta) = match (std, canonical) {
        (Some(text), None) => {
            let mut map = parse_key_values(text)?;
            let n = map.remove("n");
            let family = family_by_name(family_name, n)?;
            let std = standard_from_map(&family, &mut map)?;
            let eta = family.to_canonical(&std)?;
            (family, eta)
        }
        (None, Some(text)) => {
            let mut map = parse_key_values(text)?;
            let n = map.remove("n");
            let family = family_by_name(family_name, n)?;
            let eta = canonical_from_map(&family, &mut map)?;
            family.check_eta(&eta)?;
            (family, eta)
        }
        _ => {
            return Err(Error::Invalid(
                "exactly one of --std and --canonical must be given".into(),
            ))
        }
    };
    let xs = parse_number_list(x)?;
    let a = family.log_partition(&eta)?;
    let mu = family.mean_stats(&eta)?.mu_t;
    let var = family.var_stats(&eta)?;
    let var_diag: Vec<f64> = (0..var.len()).map(|i| var[i][i]).collect();
    println!("# family = {}", family.name());
    if let Some(n) = family.fixed_shape() {
        println!("# n = {n}");
    }
    println!("# eta = {}", join_numbers(eta.values()));
    println!("# a_eta = {a}");
    println!("# mu_t = {}", join_numbers(&mu));
    println!("# var_diag = {}", join_numbers(&var_diag));
    println!("x,log_pdmf,pdmf");
    for &xi in &xs {
        let lp = family.log_pdmf(&eta, xi)?;
        println!("{xi},{lp},{}", lp.exp());
    }
    Ok(())
}

fn cmd_convert(
    family_name: &str,
    to_canonical: Option<&str>,
    to_standard: Option<&str>,
) -> Result<(), Error> {
    match (to_canonical, to_standard) {
        (Some(text), None) => {
            let mut map = parse_key_values(text)?;
            let n = map.remove("n");
            let family = family_by_name(family_name, n)?;
            let std = standard_from_map(&family, &mut map)?;
            let eta = family.to_canonical(&std)?;
            let mu = family.mean_stats(&eta)?.mu_t;
            println!("family = {}", family.name());
            println!("standard: {}", describe_standard(&std));
            println!("canonical: eta = {}", join_numbers(eta.values()));
            println!("mu_t = {}", join_numbers(&mu));
        }
        (None, Some(text)) => {
            // Binomial carries its trial count ahead of the eta list, as in
            // "n=10,eta=0".
            let (n, eta_text) = match text.strip_prefix("n=") {
                Some(rest) => {
                    let (n_text, tail) = rest
                        .split_once(',')
                        .ok_or_else(|| Error::Invalid("expected n=<count>,eta=<values>".into()))?;
                    let n: f64 = n_text
                        .trim()
                        .parse()
                        .map_err(|_| Error::Invalid(format!("n: {n_text:?} is not a number")))?;
                    (Some(n), tail)
                }
                None => (None, text),
            };
            let family = family_by_name(family_name, n)?;
            let values = eta_text
                .strip_prefix("eta=")
                .ok_or_else(|| Error::Invalid("expected eta=<comma-separated values>".into()))?;
            let eta = CanonicalParams::new(parse_number_list(values)?);
            let std = family.to_standard(&eta)?;
            let mu = family.mean_stats(&eta)?.mu_t;
            println!("family = {}", family.name());
            println!("canonical: eta = {}", join_numbers(eta.values()));
            println!("standard: {}", describe_standard(&std));
            println!("mu_t = {}", join_numbers(&mu));
        }
        _ => {
            return Err(Error::Invalid(
                "exactly one of --to-canonical and --to-standard must be given".into(),
            ))
        }
    }
    Ok(())
}

fn base_tolerance() -> Result<Tolerance, Error> {
    let mut tol = Tolerance::default();
    if let Ok(text) = std::env::var("MAXENT_TOL") {
        let value: f64 = text
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("MAXENT_TOL: {text:?} is not a number")))?;
        if !(value > 0.0) {
            return Err(Error::Invalid(format!(
                "MAXENT_TOL: must be > 0 (got {value})"
            )));
        }
        tol.abs_tol = value;
    }
    Ok(tol)
}

fn cmd_maxent(problem_path: &Path, output_path: &Path) -> Result<(), Error> {
    let text = std::fs::read_to_string(problem_path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", problem_path.display())))?;
    let doc: ProblemDocument = serde_json::from_str(&text)
        .map_err(|e| Error::Invalid(format!("problem document: {e}")))?;
    doc.validate()?;
    let problem = doc.to_problem()?;
    let tol = doc.tolerance(base_tolerance()?);
    let solution = solve_dual(&problem, &tol)?;
    let out = SolutionDocument::from_solution(&problem, &solution)?;
    let rendered = serde_json::to_string_pretty(&out)
        .map_err(|e| Error::Invalid(format!("serialization: {e}")))?;
    std::fs::write(output_path, rendered + "\n")
        .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", output_path.display())))?;
    let moment_err = out
        .achieved_moments
        .iter()
        .zip(problem.target())
        .map(|(a, t)| (a - t).abs())
        .fold(0.0f64, f64::max);
    println!(
        "solved: eta = {}; max moment error {moment_err:e}; solution written to {}",
        join_numbers(&solution.eta),
        output_path.display()
    );
    Ok(())
}

fn cmd_verify(suite: &str, seed: u64, trials: Option<usize>) -> Result<(), Error> {
    let report = suites::run_suite(suite, seed, trials)?;
    for line in &report.lines {
        println!("{line}");
    }
    Ok(())
}

fn cmd_table2() -> Result<(), Error> {
    let rows = suites::table2_reference_rows()?;
    println!(
        "family,eta1,eta2,a_closed,a_numeric,a_abs_err,mu1_closed,mu1_fd,mu2_closed,mu2_fd,mu_rel_err"
    );
    for row in rows {
        let eta2 = row.eta.get(1).map(|v| v.to_string()).unwrap_or_default();
        let mu2_closed = row
            .mu_closed
            .get(1)
            .map(|v| v.to_string())
            .unwrap_or_default();
        let mu2_fd = row.mu_fd.get(1).map(|v| v.to_string()).unwrap_or_default();
        println!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            row.family,
            row.eta[0],
            eta2,
            row.a_closed,
            row.a_numeric,
            row.a_abs_err,
            row.mu_closed[0],
            row.mu_fd[0],
            mu2_closed,
            mu2_fd,
            row.mu_rel_err
        );
    }
    Ok(())
}
