use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use frob7_core::bundle::{certify, BundleConfig, BundleError};
use frob7_core::congruence::sequences::MIN_WINDOW;
use frob7_core::congruence::CongruenceError;
use frob7_core::etaq::EtaQuotient;
use frob7_core::numeric::{self, NumericConfig, NumericError};
use frob7_core::operators::appendix::{parse_identities, verify_identities, verify_appendix, Group, Verdict, VERIFICATION_FLOOR};
use frob7_core::operators::recurrence::{appendix_seeds, reproduce_seeds_downward};
use frob7_core::operators::{derive_recurrence, extend_tables, BasisTriple, Multiplier, OperatorError};
use frob7_core::par;

/// Every flag can also be set through an environment variable named
/// FROB7_<FLAG>, e.g. FROB7_TERMS=800.
#[derive(Parser)]
#[command(name = "frob7", version, about = "q-series engine for congruences of 4-colored generalized Frobenius partitions modulo powers of 7")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Write the report to this file instead of standard output
    #[arg(long, global = true, env = "FROB7_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json", env = "FROB7_FORMAT")]
    format: Format,
    /// Worker threads; 1 runs everything on the calling thread
    #[arg(long, global = true, env = "FROB7_JOBS", value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
    #[arg(long, global = true, default_value_t = 7, env = "FROB7_SEED")]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1e-8, env = "FROB7_TOLERANCE")]
    tolerance: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Expand an eta quotient given as "level:exponent,..."
    Expand {
        spec: String,
        /// Coefficients to print
        #[arg(long, default_value_t = 20, env = "FROB7_TERMS")]
        terms: usize,
    },
    /// Verify the 42 seed identities U_7(u t^k), k = 0..-6
    VerifyAppendix {
        /// Comma-separated groups I..VI (default: all)
        #[arg(long, value_delimiter = ',', env = "FROB7_GROUPS")]
        groups: Vec<Group>,
        #[arg(long, default_value_t = VERIFICATION_FLOOR, env = "FROB7_TERMS")]
        terms: u64,
        /// Read the identities from this table instead of the built-in one
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Sweep the congruences and check the L/K sequences
    Certify {
        #[arg(long, value_delimiter = ',', default_value = "0,1,2", env = "FROB7_BETA")]
        beta: Vec<u32>,
        #[arg(long, default_value_t = 2, env = "FROB7_ALPHA_MAX")]
        alpha_max: u32,
        /// Residues swept per certificate
        #[arg(long, default_value_t = 10, env = "FROB7_N_MAX")]
        n_max: u64,
        /// Starting precision of the L/K runs (default: the smallest admissible)
        #[arg(long, env = "FROB7_TERMS")]
        terms: Option<i64>,
        /// Skip the floating-point checks
        #[arg(long)]
        no_numeric: bool,
    },
    /// Check the transformation laws at seeded sample points
    Numeric {
        #[arg(long, default_value_t = 5, env = "FROB7_SAMPLES")]
        samples: usize,
        /// Coefficients of each f_{4,beta}
        #[arg(long, default_value_t = 400, env = "FROB7_TERMS")]
        terms: usize,
        #[arg(long, default_value_t = 2, env = "FROB7_ALPHA_MAX")]
        alpha_max: u32,
    },
    /// Derive the degree-7 recurrence and run it forward from the seeds
    Recurrence {
        #[arg(long, default_value_t = 10, env = "FROB7_K_MAX")]
        k_max: i64,
        /// Basis precision used for the derivation and row checks
        #[arg(long, default_value_t = 260, env = "FROB7_TERMS")]
        terms: i64,
    },
}

enum Failure {
    /// Bad input: exit 2.
    Usage(String),
    /// A check failed: exit 1.
    Check(String),
}

struct Output {
    text: String,
    passed: bool,
}

fn progress(msg: &str) {
    eprintln!("frob7: {msg}");
}

fn configure_jobs(jobs: Option<u16>) -> Result<(), Failure> {
    let Some(jobs) = jobs else { return Ok(()) };
    if jobs == 1 {
        par::set_mode(par::Mode::Sequential);
        return Ok(());
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs as usize)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot start {jobs} workers: {e}")))?;
    Ok(())
}

fn operator_failure(e: OperatorError) -> Failure {
    match e {
        OperatorError::PrecisionTooSmall { .. } | OperatorError::Parse { .. } => Failure::Usage(e.to_string()),
        other => Failure::Check(other.to_string()),
    }
}

fn congruence_failure(e: CongruenceError) -> Failure {
    match e {
        CongruenceError::UnderBudget { .. } | CongruenceError::InvalidBeta(_) | CongruenceError::InvalidAlpha => {
            Failure::Usage(e.to_string())
        }
        other => Failure::Check(other.to_string()),
    }
}

fn numeric_failure(e: NumericError) -> Failure {
    match e {
        NumericError::UnsupportedAlpha(_) | NumericError::InvalidBeta(_) => Failure::Usage(e.to_string()),
        other => Failure::Check(other.to_string()),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

fn expand(spec: &str, terms: usize, format: Format) -> Result<Output, Failure> {
    let eq: EtaQuotient = spec.parse().map_err(|e: frob7_core::etaq::EtaError| Failure::Usage(e.caret(spec)))?;
    let (prefactor_24, series) = eq.expand(terms);
    let text = match format {
        Format::Csv => format!("# quotient={eq}\n# prefactor_24={prefactor_24}\n{}", series.to_csv()),
        Format::Json => to_json(&json!({
            "quotient": eq.to_string(),
            "prefactor_24": prefactor_24,
            "precision": series.precision(),
            "coefficients": series.numerators().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })),
    };
    Ok(Output { text, passed: true })
}

fn verdicts_csv(verdicts: &[Verdict]) -> String {
    let mut out = String::from("identity,status,terms_verified,bound_used,first_mismatch\n");
    for v in verdicts {
        let m = v.first_mismatch.as_ref().map(|m| m.exponent.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{},{}\n", v.identity_id, v.status, v.terms_verified, v.bound_used, m));
    }
    out
}

fn verify(groups: &[Group], terms: u64, data: Option<&PathBuf>, format: Format) -> Result<Output, Failure> {
    let groups: Vec<Group> = if groups.is_empty() { Group::ALL.to_vec() } else { groups.to_vec() };
    progress(&format!("verifying groups {} on {terms} coefficients", groups.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(",")));
    let verdicts = match data {
        None => verify_appendix(&groups, terms).map_err(operator_failure)?,
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let list = parse_identities(&text).map_err(operator_failure)?;
            let list: Vec<_> = list.into_iter().filter(|i| groups.contains(&i.group)).collect();
            if terms < VERIFICATION_FLOOR {
                return Err(Failure::Usage(format!("need at least {VERIFICATION_FLOOR} coefficients, got {terms}")));
            }
            verify_identities(&list, terms, VERIFICATION_FLOOR).map_err(operator_failure)?
        }
    };
    let passed = verdicts.iter().all(|v| v.ok());
    let ok = verdicts.iter().filter(|v| v.ok()).count();
    progress(&format!("{ok}/{} identities ok", verdicts.len()));
    let text = match format {
        Format::Csv => verdicts_csv(&verdicts),
        Format::Json => to_json(&json!({ "verified": ok, "total": verdicts.len(), "verdicts": verdicts })),
    };
    Ok(Output { text, passed })
}

fn certify_cmd(config: BundleConfig, format: Format) -> Result<Output, Failure> {
    let bundle = certify(&config, &progress).map_err(|e| match e {
        BundleError::Congruence(e) => congruence_failure(e),
        BundleError::Numeric(e) => numeric_failure(e),
    })?;
    let text = match format {
        Format::Json => to_json(&bundle),
        Format::Csv => {
            let mut out = String::from("family,beta,alpha,lambda,modulus_class,divisor,n_from,n_to,status\n");
            for c in &bundle.certificates {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    c.family, c.beta, c.alpha, c.lambda, c.modulus_class, c.divisor, c.n_checked[0], c.n_checked[1], c.status
                ));
            }
            out
        }
    };
    Ok(Output { text, passed: bundle.verified() })
}

fn numeric_cmd(config: NumericConfig, format: Format) -> Result<Output, Failure> {
    progress(&format!("sampling {} points with seed {}", config.samples, config.seed));
    let reports = numeric::run_all(&config).map_err(numeric_failure)?;
    let passed = reports.iter().all(|r| r.passed);
    let text = match format {
        Format::Json => to_json(&reports),
        Format::Csv => {
            let mut out = String::from("check,samples,max_dev,error_bound,tolerance,terms,passed\n");
            for r in &reports {
                out.push_str(&format!(
                    "{},{},{:e},{:e},{:e},{},{}\n",
                    r.check,
                    r.samples.len(),
                    r.max_dev,
                    r.error_bound,
                    r.tolerance,
                    r.terms,
                    r.passed
                ));
            }
            out
        }
    };
    Ok(Output { text, passed })
}

fn recurrence_cmd(k_max: i64, terms: i64, format: Format) -> Result<Output, Failure> {
    if k_max < 1 {
        return Err(Failure::Usage("--k-max must be at least 1".into()));
    }
    progress(&format!("deriving the recurrence from {terms} coefficients"));
    let basis = BasisTriple::plain(terms).map_err(operator_failure)?;
    let table = derive_recurrence(&basis, terms - 60).map_err(operator_failure)?;
    let seeds = appendix_seeds();
    progress(&format!("running the recurrence to k={k_max}"));
    let tables = extend_tables(&table, &seeds, k_max, &basis).map_err(operator_failure)?;
    let mut reproduced = Vec::new();
    for m in [Multiplier::One, Multiplier::P1, Multiplier::P2] {
        progress(&format!("reproducing the {} seeds downward", m.label()));
        let first = reproduce_seeds_downward(&table, m, &seeds, &basis).map_err(operator_failure)?;
        reproduced.push((m.label().to_string(), first));
    }
    let passed = reproduced.iter().all(|(_, f)| f.is_none());
    let report = table.report();
    let text = match format {
        Format::Json => to_json(&json!({
            "recurrence": report,
            "k_max": tables.k_max,
            "rows": tables.rows.len(),
            "seeds_reproduced": reproduced.iter().map(|(m, f)| json!({"family": m, "first_difference": f})).collect::<Vec<_>>(),
            "status": if passed { "verified" } else { "failed" },
        })),
        Format::Csv => {
            let mut out = String::from("j,l,s,floor\n");
            for (j, row) in report.s.iter().enumerate() {
                for (i, s) in row.iter().enumerate() {
                    out.push_str(&format!("{j},{},{s},{}\n", i + 1, report.floors[j][i]));
                }
            }
            out
        }
    };
    Ok(Output { text, passed })
}

fn run(cli: Cli) -> Result<Output, Failure> {
    configure_jobs(cli.global.jobs)?;
    let g = &cli.global;
    if g.tolerance.is_nan() || g.tolerance <= 0.0 {
        return Err(Failure::Usage("--tolerance must be positive".into()));
    }
    match cli.command {
        Command::Expand { spec, terms } => expand(&spec, terms, g.format),
        Command::VerifyAppendix { groups, terms, data } => verify(&groups, terms, data.as_ref(), g.format),
        Command::Certify { beta, alpha_max, n_max, terms, no_numeric } => {
            let config = BundleConfig {
                betas: beta,
                alpha_max,
                n_max,
                start: terms,
                window: MIN_WINDOW,
                seed: g.seed,
                tolerance: g.tolerance,
                numeric: !no_numeric,
            };
            certify_cmd(config, g.format)
        }
        Command::Numeric { samples, terms, alpha_max } => {
            let config = NumericConfig { seed: g.seed, samples, tolerance: g.tolerance, terms, alpha_max, two_sided: true };
            numeric_cmd(config, g.format)
        }
        Command::Recurrence { k_max, terms } => recurrence_cmd(k_max, terms, g.format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.global.out.clone();
    match run(cli) {
        Ok(output) => {
            let written = match &out {
                Some(path) => fs::write(path, &output.text).map_err(|e| format!("{}: {e}", path.display())),
                None => std::io::stdout().write_all(output.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("frob7: {e}");
                return ExitCode::from(2);
            }
            if output.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("frob7: verification failed");
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("frob7: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("frob7: {msg}");
            ExitCode::from(1)
        }
    }
}
