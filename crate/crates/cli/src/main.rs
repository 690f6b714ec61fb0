use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use detequiv::classify::CaseError;
use detequiv::doc;
use detequiv::lab::{self, LabError};
use detequiv::{
    check_class_d, check_equivalence, gen_instance, global_case, recover, CaseLabel, CaseTable, FieldSpec, GlobalCase, InstanceSpec, Kernel,
    RecoverOptions, RecoveryError,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "detequiv", version, about = "Exact determinantal-equivalence checks and gauge recovery for finite kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Pair {
    /// Kernel document for K.
    #[arg(long)]
    k: PathBuf,
    /// Kernel document for Q.
    #[arg(long)]
    q: PathBuf,
}

#[derive(Args)]
struct Output {
    /// Write the JSON report here and print a summary instead.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compare principal minors of K and Q.
    CheckEquiv {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        max_order: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Look for a vanishing 2x2 minor on disjoint rows and columns.
    CheckClassd {
        #[arg(long)]
        k: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Label every directed 3-cycle and pick the global case.
    Classify {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        output: Output,
    },
    /// Recover the gauge and transposition flag relating K to Q.
    Recover {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        max_order: Option<usize>,
        /// Check every pivot of each symmetric zero pair, not only the smallest.
        #[arg(long)]
        audit_consistency: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Generate an instance with known ground truth.
    Gen {
        #[arg(long, default_value = "rational")]
        field: FieldSpec,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        transpose: bool,
        /// Number of zero pairs imposed on K.
        #[arg(long, default_value_t = 0)]
        zeros: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restarts allowed for the randomized search.
        #[arg(long, default_value_t = 200)]
        budget: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Change one entry of Q so that a small minor stops matching K.
    Perturb {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Exhaustive gauge search over a prime field.
    Oracle {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        output: Output,
    },
    /// Sample equivalent pairs outside the class and keep those not related by a gauge.
    Search {
        #[arg(long, default_value = "prime:3")]
        field: FieldSpec,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

impl Command {
    fn out_path(&self) -> Option<&Path> {
        let o = match self {
            Command::CheckEquiv { output, .. }
            | Command::CheckClassd { output, .. }
            | Command::Classify { output, .. }
            | Command::Recover { output, .. }
            | Command::Gen { output, .. }
            | Command::Perturb { output, .. }
            | Command::Oracle { output, .. }
            | Command::Search { output, .. } => output,
        };
        o.out.as_deref()
    }
}

/// Failure before any verdict could be reached. Always exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

struct Outcome {
    code: u8,
    report: Value,
    summary: Vec<(String, String)>,
}

impl Outcome {
    fn new(code: u8, report: Value) -> Self {
        Outcome { code, report, summary: Vec::new() }
    }

    fn line(mut self, key: &str, value: impl ToString) -> Self {
        self.summary.push((key.to_string(), value.to_string()));
        self
    }
}

fn read_kernel(path: &Path) -> Result<Kernel, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    doc::parse_kernel(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn read_pair(pair: &Pair) -> Result<(Kernel, Kernel), InputError> {
    // both files must exist before anything runs
    for p in [&pair.k, &pair.q] {
        if !p.is_file() {
            return Err(InputError(format!("{}: no such file", p.display())));
        }
    }
    let (k, q) = (read_kernel(&pair.k)?, read_kernel(&pair.q)?);
    k.same_ground_set(&q)?;
    Ok((k, q))
}

fn labels(k: &Kernel, points: &[usize]) -> String {
    format!("({})", label_list(k, points).join(", "))
}

fn label_list<'a>(k: &'a Kernel, points: &[usize]) -> Vec<&'a str> {
    points.iter().map(|&i| k.label(i)).collect()
}

fn run(cmd: &Command) -> Result<Outcome, InputError> {
    match cmd {
        Command::CheckEquiv { pair, max_order, .. } => {
            let (k, q) = read_pair(pair)?;
            let r = check_equivalence(&k, &q, *max_order)?;
            let code = if r.is_equivalent() { 0 } else { 1 };
            let mut out = Outcome::new(code, doc::equivalence_json(&k, &r))
                .line("verdict", if r.is_equivalent() { "equivalent" } else { "not equivalent" })
                .line("checked_order_max", format!("{} of {}", r.checked_order_max, r.n));
            if let Some(w) = &r.witness {
                out = out
                    .line("witness", labels(&k, &w.subset))
                    .line("minors", format!("K: {}, Q: {}", w.minor_k, w.minor_q));
            }
            Ok(out)
        }
        Command::CheckClassd { k, .. } => {
            if !k.is_file() {
                return Err(InputError(format!("{}: no such file", k.display())));
            }
            let h = read_kernel(k)?;
            let r = check_class_d(&h);
            let mut out = Outcome::new(if r.holds { 0 } else { 1 }, doc::class_d_json(&h, &r))
                .line("class D", if r.holds { "holds" } else { "fails" })
                .line("vacuous", r.vacuous);
            if let Some(w) = &r.witness {
                out = out
                    .line("witness (x, y, z, w)", labels(&h, &w.quadruple()))
                    .line("determinant", &w.determinant);
            }
            Ok(out)
        }
        Command::Classify { pair, .. } => {
            let (k, q) = read_pair(pair)?;
            let table = CaseTable::build(&k, &q)?;
            let count = |l: CaseLabel| table.entries().iter().filter(|e| e.label == l).count();
            let (code, case, error) = match global_case(&table) {
                Ok(case) => (0, Some(case), Value::Null),
                Err(CaseError::Neither(p)) => (1, None, json!({ "kind": "neither", "cycle": label_list(&k, p.vertices()) })),
                Err(CaseError::MixedCases { case1_witness, case2_witness }) => (
                    1,
                    None,
                    json!({
                        "kind": "mixed_cases",
                        "case1_cycle": label_list(&k, case1_witness.vertices()),
                        "case2_cycle": label_list(&k, case2_witness.vertices()),
                    }),
                ),
            };
            let report = json!({
                "global_case": case.map(GlobalCase::as_str),
                "error": error,
                "cycles": doc::classification_json(&k, &table, case.unwrap_or(GlobalCase::Case1)),
            });
            Ok(Outcome::new(code, report)
                .line("global case", case.map_or("none", GlobalCase::as_str))
                .line("triples", table.entries().len())
                .line("case1 only", count(CaseLabel::Case1Only))
                .line("case2 only", count(CaseLabel::Case2Only))
                .line("both", count(CaseLabel::Both))
                .line("neither", count(CaseLabel::Neither)))
        }
        Command::Recover { pair, max_order, audit_consistency, .. } => {
            let (k, q) = read_pair(pair)?;
            let options = RecoverOptions { max_order: *max_order, audit_consistency: *audit_consistency };
            match recover(&k, &q, options) {
                Ok(r) => Ok(Outcome::new(0, doc::certificate_json(&k, &r))
                    .line("recovered", "yes")
                    .line("transposed", r.transposed)
                    .line("global case", r.global_case.as_str())
                    .line("base", &r.base_label)
                    .line("entries verified", r.verification.entries_checked)),
                Err(RecoveryError::Input(e)) => Err(e.into()),
                Err(e) => Ok(Outcome::new(e.exit_code() as u8, doc::recovery_error_json(&k, &e))
                    .line("recovered", "no")
                    .line("reason", &e)),
            }
        }
        Command::Gen { field, n, transpose, zeros, seed, budget, .. } => {
            let spec = InstanceSpec {
                transpose: *transpose,
                zero_edges: *zeros,
                max_attempts: *budget,
                ..InstanceSpec::new(*field, *n, *seed)
            };
            match gen_instance(&spec) {
                Ok(inst) => Ok(Outcome::new(0, doc::instance_json(&inst))
                    .line("field", field)
                    .line("n", n)
                    .line("transposed", inst.truth.transposed)
                    .line("seed", seed)),
                Err(e @ LabError::GenerationBudgetExceeded { .. }) => {
                    Ok(Outcome::new(1, json!({ "error": "generation_budget_exceeded", "message": e.to_string() })).line("generated", e))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Perturb { pair, seed, .. } => {
            let (k, q) = read_pair(pair)?;
            match lab::perturb(&k, &q, *seed) {
                Ok(p) => {
                    let r = check_equivalence(&k, &p, None)?;
                    let mut out = Outcome::new(0, doc::kernel_to_json(&p));
                    if let Some(w) = &r.witness {
                        out = out.line("first differing minor", labels(&k, &w.subset));
                    }
                    Ok(out)
                }
                Err(e @ LabError::PerturbationFailed { .. }) => {
                    Ok(Outcome::new(1, json!({ "error": "perturbation_failed", "message": e.to_string() })).line("perturbed", e))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Oracle { pair, .. } => {
            let (k, q) = read_pair(pair)?;
            match lab::brute_force_diagonal_similar(&k, &q)? {
                Some(t) => Ok(Outcome::new(
                    0,
                    json!({ "similar": true, "transposed": t.transposed, "gauge": doc::gauge_to_json(&k, &t.gauge) }),
                )
                .line("similar", "yes")
                .line("transposed", t.transposed)),
                None => Ok(Outcome::new(1, json!({ "similar": false, "transposed": null, "gauge": null })).line("similar", "no")),
            }
        }
        Command::Search { field, n, budget, seed, .. } => {
            let r = lab::search_counterexample(*field, *n, *budget, *seed)?;
            Ok(Outcome::new(0, doc::search_json(&r))
                .line("samples", r.samples)
                .line("equivalent", r.equivalent)
                .line("witnesses", r.witnesses.len())
                .line("anomalies", r.anomalies.len()))
        }
    }
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match cli.command.out_path() {
        Some(path) => {
            if let Err(e) = fs::write(path, render(&outcome.report)) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
            let width = outcome.summary.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in &outcome.summary {
                println!("{k:<width$}  {v}");
            }
            println!("{:<width$}  {}", "report", path.display());
        }
        None => print!("{}", render(&outcome.report)),
    }
    ExitCode::from(outcome.code)
}
