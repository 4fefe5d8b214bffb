//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error,
//! 3 machine invariant violation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::automata::{run_mcqfa, run_unary_dfa};
use crate::exact::{exact_run, promise_counterexample, RotationMachine};
use crate::family::{build_min_dfa, family_table, FamilyParams};
use crate::machine_file::{parse_machine, Machine, MachineFileError};
use crate::oracle::{min_dfa_search, MinimalStates, OracleError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

/// Longest input accepted by any subcommand.
pub const MAX_LENGTH: u64 = 1_000_000_000;
/// Longest input the floating-point simulator is run on.
pub const MAX_FLOAT_STEPS: u64 = 1_000_000;
/// Tolerance for "exact" answers on the floating-point path.
pub const FLOAT_EXACT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "qfa-succinct",
    version,
    about = "Two-state exact QFAs vs minimal unary DFAs"
)]
pub struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Exponent k in N = 2^k(2l+1).
    #[arg(long)]
    pub k: Option<u32>,
    /// Odd-part parameter l in N = 2^k(2l+1).
    #[arg(long, default_value_t = 0)]
    pub l: u64,
}

impl FamilyArgs {
    fn params(&self) -> Result<Option<FamilyParams>, String> {
        let Some(k) = self.k else { return Ok(None) };
        let p = FamilyParams::new(k, self.l);
        p.checked_period_n()
            .map(|_| Some(p))
            .ok_or_else(|| format!("N = 2^{k}(2*{}+1) is too large", self.l))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a machine on a^m.
    Simulate {
        /// Machine file (JSON). Without it the family machine for --k/--l is used.
        #[arg(long)]
        machine: Option<PathBuf>,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        length: u64,
        #[arg(long, value_enum, default_value = "plain")]
        format: Format,
    },
    /// Check that the family machines solve the promise exactly.
    Verify {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 8)]
        max_blocks: u64,
        /// Check this machine file instead of the built-in family machines.
        #[arg(long)]
        machine: Option<PathBuf>,
        /// Rotation denominator D (angle pi/D) for the exact engine; defaults to 2N.
        #[arg(long)]
        denominator: Option<u64>,
    },
    /// Exhaustive search for the minimal unary DFA.
    Search {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 16)]
        max_states: usize,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value = "plain")]
        format: Format,
    },
    /// Succinctness table for N = 2^k, k = 1..k_max.
    Table {
        #[arg(long)]
        k_max: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, stderr: impl Into<String>) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: stderr.into(),
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let outcome = dispatch(&cli.command);
    let _ = stderr.write_all(outcome.stderr.as_bytes());
    match &cli.output {
        Some(path) if !outcome.stdout.is_empty() => {
            if let Err(e) = std::fs::write(path, &outcome.stdout) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        _ => {
            let _ = stdout.write_all(outcome.stdout.as_bytes());
        }
    }
    outcome.code
}

fn dispatch(command: &Command) -> Outcome {
    match command {
        Command::Simulate {
            machine,
            family,
            length,
            format,
        } => simulate(machine.as_ref(), family, *length, *format),
        Command::Verify {
            family,
            max_blocks,
            machine,
            denominator,
        } => verify(family, *max_blocks, machine.as_ref(), *denominator),
        Command::Search {
            n,
            max_states,
            threads,
            format,
        } => search(*n, *max_states, *threads, *format),
        Command::Table { k_max, format } => table(*k_max, *format),
    }
}

fn load_machine(path: &PathBuf) -> Result<Machine, Outcome> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Outcome::fail(
            EXIT_INPUT,
            format!("error: cannot read {}: {e}\n", path.display()),
        )
    })?;
    parse_machine(&text).map_err(|e| {
        let code = match e {
            MachineFileError::Invalid(_) => EXIT_INVARIANT,
            MachineFileError::Parse(_) | MachineFileError::Shape(_) => EXIT_INPUT,
        };
        Outcome::fail(code, format!("error: {}: {e}\n", path.display()))
    })
}

/// Probability rounded to 12 decimals with trailing zeros dropped.
fn fmt_prob(p: f64) -> String {
    let s = format!("{:.12}", p);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn simulate(
    machine: Option<&PathBuf>,
    family: &FamilyArgs,
    length: u64,
    format: Format,
) -> Outcome {
    if length > MAX_LENGTH {
        return Outcome::fail(
            EXIT_INPUT,
            format!("error: --length exceeds {MAX_LENGTH}\n"),
        );
    }
    if format == Format::Csv {
        return Outcome::fail(EXIT_INPUT, "error: simulate supports plain or json\n");
    }
    let params = match family.params() {
        Ok(p) => p,
        Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}\n")),
    };
    let machine = match machine {
        Some(path) => match load_machine(path) {
            Ok(m) => Some(m),
            Err(o) => return o,
        },
        None => None,
    };
    let Some(quantum) = (match (&machine, params) {
        (Some(m), _) => Some(m.clone()),
        (None, Some(p)) => Some(Machine::Quantum(p.rotation().to_mcqfa())),
        (None, None) => None,
    }) else {
        return Outcome::fail(EXIT_INPUT, "error: give --machine or --k\n");
    };

    let mut stderr = String::new();
    let promise = params.map(|p| p.promise().classify(length));
    let mut doc = json!({ "length": length });
    let mut text = format!("length: {length}\n");
    if let Some(c) = promise {
        doc["promise"] = json!(c.to_string());
        let _ = writeln!(text, "promise: {c}");
    }
    match &quantum {
        Machine::Quantum(_) if length > MAX_FLOAT_STEPS => {
            let _ = writeln!(
                stderr,
                "warning: float simulation skipped beyond {MAX_FLOAT_STEPS} steps"
            );
        }
        Machine::Quantum(q) => {
            let r = run_mcqfa(q, length);
            let _ = writeln!(text, "float: prob {}", fmt_prob(r.accept_probability));
            doc["accept_probability"] = json!(r.accept_probability);
            doc["final_vector"] = json!(r.final_vector);
        }
        Machine::Classical(d) => {
            let accepted = run_unary_dfa(d, length);
            let _ = writeln!(text, "dfa: {}", if accepted { "ACCEPT" } else { "REJECT" });
            doc["dfa_accepts"] = json!(accepted);
        }
    }
    if let (None, Some(p)) = (&machine, params) {
        let out = exact_run(p.rotation(), length);
        let _ = writeln!(
            text,
            "exact: {} (prob {})",
            out.kind,
            fmt_prob(out.probability())
        );
        doc["exact"] = json!({
            "kind": out.kind.to_string(),
            "angle_index": out.state.index,
            "denominator": p.rotation().denominator(),
            "probability": out.probability(),
        });
    }
    let stdout = match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")),
        _ => text,
    };
    Outcome {
        code: EXIT_OK,
        stdout,
        stderr,
    }
}

fn verify(
    family: &FamilyArgs,
    max_blocks: u64,
    machine: Option<&PathBuf>,
    denominator: Option<u64>,
) -> Outcome {
    let params = match family.params() {
        Ok(Some(p)) => p,
        Ok(None) => return Outcome::fail(EXIT_INPUT, "error: verify needs --k\n"),
        Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}\n")),
    };
    if max_blocks == 0 {
        return Outcome::fail(EXIT_INPUT, "error: --max-blocks must be positive\n");
    }
    let spec = params.promise();
    let n = spec.period_n();
    let Some(max_len) = max_blocks.checked_mul(2 * n).filter(|&m| m <= MAX_LENGTH) else {
        return Outcome::fail(EXIT_INPUT, format!("error: lengths beyond {MAX_LENGTH}\n"));
    };
    let mut stdout = format!("N: {n}\n");
    let mut stderr = String::new();
    let mut failure = None;

    match machine {
        Some(path) => match load_machine(path) {
            Err(o) => return o,
            Ok(Machine::Quantum(q)) => {
                let limit = max_len.min(MAX_FLOAT_STEPS);
                if limit < max_len {
                    let _ = writeln!(
                        stderr,
                        "warning: float check truncated to {MAX_FLOAT_STEPS} steps"
                    );
                }
                match q.promise_counterexample(spec, limit, FLOAT_EXACT_TOLERANCE) {
                    None => {
                        let _ = writeln!(stdout, "qfa float: PASS (lengths 0..={limit})");
                    }
                    Some(m) => failure = Some(("qfa float", m)),
                }
            }
            Ok(Machine::Classical(d)) => match d.promise_counterexample(spec) {
                None => {
                    let _ = writeln!(stdout, "dfa: PASS ({} states)", d.num_states());
                }
                Some(m) => failure = Some(("dfa", m)),
            },
        },
        None => {
            let Some(rotation) = RotationMachine::new(denominator.unwrap_or(2 * n)) else {
                return Outcome::fail(EXIT_INPUT, "error: --denominator must be positive\n");
            };
            match promise_counterexample(rotation, spec, max_len) {
                None => {
                    let _ = writeln!(
                        stdout,
                        "qfa exact: PASS (D={}, lengths 0..={max_len})",
                        rotation.denominator()
                    );
                }
                Some(m) => failure = Some(("qfa exact", m)),
            }
            let dfa = build_min_dfa(params);
            match (failure, dfa.promise_counterexample(spec)) {
                (None, None) => {
                    let _ = writeln!(stdout, "dfa: PASS ({} states)", dfa.num_states());
                }
                (None, Some(m)) => failure = Some(("dfa", m)),
                _ => {}
            }
        }
    }
    match failure {
        None => Outcome {
            code: EXIT_OK,
            stdout,
            stderr,
        },
        Some((what, m)) => {
            let _ = writeln!(stdout, "{what}: FAIL\ncounterexample: m = {m}");
            Outcome {
                code: EXIT_FAILED,
                stdout,
                stderr,
            }
        }
    }
}

fn search(n: u64, max_states: usize, threads: Option<usize>, format: Format) -> Outcome {
    if format == Format::Csv {
        return Outcome::fail(EXIT_INPUT, "error: search supports plain or json\n");
    }
    if threads == Some(0) {
        return Outcome::fail(EXIT_INPUT, "error: --threads must be positive\n");
    }
    let report = match min_dfa_search(n, max_states, threads) {
        Ok(r) => r,
        Err(e @ OracleError::WitnessRejected(_)) => {
            return Outcome::fail(EXIT_INVARIANT, format!("error: {e}\n"))
        }
        Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}\n")),
    };
    let code = match report.minimal_states {
        MinimalStates::Found(_) => EXIT_OK,
        MinimalStates::NotFoundWithin(_) => EXIT_FAILED,
    };
    let stdout = match format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&report.to_json(true)).expect("json")
        ),
        _ => {
            let mut s = format!("n: {}\nmax_states: {}\n", report.n, report.max_states);
            match report.minimal_states {
                MinimalStates::Found(m) => {
                    let _ = writeln!(s, "minimal_states: {m}");
                }
                MinimalStates::NotFoundWithin(b) => {
                    let _ = writeln!(s, "minimal_states: not found within {b}");
                }
            }
            if let Some(w) = &report.witness {
                let _ = writeln!(s, "witness: {w}");
            }
            let _ = writeln!(s, "machines_checked: {}", report.machines_checked);
            for (size, stats) in &report.per_size {
                let _ = writeln!(
                    s,
                    "size {size}: checked {}, solving {}",
                    stats.machines_checked, stats.solving
                );
            }
            s
        }
    };
    Outcome {
        code,
        stdout,
        stderr: String::new(),
    }
}

fn table(k_max: u32, format: Format) -> Outcome {
    if k_max == 0 {
        return Outcome::fail(EXIT_INPUT, "error: --k-max must be at least 1\n");
    }
    if k_max > 61 {
        return Outcome::fail(EXIT_INPUT, "error: --k-max must be at most 61\n");
    }
    let rows = family_table(k_max);
    let stdout = match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &rows {
                w.serialize(row).expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
        }
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&rows).expect("json")),
        Format::Plain => {
            let mut s = format!(
                "{:>3} {:>20} {:>10} {:>20}  {}\n",
                "k", "N", "qfa_states", "dfa_states", "provenance"
            );
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:>3} {:>20} {:>10} {:>20}  {}",
                    r.k, r.n, r.qfa_states, r.dfa_states, r.provenance
                );
            }
            s
        }
    };
    Outcome::ok(stdout)
}
