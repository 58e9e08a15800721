//! Command-line front end.
//!
//! Exit codes: 0 on success or a passing check, 1 when a check fails or a
//! refutation/infeasibility result is produced, 2 on usage, parse and shape
//! errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use symclone_core::{
    basic_cloner, basis_cloner, check_cloning_diagram, clone_residual_probe, darboux_basis, general_cloner,
    is_symplectic_map, readout_solver, refute_cloning, size_witness, standard_form, verify_cloning, CloningDiagram,
    CloningProcess, ComplexMatrix, ComplexVector, Error, HilbertInstance, HilbertSpace, RatMatrix, ReadoutOutcome,
    SizeCandidate, SkewForm, SymmetricMonoidal, SymplecticInstance, Verdict,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "symclone", version, about = "Construct, verify and refute cloning processes")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Human,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InstanceKind {
    Symp,
    Hilb,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit the explicit cloning process on the standard plane.
    ConstructBasic,
    /// Emit a cloning process for a symplectic space of dimension 2n.
    ConstructGeneral {
        /// Dimension of the object space (even). Uses the standard form.
        #[arg(long)]
        dim: Option<usize>,
        /// A skew-form JSON file to clone instead of the standard form.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Verify a cloning-process JSON file.
    Verify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Compute a Darboux basis for a skew-form JSON file.
    Darboux {
        #[arg(long)]
        input: PathBuf,
    },
    /// Solve F^T J_k F = -J_m for the readout block.
    ReadoutSolve {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
    },
    /// Exhibit why a candidate with a too-small machine cannot clone.
    SizeWitness {
        #[arg(long)]
        input: PathBuf,
    },
    /// Refute the controlled-shift cloner on a non-orthogonal pair.
    QuantumRefute {
        #[arg(long)]
        dim: usize,
        /// |<psi, psi~>| for psi = |0>, psi~ = t|0> + sqrt(1-t^2)|1>.
        #[arg(long)]
        psi_overlap: Option<f64>,
    },
    /// Numerically search for a cloning map with a too-small machine.
    Probe {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10_000)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the categorical cloning diagram for a process.
    DiagramCheck {
        #[arg(long, value_enum)]
        instance: InstanceKind,
        #[arg(long)]
        input: PathBuf,
        /// Number of sampled states (Hilbert instance).
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A finished command: what to print and how to exit.
struct Outcome {
    code: i32,
    json: serde_json::Value,
    human: String,
}

impl Outcome {
    fn new<T: Serialize>(code: i32, report: &T, human: String) -> Self {
        Outcome {
            code,
            json: serde_json::to_value(report).expect("reports serialize"),
            human,
        }
    }
}

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::usage(e.to_string())
    }
}

/// Parses `argv` (including the program name), runs the command and writes
/// the report. Returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write, color: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            return e.code;
        }
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&outcome.json).expect("json") + "\n",
        Format::Human => colorize(&outcome.human, color),
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_USAGE;
    }
    outcome.code
}

fn colorize(text: &str, color: bool) -> String {
    let mut out = if color {
        text.replace("PASS", "\x1b[32mPASS\x1b[0m")
            .replace("FAIL", "\x1b[31mFAIL\x1b[0m")
    } else {
        text.to_string()
    };
    if !out.ends_with('\n') {
        out.push('\n');
    }
    out
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        CliError::usage(format!("{}: invalid input at `{at}`: {}", path.display(), e.inner()))
    })
}

fn verdict_code(v: &Verdict) -> i32 {
    if v.is_pass() {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

fn verdict_line(v: &Verdict) -> String {
    match v {
        Verdict::Pass => "PASS".to_string(),
        Verdict::Fail(reason) => format!("FAIL: {reason}"),
    }
}

fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::ConstructBasic => Ok(process_outcome(basic_cloner())),
        Command::ConstructGeneral { dim, input } => {
            let form = match (dim, input) {
                (_, Some(path)) => read_json::<SkewForm>(path)?,
                (Some(d), None) if d % 2 == 0 => standard_form(d / 2),
                (Some(d), None) => return Err(CliError::usage(format!("--dim must be even, got {d}"))),
                (None, None) => return Err(CliError::usage("construct-general needs --dim or --input")),
            };
            if let (Some(d), Some(_)) = (dim, input) {
                if *d != form.dim() {
                    return Err(CliError::usage(format!(
                        "--dim {d} disagrees with input dimension {}",
                        form.dim()
                    )));
                }
            }
            Ok(process_outcome(general_cloner(&form)?))
        }
        Command::Verify { input } => {
            let c: CloningProcess = read_json(input)?;
            let report = verify_cloning(&c)?;
            let mut human = format!(
                "verify {}\n  symplectic defect (max abs): {}\n  cloning residual (max abs): {}\n  readout defect (max abs): {}\n",
                input.display(),
                report.symplectic_defect_norm,
                report.cloning_residual,
                report.readout_defect_norm
            );
            if let Some(d) = &report.first_defect_entry {
                human += &format!("  first defect entry: ({}, {}) = {}\n", d.row, d.col, d.value);
            }
            if let Some(f) = &report.first_cloning_failure {
                let state = f.basis_index.map_or("zero state".to_string(), |i| format!("e{i}"));
                human += &format!(
                    "  first cloning failure: {state}, coordinate {} = {}\n",
                    f.coordinate, f.residual
                );
            }
            human += &verdict_line(&report.verdict);
            Ok(Outcome::new(verdict_code(&report.verdict), &report, human))
        }
        Command::Darboux { input } => darboux(input),
        Command::ReadoutSolve { m, k } => {
            let outcome = readout_solver(*m, *k);
            #[derive(Serialize)]
            struct Report {
                m: usize,
                k: usize,
                #[serde(flatten)]
                outcome: ReadoutOutcome,
            }
            let (code, human) = match &outcome {
                ReadoutOutcome::Solved { readout } => (
                    EXIT_OK,
                    format!(
                        "readout {}x{} solves F^T J_{k} F = -J_{m}\n{}",
                        readout.rows(),
                        readout.cols(),
                        rows_text(readout)
                    ),
                ),
                ReadoutOutcome::Infeasible { reason, detail } => {
                    (EXIT_FAIL, format!("INFEASIBLE ({reason}): {detail}"))
                }
            };
            Ok(Outcome::new(code, &Report { m: *m, k: *k, outcome }, human))
        }
        Command::SizeWitness { input } => {
            let cand: SizeCandidate = read_json(input)?;
            let w = size_witness(&cand)?;
            let human = format!(
                "FAIL: machine too small\n  kernel vector w = ({})\n  F w = 0, so sigma(F w, F e{}) = {}\n  but omega(w, e{}) = {}",
                w.kernel_vector.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "),
                w.partner_index,
                w.pullback_value,
                w.partner_index,
                w.omega_value
            );
            Ok(Outcome::new(EXIT_FAIL, &w, human))
        }
        Command::QuantumRefute { dim, psi_overlap } => quantum_refute(*dim, *psi_overlap),
        Command::Probe { m, k, iters, seed } => {
            let r = clone_residual_probe(*m, *k, *iters, *seed)?;
            let bound = r
                .analytic_lower_bound
                .map_or(String::new(), |b| format!(" (analytic lower bound {b})"));
            let human = format!(
                "probe m={m} k={k} iters={iters} seed={seed}\n  best symplectic defect: {}{bound}",
                r.best_residual
            );
            Ok(Outcome::new(EXIT_OK, &r, human))
        }
        Command::DiagramCheck {
            instance,
            input,
            samples,
            seed,
        } => match instance {
            InstanceKind::Symp => diagram_symp(input),
            InstanceKind::Hilb => diagram_hilb(input, *samples, *seed),
        },
    }
}

fn rows_text(m: &RatMatrix) -> String {
    m.to_string_rows()
        .iter()
        .map(|r| format!("  [{}]", r.join(", ")))
        .collect::<Vec<_>>()
        .join("\n")
}

fn process_outcome(c: CloningProcess) -> Outcome {
    let human = format!(
        "cloning process: object dim {}, machine dim {}, phi {}x{}\nreadout:\n{}",
        c.object_dim(),
        c.machine_dim(),
        c.phi().rows(),
        c.phi().cols(),
        rows_text(c.readout())
    );
    Outcome::new(EXIT_OK, &c, human)
}

#[derive(Deserialize)]
struct RawForm {
    dim: usize,
    #[serde(flatten)]
    matrix: RatMatrix,
}

fn darboux(input: &Path) -> Result<Outcome, CliError> {
    let raw: RawForm = read_json(input)?;
    if raw.matrix.rows() != raw.dim || raw.matrix.cols() != raw.dim {
        return Err(CliError::usage(format!(
            "{}: dim {} does not match a {}x{} matrix",
            input.display(),
            raw.dim,
            raw.matrix.rows(),
            raw.matrix.cols()
        )));
    }
    #[derive(Serialize)]
    #[serde(tag = "status", rename_all = "lowercase")]
    enum Report {
        Ok {
            basis: RatMatrix,
            pullback_is_standard: bool,
        },
        Rejected {
            reason: String,
        },
    }
    let form = match SkewForm::new(raw.matrix) {
        Ok(f) => f,
        Err(e) => {
            let reason = e.to_string();
            return Ok(Outcome::new(
                EXIT_FAIL,
                &Report::Rejected { reason: reason.clone() },
                format!("FAIL: {reason}"),
            ));
        }
    };
    let basis = darboux_basis(&form)?;
    let ok = is_symplectic_map(&basis, &standard_form(form.degrees_of_freedom()), &form)?;
    let human = format!(
        "Darboux basis (columns e1, f1, ...), P^T Omega P = J: {}\n{}",
        if ok { "PASS" } else { "FAIL" },
        rows_text(&basis)
    );
    let code = if ok { EXIT_OK } else { EXIT_FAIL };
    Ok(Outcome::new(
        code,
        &Report::Ok {
            basis,
            pullback_is_standard: ok,
        },
        human,
    ))
}

fn quantum_refute(dim: usize, overlap: Option<f64>) -> Result<Outcome, CliError> {
    if dim == 0 {
        return Err(CliError::usage("--dim must be at least 1"));
    }
    let t = overlap.unwrap_or(std::f64::consts::FRAC_1_SQRT_2);
    if !(0.0..=1.0).contains(&t) {
        return Err(CliError::usage(format!("--psi-overlap must lie in [0, 1], got {t}")));
    }
    #[derive(Serialize)]
    #[serde(tag = "status", rename_all = "kebab-case")]
    enum Report {
        Refuted {
            dim: usize,
            psi_overlap: f64,
            #[serde(flatten)]
            refutation: symclone_core::Refutation,
        },
        NoRefutation {
            dim: usize,
            reason: String,
        },
    }
    let u = basis_cloner(dim);
    let beta = ComplexVector::basis(dim, 0);
    let rho = ComplexVector::basis(1, 0);
    let psi = ComplexVector::basis(dim, 0);
    let psi2 = if dim >= 2 {
        let mut e = vec![0.0; dim];
        e[0] = t;
        e[1] = (1.0 - t * t).max(0.0).sqrt();
        ComplexVector::from_real(&e)
    } else {
        psi.clone()
    };
    match refute_cloning(&u, &beta, &rho, &psi, &psi2) {
        Ok(r) => {
            let human = format!(
                "REFUTED: |<psi,psi~>| = {t}\n  cloning would force |<f(psi), f(psi~)>| = {} > 1 (Cauchy-Schwarz excess {})\n  direct cloning residual: {}",
                r.implied_readout_overlap, r.cauchy_schwarz_excess, r.direct_cloning_residual
            );
            Ok(Outcome::new(
                EXIT_FAIL,
                &Report::Refuted {
                    dim,
                    psi_overlap: t,
                    refutation: r,
                },
                human,
            ))
        }
        Err(e @ Error::NoValidPair(_)) => {
            let reason = e.to_string();
            Ok(Outcome::new(
                EXIT_OK,
                &Report::NoRefutation {
                    dim,
                    reason: reason.clone(),
                },
                reason,
            ))
        }
        Err(e) => Err(e.into()),
    }
}

fn diagram_outcome(report: &symclone_core::DiagramReport) -> Outcome {
    let mut human = format!(
        "diagram check: {} states, c is {}an arrow\n  {}\n",
        report.checks.len(),
        if report.arrow_valid { "" } else { "not " },
        report.note
    );
    if let Some(i) = report.first_failure {
        human += &format!("  first failing state: #{i} (residual {})\n", report.checks[i].residual);
    }
    human += &verdict_line(&report.verdict);
    Outcome::new(verdict_code(&report.verdict), report, human)
}

fn diagram_symp(input: &Path) -> Result<Outcome, CliError> {
    let c: CloningProcess = read_json(input)?;
    let inst = SymplecticInstance;
    let mut diagram = inst.diagram_from_process(&c)?;
    if c.machine_dim() == 0 {
        diagram.machine = None;
    }
    let report = check_cloning_diagram(&inst, &diagram, &inst.states(c.object_form(), 0, 0))?;
    Ok(diagram_outcome(&report))
}

#[derive(Deserialize)]
struct HilbertDiagramInput {
    u: ComplexMatrix,
    beta: ComplexVector,
    rho: Option<ComplexVector>,
}

fn diagram_hilb(input: &Path, samples: usize, seed: u64) -> Result<Outcome, CliError> {
    let raw: HilbertDiagramInput = read_json(input)?;
    let inst = HilbertInstance::default();
    let d = raw.beta.dim();
    let rho = raw.rho.unwrap_or_else(|| ComplexVector::basis(1, 0));
    let kd = rho.dim();
    let diagram = CloningDiagram::<HilbertInstance> {
        object: HilbertSpace(d),
        beta: raw.beta.as_column(),
        machine: Some((HilbertSpace(kd), rho.as_column())),
        c: raw.u.clone(),
        readout: Box::new(HilbertInstance::best_match_readout(raw.u, raw.beta, rho)),
    };
    let report = check_cloning_diagram(&inst, &diagram, &inst.states(&HilbertSpace(d), samples, seed))?;
    Ok(diagram_outcome(&report))
}
