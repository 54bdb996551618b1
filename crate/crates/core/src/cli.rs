//! Command-line front end.
//!
//! Exit codes: 0 feasible / success, 1 infeasible / failed verification,
//! 2 input or usage error. JSON goes to stdout for structured results and
//! CSV for scans.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::feasibility::{
    decide_alberti_uhlmann, decide_unital, dim_operator_system, parabola_coeffs, Decision,
    ProblemInstance, Verdict,
};
use crate::oracle::{
    channel_search_report, example_family, family_det1_boundary, family_threshold,
    random_instance, GridSpec, SampleMode, SearchBudget,
};
use crate::qmat2::{density_from_cmat, CMat2, C64};
use crate::synth::{synthesize_detailed, verify_channel, CPolicy, Channel, Provenance, TOL_VERIFY};

pub const EXIT_FEASIBLE: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "unifeas", version, about = "Unital qubit channels between pairs of states")]
pub struct Cli {
    /// Verification tolerance on trace-norm residuals.
    #[arg(long, global = true, env = "UNIFEAS_TOL")]
    pub tol: Option<f64>,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide feasibility; the exit code carries the verdict.
    Decide {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Unital)]
        mode: Mode,
    },
    /// Build a unital channel and report Kraus operators, Choi matrix and verification.
    Synthesize {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = PolicyArg::Midpoint)]
        c_policy: PolicyArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a channel file against an instance.
    Verify { instance: PathBuf, channel: PathBuf },
    /// CSV of slacks and verdicts along the example family.
    ScanFamily {
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// CSV of a trace-norm or determinant condition over a grid.
    Curve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Condition::Iv)]
        condition: Condition,
        /// Points per axis and range bound, as `N,R`.
        #[arg(long, default_value = "201,20", value_parser = parse_grid)]
        grid: GridSpec,
    },
    /// Print an instance file of the example family at `c`.
    Example {
        #[arg(long)]
        c: f64,
    },
    /// Print a random instance file drawn from `--seed`.
    Random {
        #[arg(long, value_enum, default_value_t = ModeSample::Any)]
        mode: ModeSample,
    },
    /// Search mixtures of unitaries for a channel; independent of the closed form.
    Search {
        instance: PathBuf,
        #[arg(long, default_value_t = SearchBudget::default().iterations)]
        budget: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Au,
    Unital,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Midpoint,
    Zero,
    Min,
    Max,
}

impl From<PolicyArg> for CPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Midpoint => CPolicy::Midpoint,
            PolicyArg::Zero => CPolicy::ZeroIfContained,
            PolicyArg::Min => CPolicy::Min,
            PolicyArg::Max => CPolicy::Max,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Condition {
    Iv,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeSample {
    Any,
    Feasible,
    Infeasible,
}

impl From<ModeSample> for SampleMode {
    fn from(m: ModeSample) -> Self {
        match m {
            ModeSample::Any => SampleMode::Any,
            ModeSample::Feasible => SampleMode::Feasible,
            ModeSample::Infeasible => SampleMode::Infeasible,
        }
    }
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let (n, r) = s.split_once(',').ok_or_else(|| format!("expected N,R, got {s:?}"))?;
    let n: usize = n.trim().parse().map_err(|e| format!("grid count: {e}"))?;
    let r: f64 = r.trim().parse().map_err(|e| format!("grid bound: {e}"))?;
    GridSpec::new(n, r).map_err(|e| e.to_string())
}

/// Matrix entry as it appears in files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

pub type MatrixFile = [[Entry; 2]; 2];

fn to_cmat(m: &MatrixFile) -> CMat2 {
    let e = |i: usize, j: usize| C64::new(m[i][j].re, m[i][j].im);
    CMat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
}

pub fn from_cmat(m: &CMat2) -> MatrixFile {
    m.0.map(|row| row.map(|z| Entry { re: z.re, im: z.im }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub rho1: MatrixFile,
    pub rho2: MatrixFile,
    pub tau1: MatrixFile,
    pub tau2: MatrixFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl InstanceFile {
    pub fn from_instance(inst: &ProblemInstance, label: Option<String>) -> Self {
        InstanceFile {
            rho1: from_cmat(inst.rho1.as_cmat()),
            rho2: from_cmat(inst.rho2.as_cmat()),
            tau1: from_cmat(inst.tau1.as_cmat()),
            tau2: from_cmat(inst.tau2.as_cmat()),
            label,
        }
    }

    /// Validates every state, naming the first one that fails.
    pub fn to_instance(&self) -> Result<ProblemInstance, String> {
        let d = |name: &str, m: &MatrixFile| {
            density_from_cmat(to_cmat(m)).map_err(|e| format!("{name}: {e}"))
        };
        Ok(ProblemInstance::new(
            d("rho1", &self.rho1)?,
            d("rho2", &self.rho2)?,
            d("tau1", &self.tau1)?,
            d("tau2", &self.tau2)?,
        ))
    }
}

/// Channel file: only `kraus` is read back; the rest is informational.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub kraus: Vec<MatrixFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<crate::synth::VerificationReport>,
}

impl ChannelFile {
    pub fn channel(&self) -> Channel {
        Channel::new(self.kraus.iter().map(to_cmat).collect(), Provenance::User)
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<(ProblemInstance, Option<String>), Failure> {
    let file: InstanceFile = read_json(path)?;
    let inst = file
        .to_instance()
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok((inst, file.label))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct DecideReport<'a> {
    label: Option<&'a str>,
    mode: &'static str,
    dim: usize,
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    alberti_uhlmann: Option<Decision>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unital: Option<Decision>,
}

fn cmd_decide(path: &Path, mode: Mode) -> Result<(String, i32), Failure> {
    let (inst, label) = load_instance(path)?;
    let au = matches!(mode, Mode::Au | Mode::All).then(|| decide_alberti_uhlmann(&inst));
    let unital = matches!(mode, Mode::Unital | Mode::All).then(|| decide_unital(&inst));
    // With both, the unital verdict is the headline.
    let verdict = unital.as_ref().or(au.as_ref()).expect("some mode selected").verdict;
    let report = DecideReport {
        label: label.as_deref(),
        mode: match mode {
            Mode::Au => "au",
            Mode::Unital => "unital",
            Mode::All => "all",
        },
        dim: dim_operator_system(&inst.rho1, &inst.rho2),
        verdict,
        alberti_uhlmann: au,
        unital,
    };
    let code = if verdict == Verdict::Feasible { EXIT_FEASIBLE } else { EXIT_INFEASIBLE };
    Ok((to_json(&report), code))
}

fn resolve_tol(tol: Option<f64>) -> Result<f64, Failure> {
    match tol {
        None => Ok(TOL_VERIFY),
        Some(t) if t > 0.0 && t.is_finite() => Ok(t),
        Some(t) => Err(Failure::input(format!("tolerance must be positive and finite, got {t}"))),
    }
}

fn choi_entries(ch: &Channel) -> Vec<Vec<Entry>> {
    let c = ch.choi();
    (0..4)
        .map(|i| (0..4).map(|j| Entry { re: c[(i, j)].re, im: c[(i, j)].im }).collect())
        .collect()
}

fn cmd_synthesize(
    path: &Path,
    policy: PolicyArg,
    out: Option<&Path>,
    tol: f64,
) -> Result<(String, i32), Failure> {
    let (inst, _) = load_instance(path)?;
    let synthesis = match synthesize_detailed(&inst, policy.into()) {
        Ok(s) => s,
        Err(Error::InfeasibleInstance(decision)) => {
            return Ok((to_json(&*decision), EXIT_INFEASIBLE));
        }
        Err(e) => return Err(Failure::input(e.to_string())),
    };
    let report = verify_channel(&synthesis.channel, &inst, tol);
    let passed = report.passed;
    let file = ChannelFile {
        kraus: synthesis.channel.kraus.iter().map(from_cmat).collect(),
        provenance: Some(synthesis.channel.provenance),
        choi: Some(choi_entries(&synthesis.channel)),
        params: Some(serde_json::json!({
            "dim": synthesis.dim,
            "pauli_diagonal": synthesis.params,
            "c_interval": synthesis.interval,
        })),
        verification: Some(report),
    };
    let text = to_json(&file);
    let code = if passed { EXIT_FEASIBLE } else { EXIT_INFEASIBLE };
    match out {
        Some(p) => {
            std::fs::write(p, &text).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
            Ok((String::new(), code))
        }
        None => Ok((text, code)),
    }
}

fn cmd_verify(inst_path: &Path, ch_path: &Path, tol: f64) -> Result<(String, i32), Failure> {
    let (inst, _) = load_instance(inst_path)?;
    let file: ChannelFile = read_json(ch_path)?;
    if file.kraus.is_empty() {
        return Err(Failure::input(format!("{}: no Kraus operators", ch_path.display())));
    }
    let report = verify_channel(&file.channel(), &inst, tol);
    let code = if report.passed { EXIT_FEASIBLE } else { EXIT_INFEASIBLE };
    Ok((to_json(&report), code))
}

fn family_row(out: &mut String, kind: &str, c: f64) {
    let inst = example_family(c).expect("c validated");
    let p = parabola_coeffs(&inst);
    let verdict = match decide_unital(&inst).verdict {
        Verdict::Feasible => "feasible",
        Verdict::Infeasible => "infeasible",
    };
    writeln!(out, "{kind},{c},{},{},{},{verdict}", p.a0, p.a2, p.discriminant_slack())
        .expect("writing to a String");
}

fn cmd_scan_family(from: f64, to: f64, steps: usize) -> Result<(String, i32), Failure> {
    let in_range = |x: f64| (0.0..=1.0).contains(&x);
    if !(in_range(from) && in_range(to) && from <= to) {
        return Err(Failure::input(format!("need 0 <= from <= to <= 1, got {from}..{to}")));
    }
    if steps == 0 {
        return Err(Failure::input("steps must be positive"));
    }
    let mut out = String::from("kind,c,det1_slack,det2_slack,discriminant_slack,verdict\n");
    for i in 0..=steps {
        let c = if i == steps { to } else { from + (to - from) * i as f64 / steps as f64 };
        family_row(&mut out, "sample", c);
    }
    family_row(&mut out, "threshold", family_threshold(1e-12));
    family_row(&mut out, "det1_boundary", family_det1_boundary(1e-12));
    Ok((out, EXIT_FEASIBLE))
}

fn cmd_curve(path: &Path, condition: Condition, grid: GridSpec) -> Result<(String, i32), Failure> {
    let (inst, _) = load_instance(path)?;
    let pts = grid.points();
    let mut out = String::new();
    match condition {
        Condition::Iv => {
            out.push_str("beta,gamma,lhs,rhs,margin\n");
            for &beta in &pts {
                for &gamma in &pts {
                    let comb = |a: &crate::qmat2::Herm2, b: &crate::qmat2::Herm2| {
                        (crate::qmat2::Herm2::maximally_mixed() + *a * beta + *b * gamma).trace_norm()
                    };
                    let lhs = comb(&inst.tau1, &inst.tau2);
                    let rhs = comb(&inst.rho1, &inst.rho2);
                    writeln!(out, "{beta},{gamma},{lhs},{rhs},{}", rhs - lhs).expect("String write");
                }
            }
        }
        Condition::V => {
            out.push_str("t,det_output,det_input,margin\n");
            for &t in &pts {
                let lhs = inst.output_pencil(t).det();
                let rhs = inst.input_pencil(t).det();
                writeln!(out, "{t},{lhs},{rhs},{}", lhs - rhs).expect("String write");
            }
        }
    }
    Ok((out, EXIT_FEASIBLE))
}

fn cmd_example(c: f64) -> Result<(String, i32), Failure> {
    let inst = example_family(c).map_err(|e| Failure::input(e.to_string()))?;
    Ok((to_json(&InstanceFile::from_instance(&inst, Some(format!("example family c={c}")))), 0))
}

fn cmd_random(seed: u64, mode: ModeSample) -> Result<(String, i32), Failure> {
    let inst = random_instance(seed, mode.into()).map_err(|e| Failure::input(e.to_string()))?;
    Ok((to_json(&InstanceFile::from_instance(&inst, Some(format!("random seed={seed}")))), 0))
}

#[derive(Serialize)]
struct SearchOutput {
    found: bool,
    residual: f64,
    iterations: usize,
    kraus: Vec<MatrixFile>,
}

fn cmd_search(path: &Path, budget: usize, seed: u64) -> Result<(String, i32), Failure> {
    let (inst, _) = load_instance(path)?;
    let report = channel_search_report(&inst, SearchBudget { iterations: budget, seed, ..Default::default() });
    let out = SearchOutput {
        found: report.found,
        residual: report.best.residual,
        iterations: report.best.iterations,
        kraus: report.best.channel.kraus.iter().map(from_cmat).collect(),
    };
    let code = if report.found { EXIT_FEASIBLE } else { EXIT_INFEASIBLE };
    Ok((to_json(&out), code))
}

fn dispatch(cli: Cli) -> Result<(String, i32), Failure> {
    let tol = resolve_tol(cli.tol)?;
    match cli.command {
        Command::Decide { instance, mode } => cmd_decide(&instance, mode),
        Command::Synthesize { instance, c_policy, out } => {
            cmd_synthesize(&instance, c_policy, out.as_deref(), tol)
        }
        Command::Verify { instance, channel } => cmd_verify(&instance, &channel, tol),
        Command::ScanFamily { from, to, steps } => cmd_scan_family(from, to, steps),
        Command::Curve { instance, condition, grid } => cmd_curve(&instance, condition, grid),
        Command::Example { c } => cmd_example(c),
        Command::Random { mode } => cmd_random(cli.seed, mode),
        Command::Search { instance, budget } => cmd_search(&instance, budget, cli.seed),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_FEASIBLE };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli) {
        Ok((text, code)) => {
            let _ = stdout.write_all(text.as_bytes());
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
