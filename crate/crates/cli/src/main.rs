//! `haar-trace`: batch front end to the haar-trace library.
//!
//! Every run is a pure function of its parsed arguments. JSON output carries
//! the arguments and the library version ahead of the result; CSV written to a
//! file gets a `<out>.meta.json` sidecar instead, and CSV on stdout gets the
//! same information as leading `#` lines.
//!
//! Exit codes: 0 pass, 1 violation, 2 usage, 3 numerical non-convergence.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use haar_trace::bounds::{
    agreement_xi_samples, big_c_table_check, charfn_xi_samples, check_charfn_bounds, corollary_gate_table,
    l2_distance_exact, lemma_suite, pointwise_bounds, theorem_bounds, verify_bounds, L2Grid,
};
use haar_trace::detform::char_fn_det_with;
use haar_trace::fredholm::{char_fn_fredholm_detailed, charfn_agreement_suite, identity_suite};
use haar_trace::moments::{moment_identity_check, MAX_PARTITION_WEIGHT};
use haar_trace::sampling::sample_batch;
use haar_trace::{group_spec, GroupKind, GroupSpec};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(
    name = "haar-trace",
    version,
    about = "Trace statistics of Haar orthogonal and symplectic matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Evaluate every theorem and corollary bound at (m, n), optionally with pointwise bounds at ξ.
    Bounds(BoundsArgs),
    /// Compare exact group moments with the Gaussian moments.
    Moments(MomentsArgs),
    /// Characteristic function via the determinant and Fredholm routes.
    Charfn(CharfnArgs),
    /// Draw trace vectors from the Haar measure.
    Sample(SampleArgs),
    /// Run identity and inequality suites; exits 1 on any violation.
    Verify(VerifyArgs),
    /// Emit a CSV table.
    Report(ReportArgs),
}

fn parse_group(s: &str) -> Result<GroupKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = GroupKind::ALL.iter().map(|k| k.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

#[derive(Args, Debug, Serialize)]
struct GroupArgs {
    /// o-even-plus, o-even-minus, o-odd-plus, o-odd-minus or sp
    #[arg(long, value_parser = parse_group)]
    group: GroupKind,
    /// Group size parameter (O(2n), O(2n+1) or Sp(2n)).
    #[arg(long)]
    n: usize,
}

impl GroupArgs {
    fn spec(&self) -> Result<GroupSpec, CliError> {
        Ok(group_spec(self.group, self.n)?)
    }
}

#[derive(Args, Debug, Serialize)]
struct BoundsArgs {
    #[arg(long)]
    m: f64,
    /// Dimension parameter; any positive real, evaluated in log space.
    #[arg(long)]
    n: f64,
    /// With --xi, also report pointwise bounds for this group at Sp/O size n.
    #[arg(long, value_parser = parse_group, requires = "xi")]
    group: Option<GroupKind>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, requires = "group")]
    xi: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct MomentsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    /// Largest Σ j·m_j; defaults to one past the identity's range, at most 8.
    #[arg(long)]
    max_weight: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CharfnArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[arg(long)]
    m: usize,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    xi: Vec<f64>,
    /// Starting Fourier truncation K (still doubled until converged).
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Suite {
    Moments,
    Charfn,
    Fredholm,
    Bounds,
    Lemmas,
    All,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, value_parser = parse_group, default_value = "sp")]
    group: GroupKind,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Dimension of ξ for the charfn suite.
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long)]
    max_weight: Option<usize>,
    /// Randomized trials per suite (charfn: ξ draws, fredholm: symbols per variant, lemmas: trials).
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Table {
    BigC,
    CorollaryGates,
    Convergence,
}

#[derive(Args, Debug, Serialize)]
struct ReportArgs {
    #[arg(long, value_enum)]
    table: Table,
    /// Convergence table only.
    #[arg(long, value_parser = parse_group, default_value = "sp")]
    group: GroupKind,
    /// Convergence table only: comma-separated group sizes.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Half-width of the integration box.
    #[arg(long)]
    radius: Option<f64>,
    /// Initial panels per axis.
    #[arg(long)]
    panels: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] haar_trace::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use haar_trace::Error as E;
        match self {
            CliError::Lib(
                E::NonConvergence { .. }
                | E::FredholmNonConvergence { .. }
                | E::InsufficientTruncation { .. }
                | E::NonFiniteSymbol { .. }
                | E::Eigen(_),
            ) => 3,
            _ => 2,
        }
    }
}

#[derive(Serialize)]
struct Header<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a Command,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    #[serde(flatten)]
    header: Header<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pass: Option<bool>,
    result: T,
}

#[derive(Serialize)]
struct Failure<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    error: &'static str,
    message: String,
}

fn header(config: &Command) -> Header<'_> {
    Header {
        tool: "haar-trace",
        version: VERSION,
        config,
    }
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(
    config: &Command,
    out: Option<&Path>,
    pass: Option<bool>,
    result: T,
) -> Result<(), CliError> {
    let doc = Document {
        header: header(config),
        pass,
        result,
    };
    let text = serde_json::to_string_pretty(&doc).map_err(haar_trace::Error::from)? + "\n";
    write_text(out, &text)
}

fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes `rows` as CSV; the header row is written even when `rows` is empty.
fn emit_csv<R: Serialize>(config: &Command, out: Option<&Path>, columns: &[&str], rows: &[R]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(columns)?;
    for r in rows {
        w.serialize(r)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("CSV output is UTF-8");
    let head = serde_json::to_string(&header(config)).map_err(haar_trace::Error::from)?;
    match out {
        Some(p) => {
            std::fs::write(p, body)?;
            std::fs::write(meta_path(p), head + "\n")?;
        }
        None => write_text(None, &format!("# {head}\n{body}"))?,
    }
    Ok(())
}

#[derive(Serialize)]
struct ComplexOut {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexOut {
    fn from(z: Complex64) -> Self {
        ComplexOut { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct CharfnResult {
    group: GroupSpec,
    xi: Vec<f64>,
    /// Determinant-route value, the reference.
    value: ComplexOut,
    fredholm: ComplexOut,
    abs_difference: f64,
    /// Pivot ratio of the truncated Fredholm block; large values mean the
    /// Fredholm value is dominated by cancellation.
    fredholm_pivot_ratio: f64,
    fredholm_warning: Option<String>,
    gaussian: f64,
}

#[derive(Serialize)]
struct Section {
    suite: &'static str,
    pass: bool,
    report: Value,
}

#[derive(Serialize)]
struct ConvergenceRow {
    n: usize,
    density_index: usize,
    l2_distance: f64,
    inside: f64,
    gaussian_tail: f64,
    panels: usize,
    refinement_change: f64,
}

enum Outcome {
    Pass,
    Violation,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    Ok(serde_json::to_value(v).map_err(haar_trace::Error::from)?)
}

/// Default ceiling on Σ j·m_j; the contour grid grows exponentially with the
/// number of distinct powers, so larger weights must be asked for explicitly.
const DEFAULT_MAX_WEIGHT: usize = 8;

fn default_max_weight(spec: &GroupSpec, requested: Option<usize>) -> Result<usize, CliError> {
    let w = requested.unwrap_or((spec.moment_range() + 1).min(DEFAULT_MAX_WEIGHT));
    if w > MAX_PARTITION_WEIGHT {
        return Err(CliError::Usage(format!(
            "--max-weight must be at most {MAX_PARTITION_WEIGHT}"
        )));
    }
    Ok(w)
}

fn check_xi_len(m: usize, xi: &[f64]) -> Result<(), CliError> {
    if m == 0 || xi.len() != m {
        return Err(CliError::Usage(format!("--xi has {} entries but --m is {m}", xi.len())));
    }
    Ok(())
}

fn run_bounds(config: &Command, a: &BoundsArgs) -> Result<Outcome, CliError> {
    #[derive(Serialize)]
    struct Out {
        theorem: haar_trace::bounds::BoundReport,
        #[serde(skip_serializing_if = "Option::is_none")]
        pointwise: Option<haar_trace::bounds::PointwiseBounds>,
    }
    let theorem = theorem_bounds(a.m, a.n)?;
    let pointwise = match (a.group, &a.xi) {
        (Some(kind), Some(xi)) => {
            if a.n.fract() != 0.0 || a.n < 1.0 || a.n > 1e9 {
                return Err(CliError::Usage("pointwise bounds need an integer --n".into()));
            }
            if a.m.fract() != 0.0 {
                return Err(CliError::Usage("pointwise bounds need an integer --m".into()));
            }
            check_xi_len(a.m as usize, xi)?;
            Some(pointwise_bounds(&group_spec(kind, a.n as usize)?, xi))
        }
        _ => None,
    };
    emit_json(config, a.out.as_deref(), None, Out { theorem, pointwise })?;
    Ok(Outcome::Pass)
}

fn run_moments(config: &Command, a: &MomentsArgs) -> Result<Outcome, CliError> {
    let spec = a.group.spec()?;
    let report = moment_identity_check(&spec, default_max_weight(&spec, a.max_weight)?)?;
    let pass = report.all_pass();
    emit_json(config, a.out.as_deref(), Some(pass), report)?;
    Ok(if pass { Outcome::Pass } else { Outcome::Violation })
}

fn run_charfn(config: &Command, a: &CharfnArgs) -> Result<Outcome, CliError> {
    check_xi_len(a.m, &a.xi)?;
    let spec = a.group.spec()?;
    let det = char_fn_det_with(&spec, &a.xi, a.truncation)?.value();
    let (fred, detail) = char_fn_fredholm_detailed(&spec, &a.xi, a.truncation)?;
    let norm2: f64 = a.xi.iter().map(|x| x * x).sum();
    let result = CharfnResult {
        group: spec,
        xi: a.xi.clone(),
        value: det.into(),
        fredholm: fred.into(),
        abs_difference: (det - fred).norm(),
        fredholm_pivot_ratio: detail.pivot_ratio,
        fredholm_warning: detail.warning,
        gaussian: (-0.5 * norm2).exp(),
    };
    emit_json(config, a.out.as_deref(), None, result)?;
    Ok(Outcome::Pass)
}

fn run_sample(config: &Command, a: &SampleArgs) -> Result<Outcome, CliError> {
    let spec = a.group.spec()?;
    let batch = sample_batch(&spec, a.m, a.count, a.seed)?;
    match a.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out {
                batch: Value,
                rows: Vec<Vec<f64>>,
            }
            let rows = batch.rows().map(|r| r.to_vec()).collect();
            emit_json(
                config,
                a.out.as_deref(),
                None,
                Out {
                    batch: batch.sidecar(),
                    rows,
                },
            )?;
        }
        Format::Csv => {
            let columns: Vec<String> = (1..=a.m).map(|k| format!("X{k}")).collect();
            let columns: Vec<&str> = columns.iter().map(String::as_str).collect();
            let rows: Vec<Vec<String>> = batch
                .rows()
                .map(|r| r.iter().map(|x| format!("{x:.17e}")).collect())
                .collect();
            emit_csv(config, a.out.as_deref(), &columns, &rows)?;
        }
    }
    Ok(Outcome::Pass)
}

fn run_verify(config: &Command, a: &VerifyArgs) -> Result<Outcome, CliError> {
    let wants = |s: Suite| a.suite == s || a.suite == Suite::All;
    let spec = group_spec(a.group, a.n)?;
    let mut sections = Vec::new();
    if wants(Suite::Moments) {
        let r = moment_identity_check(&spec, default_max_weight(&spec, a.max_weight)?)?;
        sections.push(Section {
            suite: "moments",
            pass: r.all_pass(),
            report: to_value(&r)?,
        });
    }
    if wants(Suite::Charfn) {
        if a.m == 0 {
            return Err(CliError::Usage("--m must be positive".into()));
        }
        let count = a.count.unwrap_or(200);
        let xs = charfn_xi_samples(&spec, a.m, count, a.seed);
        let bounds = check_charfn_bounds(&spec, &xs)?;
        let near = agreement_xi_samples(a.m, count, a.seed);
        let agreement = charfn_agreement_suite(&spec, &near)?;
        let pass = bounds.all_pass() && agreement.violations == 0;
        let report = serde_json::json!({ "pointwise": to_value(&bounds)?, "agreement": to_value(&agreement)? });
        sections.push(Section {
            suite: "charfn",
            pass,
            report,
        });
    }
    if wants(Suite::Fredholm) {
        let s = identity_suite(a.count.unwrap_or(20), 2..=6, a.seed)?;
        sections.push(Section {
            suite: "fredholm",
            pass: s.passed(),
            report: to_value(&s)?,
        });
    }
    if wants(Suite::Bounds) {
        let r = verify_bounds()?;
        sections.push(Section {
            suite: "bounds",
            pass: r.pass,
            report: to_value(&r)?,
        });
    }
    if wants(Suite::Lemmas) {
        let r = lemma_suite(a.count.unwrap_or(1000), a.seed)?;
        sections.push(Section {
            suite: "lemmas",
            pass: r.all_pass(),
            report: to_value(&r)?,
        });
    }
    let pass = sections.iter().all(|s| s.pass);
    emit_json(config, a.out.as_deref(), Some(pass), sections)?;
    Ok(if pass { Outcome::Pass } else { Outcome::Violation })
}

fn run_report(config: &Command, a: &ReportArgs) -> Result<Outcome, CliError> {
    let out = a.out.as_deref();
    match a.table {
        Table::BigC => {
            let rows = big_c_table_check();
            emit_csv(
                config,
                out,
                &["m", "computed", "computed_floor3", "tabulated", "pass"],
                &rows,
            )?;
        }
        Table::CorollaryGates => {
            let rows = corollary_gate_table()?;
            let columns = [
                "bound",
                "n_exponent",
                "m_min",
                "applicable",
                "ln_bound",
                "ln_l2_total",
                "holds",
            ];
            emit_csv(config, out, &columns, &rows)?;
        }
        Table::Convergence => {
            let mut ns = a.n.clone();
            ns.sort_unstable();
            ns.dedup();
            let defaults = L2Grid::default();
            let grid = L2Grid {
                radius: a.radius.unwrap_or(defaults.radius),
                panels: a.panels.unwrap_or(defaults.panels),
            };
            let mut rows = Vec::new();
            for n in ns {
                let spec = group_spec(a.group, n)?;
                let d = l2_distance_exact(&spec, a.m, grid)?;
                rows.push(ConvergenceRow {
                    n,
                    density_index: spec.density_index(),
                    l2_distance: d.value,
                    inside: d.inside,
                    gaussian_tail: d.gaussian_tail,
                    panels: d.panels,
                    refinement_change: d.refinement_change,
                });
            }
            let columns = [
                "n",
                "density_index",
                "l2_distance",
                "inside",
                "gaussian_tail",
                "panels",
                "refinement_change",
            ];
            emit_csv(config, out, &columns, &rows)?;
        }
    }
    Ok(Outcome::Pass)
}

fn run(config: &Command) -> Result<Outcome, CliError> {
    match config {
        Command::Bounds(a) => run_bounds(config, a),
        Command::Moments(a) => run_moments(config, a),
        Command::Charfn(a) => run_charfn(config, a),
        Command::Sample(a) => run_sample(config, a),
        Command::Verify(a) => run_verify(config, a),
        Command::Report(a) => run_report(config, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Err(e) => {
            let code = e.exit_code();
            eprintln!("haar-trace: {e}");
            if code == 3 {
                let diag = Failure {
                    header: header(&cli.command),
                    error: "non-convergence",
                    message: e.to_string(),
                };
                if let Ok(text) = serde_json::to_string_pretty(&diag) {
                    println!("{text}");
                }
            }
            ExitCode::from(code)
        }
    }
}
