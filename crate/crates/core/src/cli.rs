//! The `born-kernel` command line.
//!
//! Exit codes: 0 success, 1 domain failure (axiom, precondition, cap),
//! 2 malformed input or usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::decision::{
    check_all, derive_representation, generate_rich_family_with_cap, induced_ordering, verify_representation,
    DecisionError, DEFAULT_FAMILY_CAP,
};
use crate::erasure::{p_sweep, reachable_set, sets_equal, two_outcome_prep, ErasureError, GameSpec};
use crate::formats::{
    assignment_to_json, family_to_json, ordering_to_json, parse_family, parse_ordering, parse_quadruple,
    quadruple_to_json, sha256_hex, to_pretty, FormatError, QuadrupleDoc, SCHEMA,
};
use crate::neutrality::canonical_form;
use crate::numeric::NumericPolicy;
use crate::rational::RationalWeight;

/// Environment variable overriding the rich-family size cap.
pub const CAP_ENV: &str = "BORN_KERNEL_CAP";

#[derive(Debug, Parser)]
#[command(name = "born-kernel", version, about = "Check likelihood orderings over quantum events and derive their probabilities")]
struct Cli {
    /// Emit the JSON run report on stdout.
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Emit a plain-text summary (default).
    #[arg(long, global = true)]
    text: bool,
    /// Tolerance overrides, e.g. `norm=1e-12,projector=1e-10,cluster=1e-9`.
    #[arg(long, global = true, value_name = "SPEC")]
    numeric_policy: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the four axiom checks on an ordering.
    Check {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        ordering: PathBuf,
    },
    /// Derive the representing probability measure and verify it.
    Derive {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        ordering: PathBuf,
        #[arg(short = 'K', long = "k")]
        k: u64,
        /// Where to write the assignment JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the erased reachable sets of games 1 and 2 at `p = num/den`.
    DemoErasure {
        #[arg(long)]
        p_num: u64,
        #[arg(long)]
        p_den: u64,
        #[arg(long, default_value_t = crate::erasure::DEFAULT_INDEX_RANGE)]
        index_range: u32,
    },
    /// Reduce a measurement quadruple to its canonical form.
    Canon {
        #[arg(long)]
        quad: PathBuf,
    },
    /// Write the rich family for `K` and its induced ordering.
    GenRich {
        #[arg(short = 'K', long = "k")]
        k: u64,
        #[arg(long)]
        max_outcomes: u64,
        #[arg(long)]
        out: PathBuf,
        /// Ordering output path; defaults to `<out stem>.ordering.json`.
        #[arg(long)]
        ordering: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
    pub witness_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    pub inputs_digest: String,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifacts: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    fn new(command: &str, inputs_digest: String) -> Self {
        Self {
            schema: SCHEMA,
            command: command.into(),
            inputs_digest,
            verdicts: Vec::new(),
            artifacts: None,
            error: None,
        }
    }

    fn verdict(&mut self, check: impl Into<String>, pass: bool, witness_count: u64) {
        self.verdicts.push(Verdict {
            check: check.into(),
            pass,
            witness_count,
        });
    }

    fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

enum Failure {
    Input(String),
    Domain(String),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Decision(d) => d.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<DecisionError> for Failure {
    fn from(e: DecisionError) -> Self {
        Failure::Domain(e.to_string())
    }
}

struct Outcome {
    report: RunReport,
    text: String,
    code: i32,
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn utf8<'a>(path: &Path, bytes: &'a [u8]) -> Result<&'a str, Failure> {
    std::str::from_utf8(bytes).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path) -> impl Fn(FormatError) -> Failure + '_ {
    move |e| match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        d => d,
    }
}

/// Digest over each input's length and bytes, in order.
fn digest_inputs(inputs: &[&[u8]]) -> String {
    let mut all = Vec::new();
    for i in inputs {
        all.extend_from_slice(&(i.len() as u64).to_le_bytes());
        all.extend_from_slice(i);
    }
    sha256_hex(&all)
}

/// `x` rounded to `digits` significant digits, trailing zeros trimmed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn cmd_check(family: &Path, ordering: &Path) -> Result<Outcome, Failure> {
    let fam_bytes = read(family)?;
    let ord_bytes = read(ordering)?;
    let fam = Arc::new(parse_family(utf8(family, &fam_bytes)?).map_err(in_file(family))?);
    let ord = parse_ordering(utf8(ordering, &ord_bytes)?, fam).map_err(in_file(ordering))?;
    let mut report = RunReport::new("check", digest_inputs(&[&fam_bytes, &ord_bytes]));
    let reports = check_all(&ord);
    let mut text = String::new();
    for r in &reports {
        report.verdict(format!("{:?}", r.axiom), r.satisfied, r.violation_count);
        text += &format!(
            "{} {:?} ({} violations)\n",
            if r.satisfied { "PASS" } else { "FAIL" },
            r.axiom,
            r.violation_count
        );
        for w in &r.witnesses {
            text += &format!("  witness: {}\n", serde_json::to_string(w).expect("witness serializes"));
        }
    }
    report.artifacts = Some(json!({ "axiom_reports": reports }));
    let code = if report.all_pass() { 0 } else { 1 };
    Ok(Outcome { report, text, code })
}

fn cmd_derive(family: &Path, ordering: &Path, k: u64, out: Option<&Path>) -> Result<Outcome, Failure> {
    let fam_bytes = read(family)?;
    let ord_bytes = read(ordering)?;
    let fam = Arc::new(parse_family(utf8(family, &fam_bytes)?).map_err(in_file(family))?);
    let ord = parse_ordering(utf8(ordering, &ord_bytes)?, fam).map_err(in_file(ordering))?;
    let mut report = RunReport::new("derive", digest_inputs(&[&fam_bytes, &ord_bytes, &k.to_le_bytes()]));
    for r in check_all(&ord) {
        report.verdict(format!("{:?}", r.axiom), r.satisfied, r.violation_count);
    }
    let pr = match derive_representation(&ord, k) {
        Ok(pr) => pr,
        Err(e) => {
            let text = format!("derive failed: {e}\n");
            report.error = Some(e.to_string());
            return Ok(Outcome { report, text, code: 1 });
        }
    };
    let verification = verify_representation(&pr, &ord)?;
    report.verdict("Representation", verification.represents, verification.violation_count());
    let assignment = assignment_to_json(&pr)?;
    if let Some(path) = out {
        write(path, &assignment)?;
    }
    let mut text = String::new();
    for (m, meas) in pr.family().measurements().iter().enumerate() {
        let vals: Vec<String> = pr.outcome_values(m).iter().map(|v| v.to_string()).collect();
        let pairs: Vec<String> = meas.outcomes().iter().zip(&vals).map(|(o, v)| format!("{o}={v}")).collect();
        text += &format!("{}: {}\n", meas.id(), pairs.join(" "));
    }
    text += &format!(
        "representation {}\n",
        if verification.represents { "verified" } else { "FAILED" }
    );
    report.artifacts = Some(json!({
        "assignment": serde_json::from_str::<Value>(&assignment).expect("assignment is JSON"),
        "representation": verification,
    }));
    let code = if report.all_pass() { 0 } else { 1 };
    Ok(Outcome { report, text, code })
}

fn cmd_demo_erasure(p_num: u64, p_den: u64, index_range: u32) -> Result<Outcome, Failure> {
    if p_den == 0 || p_num == 0 || p_num >= p_den {
        return Err(Failure::Input(format!("p = {p_num}/{p_den} must lie strictly between 0 and 1")));
    }
    if index_range == 0 {
        return Err(Failure::Input("--index-range must be at least 1".into()));
    }
    let p = RationalWeight::from_ints(p_num, p_den).map_err(|e| Failure::Input(e.to_string()))?;
    let erasure = |e: ErasureError| Failure::Domain(e.to_string());
    let prep = two_outcome_prep(&p);
    let s1 = reachable_set(&prep, &GameSpec::game1(), index_range).map_err(erasure)?;
    let s2 = reachable_set(&prep, &GameSpec::game2(), index_range).map_err(erasure)?;
    let equal = sets_equal(&s1, &s2);
    let sweep = p_sweep(16, index_range).map_err(erasure)?;
    let half = RationalWeight::from_ints(1, 2).expect("1/2");
    let sweep_ok = sweep.iter().all(|r| r.equal == (r.p == half));

    let digest = digest_inputs(&[format!("demo-erasure p={p} index_range={index_range}").as_bytes()]);
    let mut report = RunReport::new("demo-erasure", digest);
    report.verdict("ReachableSetsEqual", equal, 0);
    report.verdict("SweepEqualOnlyAtHalf", sweep_ok, sweep.iter().filter(|r| r.equal != (r.p == half)).count() as u64);
    let mut text = format!("p = {p}, index range {index_range}\n");
    text += &format!("game 1 + erasure: {} states\n", s1.len());
    for s in &s1.states {
        text += &format!("  {s}\n");
    }
    text += &format!("game 2 + erasure: {} states\n", s2.len());
    for s in &s2.states {
        text += &format!("  {s}\n");
    }
    text += &format!("reachable sets {}\n", if equal { "equal" } else { "differ" });
    text += "sweep p = k/16:\n";
    for r in &sweep {
        text += &format!("  {:>5}  {}\n", r.p.to_string(), if r.equal { "equal" } else { "differ" });
    }
    report.artifacts = Some(json!({
        "p": p,
        "index_range": index_range,
        "game1": s1,
        "game2": s2,
        "equal": equal,
        "sweep": sweep,
    }));
    let code = if sweep_ok { 0 } else { 1 };
    Ok(Outcome { report, text, code })
}

fn cmd_canon(quad: &Path, policy: &NumericPolicy) -> Result<Outcome, Failure> {
    let bytes = read(quad)?;
    let q = parse_quadruple(utf8(quad, &bytes)?, policy).map_err(|e| Failure::Input(format!("{}: {e}", quad.display())))?;
    let form = canonical_form(&q);
    let canonical = form.quadruple();
    let (w, c, d) = (
        format_significant(form.weight_value, 12),
        format_significant(form.c, 12),
        format_significant(form.d, 12),
    );
    let mut report = RunReport::new("canon", digest_inputs(&[&bytes]));
    report.verdict("Canonicalized", true, 0);
    let canon_json = quadruple_to_json(&canonical);
    let text = format!("weight {w}\nc {c}\nd {d}\n{canon_json}");
    report.artifacts = Some(json!({
        "weight": w,
        "c": c,
        "d": d,
        "canonical_quadruple": QuadrupleDoc::from_quadruple(&canonical),
    }));
    Ok(Outcome { report, text, code: 0 })
}

fn sibling_ordering_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.ordering.json"))
}

fn cmd_gen_rich(k: u64, max_outcomes: u64, out: &Path, ordering: Option<&Path>, cap: u64) -> Result<Outcome, Failure> {
    if k == 0 || max_outcomes == 0 {
        return Err(Failure::Input("-K and --max-outcomes must be positive".into()));
    }
    let fam = generate_rich_family_with_cap(k, max_outcomes, cap)?;
    let ord = induced_ordering(&fam)?;
    let ord_path = ordering.map(Path::to_path_buf).unwrap_or_else(|| sibling_ordering_path(out));
    write(out, &family_to_json(&fam))?;
    write(&ord_path, &ordering_to_json(&ord))?;
    let digest = digest_inputs(&[format!("gen-rich K={k} max_outcomes={max_outcomes} cap={cap}").as_bytes()]);
    let mut report = RunReport::new("gen-rich", digest);
    report.verdict("Generated", true, 0);
    report.artifacts = Some(json!({
        "measurements": fam.len(),
        "events": ord.len(),
        "family_digest": crate::formats::family_digest(&fam),
        "family_path": out.display().to_string(),
        "ordering_path": ord_path.display().to_string(),
    }));
    let text = format!(
        "wrote {} measurements to {} and the induced ordering to {}\n",
        fam.len(),
        out.display(),
        ord_path.display()
    );
    Ok(Outcome { report, text, code: 0 })
}

fn family_cap() -> Result<u64, Failure> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("{CAP_ENV}=`{v}` is not a nonnegative integer"))),
        Err(_) => Ok(DEFAULT_FAMILY_CAP),
    }
}

/// Parses `args` (program name first), runs the command, writes the report
/// to `stdout` and diagnostics to `stderr`, and returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let policy = match cli.numeric_policy.as_deref().map(NumericPolicy::parse).transpose() {
        Ok(p) => p.unwrap_or_default(),
        Err(e) => {
            let _ = writeln!(stderr, "error: --numeric-policy: {e}");
            return 2;
        }
    };
    let result = match &cli.command {
        Command::Check { family, ordering } => cmd_check(family, ordering),
        Command::Derive { family, ordering, k, out } => cmd_derive(family, ordering, *k, out.as_deref()),
        Command::DemoErasure {
            p_num,
            p_den,
            index_range,
        } => cmd_demo_erasure(*p_num, *p_den, *index_range),
        Command::Canon { quad } => cmd_canon(quad, &policy),
        Command::GenRich {
            k,
            max_outcomes,
            out,
            ordering,
        } => family_cap().and_then(|cap| cmd_gen_rich(*k, *max_outcomes, out, ordering.as_deref(), cap)),
    };
    match result {
        Ok(outcome) => {
            let body = if cli.json { to_pretty(&outcome.report) } else { outcome.text };
            let _ = stdout.write_all(body.as_bytes());
            if let Some(e) = &outcome.report.error {
                let _ = writeln!(stderr, "error: {e}");
            }
            outcome.code
        }
        Err(Failure::Input(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            2
        }
        Err(Failure::Domain(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            1
        }
    }
}

/// [`run_with`] on the process arguments and standard streams.
pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
