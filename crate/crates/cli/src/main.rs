//! `hexctx`: catalogs, degree certificates, theorem suites and Cabello
//! circuits for multi-qubit Pauli configurations.

mod output;
mod verify;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hexctx_core::cabello::{
    build_context_circuit, chi_bounds, emit_qasm, estimate_chi, score_counts, CabelloError, CabelloReport,
    ContextCounts, ContextResult, InitialState, SimulationMode,
};
use hexctx_core::contextuality::{
    certify_degree, gf2_rank, CertifyOptions, ContextualityError, DEFAULT_RANK_LIMIT, DEFAULT_SEED,
};
use hexctx_core::export::{hexagon_dot, hexagon_record, lines_table, planes_table, points_table, CertificateRecord, Table};
use hexctx_core::hexagon::build_classical_hexagon;
use hexctx_core::polar::PolarSpace;
use hexctx_core::targets::{
    classical_copies, matching_classical_copies, parse_contexts, resolve_skew, resolve_target, SearchSettings,
    SkewRef, TargetError,
};
use hexctx_core::Configuration;
use serde::Serialize;
use thiserror::Error;

use output::Output;

/// Exit codes, one per failure class.
pub mod exit {
    pub const OK: u8 = 0;
    pub const INTERNAL: u8 = 1;
    /// Reported by the argument parser itself.
    #[allow(dead_code)]
    pub const USAGE: u8 = 2;
    pub const NOT_EXACT: u8 = 3;
    pub const VERIFICATION_FAILED: u8 = 4;
    pub const UNKNOWN_TARGET: u8 = 5;
    pub const IO: u8 = 6;
    pub const INVALID_INPUT: u8 = 7;
    pub const COMPUTATION: u8 = 8;
    pub const MISSING_DEGREE: u8 = 9;
    pub const MISSING_COUNTS: u8 = 10;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    UnknownTarget(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{0}")]
    Compute(String),
    #[error("no exact degree for {0}; pass --degree")]
    MissingDegree(String),
    #[error("missing counts: {0}")]
    MissingCounts(String),
    #[error("{0} check(s) failed")]
    VerificationFailed(usize),
    #[error("degree of {0} not certified exactly")]
    NotExact(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::UnknownTarget(_) => exit::UNKNOWN_TARGET,
            CliError::Io(..) => exit::IO,
            CliError::Input(_) => exit::INVALID_INPUT,
            CliError::Compute(_) => exit::COMPUTATION,
            CliError::MissingDegree(_) => exit::MISSING_DEGREE,
            CliError::MissingCounts(_) => exit::MISSING_COUNTS,
            CliError::VerificationFailed(_) => exit::VERIFICATION_FAILED,
            CliError::NotExact(_) => exit::NOT_EXACT,
        }
    }
}

impl From<TargetError> for CliError {
    fn from(e: TargetError) -> Self {
        match e {
            TargetError::Unknown(_) | TargetError::QuadricKind(..) | TargetError::Index(_) => {
                CliError::UnknownTarget(e.to_string())
            }
            TargetError::Parse { .. } | TargetError::Pauli(_) => CliError::Input(e.to_string()),
            TargetError::Contextuality(ContextualityError::Malformed(..)) => CliError::Input(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<ContextualityError> for CliError {
    fn from(e: ContextualityError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<CabelloError> for CliError {
    fn from(e: CabelloError) -> Self {
        match e {
            CabelloError::MissingContext(_) => CliError::MissingCounts(e.to_string()),
            CabelloError::Context(_) => CliError::Compute(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "hexctx", version, about = "Pauli contextuality and split Cayley hexagon toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every randomized procedure.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Local-search sweeps when the degree is not enumerated exactly.
    #[arg(long, global = true, default_value_t = 200)]
    budget: usize,
    /// Largest incidence rank enumerated exhaustively.
    #[arg(long, global = true, default_value_t = DEFAULT_RANK_LIMIT)]
    rank_limit: usize,
    /// Output format (catalogs default to CSV, everything else to JSON).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Directory for output files and the run manifest.
    #[arg(long, global = true, env = "HEXCTX_OUT")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the point, line and plane catalogs of W(2n-1,2).
    Space {
        /// Number of qubits (2..=4).
        n: usize,
    },
    /// Certify the degree of contextuality of a configuration.
    Degree(TargetArgs),
    /// Run a theorem suite (or `all`).
    Verify {
        suite: String,
    },
    /// Cabello-inequality circuits.
    Cabello {
        #[command(subcommand)]
        action: CabelloAction,
    },
    /// Export a hexagon copy as JSON or DOT.
    Hexagon {
        /// `classical`, `classical:<k>`, `skew`, `skew:<k>` or `skew:reference`.
        which: String,
        /// Write Graphviz DOT instead of JSON.
        #[arg(long)]
        dot: bool,
    },
}

#[derive(Debug, Args)]
struct TargetArgs {
    /// Named target: doily, grid, pentagram, w52, elliptic:<O>, hyperbolic:<O>,
    /// ldoily:<k>, qdoily:<H>,<E>, hexcomp:<canonical|reference|k>.
    #[arg(required_unless_present = "lines", conflicts_with = "lines")]
    target: Option<String>,
    /// Contexts file, one context per line.
    #[arg(long)]
    lines: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum CabelloAction {
    /// Write one OpenQASM file per context.
    Emit(TargetArgs),
    /// Simulate every context and report χ.
    Simulate {
        #[command(flatten)]
        target: TargetArgs,
        /// Exact expectation values (the default).
        #[arg(long, conflicts_with = "shots")]
        exact: bool,
        /// Sample this many shots per context instead.
        #[arg(long)]
        shots: Option<u64>,
        /// Computational basis state, qubit 1 leftmost.
        #[arg(long)]
        state: Option<String>,
        /// Degree used for the noncontextual bound.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Compute χ from measured histograms.
    Score {
        #[command(flatten)]
        target: TargetArgs,
        /// Counts JSON file, or a directory of them.
        #[arg(long)]
        counts: PathBuf,
        #[arg(long)]
        degree: Option<usize>,
    },
}

struct Context {
    seed: u64,
    settings: SearchSettings,
    format: Option<Format>,
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(code) => code,
        Err(_) => ExitCode::from(exit::INTERNAL),
    }
}

fn run(cli: Cli) -> ExitCode {
    let ctx = Context {
        seed: cli.seed,
        settings: SearchSettings {
            rank_limit: cli.rank_limit,
            seed: cli.seed,
            budget: cli.budget,
        },
        format: cli.format,
        out: cli.out,
    };
    let result = match cli.command {
        Command::Space { n } => cmd_space(&ctx, n),
        Command::Degree(t) => cmd_degree(&ctx, &t),
        Command::Verify { suite } => cmd_verify(&ctx, &suite),
        Command::Cabello { action } => cmd_cabello(&ctx, action),
        Command::Hexagon { which, dot } => cmd_hexagon(&ctx, &which, dot),
    };
    match result {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("hexctx: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn params<const K: usize>(ctx: &Context, extra: [(&str, String); K]) -> BTreeMap<String, String> {
    let mut m: BTreeMap<String, String> = extra.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    m.insert("rank_limit".into(), ctx.settings.rank_limit.to_string());
    m.insert("budget".into(), ctx.settings.budget.to_string());
    m
}

/// Write to stdout; a closed pipe (e.g. `| head`) is not an error.
fn say(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io("stdout".into(), e)),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Compute(e.to_string()))?;
    say(&(text + "\n"))
}

fn table_json(t: &Table) -> serde_json::Value {
    let rows = t
        .rows
        .iter()
        .map(|r| {
            let obj: serde_json::Map<String, serde_json::Value> = t
                .header
                .iter()
                .zip(r)
                .map(|(h, v)| (h.to_string(), serde_json::Value::String(v.clone())))
                .collect();
            serde_json::Value::Object(obj)
        })
        .collect();
    serde_json::Value::Array(rows)
}

fn write_table(out: &mut Output, stem: &str, t: &Table, format: Format) -> Result<(), CliError> {
    match format {
        Format::Csv => out.write_csv(&format!("{stem}.csv"), &t.header, &t.rows),
        Format::Json => out.write_json(&format!("{stem}.json"), &table_json(t)),
    }
}

#[derive(Serialize)]
struct SpaceSummary {
    n: usize,
    points: usize,
    lines: usize,
    negative_lines: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    planes: Option<usize>,
}

fn cmd_space(ctx: &Context, n: usize) -> Result<(), CliError> {
    if !(2..=4).contains(&n) {
        return Err(CliError::Input(format!("qubit count {n} outside 2..=4")));
    }
    let built;
    let w = match n {
        2 => PolarSpace::two_qubit(),
        3 => PolarSpace::three_qubit(),
        _ => {
            built = PolarSpace::new(n).map_err(|e| CliError::Compute(e.to_string()))?;
            &built
        }
    };
    let format = ctx.format.unwrap_or(Format::Csv);
    let mut out = Output::new(ctx.out.clone());
    write_table(&mut out, "points", &points_table(w), format)?;
    write_table(&mut out, "lines", &lines_table(w), format)?;
    // planes are enumerated for the three-qubit space only
    let planes = if n == 3 {
        let planes = w.enumerate_planes().map_err(|e| CliError::Compute(e.to_string()))?;
        write_table(&mut out, "planes", &planes_table(w, &planes), format)?;
        Some(planes.len())
    } else {
        None
    };
    let summary = SpaceSummary {
        n,
        points: w.points().len(),
        lines: w.lines().len(),
        negative_lines: w.negative_line_count(),
        planes,
    };
    out.write_json("summary.json", &summary)?;
    print_json(&summary)?;
    out.finish("space", params(ctx, [("n", n.to_string())]), ctx.seed)
}

/// A configuration with its display name and certification options.
struct Resolved {
    name: String,
    configuration: Configuration,
    options: CertifyOptions,
}

fn resolve(ctx: &Context, t: &TargetArgs) -> Result<Resolved, CliError> {
    if let Some(path) = &t.lines {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        let configuration = parse_contexts(&text)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "contexts".into());
        return Ok(Resolved {
            name,
            configuration,
            options: CertifyOptions {
                rank_limit: ctx.settings.rank_limit,
                seed: ctx.settings.seed,
                budget: ctx.settings.budget,
                ..CertifyOptions::default()
            },
        });
    }
    let name = t.target.clone().ok_or_else(|| CliError::Input("no target given".into()))?;
    let resolved = resolve_target(&name, ctx.settings)?;
    Ok(Resolved {
        name,
        configuration: resolved.configuration,
        options: resolved.options,
    })
}

fn target_param(t: &TargetArgs) -> (&'static str, String) {
    match (&t.target, &t.lines) {
        (Some(name), _) => ("target", name.clone()),
        (None, Some(p)) => ("lines", p.display().to_string()),
        (None, None) => ("target", String::new()),
    }
}

fn certificate(ctx: &Context, r: &Resolved) -> Result<CertificateRecord, CliError> {
    let c = &r.configuration;
    let cert = certify_degree(c, &r.options)?;
    if !cert.verify(c) {
        return Err(CliError::Compute("certificate failed its own verification".into()));
    }
    let matched = matching_classical_copies(c, &cert.violated)?.first().copied();
    Ok(CertificateRecord::new(&r.name, c, &cert, ctx.seed, matched))
}

fn certificate_row(rec: &CertificateRecord) -> Vec<String> {
    let ids: Vec<String> = rec.violated_line_ids.iter().map(|i| i.to_string()).collect();
    vec![
        rec.config_id.clone(),
        rec.p.to_string(),
        rec.l.to_string(),
        rec.upper.to_string(),
        rec.lower.to_string(),
        rec.exact.to_string(),
        rec.method.clone(),
        rec.seed.to_string(),
        rec.assignment_hex.clone(),
        ids.join(" "),
        rec.matched_hexagon_id.map(|i| i.to_string()).unwrap_or_default(),
    ]
}

const CERTIFICATE_HEADER: [&str; 11] = [
    "config_id",
    "p",
    "l",
    "upper",
    "lower",
    "exact",
    "method",
    "seed",
    "assignment_hex",
    "violated_line_ids",
    "matched_hexagon_id",
];

fn cmd_degree(ctx: &Context, t: &TargetArgs) -> Result<(), CliError> {
    let r = resolve(ctx, t)?;
    let rec = certificate(ctx, &r)?;
    let mut out = Output::new(ctx.out.clone());
    match ctx.format.unwrap_or(Format::Json) {
        Format::Json => {
            out.write_json("certificate.json", &rec)?;
            print_json(&rec)?;
        }
        Format::Csv => {
            let row = certificate_row(&rec);
            out.write_csv("certificate.csv", &CERTIFICATE_HEADER, std::slice::from_ref(&row))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CERTIFICATE_HEADER)
                .and_then(|_| w.write_record(&row))
                .map_err(|e| CliError::Compute(e.to_string()))?;
            let bytes = w.into_inner().map_err(|e| CliError::Compute(e.to_string()))?;
            say(&String::from_utf8_lossy(&bytes))?;
        }
    }
    let rank = gf2_rank(&r.configuration);
    out.finish("degree", params(ctx, [target_param(t), ("rank", rank.to_string())]), ctx.seed)?;
    if rec.exact {
        Ok(())
    } else {
        Err(CliError::NotExact(r.name))
    }
}

fn cmd_verify(ctx: &Context, suite: &str) -> Result<(), CliError> {
    let suites: Vec<&str> = if suite == "all" {
        verify::SUITES.to_vec()
    } else {
        vec![suite]
    };
    let mut checks = Vec::new();
    for s in suites {
        for c in verify::run_suite(s, ctx.settings)? {
            say(&format!("{} {}: {} ({})\n", if c.pass { "PASS" } else { "FAIL" }, c.suite, c.name, c.detail))?;
            checks.push(c);
        }
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let mut out = Output::new(ctx.out.clone());
    match ctx.format.unwrap_or(Format::Json) {
        Format::Json => out.write_json("verify.json", &checks)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| vec![c.suite.to_string(), c.name.clone(), c.pass.to_string(), c.detail.clone()])
                .collect();
            out.write_csv("verify.csv", &["suite", "check", "pass", "detail"], &rows)?;
        }
    }
    out.finish("verify", params(ctx, [("suite", suite.to_string())]), ctx.seed)?;
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(failed))
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

fn context_id(c: &Configuration, i: usize) -> usize {
    c.source_lines().map_or(i, |s| s[i])
}

/// `--degree` if given, otherwise the exact certified degree.
fn degree_for(ctx: &Context, r: &Resolved, given: Option<usize>) -> Result<usize, CliError> {
    if let Some(d) = given {
        return Ok(d);
    }
    let rec = certificate(ctx, r)?;
    if rec.exact {
        Ok(rec.upper)
    } else {
        Err(CliError::MissingDegree(r.name.clone()))
    }
}

#[derive(Serialize)]
struct ChiSummary<'a> {
    config_id: &'a str,
    mode: String,
    chi: f64,
    n: usize,
    d: usize,
    quantum_bound: i64,
    hv_bound: i64,
    violates_hv: bool,
    contexts: &'a [ContextResult],
}

fn write_report(ctx: &Context, out: &mut Output, name: &str, mode: String, report: &CabelloReport) -> Result<(), CliError> {
    let d = report.d.unwrap_or(0);
    let (quantum_bound, hv_bound) = chi_bounds(report.n, d);
    let summary = ChiSummary {
        config_id: name,
        mode,
        chi: report.chi,
        n: report.n,
        d,
        quantum_bound,
        hv_bound,
        violates_hv: report.violates_hv().unwrap_or(false),
        contexts: &report.contexts,
    };
    match ctx.format.unwrap_or(Format::Json) {
        Format::Json => {
            out.write_json("report.json", &summary)?;
            print_json(&summary)
        }
        Format::Csv => {
            let header = ["context", "line_id", "sign", "expectation", "shots"];
            let rows: Vec<Vec<String>> = report
                .contexts
                .iter()
                .map(|r| {
                    vec![
                        r.context.to_string(),
                        r.line_id.map(|i| i.to_string()).unwrap_or_default(),
                        r.sign.to_string(),
                        r.expectation.to_string(),
                        r.shots.map(|s| s.to_string()).unwrap_or_default(),
                    ]
                })
                .collect();
            out.write_csv("report.csv", &header, &rows)?;
            out.write_json("summary.json", &summary)?;
            say(&format!("chi={} n={} d={} bounds=({quantum_bound}, {hv_bound})\n", report.chi, report.n, d))
        }
    }
}

fn read_counts(path: &Path) -> Result<Vec<ContextCounts>, CliError> {
    let io = |e| CliError::Io(path.display().to_string(), e);
    let mut files = Vec::new();
    if path.is_dir() {
        for entry in fs::read_dir(path).map_err(io)? {
            let p = entry.map_err(io)?.path();
            if p.extension().is_some_and(|e| e == "json") {
                files.push(p);
            }
        }
        files.sort();
        if files.is_empty() {
            return Err(CliError::MissingCounts(format!("no .json files in {}", path.display())));
        }
    } else if path.exists() {
        files.push(path.to_path_buf());
    } else {
        return Err(CliError::MissingCounts(path.display().to_string()));
    }
    let mut all = Vec::new();
    for f in files {
        let text = fs::read_to_string(&f).map_err(|e| CliError::Io(f.display().to_string(), e))?;
        let bad = |e: serde_json::Error| CliError::Input(format!("{}: {e}", f.display()));
        let value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
        if value.is_array() {
            all.extend(serde_json::from_value::<Vec<ContextCounts>>(value).map_err(bad)?);
        } else {
            all.push(serde_json::from_value::<ContextCounts>(value).map_err(bad)?);
        }
    }
    Ok(all)
}

fn cmd_cabello(ctx: &Context, action: CabelloAction) -> Result<(), CliError> {
    match action {
        CabelloAction::Emit(t) => {
            let r = resolve(ctx, &t)?;
            let c = &r.configuration;
            let dir = ctx.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let mut out = Output::new(Some(dir.clone()));
            let stem = sanitize(&r.name);
            for (i, context) in c.contexts().iter().enumerate() {
                let obs: Vec<_> = context.members.iter().map(|&j| c.points()[j]).collect();
                let circuit = build_context_circuit(&obs)?;
                let file = format!("{stem}_{}.qasm", context_id(c, i));
                out.write(&file, emit_qasm(&circuit).as_bytes())?;
            }
            say(&format!("wrote {} circuits to {}\n", c.l(), dir.display()))?;
            out.finish("cabello emit", params(ctx, [target_param(&t)]), ctx.seed)
        }
        CabelloAction::Simulate {
            target,
            exact: _,
            shots,
            state,
            degree,
        } => {
            let r = resolve(ctx, &target)?;
            let d = degree_for(ctx, &r, degree)?;
            let mode = match shots {
                Some(shots) => SimulationMode::Shots { shots, seed: ctx.seed },
                None => SimulationMode::Exact,
            };
            let init = InitialState::Basis(state.clone().unwrap_or_default());
            let report = estimate_chi(&r.configuration, mode, &init, Some(d))?;
            let mut out = Output::new(ctx.out.clone());
            let mode_name = shots.map_or("exact".to_string(), |s| format!("shots:{s}"));
            write_report(ctx, &mut out, &r.name, mode_name.clone(), &report)?;
            let p = params(
                ctx,
                [
                    target_param(&target),
                    ("mode", mode_name),
                    ("state", state.unwrap_or_default()),
                    ("degree", d.to_string()),
                ],
            );
            out.finish("cabello simulate", p, ctx.seed)
        }
        CabelloAction::Score { target, counts, degree } => {
            let r = resolve(ctx, &target)?;
            let histograms = read_counts(&counts)?;
            let d = degree_for(ctx, &r, degree)?;
            let report = score_counts(&r.configuration, &histograms, Some(d))?;
            let mut out = Output::new(ctx.out.clone());
            write_report(ctx, &mut out, &r.name, "counts".into(), &report)?;
            let p = params(
                ctx,
                [
                    target_param(&target),
                    ("counts", counts.display().to_string()),
                    ("degree", d.to_string()),
                ],
            );
            out.finish("cabello score", p, ctx.seed)
        }
    }
}

fn cmd_hexagon(ctx: &Context, which: &str, dot: bool) -> Result<(), CliError> {
    let w = PolarSpace::three_qubit();
    let unknown = || CliError::UnknownTarget(format!("unknown hexagon {which:?}"));
    let index = |k: &str| k.parse::<usize>().map_err(|_| unknown());
    let h = match which.split_once(':') {
        None if which == "classical" => build_classical_hexagon(w).map_err(|e| CliError::Compute(e.to_string()))?,
        None if which == "skew" => resolve_skew(SkewRef::Canonical)?,
        Some(("classical", k)) => *classical_copies()?.get(index(k)?).ok_or_else(unknown)?,
        Some(("skew", "reference")) => resolve_skew(SkewRef::Reference)?,
        Some(("skew", k)) => resolve_skew(SkewRef::Index(index(k)?))?,
        _ => return Err(unknown()),
    };
    let mut out = Output::new(ctx.out.clone());
    let stem = sanitize(which);
    if dot {
        let text = hexagon_dot(w, &h);
        out.write(&format!("{stem}.dot"), text.as_bytes())?;
        say(&text)?;
    } else {
        let rec = hexagon_record(w, &h);
        out.write_json(&format!("{stem}.json"), &rec)?;
        print_json(&rec)?;
    }
    out.finish("hexagon", params(ctx, [("which", which.to_string()), ("dot", dot.to_string())]), ctx.seed)
}
