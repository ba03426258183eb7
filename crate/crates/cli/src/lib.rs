//! Command-line front end: instance files, generators, detection, the
//! finitization and crisp-encoding transforms, and the full pipeline.
//!
//! Every command produces a [`RunReport`]. Exit codes: 0 success, 1 NO
//! (no backdoor, or a set that is not a backdoor), 2 usage or input errors,
//! 3 failures inside the solver such as an exceeded budget.

pub mod format;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use vcsp_backdoor::backdoor::branching_node_bound;
use vcsp_backdoor::language::{MIN_CLOSED, SUBMODULAR};
use vcsp_backdoor::solvers::solve_in_union;
use vcsp_backdoor::transform::{finitize, pipeline_solve, vcsp_to_csp, InfinityEncoding, PipelineOutcome};
use vcsp_backdoor::{
    brute_force_solve, detect_backdoor_branching, detect_backdoor_exhaustive, generators, is_backdoor, solve_scattered,
    solve_with_backdoor, Instance, Language, LanguageFamily, SearchStats, Solution, Target,
};

use format::{FormatError, InstanceFile};

#[derive(Debug, Parser)]
#[command(name = "vcsp", version, about = "Backdoor detection and solving for valued CSP instances")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize an instance.
    Solve(SolveArgs),
    /// Search for a backdoor of size at most k.
    Detect(DetectArgs),
    /// Replace cost functions by type representatives.
    Finitize(TransformArgs),
    /// Finitize, then encode as a crisp instance over the extended domain.
    ToCsp(ToCspArgs),
    /// Finitize, encode, detect a scattered backdoor and solve with it.
    Pipeline(PipelineArgs),
    /// Check whether a variable set is a backdoor.
    Verify(VerifyArgs),
    /// Generate a random instance.
    Gen(GenArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct InputArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Comma-separated language names: built-ins or languages declared in the file.
    #[arg(long, default_value = "min_closed,submodular", value_delimiter = ',')]
    pub languages: Vec<String>,
    /// Arity bound of the built-in languages.
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    #[arg(long)]
    #[serde(skip)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Branching,
    Exhaustive,
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// `exhaustive` enumerates every assignment; `branching` first detects
    /// a union backdoor of size at most k. Without a mode, the instance is
    /// solved directly by the class solvers.
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Solve by enumerating this backdoor, e.g. `0,3`.
    #[arg(long)]
    pub backdoor: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value_t = false)]
    pub scattered: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct DetectArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "branching")]
    pub mode: Mode,
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value_t = false)]
    pub scattered: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct TransformArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Marker,
    Epsilon,
}

#[derive(Debug, Args, Serialize)]
pub struct ToCspArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub transform: TransformArgs,
    /// How infinite costs appear in the value column.
    #[arg(long, value_enum, default_value = "marker")]
    pub encoding: Encoding,
}

#[derive(Debug, Args, Serialize)]
pub struct PipelineArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Comma-separated variables; empty for the empty set.
    #[arg(long, allow_hyphen_values = true)]
    pub backdoor: String,
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value_t = false)]
    pub scattered: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    PlantedBackdoor,
    CutVertex,
    RandomScattered,
    RandomSubmodular,
    RandomHorn,
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of variables.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Number of constraints.
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    /// Planted backdoor size.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Cut-vertex side sizes.
    #[arg(long, default_value_t = 3)]
    pub n1: usize,
    #[arg(long, default_value_t = 3)]
    pub n2: usize,
    /// Domain size for Horn instances.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: FormatError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Solver(#[from] vcsp_backdoor::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } | CliError::Io { .. } => 2,
            CliError::Solver(_) => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    No,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub nodes_visited: u64,
    pub assignments_checked: u64,
}

impl From<SearchStats> for Stats {
    fn from(s: SearchStats) -> Self {
        Stats {
            nodes_visited: s.nodes_visited,
            assignments_checked: s.assignments_checked,
        }
    }
}

/// Machine-readable record of one command.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: Value,
    pub status: Status,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<Stats>,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn exit_code(&self) -> u8 {
        match self.status {
            Status::Ok => 0,
            Status::No => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

struct Loaded {
    instance: Instance,
    family: LanguageFamily,
}

fn load(input: &InputArgs) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(&input.instance).map_err(|source| CliError::Io {
        path: input.instance.clone(),
        source,
    })?;
    let parsed = |source| CliError::Input {
        path: input.instance.clone(),
        source,
    };
    let file = InstanceFile::parse(&text).map_err(parsed)?;
    let instance = file.instance().map_err(parsed)?;
    let declared = file.finite_languages().map_err(parsed)?;
    let d = instance.domain_size();
    let mut languages = Vec::new();
    for name in input.languages.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        // languages declared in the file shadow the built-ins
        let lang = match (declared.iter().find(|l| l.name() == name), name) {
            (Some(l), _) => l.clone(),
            (None, MIN_CLOSED) => Language::min_closed_crisp(d, input.q),
            (None, SUBMODULAR) if d == 2 => Language::submodular_boolean(input.q),
            (None, SUBMODULAR) => return Err(CliError::Usage(format!("submodular needs domain size 2, found {d}"))),
            (None, _) => return Err(CliError::Usage(format!("unknown language {name:?}"))),
        };
        languages.push(lang);
    }
    let family = LanguageFamily::new(languages).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Loaded { instance, family })
}

fn parse_set(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::Usage(format!("invalid variable {s:?}"))))
        .collect()
}

fn solution_json(s: &Solution) -> Value {
    json!({
        "cost": s.cost.to_string(),
        "assignment": s.assignment.iter().map(|(x, v)| [x, v]).collect::<Vec<_>>(),
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn target(scattered: bool) -> Target {
    if scattered {
        Target::Scattered
    } else {
        Target::Union
    }
}

struct Partial {
    status: Status,
    result: Value,
    stats: Option<Stats>,
}

fn ok(result: Value) -> Partial {
    Partial {
        status: Status::Ok,
        result,
        stats: None,
    }
}

fn solve(args: &SolveArgs) -> Result<Partial, CliError> {
    let l = load(&args.input)?;
    if let Some(set) = &args.backdoor {
        let x = parse_set(set)?;
        let s = solve_with_backdoor(&l.instance, &x, &l.family, target(args.scattered))?;
        let mut r = solution_json(&s.solution);
        r["backdoor"] = json!(x);
        r["assignments_enumerated"] = json!(s.assignments_enumerated);
        return Ok(ok(r));
    }
    match args.mode {
        Some(Mode::Exhaustive) => Ok(ok(solution_json(&brute_force_solve(&l.instance)?))),
        Some(Mode::Branching) => {
            let (found, stats) = detect_backdoor_branching(&l.instance, args.k, &l.family)?;
            let Some(x) = found else {
                return Ok(Partial {
                    status: Status::No,
                    result: json!({ "backdoor": null }),
                    stats: Some(stats.into()),
                });
            };
            let s = solve_with_backdoor(&l.instance, &x, &l.family, Target::Union)?;
            let mut r = solution_json(&s.solution);
            r["backdoor"] = json!(x);
            Ok(Partial {
                status: Status::Ok,
                result: r,
                stats: Some(stats.into()),
            })
        }
        None => {
            let s = if args.scattered {
                solve_scattered(&l.instance, &l.family)?
            } else {
                solve_in_union(&l.instance, &l.family)?
            };
            Ok(ok(solution_json(&s)))
        }
    }
}

fn detect(args: &DetectArgs) -> Result<Partial, CliError> {
    let l = load(&args.input)?;
    let (found, stats, bound) = match (args.mode, args.scattered) {
        (Mode::Branching, true) => {
            return Err(CliError::Usage(
                "branching detection targets unions; use --mode exhaustive with --scattered".into(),
            ))
        }
        (Mode::Branching, false) => {
            let (found, stats) = detect_backdoor_branching(&l.instance, args.k, &l.family)?;
            let bound = branching_node_bound(l.family.len(), l.family.max_arity(), args.k);
            (found, stats, Some(bound.to_string()))
        }
        (Mode::Exhaustive, scattered) => {
            let (found, stats) = detect_backdoor_exhaustive(&l.instance, args.k, &l.family, target(scattered))?;
            (found, stats, None)
        }
    };
    let mut result = json!({ "backdoor": found });
    if let Some(b) = bound {
        result["node_bound"] = json!(b);
    }
    Ok(Partial {
        status: if found.is_some() { Status::Ok } else { Status::No },
        result,
        stats: Some(stats.into()),
    })
}

fn run_finitize(args: &TransformArgs) -> Result<Partial, CliError> {
    let l = load(&args.input)?;
    let Some(f) = finitize(&l.instance, &l.family, args.k)? else {
        return Ok(Partial {
            status: Status::No,
            result: json!({ "reason": "arity gate" }),
            stats: None,
        });
    };
    if let Some(out) = &args.out {
        let doc = InstanceFile::from_instance(&f.instance)
            .with_languages(f.family.languages())
            .with_metadata(json!({ "representatives": f.representatives }));
        write_file(out, &doc.to_json())?;
    }
    let sizes: Vec<usize> = f.family.languages().iter().map(|l| l.functions().map_or(0, |s| s.len())).collect();
    Ok(ok(json!({
        "distinct_types": f.distinct_types(),
        "language_sizes": sizes,
        "language_size_bound": f.language_size_bound().to_string(),
    })))
}

fn to_csp(args: &ToCspArgs) -> Result<Partial, CliError> {
    let t = &args.transform;
    let l = load(&t.input)?;
    let Some(f) = finitize(&l.instance, &l.family, t.k)? else {
        return Ok(Partial {
            status: Status::No,
            result: json!({ "reason": "arity gate" }),
            stats: None,
        });
    };
    let encoding = match args.encoding {
        Encoding::Marker => InfinityEncoding::Marker,
        Encoding::Epsilon => InfinityEncoding::Epsilon,
    };
    let r = vcsp_to_csp(&f.instance, &f.family, t.k, encoding)?;
    let labels: Vec<String> = (0..r.domain.len())
        .map(|i| r.domain.value(i).expect("in range").to_string())
        .collect();
    let provenance: Vec<Value> = r
        .provenance
        .iter()
        .map(|p| json!({ "original": p.original, "fresh_variables": p.fresh_variables, "constraints": p.constraints }))
        .collect();
    if let Some(out) = &t.out {
        let doc = InstanceFile::from_instance(&r.instance)
            .with_languages(r.family.languages())
            .with_metadata(json!({ "extended_domain": labels, "provenance": provenance }));
        write_file(out, &doc.to_json())?;
    }
    Ok(ok(json!({
        "num_variables": r.instance.num_variables(),
        "num_constraints": r.instance.constraints().len(),
        "extended_domain": labels,
    })))
}

fn pipeline(args: &PipelineArgs) -> Result<Partial, CliError> {
    let l = load(&args.input)?;
    match pipeline_solve(&l.instance, &l.family, args.k)? {
        PipelineOutcome::No { reason, stats } => Ok(Partial {
            status: Status::No,
            result: json!({ "backdoor": null, "reason": format!("{reason:?}") }),
            stats: Some(stats.into()),
        }),
        PipelineOutcome::Solved {
            backdoor,
            solution,
            stats,
            assignments_enumerated,
        } => {
            let mut r = solution_json(&solution);
            r["backdoor"] = json!(backdoor);
            r["assignments_enumerated"] = json!(assignments_enumerated);
            Ok(Partial {
                status: Status::Ok,
                result: r,
                stats: Some(stats.into()),
            })
        }
    }
}

fn verify(args: &VerifyArgs) -> Result<Partial, CliError> {
    let l = load(&args.input)?;
    let x = parse_set(&args.backdoor)?;
    let yes = is_backdoor(&l.instance, &x, &l.family, target(args.scattered))?;
    Ok(Partial {
        status: if yes { Status::Ok } else { Status::No },
        result: json!({ "backdoor": x, "is_backdoor": yes }),
        stats: None,
    })
}

/// Generated instance document.
pub fn generate(args: &GenArgs) -> Result<InstanceFile, CliError> {
    let (instance, extra) = match args.kind {
        GenKind::PlantedBackdoor => {
            let (p, x) = generators::planted_backdoor(args.seed, args.n, args.m, args.k)?;
            (p, json!({ "planted_backdoor": x }))
        }
        GenKind::CutVertex => (generators::cut_vertex(args.seed, args.n1, args.n2)?, json!({ "cut_vertex": 0 })),
        GenKind::RandomScattered => (generators::random_scattered(args.seed, args.n, args.m)?, json!({})),
        GenKind::RandomSubmodular => (generators::random_submodular_instance(args.seed, args.n, args.m)?, json!({})),
        GenKind::RandomHorn => (generators::random_horn(args.seed, args.n, args.m, args.d)?, json!({})),
    };
    let mut meta = json!({ "generator": args.kind, "seed": args.seed });
    if let (Value::Object(m), Value::Object(e)) = (&mut meta, extra) {
        m.extend(e);
    }
    Ok(InstanceFile::from_instance(&instance).with_metadata(meta))
}

fn gen(args: &GenArgs) -> Result<Partial, CliError> {
    let doc = generate(args)?;
    let mut result = json!({
        "num_variables": doc.num_variables,
        "num_constraints": doc.constraints.len(),
        "metadata": doc.metadata,
    });
    match &args.out {
        Some(out) => {
            write_file(out, &doc.to_json())?;
            result["out"] = json!(out);
        }
        None => {
            // a closed pipe is not an error for a generator
            let _ = std::io::stdout().write_all(doc.to_json().as_bytes());
        }
    }
    Ok(ok(result))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Solve(_) => "solve",
        Command::Detect(_) => "detect",
        Command::Finitize(_) => "finitize",
        Command::ToCsp(_) => "to-csp",
        Command::Pipeline(_) => "pipeline",
        Command::Verify(_) => "verify",
        Command::Gen(_) => "gen",
    }
}

/// Runs a command and returns its report. The report is also written to
/// `--report` when given.
pub fn run(cli: &Cli) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let (partial, parameters, report_path) = match &cli.command {
        Command::Solve(a) => (solve(a)?, json!(a), a.input.report.clone()),
        Command::Detect(a) => (detect(a)?, json!(a), a.input.report.clone()),
        Command::Finitize(a) => (run_finitize(a)?, json!(a), a.input.report.clone()),
        Command::ToCsp(a) => (to_csp(a)?, json!(a), a.transform.input.report.clone()),
        Command::Pipeline(a) => (pipeline(a)?, json!(a), a.input.report.clone()),
        Command::Verify(a) => (verify(a)?, json!(a), a.input.report.clone()),
        Command::Gen(a) => (gen(a)?, json!(a), a.report.clone()),
    };
    let report = RunReport {
        command: command_name(&cli.command).to_string(),
        parameters,
        status: partial.status,
        result: partial.result,
        stats: partial.stats,
        wall_time_ms: start.elapsed().as_secs_f64() * 1000.0,
    };
    if let Some(path) = report_path {
        write_file(&path, &report.to_json())?;
    }
    Ok(report)
}
