//! Command-line front end: argument parsing, curve files and report
//! emission. All I/O of the workspace lives here.

pub mod format;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use peano::curve::{FractalCurve, ValidCurve};
use peano::dilation::{
    dilation, dilation_via_junctions, junction_classes, Cap, DilationError, DilationEstimate, JunctionThreshold, Limits,
};
use peano::eval::{blob_metrics, evaluate, evaluate_exact, scan_order, EvalError, DEFAULT_SCAN_SIDE_CAP};
use peano::geometry::Rational;
use peano::oracle::{brute_force_lower_bound, OracleError};
use peano::search::{enumerate_curves, find_min_dilation, CurveRecord, EnumerationSpec, SearchError, SearchOptions};

pub const MAX_MEM_ENV: &str = "PEANO_MAX_MEM";

#[derive(Parser, Debug)]
#[command(name = "peano", version, about = "Regular fractal Peano curves: evaluation, certified ratio bounds, search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Branch-and-bound node cap.
    #[arg(long, global = true, default_value_t = Limits::default().max_nodes)]
    pub max_nodes: u64,
    /// Deepest fraction order the branch-and-bound may split to.
    #[arg(long, global = true, default_value_t = Limits::default().max_depth)]
    pub max_depth: u32,
    /// Sample-time cap for the oracle.
    #[arg(long, global = true, default_value_t = peano::oracle::DEFAULT_MAX_POINTS)]
    pub max_points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Threshold {
    Genus,
    Base,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a curve file; exit 1 when the curve is invalid.
    Validate { file: PathBuf },
    /// Exact point f(t), plus its grid square at `--depth`.
    Eval {
        file: PathBuf,
        #[arg(long)]
        t: Rational,
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Certified bracket around the largest square-to-linear ratio.
    Dilation {
        file: PathBuf,
        #[arg(long)]
        tol: Rational,
        /// Maximum over junction classes instead of the all-pairs search.
        #[arg(long)]
        via_junctions: bool,
        #[arg(long, value_enum, default_value_t = Threshold::Genus)]
        threshold: Threshold,
    },
    /// Junction classes of the curve.
    Junctions { file: PathBuf },
    /// Brute-force lower bound from all corner passages up to `--depth`.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        depth: u32,
    },
    /// Every valid curve with divisor `k`, one per line.
    Enumerate {
        #[arg(long)]
        k: u32,
        /// One curve per symmetry class.
        #[arg(long)]
        dedup: bool,
        /// Consecutive cells must share a side.
        #[arg(long)]
        side_adjacent: bool,
        /// Stop after this many curves (required for k > 3).
        #[arg(long)]
        max_curves: Option<u64>,
    },
    /// Smallest ratio over all curves with divisor `k`.
    Search {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        tol: Rational,
        #[arg(long)]
        side_adjacent: bool,
        /// Bracket every curve instead of skipping hopeless ones.
        #[arg(long)]
        no_prune: bool,
        /// Oracle depth used to skip hopeless curves.
        #[arg(long, default_value_t = 1)]
        prune_depth: u32,
        /// Stop after this many curves (required for k > 3).
        #[arg(long)]
        max_curves: Option<u64>,
    },
    /// Visit order of the grid cells at `--depth`.
    Scan {
        file: PathBuf,
        #[arg(long)]
        depth: u32,
    },
    /// Shape of the cells swept between two scan positions.
    Blob {
        file: PathBuf,
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Cap(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Cap(_) => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Caps {
    pub max_nodes: u64,
    pub max_depth: u32,
    pub max_points: usize,
    pub max_mem: Option<usize>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    caps: Caps,
    result: T,
}

/// Accepts a byte count with an optional `K`, `M` or `G` suffix.
pub fn parse_mem(s: &str) -> Result<usize, String> {
    let s = s.trim();
    let (digits, mult) = match s.char_indices().last() {
        Some((i, 'K' | 'k')) => (&s[..i], 1 << 10),
        Some((i, 'M' | 'm')) => (&s[..i], 1 << 20),
        Some((i, 'G' | 'g')) => (&s[..i], 1 << 30),
        _ => (s, 1),
    };
    digits
        .parse::<usize>()
        .ok()
        .and_then(|n| n.checked_mul(mult))
        .ok_or_else(|| format!("{MAX_MEM_ENV}: expected a byte count like 512M, got `{s}`"))
}

struct Ctx<'a> {
    format: OutputFormat,
    caps: Caps,
    out: &'a mut (dyn Write + Send),
    err: &'a mut (dyn Write + Send),
}

impl Ctx<'_> {
    fn limits(&self) -> Limits {
        Limits { max_nodes: self.caps.max_nodes, max_depth: self.caps.max_depth, max_mem: self.caps.max_mem }
    }

    fn json<T: Serialize>(&mut self, command: &str, result: T) -> Result<(), CliError> {
        let env = Envelope { command, caps: self.caps, result };
        let s = serde_json::to_string_pretty(&env).expect("reports serialize");
        writeln!(self.out, "{s}").map_err(io)
    }

    fn csv<R: Serialize>(&mut self, rows: impl IntoIterator<Item = R>) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(&mut *self.out);
        for r in rows {
            w.serialize(r).map_err(|e| CliError::Usage(e.to_string()))?;
        }
        w.flush().map_err(io)
    }

    fn emit<T: Serialize, R: Serialize>(
        &mut self,
        command: &str,
        result: T,
        rows: impl FnOnce(&T) -> Vec<R>,
    ) -> Result<(), CliError> {
        match self.format {
            OutputFormat::Json => self.json(command, result),
            OutputFormat::Csv => {
                let r = rows(&result);
                self.csv(r)
            }
        }
    }

    fn line<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        let s = serde_json::to_string(value).expect("reports serialize");
        writeln!(self.out, "{s}").map_err(io)
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Usage(format!("write failed: {e}"))
}

/// Parses and runs one invocation. `max_mem` comes from the environment.
pub fn run(
    cli: Cli,
    max_mem: Option<usize>,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<(), CliError> {
    let caps = Caps { max_nodes: cli.max_nodes, max_depth: cli.max_depth, max_points: cli.max_points, max_mem };
    let mut ctx = Ctx { format: cli.format, caps, out, err };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| dispatch(cli.command, &mut ctx))
}

fn read_curve(path: &Path) -> Result<FractalCurve, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    format::parse_curve(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_valid(path: &Path) -> Result<ValidCurve, CliError> {
    read_curve(path)?
        .into_valid()
        .map_err(|report| CliError::Invalid(format!("{}: invalid curve: {report}", path.display())))
}

fn check_mem(caps: &Caps, bytes: u128, what: &str) -> Result<(), CliError> {
    match caps.max_mem {
        Some(m) if bytes > m as u128 => {
            Err(CliError::Cap(format!("{what} needs about {bytes} bytes, above {MAX_MEM_ENV}={m}")))
        }
        _ => Ok(()),
    }
}

fn eval_err(e: EvalError) -> CliError {
    match e {
        EvalError::GridTooLarge { .. } | EvalError::Overflow(_) => CliError::Cap(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}

fn dilation_err(e: DilationError) -> CliError {
    match e {
        DilationError::CapExceeded { .. } => CliError::Cap(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}

fn check_k(k: u32, max_curves: Option<u64>) -> Result<(), CliError> {
    if k < 2 {
        return Err(CliError::Usage(format!("--k must be at least 2, got {k}")));
    }
    if k > 3 && max_curves.is_none() {
        return Err(CliError::Usage(format!("--k {k} needs an explicit --max-curves")));
    }
    Ok(())
}

#[derive(Serialize)]
struct EstimateRow {
    lower: Rational,
    upper: Rational,
    width: Rational,
    witness_t: Rational,
    witness_t2: Rational,
    nodes: u64,
    max_depth: u32,
}

impl From<&DilationEstimate> for EstimateRow {
    fn from(e: &DilationEstimate) -> Self {
        EstimateRow {
            lower: e.lower,
            upper: e.upper,
            width: e.width(),
            witness_t: e.witness.0,
            witness_t2: e.witness.1,
            nodes: e.stats.nodes,
            max_depth: e.stats.max_depth,
        }
    }
}

#[derive(Serialize)]
struct ValidateRow {
    valid: bool,
    failure: String,
}

#[derive(Serialize)]
struct EvalRow {
    t: Rational,
    x: Rational,
    y: Rational,
    depth: Option<u32>,
    col: Option<u64>,
    row: Option<u64>,
}

#[derive(Serialize)]
struct JunctionRow {
    class: usize,
    key: String,
    multiplicity: u64,
    side_adjacent: bool,
    first_order: u32,
}

#[derive(Serialize)]
struct OracleRow {
    depth: u32,
    points: usize,
    lower_bound: Rational,
    witness_t: Rational,
    witness_t2: Rational,
}

#[derive(Serialize)]
struct ScanRow {
    position: usize,
    col: u32,
    row: u32,
}

#[derive(Serialize)]
struct CurveRow {
    k: u32,
    description: String,
}

#[derive(Serialize)]
struct RecordRow {
    description: String,
    lower: Rational,
    upper: Rational,
    violated: String,
}

impl From<&CurveRecord> for RecordRow {
    fn from(r: &CurveRecord) -> Self {
        let violated: Vec<String> =
            peano::search::Condition::ALL.iter().filter(|c| r.conditions.violated(**c)).map(|c| c.to_string()).collect();
        RecordRow {
            description: r.curve.to_string(),
            lower: r.estimate.lower,
            upper: r.estimate.upper,
            violated: violated.join(";"),
        }
    }
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum SearchLine<'a> {
    Record(&'a CurveRecord),
    Summary { caps: Caps, outcome: &'a peano::search::SearchOutcome },
}

fn dispatch(command: Command, ctx: &mut Ctx<'_>) -> Result<(), CliError> {
    match command {
        Command::Validate { file } => {
            let curve = read_curve(&file)?;
            let report = curve.validate();
            let valid = report.is_valid();
            ctx.emit("validate", &report, |r| {
                if r.failures.is_empty() {
                    vec![ValidateRow { valid: true, failure: String::new() }]
                } else {
                    r.failures.iter().map(|f| ValidateRow { valid: false, failure: f.to_string() }).collect()
                }
            })?;
            if !valid {
                return Err(CliError::Invalid(format!("{}: invalid curve: {report}", file.display())));
            }
            Ok(())
        }
        Command::Eval { file, t, depth } => {
            let curve = read_valid(&file)?;
            let point = evaluate_exact(&curve, t).map_err(eval_err)?;
            let enclosure = depth.map(|d| evaluate(&curve, t, d)).transpose().map_err(eval_err)?;
            #[derive(Serialize)]
            struct Out {
                t: Rational,
                point: peano::geometry::Point,
                #[serde(skip_serializing_if = "Option::is_none")]
                enclosure: Option<peano::eval::PointEnclosure>,
            }
            ctx.emit("eval", Out { t, point, enclosure }, |o| {
                vec![EvalRow {
                    t: o.t,
                    x: o.point.x,
                    y: o.point.y,
                    depth: o.enclosure.map(|e| e.depth),
                    col: o.enclosure.map(|e| e.col),
                    row: o.enclosure.map(|e| e.row),
                }]
            })
        }
        Command::Dilation { file, tol, via_junctions, threshold } => {
            let curve = read_valid(&file)?;
            let limits = ctx.limits();
            let threshold = match threshold {
                Threshold::Genus => JunctionThreshold::Genus,
                Threshold::Base => JunctionThreshold::Base,
            };
            let est = if via_junctions {
                dilation_via_junctions(&curve, tol, threshold, &limits)
            } else {
                dilation(&curve, tol, &limits)
            };
            match est {
                Ok(e) => ctx.emit("dilation", e, |e| vec![EstimateRow::from(e)]),
                Err(DilationError::CapExceeded { cap, lower, upper }) => {
                    #[derive(Serialize)]
                    struct Partial {
                        cap: Cap,
                        lower: Option<Rational>,
                        upper: Option<Rational>,
                    }
                    if ctx.format == OutputFormat::Json {
                        ctx.json("dilation", Partial { cap, lower, upper })?;
                    }
                    Err(dilation_err(DilationError::CapExceeded { cap, lower, upper }))
                }
                Err(e) => Err(dilation_err(e)),
            }
        }
        Command::Junctions { file } => {
            let curve = read_valid(&file)?;
            let classes = junction_classes(&curve);
            ctx.emit("junctions", classes, |cs| {
                cs.iter()
                    .enumerate()
                    .map(|(i, c)| JunctionRow {
                        class: i,
                        key: c.key.to_string(),
                        multiplicity: c.multiplicity,
                        side_adjacent: c.key.side_adjacent(),
                        first_order: c.representative.0.depth,
                    })
                    .collect()
            })
        }
        Command::Oracle { file, depth } => {
            let curve = read_valid(&file)?;
            let points = (curve.genus() as u128).saturating_pow(depth).saturating_mul(3).saturating_add(1);
            check_mem(&ctx.caps, points.saturating_mul(64), "oracle")?;
            let r = brute_force_lower_bound(&curve, depth, ctx.caps.max_points).map_err(|e| match e {
                OracleError::TooManyPoints { .. } => CliError::Cap(e.to_string()),
            })?;
            ctx.emit("oracle", r, |r| {
                vec![OracleRow {
                    depth: r.depth,
                    points: r.points,
                    lower_bound: r.lower_bound,
                    witness_t: r.witness.0,
                    witness_t2: r.witness.1,
                }]
            })
        }
        Command::Enumerate { k, dedup, side_adjacent, max_curves } => {
            check_k(k, max_curves)?;
            let spec =
                EnumerationSpec { require_side_adjacency: side_adjacent, dedup_by_symmetry: dedup, ..EnumerationSpec::new(k) };
            let mut n = 0u64;
            let curves = enumerate_curves(&spec).take(max_curves.map_or(usize::MAX, |m| m as usize));
            match ctx.format {
                OutputFormat::Csv => {
                    let mut w = csv::Writer::from_writer(&mut *ctx.out);
                    for c in curves {
                        n += 1;
                        w.serialize(CurveRow { k, description: c.to_string() }).map_err(|e| CliError::Usage(e.to_string()))?;
                    }
                    w.flush().map_err(io)?;
                }
                OutputFormat::Json => {
                    for c in curves {
                        n += 1;
                        ctx.line(&c)?;
                    }
                }
            }
            let _ = writeln!(ctx.err, "enumerated {n} curves");
            Ok(())
        }
        Command::Search { k, tol, side_adjacent, no_prune, prune_depth, max_curves } => {
            check_k(k, max_curves)?;
            let spec = EnumerationSpec { require_side_adjacency: side_adjacent, ..EnumerationSpec::new(k) };
            let opts = SearchOptions { tol, prune: !no_prune, prune_depth, limits: ctx.limits(), max_curves };
            let format = ctx.format;
            let caps = ctx.caps;
            let mut rounds = 0u64;
            let mut failed: Option<CliError> = None;
            let mut headers = true;
            let out = &mut *ctx.out;
            let err = &mut *ctx.err;
            let result = find_min_dilation(&spec, &opts, |stats, records, best| {
                rounds += 1;
                let res = match format {
                    OutputFormat::Json => records.iter().try_for_each(|r| {
                        writeln!(out, "{}", serde_json::to_string(&SearchLine::Record(r)).expect("records serialize"))
                    }),
                    OutputFormat::Csv if records.is_empty() => Ok(()),
                    OutputFormat::Csv => {
                        let mut w = csv::WriterBuilder::new().has_headers(headers).from_writer(Vec::new());
                        headers = false;
                        for r in records {
                            w.serialize(RecordRow::from(r)).expect("rows serialize");
                        }
                        out.write_all(&w.into_inner().expect("in-memory writer"))
                    }
                };
                if let (Err(e), None) = (res, &failed) {
                    failed = Some(io(e));
                }
                if rounds % 64 == 1 {
                    let b = best.map(|b| b.estimate.upper.to_string()).unwrap_or_else(|| "-".into());
                    let _ = writeln!(
                        err,
                        "progress: enumerated {} pruned {} evaluated {} best upper {b}",
                        stats.enumerated, stats.pruned, stats.fully_evaluated
                    );
                }
            });
            if let Some(e) = failed {
                return Err(e);
            }
            match result {
                Ok(outcome) => {
                    let _ = writeln!(
                        ctx.err,
                        "done: enumerated {} pruned {} evaluated {} best upper {}",
                        outcome.stats.enumerated, outcome.stats.pruned, outcome.stats.fully_evaluated, outcome.best.estimate.upper
                    );
                    if format == OutputFormat::Json {
                        ctx.line(&SearchLine::Summary { caps, outcome: &outcome })?;
                    }
                    Ok(())
                }
                Err(SearchError::Dilation { curve, source }) => {
                    let code = dilation_err(source);
                    let msg = format!("bracketing {curve}: {code}");
                    Err(match code {
                        CliError::Cap(_) => CliError::Cap(msg),
                        _ => CliError::Usage(msg),
                    })
                }
                Err(e) => Err(CliError::Usage(e.to_string())),
            }
        }
        Command::Scan { file, depth } => {
            let curve = read_valid(&file)?;
            let side = (curve.k() as u128).checked_pow(depth).unwrap_or(u128::MAX);
            check_mem(&ctx.caps, side.saturating_mul(side).saturating_mul(8), "scan")?;
            let order = scan_order(&curve, depth, DEFAULT_SCAN_SIDE_CAP).map_err(eval_err)?;
            ctx.emit("scan", order, |o| {
                o.cells.iter().enumerate().map(|(position, c)| ScanRow { position, col: c.col, row: c.row }).collect()
            })
        }
        Command::Blob { file, depth, from, to } => {
            let curve = read_valid(&file)?;
            let side = (curve.k() as u128).checked_pow(depth).unwrap_or(u128::MAX);
            check_mem(&ctx.caps, side.saturating_mul(side).saturating_mul(8), "blob")?;
            let order = scan_order(&curve, depth, DEFAULT_SCAN_SIDE_CAP).map_err(eval_err)?;
            let m = blob_metrics(&order, from, to).map_err(eval_err)?;
            ctx.emit("blob", m, |m| vec![*m])
        }
    }
}
