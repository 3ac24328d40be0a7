//! Command-line front end shared by the `pg42` binary and its tests.

use std::borrow::Cow;
use std::ffi::OsString;
use std::io::{self, BufWriter, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;
use thiserror::Error;

use crate::constructions::{
    build_lifted_gabidulin, cps_assemble, cps_config_from_record, cps_for_each, cps_group, cps_orbits, cps_report, hkk_for_each,
    hkk_pattern_check, ConstructionError, CpsOutput, CpsRecord, CpsReport, CpsVariant, HkkConfig, HkkOutput, HkkPatternReport, HkkRecord,
    HkkSearch, HkkStats,
};
use crate::doubling::{
    format_counts, intersection_pattern, pattern_census, validate_doubling, x_spread_count, xx_census_rows, DoublingCode,
    IntersectionPattern, PatternCensus, TypeFilter, Verdict,
};
use crate::gf2geom::{pg42, Subspace};
use crate::io::{code_json, read_spread_file, sha256_hex, spread_json, write_atomic, IoError, ParseError, RunManifest};
use crate::reference::{check_reference_pair, REFERENCE_PAIRS};
use crate::spread::{all_spreads, find_maximal_spreads, for_each_spread, regulus_name, SearchMode, Spread, SpreadKind, SpreadType};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "pg42", version, about = "Line spreads of PG(4,2) and binary (5,3) doubling codes")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the primary output here (atomically) plus `<out>.manifest.json`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub limit: Option<usize>,
    /// Seed for sampled enumerations.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnumKind {
    Points,
    Lines,
    Planes,
    Solids,
    Spreads,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HkkMode {
    First,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Basic,
    SwapReguli,
    ReplacePlane,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List subspaces of PG(4,2), or maximal spreads.
    Enumerate {
        #[arg(value_enum)]
        kind: EnumKind,
    },
    /// Type, holes and reguli of every spread in a file.
    Classify { file: PathBuf },
    /// Check explicit pairs, or search a spread database for optimal pairs.
    Doubling {
        /// Spreads for S1; without FILE2, consecutive blocks form pairs.
        #[arg(required_unless_present = "search_db")]
        file1: Option<PathBuf>,
        file2: Option<PathBuf>,
        /// Spread file to search, or `all` for every spread.
        #[arg(long, conflicts_with_all = ["file1", "file2"])]
        search_db: Option<String>,
        #[arg(long, default_value = "XX")]
        filter: TypeFilter,
    },
    /// Pattern census over optimal pairs of type X spreads.
    Census {
        /// Spread file whose optimal XX pairs are censused instead of the
        /// exhaustive set.
        #[arg(long)]
        db: Option<PathBuf>,
    },
    /// Doubling codes from a shortened lifted Gabidulin code.
    Hkk {
        #[arg(long, value_enum, default_value_t = HkkMode::First)]
        mode: HkkMode,
        /// JSON configuration `{P, H_basis, E_basis, Eprime_basis}`.
        #[arg(long, conflicts_with = "mode")]
        config: Option<PathBuf>,
    },
    /// Doubling codes invariant under an order-6 collineation group.
    Cps {
        #[arg(long, value_enum, default_value_t = VariantArg::All)]
        variant: VariantArg,
        /// JSON configuration as emitted in the `record` field.
        #[arg(long, conflicts_with = "variant")]
        config: Option<PathBuf>,
    },
    /// Check the reference pairs and the quick structural criteria.
    #[command(name = "verify-paper")]
    VerifyReference,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Malformed(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse(_) | CliError::Malformed(_) => EXIT_PARSE,
            CliError::Invariant(_) => EXIT_INVARIANT,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Parse(p) => CliError::Parse(p),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Usage(format!("output error: {e}"))
    }
}

/// Output stream that hashes what it writes. With a path it writes to a
/// temporary file beside the target and renames on `finish`.
struct Sink {
    inner: SinkTarget,
    hasher: Sha256,
}

enum SinkTarget {
    Stdout(BufWriter<io::Stdout>),
    File { tmp: BufWriter<NamedTempFile>, path: PathBuf },
}

impl Sink {
    fn open(out: Option<&Path>) -> Result<Self, CliError> {
        let inner = match out {
            None => SinkTarget::Stdout(BufWriter::new(io::stdout())),
            Some(path) => {
                let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
                let tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
                SinkTarget::File {
                    tmp: BufWriter::new(tmp),
                    path: path.to_path_buf(),
                }
            }
        };
        Ok(Self {
            inner,
            hasher: Sha256::new(),
        })
    }

    /// Flushes, renames into place, and returns the path and digest if a file
    /// was written.
    fn finish(self) -> Result<Option<(PathBuf, String)>, CliError> {
        let digest = hex::encode(self.hasher.finalize());
        match self.inner {
            SinkTarget::Stdout(mut w) => {
                w.flush()?;
                Ok(None)
            }
            SinkTarget::File { tmp, path } => {
                let tmp = tmp.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
                tmp.persist(&path)
                    .map_err(|e| CliError::Usage(format!("cannot write {}: {}", path.display(), e.error)))?;
                Ok(Some((path, digest)))
            }
        }
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = match &mut self.inner {
            SinkTarget::Stdout(w) => w.write(buf)?,
            SinkTarget::File { tmp, .. } => tmp.write(buf)?,
        };
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        match &mut self.inner {
            SinkTarget::Stdout(w) => w.flush(),
            SinkTarget::File { tmp, .. } => tmp.flush(),
        }
    }
}

/// Shared state of one invocation.
struct Run {
    format: Format,
    out: Option<PathBuf>,
    limit: Option<usize>,
    seed: Option<u64>,
    sink: Sink,
    /// Extra files written beside the primary output: name and digest.
    extra: Vec<(String, String)>,
    violations: Vec<String>,
}

impl Run {
    fn write_json<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut self.sink, value).map_err(|e| CliError::Usage(e.to_string()))?;
        writeln!(self.sink)?;
        Ok(())
    }

    fn write_json_line<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        serde_json::to_writer(&mut self.sink, value).map_err(|e| CliError::Usage(e.to_string()))?;
        writeln!(self.sink)?;
        Ok(())
    }

    fn csv(&mut self) -> csv::Writer<&mut Sink> {
        csv::Writer::from_writer(&mut self.sink)
    }

    fn violation(&mut self, msg: impl Into<String>) {
        self.violations.push(msg.into());
    }

    /// Writes a secondary file next to `--out`; skipped when printing to
    /// stdout.
    fn side_file(&mut self, suffix: &str, bytes: &[u8]) -> Result<(), CliError> {
        if let Some(out) = &self.out {
            let path = sibling(out, suffix);
            write_atomic(&path, bytes)?;
            self.extra.push((file_name(&path), sha256_hex(bytes)));
        }
        Ok(())
    }
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Usage(format!("output error: {e}"))
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to stderr.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let arguments = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(cli, arguments) {
        Ok(violations) if violations.is_empty() => EXIT_OK,
        Ok(violations) => {
            for v in &violations {
                eprintln!("invariant violation: {v}");
            }
            EXIT_INVARIANT
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command; returns the invariant violations it found.
pub fn execute(cli: Cli, arguments: Vec<String>) -> Result<Vec<String>, CliError> {
    if cli.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let command_name = command_name(&cli.command);
    let mut run = Run {
        format: cli.format,
        out: cli.out.clone(),
        limit: cli.limit,
        seed: cli.seed,
        sink: Sink::open(cli.out.as_deref())?,
        extra: Vec::new(),
        violations: Vec::new(),
    };
    pool.install(|| dispatch(&mut run, &cli.command))?;
    let Run {
        sink,
        extra,
        violations,
        seed,
        ..
    } = run;
    if let Some((path, digest)) = sink.finish()? {
        let mut manifest = RunManifest::new(command_name, arguments, seed);
        manifest.outputs.insert(file_name(&path), digest);
        manifest.outputs.extend(extra);
        let bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Usage(e.to_string()))?;
        write_atomic(&sibling(&path, ".manifest.json"), &bytes)?;
    }
    Ok(violations)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Enumerate { .. } => "enumerate",
        Command::Classify { .. } => "classify",
        Command::Doubling { .. } => "doubling",
        Command::Census { .. } => "census",
        Command::Hkk { .. } => "hkk",
        Command::Cps { .. } => "cps",
        Command::VerifyReference => "verify-paper",
    }
}

fn dispatch(run: &mut Run, command: &Command) -> Result<(), CliError> {
    match command {
        Command::Enumerate { kind: EnumKind::Spreads } => cmd_enumerate_spreads(run),
        Command::Enumerate { kind } => cmd_enumerate(run, *kind),
        Command::Classify { file } => cmd_classify(run, file),
        Command::Doubling {
            search_db: Some(db),
            filter,
            ..
        } => cmd_doubling_search(run, db, *filter),
        Command::Doubling {
            file1: Some(f1), file2, ..
        } => cmd_doubling_pairs(run, f1, file2.as_deref()),
        Command::Doubling { .. } => Err(CliError::Usage("doubling needs FILE1 [FILE2] or --search-db".into())),
        Command::Census { db } => cmd_census(run, db.as_deref()),
        Command::Hkk { mode, config } => cmd_hkk(run, *mode, config.as_deref()),
        Command::Cps { variant, config } => cmd_cps(run, *variant, config.as_deref()),
        Command::VerifyReference => cmd_verify_reference(run),
    }
}

#[derive(Serialize)]
struct SubspaceRow {
    id: usize,
    compact: String,
    basis: Vec<String>,
}

fn point_token(p: &Subspace) -> String {
    p.basis()[0].to_compact()
}

fn cmd_enumerate(run: &mut Run, kind: EnumKind) -> Result<(), CliError> {
    let t = pg42();
    let (name, items) = match kind {
        EnumKind::Points => ("points", &t.points),
        EnumKind::Lines => ("lines", &t.lines),
        EnumKind::Planes => ("planes", &t.planes),
        EnumKind::Solids => ("solids", &t.solids),
        EnumKind::Spreads => unreachable!("handled separately"),
    };
    let rows: Vec<SubspaceRow> = items
        .iter()
        .take(run.limit.unwrap_or(usize::MAX))
        .enumerate()
        .map(|(id, s)| SubspaceRow {
            id,
            compact: if s.dim() == 1 { point_token(s) } else { s.to_compact() },
            basis: s.basis_strings(),
        })
        .collect();
    match run.format {
        Format::Text => {
            writeln!(run.sink, "{name}: {}", items.len())?;
            for r in &rows {
                writeln!(run.sink, "{}\t{}\t{}", r.id, r.compact, r.basis.join(" "))?;
            }
        }
        Format::Json => run.write_json(&json!({"kind": name, "count": items.len(), "items": rows}))?,
        Format::Csv => {
            let mut w = run.csv();
            w.write_record(["id", "compact", "basis"]).map_err(csv_err)?;
            for r in &rows {
                w.write_record([r.id.to_string(), r.compact.clone(), r.basis.join(" ")])
                    .map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Without `--limit`, only counts by type. With `--limit N`, lists the first
/// N spreads of the exhaustive order, or N random ones when `--seed` is set.
fn cmd_enumerate_spreads(run: &mut Run) -> Result<(), CliError> {
    let Some(limit) = run.limit else {
        let all = all_spreads();
        let mut counts = [0u64; 3];
        for s in all {
            let k = s.classify().map_err(|e| CliError::Invariant(e.to_string()))?.kind();
            counts[k as usize] += 1;
        }
        let [x, e, i] = counts;
        match run.format {
            Format::Text => writeln!(run.sink, "spreads: {}\nX: {x}\nE: {e}\nIDelta: {i}", all.len())?,
            Format::Json => run.write_json(&json!({"spreads": all.len(), "X": x, "E": e, "IDelta": i}))?,
            Format::Csv => {
                let mut w = run.csv();
                w.write_record(["type", "count"]).map_err(csv_err)?;
                for (t, n) in [("X", x), ("E", e), ("IDelta", i)] {
                    w.write_record([t.to_string(), n.to_string()]).map_err(csv_err)?;
                }
                w.write_record(["total".to_string(), all.len().to_string()]).map_err(csv_err)?;
                w.flush()?;
            }
        }
        return Ok(());
    };
    let spreads = match run.seed {
        Some(seed) => find_maximal_spreads(&SearchMode::Sample { count: limit, seed }).map_err(|e| CliError::Invariant(e.to_string()))?,
        None => {
            let mut v = Vec::new();
            if limit > 0 {
                for_each_spread(&SearchMode::Exhaustive, |s| {
                    v.push(s.clone());
                    if v.len() >= limit {
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                })
                .map_err(|e| CliError::Invariant(e.to_string()))?;
            }
            v
        }
    };
    write_spreads(run, &spreads)
}

fn write_spreads(run: &mut Run, spreads: &[Spread]) -> Result<(), CliError> {
    match run.format {
        Format::Text => {
            for (i, s) in spreads.iter().enumerate() {
                let kind = s.classify().map_err(|e| CliError::Invariant(e.to_string()))?.kind();
                writeln!(
                    run.sink,
                    "# spread {} id {} type {kind}\n{}\n",
                    i + 1,
                    s.id(),
                    crate::io::format_spread(s)
                )?;
            }
        }
        Format::Json => {
            for s in spreads {
                let j = spread_json(s).map_err(|e| CliError::Invariant(e.to_string()))?;
                run.write_json_line(&j)?;
            }
        }
        Format::Csv => {
            let mut w = run.csv();
            w.write_record(["id", "type", "lines"]).map_err(csv_err)?;
            for s in spreads {
                let kind = s.classify().map_err(|e| CliError::Invariant(e.to_string()))?.kind();
                w.write_record([s.id().to_string(), kind.to_string(), crate::io::format_spread(s)])
                    .map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ClassifyRow {
    index: usize,
    line: usize,
    id: String,
    #[serde(rename = "type")]
    kind: SpreadKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    common_line: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distinguished_regulus: Option<String>,
    holes: Vec<String>,
    reguli: Vec<String>,
}

fn classify_row(index: usize, line: usize, s: &Spread) -> Result<ClassifyRow, CliError> {
    let ty = s
        .classify()
        .map_err(|e| CliError::Invariant(format!("spread {}: {e}", index + 1)))?;
    let reguli = s.reguli().map_err(|e| CliError::Invariant(e.to_string()))?;
    let (common_line, distinguished_regulus) = match ty {
        SpreadType::X { common_line } => (Some(s.line(common_line).to_compact()), None),
        SpreadType::E { distinguished } | SpreadType::IDelta { distinguished } => (None, Some(regulus_name(distinguished))),
    };
    Ok(ClassifyRow {
        index: index + 1,
        line,
        id: s.id().to_string(),
        kind: ty.kind(),
        common_line,
        distinguished_regulus,
        holes: s.holes().points().iter().map(|p| p.to_compact()).collect(),
        reguli: reguli.iter().map(|r| r.name()).collect(),
    })
}

fn cmd_classify(run: &mut Run, file: &Path) -> Result<(), CliError> {
    let f = read_spread_file(file)?;
    let rows: Vec<ClassifyRow> = f
        .spreads
        .iter()
        .zip(&f.line_numbers)
        .enumerate()
        .map(|(i, (s, &line))| classify_row(i, line, s))
        .collect::<Result<_, _>>()?;
    match run.format {
        Format::Text => {
            for r in &rows {
                let feature = match (&r.common_line, &r.distinguished_regulus) {
                    (Some(c), _) => format!("common line {c}"),
                    (_, Some(d)) => format!("distinguished regulus {d}"),
                    _ => String::new(),
                };
                writeln!(
                    run.sink,
                    "spread {} (line {}): type {}, {feature}, holes {}, reguli {}",
                    r.index,
                    r.line,
                    r.kind,
                    r.holes.join(" "),
                    r.reguli.join(" ")
                )?;
            }
        }
        Format::Json => run.write_json(&rows)?,
        Format::Csv => {
            let mut w = run.csv();
            w.write_record([
                "index",
                "line",
                "id",
                "type",
                "common_line",
                "distinguished_regulus",
                "holes",
                "reguli",
            ])
            .map_err(csv_err)?;
            for r in &rows {
                w.write_record([
                    r.index.to_string(),
                    r.line.to_string(),
                    r.id.clone(),
                    r.kind.to_string(),
                    r.common_line.clone().unwrap_or_default(),
                    r.distinguished_regulus.clone().unwrap_or_default(),
                    r.holes.join(" "),
                    r.reguli.join(" "),
                ])
                .map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct PlaneRow {
    plane: usize,
    pattern: String,
    raw: String,
    meets_a9: bool,
    holes: u32,
    consistent: bool,
}

#[derive(Serialize)]
struct PairReport {
    pair: usize,
    s1_id: String,
    s2_id: String,
    s1_type: SpreadKind,
    s2_type: SpreadKind,
    #[serde(flatten)]
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_distance: Option<u8>,
    /// Present when S1 has type X.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    planes: Vec<PlaneRow>,
}

fn plane_row(j: usize, p: &IntersectionPattern) -> PlaneRow {
    let key = crate::doubling::PatternKey {
        counts: p.counts,
        meets_a9: p.meets_a9,
        holes: p.hole_count,
    };
    PlaneRow {
        plane: j + 1,
        pattern: p.tuple_string(),
        raw: format_counts(p.raw),
        meets_a9: p.meets_a9,
        holes: p.hole_count,
        consistent: key.is_consistent(),
    }
}

fn pair_report(index: usize, s1: &Spread, s2: &Spread) -> Result<PairReport, CliError> {
    let kind = |s: &Spread| s.classify().map(|t| t.kind()).map_err(|e| CliError::Invariant(e.to_string()));
    let (k1, k2) = (kind(s1)?, kind(s2)?);
    let verdict = validate_doubling(s1, s2);
    let duals = s2.dual_spread();
    let mut report = PairReport {
        pair: index + 1,
        s1_id: s1.id().to_string(),
        s2_id: s2.id().to_string(),
        s1_type: k1,
        s2_type: k2,
        verdict,
        witness: None,
        size: None,
        min_distance: None,
        planes: Vec::new(),
    };
    match verdict {
        Verdict::Invalid { line, plane } => {
            report.witness = Some([s1.line(line).to_compact(), duals[plane].to_compact()]);
        }
        Verdict::Optimal => {
            let code = DoublingCode::new(s1.clone(), s2.clone()).map_err(|e| CliError::Invariant(e.to_string()))?;
            report.size = Some(code.size());
            report.min_distance = Some(code.min_distance());
            if k1 == SpreadKind::X {
                for (j, b) in duals.iter().enumerate() {
                    let p = intersection_pattern(b, s1).map_err(|e| CliError::Invariant(e.to_string()))?;
                    report.planes.push(plane_row(j, &p));
                }
            }
        }
    }
    Ok(report)
}

fn cmd_doubling_pairs(run: &mut Run, f1: &Path, f2: Option<&Path>) -> Result<(), CliError> {
    let a = read_spread_file(f1)?;
    let pairs: Vec<(Spread, Spread)> = match f2 {
        Some(f2) => {
            let b = read_spread_file(f2)?;
            if a.spreads.len() != b.spreads.len() {
                return Err(CliError::Usage(format!(
                    "{} has {} spreads but {} has {}",
                    f1.display(),
                    a.spreads.len(),
                    f2.display(),
                    b.spreads.len()
                )));
            }
            a.spreads.into_iter().zip(b.spreads).collect()
        }
        None => {
            if a.spreads.len() % 2 != 0 {
                return Err(CliError::Usage(format!("{} has an odd number of spreads", f1.display())));
            }
            a.spreads.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect()
        }
    };
    let reports: Vec<PairReport> = pairs
        .iter()
        .enumerate()
        .map(|(i, (s1, s2))| pair_report(i, s1, s2))
        .collect::<Result<_, _>>()?;
    for r in &reports {
        if r.min_distance.is_some_and(|d| d != 3) {
            run.violation(format!("pair {}: optimal pair with minimum distance {:?}", r.pair, r.min_distance));
        }
        for p in r.planes.iter().filter(|p| !p.consistent) {
            run.violation(format!(
                "pair {} plane B{}: pattern {} meets_a9={} holes={}",
                r.pair, p.plane, p.pattern, p.meets_a9, p.holes
            ));
        }
    }
    match run.format {
        Format::Text => {
            for r in &reports {
                match (r.verdict, &r.witness) {
                    (Verdict::Invalid { line, plane }, Some([l, b])) => writeln!(
                        run.sink,
                        "pair {}: invalid, line a{} = {l} lies in plane B{} = {b}",
                        r.pair,
                        line + 1,
                        plane + 1
                    )?,
                    _ => {
                        writeln!(
                            run.sink,
                            "pair {}: optimal, types {}/{}, size {}, min distance {}",
                            r.pair,
                            r.s1_type,
                            r.s2_type,
                            r.size.unwrap_or(0),
                            r.min_distance.unwrap_or(0)
                        )?;
                        for p in &r.planes {
                            writeln!(run.sink, "  B{} {} meets_a9={} holes={}", p.plane, p.pattern, p.meets_a9, p.holes)?;
                        }
                    }
                }
            }
        }
        Format::Json => run.write_json(&reports)?,
        Format::Csv => {
            let mut w = run.csv();
            w.write_record(["pair", "verdict", "min_distance", "plane", "pattern", "meets_a9", "holes"])
                .map_err(csv_err)?;
            for r in &reports {
                let verdict = if r.verdict.is_optimal() { "optimal" } else { "invalid" };
                let md = r.min_distance.map(|d| d.to_string()).unwrap_or_default();
                if r.planes.is_empty() {
                    w.write_record([
                        r.pair.to_string(),
                        verdict.into(),
                        md.clone(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                    ])
                    .map_err(csv_err)?;
                }
                for p in &r.planes {
                    w.write_record([
                        r.pair.to_string(),
                        verdict.into(),
                        md.clone(),
                        p.plane.to_string(),
                        p.pattern.clone(),
                        p.meets_a9.to_string(),
                        p.holes.to_string(),
                    ])
                    .map_err(csv_err)?;
                }
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn load_db(db: &str) -> Result<Cow<'static, [Spread]>, CliError> {
    if db == "all" {
        Ok(Cow::Borrowed(all_spreads()))
    } else {
        Ok(Cow::Owned(read_spread_file(Path::new(db))?.spreads))
    }
}

/// Streams optimal pairs: JSON lines of the code, CSV rows or text lines.
fn cmd_doubling_search(run: &mut Run, db: &str, filter: TypeFilter) -> Result<(), CliError> {
    let spreads = load_db(db)?;
    if run.format == Format::Csv {
        writeln!(run.sink, "s1_id,s2_id,min_distance")?;
    }
    let mut count = 0usize;
    let mut failure: Option<CliError> = None;
    let limit = run.limit;
    if limit != Some(0) {
        crate::doubling::for_each_doubling(&spreads, filter, |code| {
            let res = match run.format {
                Format::Json => run.write_json_line(&code_json(&code)),
                Format::Csv => writeln!(run.sink, "{},{},{}", code.s1.id(), code.s2.id(), code.min_distance()).map_err(CliError::from),
                Format::Text => writeln!(run.sink, "{} {}", code.s1.id(), code.s2.id()).map_err(CliError::from),
            };
            count += 1;
            if let Err(e) = res {
                failure = Some(e);
                return ControlFlow::Break(());
            }
            if limit.is_some_and(|l| count >= l) {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })
        .map_err(|e| CliError::Invariant(e.to_string()))?;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    eprintln!("{count} optimal pairs");
    Ok(())
}

fn census_from_db(path: &Path, limit: Option<usize>) -> Result<PatternCensus, CliError> {
    let spreads = read_spread_file(path)?.spreads;
    let codes = crate::doubling::doubling_search(&spreads, TypeFilter::XX, limit).map_err(|e| CliError::Invariant(e.to_string()))?;
    Ok(pattern_census(codes.iter().map(|c| (&c.s1, &c.s2)), TypeFilter::XX))
}

/// Exhaustive by default. `--limit N` restricts the first spread to the
/// first N type X spreads (or the first N pairs with `--db`).
fn cmd_census(run: &mut Run, db: Option<&Path>) -> Result<(), CliError> {
    let census = match db {
        Some(path) => census_from_db(path, run.limit)?,
        None => xx_census_rows(run.limit),
    };
    if census.violation_count > 0 {
        run.violation(format!("{} planes violate the pattern restrictions", census.violation_count));
    }
    if census.eliminated_count() > 0 {
        run.violation(format!("pattern (3,2,2,1) occurs {} times", census.eliminated_count()));
    }
    let open = census.open_pattern_count();
    let scope = match (db, run.limit) {
        (Some(p), _) => format!("pairs from {}", p.display()),
        (None, Some(l)) => format!("first {} of {} type X spreads as S1", l.min(x_spread_count()), x_spread_count()),
        (None, None) => format!("all {} type X spreads as S1", x_spread_count()),
    };
    match run.format {
        Format::Text => {
            writeln!(run.sink, "scope: {scope}")?;
            writeln!(run.sink, "pairs: {}\nplanes: {}", census.pairs, census.planes)?;
            writeln!(run.sink, "pattern\tmeets_a9\tholes\tcount")?;
            for (k, n) in &census.histogram {
                writeln!(run.sink, "{}\t{}\t{}\t{n}", format_counts(k.counts), k.meets_a9, k.holes)?;
            }
            writeln!(run.sink, "(3,2,2,1): {}", census.eliminated_count())?;
            let realized = if open > 0 { "realized" } else { "not realized" };
            writeln!(run.sink, "(3,3,3,1): {open} ({realized})")?;
            writeln!(run.sink, "violations: {}", census.violation_count)?;
        }
        Format::Json => {
            let mut v = census.summary_json();
            v["scope"] = json!(scope);
            run.write_json(&v)?;
        }
        Format::Csv => census.write_csv(&mut run.sink).map_err(csv_err)?,
    }
    let violations = serde_json::to_vec_pretty(&census.violations).map_err(|e| CliError::Usage(e.to_string()))?;
    run.side_file(".violations.json", &violations)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

fn malformed(path: &Path) -> impl Fn(ConstructionError) -> CliError + '_ {
    move |e| CliError::Malformed(format!("{}: {e}", path.display()))
}

#[derive(Serialize)]
struct HkkRow {
    index: usize,
    record: HkkRecord,
    report: HkkPatternReport,
    code: crate::io::CodeJson,
}

fn cmd_hkk(run: &mut Run, mode: HkkMode, config: Option<&Path>) -> Result<(), CliError> {
    let search = match config {
        Some(path) => {
            let rec: HkkRecord = read_json(path)?;
            HkkSearch::Explicit(HkkConfig::from_record(&rec).map_err(malformed(path))?)
        }
        None if mode == HkkMode::All => HkkSearch::All,
        None => HkkSearch::First,
    };
    let limit = run.limit;
    let mut outputs: Vec<HkkOutput> = Vec::new();
    let stats = if limit == Some(0) {
        HkkStats::default()
    } else {
        let res = hkk_for_each(&search, |o| {
            outputs.push(o);
            if limit.is_some_and(|l| outputs.len() >= l) {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        match (res, config) {
            (Ok(s), _) => s,
            (Err(e), Some(path)) => return Err(malformed(path)(e)),
            (Err(e), None) => return Err(CliError::Invariant(e.to_string())),
        }
    };
    if outputs.is_empty() && limit != Some(0) {
        run.violation("no valid HKK configuration found");
    }
    let mut rows = Vec::with_capacity(outputs.len());
    for (i, o) in outputs.iter().enumerate() {
        let report = hkk_pattern_check(&o.code, &o.config).map_err(|e| CliError::Invariant(e.to_string()))?;
        if o.code.size() != 18 || o.code.min_distance() != 3 {
            run.violation(format!(
                "code {}: size {} min distance {}",
                i + 1,
                o.code.size(),
                o.code.min_distance()
            ));
        }
        for p in &report.problems {
            run.violation(format!("code {}: {p}", i + 1));
        }
        rows.push(HkkRow {
            index: i + 1,
            record: o.config.record(),
            report,
            code: code_json(&o.code),
        });
    }
    match run.format {
        Format::Text => {
            writeln!(
                run.sink,
                "configurations: {} emitted: {} discarded: {}",
                stats.configs, stats.emitted, stats.discarded
            )?;
            for r in &rows {
                let b9 = r.report.b9.map(|b| b.tuple_string()).unwrap_or_default();
                let others: Vec<String> = r.report.others.iter().map(|p| p.tuple_string()).collect();
                writeln!(
                    run.sink,
                    "code {}: P={} types {}/{} B9 {b9} B1..B8 {} regulus_free={} {}",
                    r.index,
                    r.record.p,
                    r.report.s1_type,
                    r.report.s2_type,
                    others.join(" "),
                    r.report.regulus_free,
                    if r.report.passed() { "ok" } else { "FAILED" }
                )?;
            }
        }
        Format::Json => run.write_json(&json!({"stats": stats, "codes": rows}))?,
        Format::Csv => {
            let mut w = run.csv();
            w.write_record([
                "index",
                "P",
                "H_basis",
                "E_basis",
                "Eprime_basis",
                "s1_type",
                "s2_type",
                "b9",
                "others",
                "regulus_free",
                "passed",
            ])
            .map_err(csv_err)?;
            for r in &rows {
                w.write_record([
                    r.index.to_string(),
                    r.record.p.clone(),
                    r.record.h_basis.join(" "),
                    r.record.e_basis.join(" "),
                    r.record.e_prime_basis.join(" "),
                    r.report.s1_type.to_string(),
                    r.report.s2_type.to_string(),
                    r.report.b9.map(|b| b.tuple_string()).unwrap_or_default(),
                    r.report.others.iter().map(|p| p.tuple_string()).collect::<Vec<_>>().join(" "),
                    r.report.regulus_free.to_string(),
                    r.report.passed().to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CpsRow {
    index: usize,
    record: CpsRecord,
    report: CpsReport,
    code: crate::io::CodeJson,
}

/// Types each variant is expected to produce for (S1, S2); `None` means the
/// second type is only reported.
fn cps_expected(v: CpsVariant) -> (SpreadKind, Option<SpreadKind>) {
    match v {
        CpsVariant::Basic | CpsVariant::SwapReguli => (SpreadKind::IDelta, Some(SpreadKind::IDelta)),
        CpsVariant::ReplacePlane => (SpreadKind::IDelta, None),
    }
}

fn cmd_cps(run: &mut Run, variant: VariantArg, config: Option<&Path>) -> Result<(), CliError> {
    let limit = run.limit.unwrap_or(usize::MAX);
    let mut outputs: Vec<CpsOutput> = Vec::new();
    match config {
        Some(path) => {
            let rec: CpsRecord = read_json(path)?;
            let cfg = cps_config_from_record(&rec).map_err(malformed(path))?;
            let code = cps_assemble(&cfg)
                .ok_or_else(|| CliError::Malformed(format!("{}: configuration is not an optimal doubling code", path.display())))?;
            outputs.push(CpsOutput { code, config: cfg });
        }
        None => {
            let variants: Vec<CpsVariant> = match variant {
                VariantArg::Basic => vec![CpsVariant::Basic],
                VariantArg::SwapReguli => vec![CpsVariant::SwapReguli],
                VariantArg::ReplacePlane => vec![CpsVariant::ReplacePlane],
                VariantArg::All => CpsVariant::ALL.to_vec(),
            };
            for v in variants {
                let mut taken = 0;
                if limit == 0 {
                    continue;
                }
                cps_for_each(v, |o| {
                    outputs.push(o);
                    taken += 1;
                    if taken >= limit {
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                })
                .map_err(|e| CliError::Invariant(e.to_string()))?;
                if taken == 0 {
                    run.violation(format!("{v}: no optimal code found"));
                }
            }
        }
    }
    let mut rows = Vec::with_capacity(outputs.len());
    for (i, o) in outputs.iter().enumerate() {
        let report = cps_report(o).map_err(|e| CliError::Invariant(e.to_string()))?;
        let (want1, want2) = cps_expected(report.variant);
        if report.s1_type != want1 || want2.is_some_and(|w| w != report.s2_type) {
            run.violation(format!(
                "code {} ({}): types {}/{}, expected {want1}/{}",
                i + 1,
                report.variant,
                report.s1_type,
                report.s2_type,
                want2.map_or("any".to_string(), |w| w.to_string())
            ));
        }
        if report.variant == CpsVariant::Basic && !report.dual_regulus {
            run.violation(format!("code {}: duals of the three non-orbit planes are not a regulus", i + 1));
        }
        if o.code.min_distance() != 3 {
            run.violation(format!("code {}: min distance {}", i + 1, o.code.min_distance()));
        }
        rows.push(CpsRow {
            index: i + 1,
            record: o.config.record(),
            report,
            code: code_json(&o.code),
        });
    }
    match run.format {
        Format::Text => {
            let g = cps_group().map_err(|e| CliError::Invariant(e.to_string()))?;
            let orbits = cps_orbits();
            writeln!(
                run.sink,
                "group order {}; good line orbits {}; good plane orbits {}",
                g.len(),
                orbits.good_line_orbits.len(),
                orbits.good_plane_orbits.len()
            )?;
            for r in &rows {
                writeln!(
                    run.sink,
                    "code {} {}: orbits {:?} N={} types {}/{} dual_regulus={} opposite_ok={}",
                    r.index,
                    r.report.variant,
                    r.record.orbit_ids,
                    r.record.n,
                    r.report.s1_type,
                    r.report.s2_type,
                    r.report.dual_regulus,
                    r.report.opposite_ok
                )?;
            }
        }
        Format::Json => run.write_json(&rows)?,
        Format::Csv => {
            let mut w = run.csv();
            w.write_record([
                "index",
                "variant",
                "line_orbit",
                "plane_orbit",
                "N",
                "s1_type",
                "s2_type",
                "dual_regulus",
                "opposite_ok",
            ])
            .map_err(csv_err)?;
            for r in &rows {
                w.write_record([
                    r.index.to_string(),
                    r.report.variant.to_string(),
                    r.record.orbit_ids[0].to_string(),
                    r.record.orbit_ids[1].to_string(),
                    r.record.n.clone(),
                    r.report.s1_type.to_string(),
                    r.report.s2_type.to_string(),
                    r.report.dual_regulus.to_string(),
                    r.report.opposite_ok.to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckLine {
    name: String,
    passed: bool,
    detail: String,
}

/// Reference pairs plus the fast structural checks. The exhaustive census
/// is left to `census`.
fn cmd_verify_reference(run: &mut Run) -> Result<(), CliError> {
    let mut checks = Vec::new();
    let t = pg42();
    let counts = [t.points.len(), t.lines.len(), t.planes.len(), t.solids.len()];
    checks.push(CheckLine {
        name: "subspace counts".into(),
        passed: counts == [31, 155, 155, 31],
        detail: format!("{counts:?}"),
    });
    for p in &REFERENCE_PAIRS {
        let c = check_reference_pair(p)?;
        let b9 = c.b9.map(|b| b.tuple_string()).unwrap_or_default();
        checks.push(CheckLine {
            name: p.name.into(),
            passed: c.passed(),
            detail: if c.passed() {
                format!("X/X, common line a9, B9 {b9}, reguli {}", c.s1_reguli.join(" "))
            } else {
                c.problems.join("; ")
            },
        });
    }
    let g = build_lifted_gabidulin();
    let gab_ok = g.codewords.len() == 64 && g.min_distance() == 4 && g.codewords.iter().all(|c| c.meet_dim(&g.special_plane) == 0);
    checks.push(CheckLine {
        name: "lifted Gabidulin code".into(),
        passed: gab_ok,
        detail: format!("{} codewords, min distance {}", g.codewords.len(), g.min_distance()),
    });
    let mut hkk_first = None;
    hkk_for_each(&HkkSearch::First, |o| {
        hkk_first = Some(o);
        ControlFlow::Break(())
    })
    .map_err(|e| CliError::Invariant(e.to_string()))?;
    let hkk_detail = match &hkk_first {
        Some(o) => {
            let r = hkk_pattern_check(&o.code, &o.config).map_err(|e| CliError::Invariant(e.to_string()))?;
            (
                r.passed(),
                format!(
                    "first config: types {}/{}, B9 {}",
                    r.s1_type,
                    r.s2_type,
                    r.b9.map(|b| b.tuple_string()).unwrap_or_default()
                ),
            )
        }
        None => (false, "no valid configuration".into()),
    };
    checks.push(CheckLine {
        name: "HKK first configuration".into(),
        passed: hkk_detail.0,
        detail: hkk_detail.1,
    });
    let group_ok = cps_group().map(|g| g.len() == 6).unwrap_or(false);
    checks.push(CheckLine {
        name: "CPS group".into(),
        passed: group_ok,
        detail: "order 6 with closure".into(),
    });
    for v in CpsVariant::ALL {
        let outs = crate::constructions::cps_build(v).map_err(|e| CliError::Invariant(e.to_string()))?;
        let mut bad = Vec::new();
        for o in &outs {
            let r = cps_report(o).map_err(|e| CliError::Invariant(e.to_string()))?;
            let (w1, w2) = cps_expected(v);
            if r.s1_type != w1 || w2.is_some_and(|w| w != r.s2_type) {
                bad.push(format!("{}/{}", r.s1_type, r.s2_type));
            }
        }
        bad.sort();
        bad.dedup();
        checks.push(CheckLine {
            name: format!("CPS {v} types"),
            passed: !outs.is_empty() && bad.is_empty(),
            detail: if bad.is_empty() {
                format!("{} codes", outs.len())
            } else {
                format!("{} codes, found {}", outs.len(), bad.join(", "))
            },
        });
    }
    for c in checks.iter().filter(|c| !c.passed) {
        run.violation(format!("{}: {}", c.name, c.detail));
    }
    match run.format {
        Format::Text => {
            for c in &checks {
                writeln!(run.sink, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
            }
        }
        Format::Json => run.write_json(&checks)?,
        Format::Csv => {
            let mut w = run.csv();
            w.write_record(["check", "passed", "detail"]).map_err(csv_err)?;
            for c in &checks {
                w.write_record([c.name.clone(), c.passed.to_string(), c.detail.clone()])
                    .map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
