//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on a domain failure (unanswerable spec,
//! count mismatch, bad snippet), 2 on I/O or usage errors. Diagnostics go
//! to the error stream, machine-readable output to the output stream.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bank::{Bank, BankError, LoadOptions, SaveOptions};
use crate::flowgraph::{
    brute_force_counts, coverage_counts_with, AnalysisConfig, FlowError, TestingMethod, BRUTE_FORCE_PATH_LIMIT,
    DEFAULT_LOOP_BOUND, DEFAULT_PATH_CAP,
};
use crate::psychometrics::{self, PsychError};
use crate::qgen::{self, ExamSpec, QgenError, QuestionType};
use crate::render_export::{self, ExportError};

#[derive(Debug, Parser)]
#[command(
    name = "covquiz",
    version,
    about = "Generate and analyze coverage-analysis multiple-choice exams"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and analyze snippets and add them to a bank (created if missing).
    Ingest(IngestArgs),
    /// Generate exams as CSV with DOT assets and an answer key.
    Gen(GenArgs),
    /// Print the size of the question space.
    Count(BankArgs),
    /// Report distractor effectiveness and score statistics for responses.
    Analyze(AnalyzeArgs),
    /// Recompute every stored count and compare.
    Verify(BankArgs),
}

#[derive(Debug, Args)]
pub struct BankArgs {
    #[arg(long)]
    pub bank: PathBuf,
    /// Path enumeration cap.
    #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
    pub cap: usize,
    /// Trust stored counts when loading.
    #[arg(long)]
    pub no_verify: bool,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub bank: PathBuf,
    /// Loop iterations per path; only for a new bank.
    #[arg(long)]
    pub loop_bound: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
    pub cap: usize,
    /// Store flow graphs in the bank file.
    #[arg(long)]
    pub embed_graphs: bool,
    /// Snippet files; the item id is the file stem.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub bank: BankArgs,
    /// Generated and printed when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = TestingMethod::ALL)]
    pub methods: Vec<TestingMethod>,
    #[arg(long, value_delimiter = ',', default_values_t = QuestionType::ALL)]
    pub types: Vec<QuestionType>,
    #[arg(long, default_value_t = 1)]
    pub per_cell: usize,
    /// Number of exams; exam k uses seed + k - 1.
    #[arg(long, default_value_t = 1)]
    pub sets: u32,
    #[arg(long, default_value = "exam")]
    pub exam_id: String,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// `student_id,q1,...,qK` with cells A-D or empty.
    #[arg(long)]
    pub responses: PathBuf,
    /// Key file written by `gen`.
    #[arg(long)]
    pub key: PathBuf,
    /// `student_id,score` file to correlate the exam scores with.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    /// Directory for the report CSV and summary text.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum Failure {
    Domain(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Io(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Io(m) => m,
        }
    }
}

impl From<BankError> for Failure {
    fn from(e: BankError) -> Self {
        match e {
            BankError::Io(_) | BankError::SchemaMismatch(_) => Failure::Io(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<QgenError> for Failure {
    fn from(e: QgenError) -> Self {
        match e {
            QgenError::SpecUnachievable(report) => Failure::Domain(format!("exam spec cannot be met:\n{report}")),
            other => Failure::Domain(other.to_string()),
        }
    }
}

impl From<ExportError> for Failure {
    fn from(e: ExportError) -> Self {
        match e {
            ExportError::Io(_) | ExportError::Csv(_) => Failure::Io(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<PsychError> for Failure {
    fn from(e: PsychError) -> Self {
        match e {
            PsychError::Io(_) | PsychError::Csv(_) | PsychError::Malformed(_) | PsychError::RaggedRow { .. } => {
                Failure::Io(e.to_string())
            }
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{e}");
                2
            } else {
                let _ = write!(out, "{e}");
                0
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Ingest(a) => cmd_ingest(&a, out),
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Count(a) => cmd_count(&a, out),
        Command::Analyze(a) => cmd_analyze(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message().trim_end());
            f.exit_code()
        }
    }
}

fn load_bank(args: &BankArgs) -> Result<Bank, Failure> {
    let opts = LoadOptions {
        no_verify: args.no_verify,
        path_cap: Some(args.cap),
    };
    Ok(Bank::load(&args.bank, opts)?)
}

pub fn cmd_ingest(args: &IngestArgs, out: &mut dyn Write) -> CmdResult {
    let mut bank = if args.bank.exists() {
        let bank = Bank::load(
            &args.bank,
            LoadOptions {
                no_verify: false,
                path_cap: Some(args.cap),
            },
        )?;
        if let Some(lb) = args.loop_bound.filter(|&lb| lb != bank.loop_bound()) {
            return Err(Failure::Io(format!(
                "bank was built with loop bound {}, not {lb}",
                bank.loop_bound()
            )));
        }
        bank
    } else {
        Bank::new(args.loop_bound.unwrap_or(DEFAULT_LOOP_BOUND))
    };
    let cfg = AnalysisConfig {
        path_cap: args.cap,
        ..bank.analysis_config()
    };
    for file in &args.files {
        let source = std::fs::read_to_string(file).map_err(|e| Failure::Io(format!("{}: {e}", file.display())))?;
        let id = file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .ok_or_else(|| Failure::Io(format!("{}: no file name", file.display())))?;
        bank = bank.ingest_with(&source, &id, &cfg)?;
    }
    bank.save(
        &args.bank,
        SaveOptions {
            embed_graphs: args.embed_graphs,
        },
    )?;
    writeln!(out, "item_id,path,branch,statement")?;
    for item in bank.items() {
        let (p, b, s) = item.counts.triple();
        writeln!(out, "{},{p},{b},{s}", item.item_id)?;
    }
    Ok(())
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> CmdResult {
    let bank = load_bank(&args.bank)?;
    let seed = args.seed.unwrap_or_else(rand::random);
    if args.sets == 0 {
        return Err(Failure::Io("--sets must be at least 1".into()));
    }
    let mut files = Vec::new();
    let mut summary = Vec::new();
    for k in 0..args.sets {
        let set_seed = seed.wrapping_add(u64::from(k));
        let exam_id = if args.sets == 1 {
            args.exam_id.clone()
        } else {
            format!("{}-{}", args.exam_id, k + 1)
        };
        let spec = ExamSpec::new(&args.methods, &args.types, args.per_cell, set_seed);
        let mcqs = qgen::generate_exam(&bank, &spec)?;
        let rendered = render_export::render_exam(&bank, &mcqs, &exam_id)?;
        files.extend(render_export::exam_files(&rendered, &exam_id)?);
        let meta = serde_json::json!({
            "exam_id": exam_id,
            "seed": set_seed,
            "loop_bound": bank.loop_bound(),
            "methods": args.methods.iter().map(|m| m.key()).collect::<Vec<_>>(),
            "types": args.types.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "per_cell": args.per_cell,
            "questions": mcqs.len(),
            "bank_items": bank.len(),
            "tool_version": crate::bank::TOOL_VERSION,
        });
        let mut text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
        text.push('\n');
        files.push((format!("{exam_id}.meta.json"), text.into_bytes()));
        summary.push((exam_id, set_seed, mcqs.len()));
    }
    std::fs::create_dir_all(&args.out)?;
    let paths: Vec<(PathBuf, Vec<u8>)> = files.into_iter().map(|(n, b)| (args.out.join(n), b)).collect();
    crate::atomic::write_all(&paths)?;
    writeln!(out, "seed: {seed}")?;
    for (exam_id, set_seed, n) in summary {
        writeln!(out, "{exam_id}: {n} questions, seed {set_seed}")?;
    }
    for (p, _) in &paths {
        writeln!(out, "wrote {}", p.display())?;
    }
    Ok(())
}

pub fn cmd_count(args: &BankArgs, out: &mut dyn Write) -> CmdResult {
    let bank = load_bank(args)?;
    writeln!(out, "method,count,group_size,mcqs_per_type")?;
    for m in TestingMethod::ALL {
        let space = qgen::count_space(&bank, m);
        for g in &space.groups {
            writeln!(out, "{},{},{},{}", m.key(), g.count_value, g.group_size, g.mcqs)?;
        }
        writeln!(out, "{},total,,{}", m.key(), space.total)?;
    }
    writeln!(out, "per_type,,,{}", qgen::count_space_per_type(&bank))?;
    writeln!(out, "all_types,,,{}", qgen::count_space_all_types(&bank))?;
    Ok(())
}

pub fn cmd_verify(args: &BankArgs, out: &mut dyn Write) -> CmdResult {
    let bank = Bank::load(
        &args.bank,
        LoadOptions {
            no_verify: true,
            path_cap: Some(args.cap),
        },
    )?;
    let cfg = AnalysisConfig {
        path_cap: args.cap,
        ..bank.analysis_config()
    };
    let mut failures = Vec::new();
    writeln!(out, "item_id,stored,computed,oracle,status")?;
    for item in bank.items() {
        let stored = item.counts.triple();
        if item.counts_overridden {
            writeln!(out, "{},{},,,overridden", item.item_id, fmt_triple(stored))?;
            continue;
        }
        let computed = coverage_counts_with(&item.graph, &cfg)
            .map_err(|e| Failure::Domain(format!("item '{}': {e}", item.item_id)))?
            .triple();
        let oracle = match brute_force_counts(&item.graph, &cfg) {
            Ok(c) => Some(c.triple()),
            Err(FlowError::BruteForceLimit { .. }) => None,
            Err(e) => return Err(Failure::Domain(format!("item '{}': {e}", item.item_id))),
        };
        let ok = stored == computed && oracle.is_none_or(|o| o == computed);
        writeln!(
            out,
            "{},{},{},{},{}",
            item.item_id,
            fmt_triple(stored),
            fmt_triple(computed),
            oracle
                .map(fmt_triple)
                .unwrap_or_else(|| format!("skipped (>{BRUTE_FORCE_PATH_LIMIT} paths)")),
            if ok { "ok" } else { "MISMATCH" }
        )?;
        if !ok {
            failures.push(item.item_id.clone());
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Domain(format!("count mismatch for: {}", failures.join(", "))))
    }
}

fn fmt_triple((p, b, s): (u64, u64, u64)) -> String {
    format!("{p}/{b}/{s}")
}

fn read_scores(path: &Path) -> Result<BTreeMap<String, f64>, Failure> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut scores = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Failure::Io(e.to_string()))?;
        if rec.len() != 2 {
            return Err(Failure::Io(format!(
                "{}: expected student_id,score rows",
                path.display()
            )));
        }
        let score: f64 = rec[1]
            .trim()
            .parse()
            .map_err(|_| Failure::Io(format!("{}: bad score '{}'", path.display(), &rec[1])))?;
        scores.insert(rec[0].trim().to_string(), score);
    }
    Ok(scores)
}

pub fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> CmdResult {
    let rs = psychometrics::load_response_files(&args.responses, &args.key)?;
    if rs.student_count() == 0 {
        return Err(PsychError::NoStudents.into());
    }
    let report = psychometrics::distractor_report(&rs);
    let stats = psychometrics::score_stats(&rs)?;
    let mut summary = psychometrics::summary_text(&report, &stats);
    if let Some(path) = &args.compare {
        let other = read_scores(path)?;
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (id, score) in rs.student_ids.iter().zip(&stats.scores) {
            let theirs = other
                .get(id)
                .ok_or_else(|| Failure::Domain(format!("student '{id}' has no score in {}", path.display())))?;
            x.push(f64::from(*score));
            y.push(*theirs);
        }
        let c = psychometrics::pearson(&x, &y)?;
        summary.push_str(&format!(
            "correlation: r({}) = {:.4}, t = {:.4}, p = {:.3e}\n",
            c.df,
            c.r,
            c.t,
            c.p_value()
        ));
    }
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        crate::atomic::write_all(&[
            (
                dir.join(format!("{}.report.csv", rs.exam_id)),
                psychometrics::report_csv(&report)?.into_bytes(),
            ),
            (
                dir.join(format!("{}.summary.txt", rs.exam_id)),
                summary.clone().into_bytes(),
            ),
        ])?;
    }
    out.write_all(summary.as_bytes())?;
    Ok(())
}
