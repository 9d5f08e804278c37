//! Analysis of administered exams: distractor effectiveness, score
//! distributions and correlation between two score vectors.
//!
//! Responses are read from `student_id,q1,...,qK`, where each cell is the
//! chosen on-form position `A`-`D` or empty for a blank. Correct positions
//! come from the key file written by the exporter.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

pub const OPTION_IDS: [&str; 4] = ["A", "B", "C", "D"];

/// A distractor is effective when strictly more than this fraction of
/// responders chose it.
pub const EFFECTIVE_THRESHOLD: f64 = 0.05;

#[derive(Debug, thiserror::Error)]
pub enum PsychError {
    #[error("student '{student}', question {question}: '{value}' is not one of that question's options")]
    UnknownOption {
        student: String,
        question: String,
        value: String,
    },
    #[error("line {line}: expected {expected} cells, found {found}")]
    RaggedRow { line: usize, expected: usize, found: usize },
    #[error("no key entry for question {0}")]
    MissingKey(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("no students")]
    NoStudents,
    #[error("vectors have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("at least 3 observations are needed, got {0}")]
    TooFewObservations(usize),
    #[error("correlation is undefined for a constant vector")]
    ConstantVector,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseQuestion {
    pub label: String,
    pub options: [String; 4],
    pub correct: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseSet {
    pub exam_id: String,
    pub questions: Vec<ResponseQuestion>,
    pub student_ids: Vec<String>,
    /// `responses[s][q]` is the chosen option index, `None` for a blank.
    pub responses: Vec<Vec<Option<usize>>>,
}

impl ResponseSet {
    pub fn student_count(&self) -> usize {
        self.student_ids.len()
    }

    pub fn scores(&self) -> Vec<u32> {
        self.responses
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.questions)
                    .filter(|(choice, q)| **choice == Some(q.correct))
                    .count() as u32
            })
            .collect()
    }
}

/// Reads a key file (`row,correct_position`) into 0-based correct indices
/// ordered by row. Rows must be exactly `1..=K`.
pub fn parse_key(text: &str) -> Result<Vec<usize>, PsychError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut entries = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(PsychError::Malformed(format!("key row {:?}", rec)));
        }
        let row: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| PsychError::Malformed(format!("key row number '{}'", &rec[0])))?;
        let pos = OPTION_IDS
            .iter()
            .position(|o| *o == rec[1].trim())
            .ok_or_else(|| PsychError::Malformed(format!("key position '{}'", &rec[1])))?;
        if entries.insert(row, pos).is_some() {
            return Err(PsychError::Malformed(format!("key row {row} appears twice")));
        }
    }
    for (i, row) in entries.keys().enumerate() {
        if *row != i + 1 {
            return Err(PsychError::Malformed(format!(
                "key rows must run 1..={}",
                entries.len()
            )));
        }
    }
    Ok(entries.into_values().collect())
}

/// Parses response CSV text against a key.
pub fn load_responses(exam_id: &str, responses_csv: &str, key: &[usize]) -> Result<ResponseSet, PsychError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(responses_csv.as_bytes());
    let header = reader.headers()?.clone();
    if header.get(0).map(str::trim) != Some("student_id") || header.len() < 2 {
        return Err(PsychError::Malformed("header must be student_id,q1,...,qK".into()));
    }
    let mut questions = Vec::new();
    for (i, label) in header.iter().skip(1).enumerate() {
        let correct = *key.get(i).ok_or_else(|| PsychError::MissingKey(label.to_string()))?;
        questions.push(ResponseQuestion {
            label: label.trim().to_string(),
            options: OPTION_IDS.map(String::from),
            correct,
        });
    }
    let expected = header.len();
    let mut student_ids = Vec::new();
    let mut responses = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != expected {
            return Err(PsychError::RaggedRow {
                line,
                expected,
                found: rec.len(),
            });
        }
        let student = rec[0].trim().to_string();
        let mut row = Vec::with_capacity(questions.len());
        for (q, cell) in questions.iter().zip(rec.iter().skip(1)) {
            let cell = cell.trim();
            if cell.is_empty() {
                row.push(None);
                continue;
            }
            let idx = q
                .options
                .iter()
                .position(|o| o == cell)
                .ok_or_else(|| PsychError::UnknownOption {
                    student: student.clone(),
                    question: q.label.clone(),
                    value: cell.to_string(),
                })?;
            row.push(Some(idx));
        }
        student_ids.push(student);
        responses.push(row);
    }
    Ok(ResponseSet {
        exam_id: exam_id.to_string(),
        questions,
        student_ids,
        responses,
    })
}

/// Reads a response file and its key file.
pub fn load_response_files(responses: &Path, key: &Path) -> Result<ResponseSet, PsychError> {
    let exam_id = responses
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let key = parse_key(&std::fs::read_to_string(key)?)?;
    load_responses(&exam_id, &std::fs::read_to_string(responses)?, &key)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptionStat {
    pub option: usize,
    pub is_correct: bool,
    pub count: usize,
    /// Share of the students who answered the question (blanks excluded).
    pub fraction: f64,
    pub effective: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuestionReport {
    pub label: String,
    pub responders: usize,
    pub blanks: usize,
    pub options: [OptionStat; 4],
    pub effective_distractor_count: usize,
    pub effective_mcq: bool,
}

impl QuestionReport {
    pub fn distractors(&self) -> impl Iterator<Item = &OptionStat> {
        self.options.iter().filter(|o| !o.is_correct)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistractorReport {
    pub students: usize,
    pub questions: Vec<QuestionReport>,
}

impl DistractorReport {
    pub fn effective_distractors(&self) -> usize {
        self.questions.iter().map(|q| q.effective_distractor_count).sum()
    }

    pub fn effective_mcqs(&self) -> usize {
        self.questions.iter().filter(|q| q.effective_mcq).count()
    }
}

pub fn is_effective(fraction: f64) -> bool {
    fraction > EFFECTIVE_THRESHOLD
}

pub fn distractor_report(rs: &ResponseSet) -> DistractorReport {
    let questions = rs
        .questions
        .iter()
        .enumerate()
        .map(|(qi, q)| {
            let mut counts = [0usize; 4];
            let mut blanks = 0;
            for row in &rs.responses {
                match row[qi] {
                    Some(o) => counts[o] += 1,
                    None => blanks += 1,
                }
            }
            let responders = rs.student_count() - blanks;
            let options: [OptionStat; 4] = std::array::from_fn(|o| {
                let fraction = if responders == 0 {
                    0.0
                } else {
                    counts[o] as f64 / responders as f64
                };
                let is_correct = o == q.correct;
                OptionStat {
                    option: o,
                    is_correct,
                    count: counts[o],
                    fraction,
                    effective: !is_correct && is_effective(fraction),
                }
            });
            let effective_distractor_count = options.iter().filter(|o| o.effective).count();
            QuestionReport {
                label: q.label.clone(),
                responders,
                blanks,
                options,
                effective_distractor_count,
                effective_mcq: effective_distractor_count >= 1,
            }
        })
        .collect();
    DistractorReport {
        students: rs.student_count(),
        questions,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreStats {
    pub scores: Vec<u32>,
    pub question_count: u32,
    pub mean: f64,
    /// `None` with a single student.
    pub sample_sd: Option<f64>,
    pub population_sd: f64,
    /// Every score sharing the highest frequency, ascending.
    pub modes: Vec<u32>,
    /// Student count for each score `0..=question_count`.
    pub frequency: BTreeMap<u32, usize>,
}

pub fn score_stats(rs: &ResponseSet) -> Result<ScoreStats, PsychError> {
    stats_from_scores(rs.scores(), rs.questions.len() as u32)
}

pub fn stats_from_scores(scores: Vec<u32>, question_count: u32) -> Result<ScoreStats, PsychError> {
    if scores.is_empty() {
        return Err(PsychError::NoStudents);
    }
    let n = scores.len() as f64;
    let mean = scores.iter().map(|&s| s as f64).sum::<f64>() / n;
    let ss: f64 = scores.iter().map(|&s| (s as f64 - mean).powi(2)).sum();
    let mut frequency: BTreeMap<u32, usize> = (0..=question_count).map(|s| (s, 0)).collect();
    for &s in &scores {
        *frequency.entry(s).or_default() += 1;
    }
    let top = frequency.values().copied().max().unwrap_or(0);
    let modes = frequency.iter().filter(|(_, &c)| c == top).map(|(&s, _)| s).collect();
    Ok(ScoreStats {
        question_count,
        mean,
        sample_sd: (scores.len() > 1).then(|| (ss / (n - 1.0)).sqrt()),
        population_sd: (ss / n).sqrt(),
        modes,
        frequency,
        scores,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub r: f64,
    pub df: usize,
    pub t: f64,
}

impl Correlation {
    pub fn p_value(&self) -> f64 {
        p_value(self.t, self.df as f64)
    }
}

/// Sample Pearson correlation with its t statistic.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation, PsychError> {
    if x.len() != y.len() {
        return Err(PsychError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(PsychError::TooFewObservations(x.len()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(PsychError::ConstantVector);
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = x.len() - 2;
    let t = if r.abs() == 1.0 {
        f64::INFINITY.copysign(r)
    } else {
        r * (df as f64 / (1.0 - r * r)).sqrt()
    };
    Ok(Correlation { r, df, t })
}

/// Two-tailed Student-t probability `P(|T| >= |t|)` with `df` degrees of
/// freedom.
pub fn p_value(t: f64, df: f64) -> f64 {
    assert!(df > 0.0, "degrees of freedom must be positive");
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    statrs::function::beta::beta_reg(df / 2.0, 0.5, x)
}

/// One line per (question, option).
pub fn report_csv(report: &DistractorReport) -> Result<String, PsychError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record([
        "question",
        "option",
        "role",
        "count",
        "fraction",
        "effective",
        "effective_mcq",
    ])?;
    for q in &report.questions {
        for o in &q.options {
            w.write_record([
                q.label.as_str(),
                OPTION_IDS[o.option],
                if o.is_correct { "correct" } else { "distractor" },
                &o.count.to_string(),
                &format!("{:.4}", o.fraction),
                if o.effective { "yes" } else { "no" },
                if q.effective_mcq { "yes" } else { "no" },
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| PsychError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn summary_text(report: &DistractorReport, stats: &ScoreStats) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "students: {}", report.students);
    let _ = writeln!(out, "questions: {}", report.questions.len());
    let _ = writeln!(out, "mean score: {:.2}", stats.mean);
    match stats.sample_sd {
        Some(sd) => {
            let _ = writeln!(out, "sd (sample): {sd:.2}");
        }
        None => out.push_str("sd (sample): n/a\n"),
    }
    let _ = writeln!(out, "sd (population): {:.2}", stats.population_sd);
    let modes: Vec<String> = stats.modes.iter().map(u32::to_string).collect();
    let _ = writeln!(out, "mode: {}", modes.join(", "));
    out.push_str("score frequency:\n");
    for (score, count) in &stats.frequency {
        let pct = 100.0 * *count as f64 / report.students as f64;
        let _ = writeln!(out, "  {score:>3}  {count:>4}  {pct:5.1}%");
    }
    let _ = writeln!(out, "effective distractors: {}", report.effective_distractors());
    let _ = writeln!(
        out,
        "effective questions: {} of {}",
        report.effective_mcqs(),
        report.questions.len()
    );
    out
}
