//! Rendering questions and exporting them as a five-column CSV.
//!
//! Exam file `<exam_id>.csv` (RFC 4180, every data field quoted, LF line
//! ends):
//!
//! ```text
//! question,correct_answer,distractor_1,distractor_2,distractor_3
//! ```
//!
//! The correct answer always sits in the second column. Code payloads are
//! embedded as text; graph payloads are written to
//! `<exam_id>_<row>_<slot>.dot` (slot `stimulus` or `opt1`..`opt4`, by
//! on-form position) and the cell holds that file name. The on-form
//! position of each correct answer is recorded in `<exam_id>.key.csv`
//! (`row,correct_position`, position `A`-`D`).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::bank::Bank;
use crate::flowgraph::{BranchTag, FlowGraph, NodeKind, TestingMethod};
use crate::minilang::canonical_text;
use crate::qgen::{Mcq, RenderKind};

/// Spreadsheet cell limit.
pub const MAX_CELL_CHARS: usize = 32_000;

pub const EXAM_HEADER: &str = "question,correct_answer,distractor_1,distractor_2,distractor_3";
pub const KEY_HEADER: &str = "row,correct_position";

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("nothing to export")]
    Empty,
    #[error("row {row}, column {column}: {chars} characters exceeds the {MAX_CELL_CHARS}-character cell limit")]
    PayloadTooLarge {
        row: usize,
        column: &'static str,
        chars: usize,
    },
    #[error("question refers to unknown item '{0}'")]
    UnknownItem(String),
    #[error("malformed exam file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn noun(kind: RenderKind) -> &'static str {
    match kind {
        RenderKind::Graph => "flow graph",
        RenderKind::Code => "Python code segment",
    }
}

/// The question sentence: option noun first, stimulus noun last.
pub fn question_text(method: TestingMethod, stimulus_kind: RenderKind, choice_kind: RenderKind) -> String {
    format!(
        "Which {} does have the same number of minimum test cases covering 100% {} as the given {}?",
        noun(choice_kind),
        method.phrase(),
        noun(stimulus_kind)
    )
}

/// Deterministic Graphviz text. Nodes show only their id (entry and exit
/// are `start`/`end`) so that a graph does not give away its code.
pub fn render_dot(graph: &FlowGraph) -> String {
    let mut out = String::from("digraph cfg {\n    node [fontname=\"Helvetica\"];\n");
    for node in &graph.nodes {
        let (label, shape) = match node.kind {
            NodeKind::Entry => ("start".to_string(), "oval"),
            NodeKind::Exit => ("end".to_string(), "oval"),
            NodeKind::Statement => (node.id.to_string(), "box"),
            NodeKind::Decision => (node.id.to_string(), "diamond"),
        };
        let _ = writeln!(out, "    n{} [label=\"{}\", shape={}];", node.id, label, shape);
    }
    let mut edges = graph.edges.clone();
    edges.sort_by_key(|e| (e.from, e.tag.rank(), e.to));
    for e in edges {
        let label = match e.tag {
            BranchTag::True | BranchTag::LoopEnter => " [label=\"true\"]",
            BranchTag::False | BranchTag::LoopExit => " [label=\"false\"]",
            BranchTag::None => "",
        };
        let _ = writeln!(out, "    n{} -> n{}{};", e.from, e.to, label);
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Code(String),
    Graph { asset: String, dot: String },
}

impl Payload {
    /// What goes in the CSV cell.
    pub fn cell(&self) -> &str {
        match self {
            Payload::Code(text) => text,
            Payload::Graph { asset, .. } => asset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedMcq {
    pub row: usize,
    pub question_text: String,
    pub stimulus: Payload,
    /// In on-form order.
    pub options: [Payload; 4],
    pub correct_index: usize,
    /// `A`-`D`, the on-form position of the correct option.
    pub answer_key: char,
}

impl RenderedMcq {
    /// (file name, DOT text) for every graph payload.
    pub fn asset_refs(&self) -> Vec<(&str, &str)> {
        std::iter::once(&self.stimulus)
            .chain(self.options.iter())
            .filter_map(|p| match p {
                Payload::Graph { asset, dot } => Some((asset.as_str(), dot.as_str())),
                Payload::Code(_) => None,
            })
            .collect()
    }

    pub fn to_row(&self) -> ExamRow {
        let mut distractors = self
            .options
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.correct_index)
            .map(|(_, p)| p.cell().to_string());
        ExamRow {
            question: format!("{}\n\n{}", self.question_text, self.stimulus.cell()),
            correct_answer: self.options[self.correct_index].cell().to_string(),
            distractors: [
                distractors.next().unwrap(),
                distractors.next().unwrap(),
                distractors.next().unwrap(),
            ],
        }
    }
}

/// One CSV data row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExamRow {
    pub question: String,
    pub correct_answer: String,
    pub distractors: [String; 3],
}

pub fn asset_name(exam_id: &str, row: usize, slot: &str) -> String {
    format!("{exam_id}_{row}_{slot}.dot")
}

fn payload(bank: &Bank, item_id: &str, kind: RenderKind, asset: String) -> Result<Payload, ExportError> {
    let item = bank
        .get(item_id)
        .ok_or_else(|| ExportError::UnknownItem(item_id.to_string()))?;
    Ok(match kind {
        RenderKind::Code => Payload::Code(canonical_text(&item.program)),
        RenderKind::Graph => Payload::Graph {
            asset,
            dot: render_dot(&item.graph),
        },
    })
}

/// Renders a question as row `row` (1-based) of exam `exam_id`.
pub fn render_mcq(bank: &Bank, mcq: &Mcq, exam_id: &str, row: usize) -> Result<RenderedMcq, ExportError> {
    let stimulus_kind = mcq.qtype.stimulus_kind();
    let choice_kind = mcq.qtype.choice_kind();
    let stimulus = payload(
        bank,
        &mcq.stimulus_item,
        stimulus_kind,
        asset_name(exam_id, row, "stimulus"),
    )?;
    let mut options = Vec::with_capacity(4);
    for (i, opt) in mcq.options.iter().enumerate() {
        options.push(payload(
            bank,
            &opt.item_id,
            opt.kind,
            asset_name(exam_id, row, &format!("opt{}", i + 1)),
        )?);
    }
    Ok(RenderedMcq {
        row,
        question_text: question_text(mcq.method, stimulus_kind, choice_kind),
        stimulus,
        options: options.try_into().expect("four options"),
        correct_index: mcq.correct_index,
        answer_key: (b'A' + mcq.correct_index as u8) as char,
    })
}

pub fn render_exam(bank: &Bank, mcqs: &[Mcq], exam_id: &str) -> Result<Vec<RenderedMcq>, ExportError> {
    mcqs.iter()
        .enumerate()
        .map(|(i, q)| render_mcq(bank, q, exam_id, i + 1))
        .collect()
}

/// The exam CSV text.
pub fn exam_csv(rendered: &[RenderedMcq]) -> Result<String, ExportError> {
    let mut buf = format!("{EXAM_HEADER}\n").into_bytes();
    {
        let mut w = csv::WriterBuilder::new()
            .quote_style(csv::QuoteStyle::Always)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        for r in rendered {
            let row = r.to_row();
            let cells = [
                ("question", &row.question),
                ("correct_answer", &row.correct_answer),
                ("distractor_1", &row.distractors[0]),
                ("distractor_2", &row.distractors[1]),
                ("distractor_3", &row.distractors[2]),
            ];
            for (column, text) in cells {
                let chars = text.chars().count();
                if chars > MAX_CELL_CHARS {
                    return Err(ExportError::PayloadTooLarge {
                        row: r.row,
                        column,
                        chars,
                    });
                }
            }
            w.write_record(cells.iter().map(|(_, t)| t.as_str()))?;
        }
        w.flush()?;
    }
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn key_csv(rendered: &[RenderedMcq]) -> String {
    let mut out = format!("{KEY_HEADER}\n");
    for r in rendered {
        let _ = writeln!(out, "{},{}", r.row, r.answer_key);
    }
    out
}

/// Parses an exam CSV back into rows, checking the header and column count.
pub fn read_exam_csv(text: &str) -> Result<Vec<ExamRow>, ExportError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(String::from).collect();
    if header.join(",") != EXAM_HEADER {
        return Err(ExportError::Malformed(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() != 5 {
            return Err(ExportError::Malformed(format!("row with {} columns", rec.len())));
        }
        rows.push(ExamRow {
            question: rec[0].to_string(),
            correct_answer: rec[1].to_string(),
            distractors: [rec[2].to_string(), rec[3].to_string(), rec[4].to_string()],
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportedFiles {
    pub exam: PathBuf,
    pub key: PathBuf,
    pub assets: Vec<PathBuf>,
}

impl ExportedFiles {
    pub fn all(&self) -> impl Iterator<Item = &PathBuf> {
        [&self.exam, &self.key].into_iter().chain(self.assets.iter())
    }
}

/// File names and contents for an exam: CSV, key sidecar, then DOT assets.
pub fn exam_files(rendered: &[RenderedMcq], exam_id: &str) -> Result<Vec<(String, Vec<u8>)>, ExportError> {
    if rendered.is_empty() {
        return Err(ExportError::Empty);
    }
    let mut files = vec![
        (format!("{exam_id}.csv"), exam_csv(rendered)?.into_bytes()),
        (format!("{exam_id}.key.csv"), key_csv(rendered).into_bytes()),
    ];
    for r in rendered {
        for (name, dot) in r.asset_refs() {
            files.push((name.to_string(), dot.as_bytes().to_vec()));
        }
    }
    Ok(files)
}

/// Writes the exam CSV, key sidecar and DOT assets into `dir`. Files appear
/// under their final names only once all of them have been written.
pub fn export_csv(rendered: &[RenderedMcq], dir: &Path, exam_id: &str) -> Result<ExportedFiles, ExportError> {
    let files: Vec<(PathBuf, Vec<u8>)> = exam_files(rendered, exam_id)?
        .into_iter()
        .map(|(name, bytes)| (dir.join(name), bytes))
        .collect();
    crate::atomic::write_all(&files)?;
    Ok(ExportedFiles {
        exam: files[0].0.clone(),
        key: files[1].0.clone(),
        assets: files[2..].iter().map(|(p, _)| p.clone()).collect(),
    })
}
