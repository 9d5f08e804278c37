//! Question formulation.
//!
//! A question shows one bank item (the stimulus) and four options. The
//! correct option is another item with the same count under the asked
//! method; the three distractors are items with a different count. Items
//! sharing a count form an equivalence group of size M in a bank of N, so
//! a group contributes `M * (M - 1) * C(N - M, 3)` distinct questions per
//! question type.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bank::{Bank, EquivalenceGroup};
use crate::flowgraph::TestingMethod;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderKind {
    Graph,
    Code,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum QuestionType {
    /// Graph stimulus, graph options.
    T1,
    /// Graph stimulus, code options.
    T2,
    /// Code stimulus, code options.
    T3,
    /// Code stimulus, graph options.
    T4,
}

impl QuestionType {
    pub const ALL: [QuestionType; 4] = [QuestionType::T1, QuestionType::T2, QuestionType::T3, QuestionType::T4];

    pub fn stimulus_kind(self) -> RenderKind {
        match self {
            QuestionType::T1 | QuestionType::T2 => RenderKind::Graph,
            QuestionType::T3 | QuestionType::T4 => RenderKind::Code,
        }
    }

    pub fn choice_kind(self) -> RenderKind {
        match self {
            QuestionType::T1 | QuestionType::T4 => RenderKind::Graph,
            QuestionType::T2 | QuestionType::T3 => RenderKind::Code,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            QuestionType::T1 => 1,
            QuestionType::T2 => 2,
            QuestionType::T3 => 3,
            QuestionType::T4 => 4,
        }
    }
}

impl fmt::Display for QuestionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.number())
    }
}

impl FromStr for QuestionType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let digits = t.strip_prefix(['T', 't']).unwrap_or(t);
        match digits {
            "1" => Ok(QuestionType::T1),
            "2" => Ok(QuestionType::T2),
            "3" => Ok(QuestionType::T3),
            "4" => Ok(QuestionType::T4),
            _ => Err(format!("unknown question type '{t}' (expected 1-4)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OptionRef {
    pub item_id: String,
    pub kind: RenderKind,
}

/// Where a question's random draws came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeedTrace {
    pub seed: u64,
    /// Position in the ChaCha word stream before the first draw.
    pub stream_offset: u64,
    /// Each index drawn, in order.
    pub draws: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mcq {
    pub method: TestingMethod,
    pub qtype: QuestionType,
    pub stimulus_item: String,
    pub options: [OptionRef; 4],
    pub correct_index: usize,
    /// Absent for enumerated (non-random) questions.
    pub seed_trace: Option<SeedTrace>,
}

impl Mcq {
    pub fn correct_item(&self) -> &str {
        &self.options[self.correct_index].item_id
    }

    pub fn distractor_items(&self) -> impl Iterator<Item = &str> {
        self.options
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != self.correct_index)
            .map(|(_, o)| o.item_id.as_str())
    }
}

/// Seeded generator; the only randomness source for question generation.
#[derive(Debug, Clone)]
pub struct QuizRng {
    seed: u64,
    rng: ChaCha8Rng,
    log: Vec<usize>,
}

impl QuizRng {
    pub fn new(seed: u64) -> Self {
        QuizRng {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            log: Vec::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn stream_offset(&self) -> u64 {
        self.rng.get_word_pos() as u64
    }

    /// Uniform index in `0..n`.
    fn below(&mut self, n: usize) -> usize {
        let v = self.rng.gen_range(0..n);
        self.log.push(v);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QgenError {
    #[error("no {method} group has two or more items, so no correct answer can be paired with a stimulus")]
    NoPeer { method: TestingMethod },
    #[error("{method} group with count {count_value} has {group_size} of {bank_size} items, leaving fewer than 3 distractors")]
    InsufficientDistractors {
        method: TestingMethod,
        count_value: u64,
        group_size: usize,
        bank_size: usize,
    },
    #[error("exam cannot be generated:\n{0}")]
    SpecUnachievable(FeasibilityReport),
    #[error("question space exceeds the cap of {cap}")]
    CapExceeded { cap: usize },
}

/// Groups under `method` that can supply a stimulus, a correct answer and
/// three distractors.
fn eligible_groups(bank: &Bank, method: TestingMethod) -> Result<Vec<EquivalenceGroup>, QgenError> {
    let n = bank.len();
    let groups = bank.groups(method);
    let paired: Vec<_> = groups.into_iter().filter(|g| g.size() >= 2).collect();
    if paired.is_empty() {
        return Err(QgenError::NoPeer { method });
    }
    let eligible: Vec<_> = paired.iter().filter(|g| n - g.size() >= 3).cloned().collect();
    if eligible.is_empty() {
        let g = &paired[0];
        return Err(QgenError::InsufficientDistractors {
            method,
            count_value: g.count_value,
            group_size: g.size(),
            bank_size: n,
        });
    }
    Ok(eligible)
}

/// Formulates one question.
///
/// The stimulus is drawn uniformly from items in eligible groups, the
/// correct answer uniformly from the rest of its group, and the three
/// distractors uniformly without replacement from items outside the group.
/// The four options are then shuffled.
pub fn formulate(bank: &Bank, method: TestingMethod, qtype: QuestionType, rng: &mut QuizRng) -> Result<Mcq, QgenError> {
    let groups = eligible_groups(bank, method)?;
    Ok(draw(bank, method, qtype, &groups, rng, &BTreeSet::new()).expect("eligible groups always yield a question"))
}

/// Draws a question whose (stimulus, correct) pair is not in `used`.
/// Returns `None` when every pair is used.
fn draw(
    bank: &Bank,
    method: TestingMethod,
    qtype: QuestionType,
    groups: &[EquivalenceGroup],
    rng: &mut QuizRng,
    used: &BTreeSet<(String, String)>,
) -> Option<Mcq> {
    let group_of = |id: &str| groups.iter().find(|g| g.member_ids.contains(id));
    let free_peers = |stim: &str| -> Vec<String> {
        // Bank order, so draws do not depend on id spelling.
        let g = group_of(stim).expect("stimulus is in an eligible group");
        bank.items()
            .iter()
            .map(|i| &i.item_id)
            .filter(|id| *id != stim && g.member_ids.contains(*id))
            .filter(|id| !used.contains(&(stim.to_string(), (*id).clone())))
            .cloned()
            .collect()
    };
    let stimuli: Vec<&str> = bank
        .items()
        .iter()
        .map(|i| i.item_id.as_str())
        .filter(|id| group_of(id).is_some())
        .filter(|id| !free_peers(id).is_empty())
        .collect();
    if stimuli.is_empty() {
        return None;
    }

    let stream_offset = rng.stream_offset();
    rng.log.clear();
    let stimulus = stimuli[rng.below(stimuli.len())].to_string();
    let peers = free_peers(&stimulus);
    let correct = peers[rng.below(peers.len())].clone();

    let group = group_of(&stimulus).unwrap();
    let mut pool: Vec<String> = bank
        .items()
        .iter()
        .map(|i| i.item_id.clone())
        .filter(|id| !group.member_ids.contains(id))
        .collect();
    for k in 0..3 {
        let j = k + rng.below(pool.len() - k);
        pool.swap(k, j);
    }

    let mut order = vec![correct.clone(), pool[0].clone(), pool[1].clone(), pool[2].clone()];
    for i in (1..order.len()).rev() {
        let j = rng.below(i + 1);
        order.swap(i, j);
    }
    let correct_index = order.iter().position(|id| *id == correct).unwrap();
    let kind = qtype.choice_kind();
    let options: [OptionRef; 4] = order
        .into_iter()
        .map(|item_id| OptionRef { item_id, kind })
        .collect::<Vec<_>>()
        .try_into()
        .expect("exactly four options");
    Some(Mcq {
        method,
        qtype,
        stimulus_item: stimulus,
        options,
        correct_index,
        seed_trace: Some(SeedTrace {
            seed: rng.seed,
            stream_offset,
            draws: std::mem::take(&mut rng.log),
        }),
    })
}

/// Requested question counts per (method, type) cell, plus the seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExamSpec {
    pub cells: BTreeMap<(TestingMethod, QuestionType), usize>,
    pub rng_seed: u64,
}

impl ExamSpec {
    pub fn new(methods: &[TestingMethod], types: &[QuestionType], per_cell: usize, rng_seed: u64) -> Self {
        let cells = methods
            .iter()
            .flat_map(|&m| types.iter().map(move |&t| ((m, t), per_cell)))
            .collect();
        ExamSpec { cells, rng_seed }
    }

    /// Three methods by four types, one question each.
    pub fn standard(rng_seed: u64) -> Self {
        ExamSpec::new(&TestingMethod::ALL, &QuestionType::ALL, 1, rng_seed)
    }

    pub fn total(&self) -> usize {
        self.cells.values().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellStatus {
    Feasible,
    NoPeer,
    InsufficientDistractors {
        count_value: u64,
        group_size: usize,
    },
    /// The method's cells together ask for more distinct (stimulus, correct)
    /// pairs than the bank has.
    TooFewDistinct {
        requested: usize,
        available: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellFeasibility {
    pub method: TestingMethod,
    pub qtype: QuestionType,
    pub requested: usize,
    pub status: CellStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub cells: Vec<CellFeasibility>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.cells.iter().all(|c| c.status == CellStatus::Feasible)
    }

    pub fn blocked(&self) -> impl Iterator<Item = &CellFeasibility> {
        self.cells.iter().filter(|c| c.status != CellStatus::Feasible)
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cells {
            let status = match &c.status {
                CellStatus::Feasible => "ok".to_string(),
                CellStatus::NoPeer => "no group with at least 2 items".to_string(),
                CellStatus::InsufficientDistractors { count_value, group_size } => format!(
                    "groups too large to leave 3 distractors (e.g. count {count_value}, {group_size} items)"
                ),
                CellStatus::TooFewDistinct { requested, available } => format!(
                    "{requested} questions requested for this method but only {available} distinct stimulus/answer pairs"
                ),
            };
            writeln!(f, "  {}/{}: requested {}: {}", c.method, c.qtype, c.requested, status)?;
        }
        Ok(())
    }
}

/// Checks every requested cell before any question is drawn.
pub fn check_feasibility(bank: &Bank, spec: &ExamSpec) -> FeasibilityReport {
    let mut cells = Vec::new();
    for m in TestingMethod::ALL {
        let requested_cells: Vec<_> = spec
            .cells
            .iter()
            .filter(|((cm, _), &n)| *cm == m && n > 0)
            .map(|((_, t), &n)| (*t, n))
            .collect();
        if requested_cells.is_empty() {
            continue;
        }
        let requested: usize = requested_cells.iter().map(|(_, n)| n).sum();
        let status = match eligible_groups(bank, m) {
            Err(QgenError::NoPeer { .. }) => CellStatus::NoPeer,
            Err(QgenError::InsufficientDistractors {
                count_value,
                group_size,
                ..
            }) => CellStatus::InsufficientDistractors {
                count_value,
                group_size,
            },
            Err(_) => unreachable!(),
            Ok(groups) => {
                let available: usize = groups.iter().map(|g| g.size() * (g.size() - 1)).sum();
                if requested > available {
                    CellStatus::TooFewDistinct { requested, available }
                } else {
                    CellStatus::Feasible
                }
            }
        };
        for (qtype, n) in requested_cells {
            cells.push(CellFeasibility {
                method: m,
                qtype,
                requested: n,
                status: status.clone(),
            });
        }
    }
    FeasibilityReport { cells }
}

/// Generates the requested questions, method-major then type order.
///
/// Within one exam no two questions share (stimulus, correct answer,
/// method). The output is fully determined by the bank and the spec.
pub fn generate_exam(bank: &Bank, spec: &ExamSpec) -> Result<Vec<Mcq>, QgenError> {
    let report = check_feasibility(bank, spec);
    if !report.is_feasible() {
        return Err(QgenError::SpecUnachievable(report));
    }
    let mut rng = QuizRng::new(spec.rng_seed);
    let mut out = Vec::with_capacity(spec.total());
    for m in TestingMethod::ALL {
        let mut used = BTreeSet::new();
        let mut groups = None;
        for t in QuestionType::ALL {
            let n = spec.cells.get(&(m, t)).copied().unwrap_or(0);
            for _ in 0..n {
                let groups = groups.get_or_insert_with(|| eligible_groups(bank, m).expect("checked feasible"));
                let mcq = draw(bank, m, t, groups, &mut rng, &used).expect("checked enough distinct pairs");
                used.insert((mcq.stimulus_item.clone(), mcq.correct_item().to_string()));
                out.push(mcq);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpace {
    pub count_value: u64,
    pub group_size: usize,
    pub mcqs: u128,
}

/// Size of the question space for one method and one question type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceCount {
    pub method: TestingMethod,
    pub groups: Vec<GroupSpace>,
    pub total: u128,
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// Distinct questions per group, `M * (M - 1) * C(N - M, 3)`, and their sum.
pub fn count_space(bank: &Bank, method: TestingMethod) -> SpaceCount {
    let n = bank.len() as u64;
    let groups: Vec<GroupSpace> = bank
        .groups(method)
        .into_iter()
        .map(|g| {
            let m = g.size() as u64;
            let mcqs = if m < 2 {
                0
            } else {
                u128::from(m) * u128::from(m - 1) * binomial(n - m, 3)
            };
            GroupSpace {
                count_value: g.count_value,
                group_size: g.size(),
                mcqs,
            }
        })
        .collect();
    let total = groups.iter().map(|g| g.mcqs).sum();
    SpaceCount { method, groups, total }
}

/// Questions for one type summed over the three methods.
pub fn count_space_per_type(bank: &Bank) -> u128 {
    TestingMethod::ALL.iter().map(|&m| count_space(bank, m).total).sum()
}

/// The whole question space: every method under every question type.
pub fn count_space_all_types(bank: &Bank) -> u128 {
    QuestionType::ALL.iter().map(|_| count_space_per_type(bank)).sum()
}

/// Lists every distinct question for (method, type). Options are sorted by
/// item id. Fails once more than `cap` questions have been produced.
pub fn enumerate_space(
    bank: &Bank,
    method: TestingMethod,
    qtype: QuestionType,
    cap: usize,
) -> Result<Vec<Mcq>, QgenError> {
    let mut out = Vec::new();
    let all_ids: Vec<&str> = bank.items().iter().map(|i| i.item_id.as_str()).collect();
    for g in bank.groups(method) {
        let members: Vec<&str> = g.member_ids.iter().map(String::as_str).collect();
        let mut others: Vec<&str> = all_ids
            .iter()
            .copied()
            .filter(|id| !g.member_ids.contains(*id))
            .collect();
        others.sort_unstable();
        for &stimulus in &members {
            for &correct in &members {
                if correct == stimulus || others.len() < 3 {
                    continue;
                }
                for a in 0..others.len() {
                    for b in a + 1..others.len() {
                        for c in b + 1..others.len() {
                            if out.len() >= cap {
                                return Err(QgenError::CapExceeded { cap });
                            }
                            let mut ids = [correct, others[a], others[b], others[c]];
                            ids.sort_unstable();
                            let correct_index = ids.iter().position(|id| *id == correct).unwrap();
                            out.push(Mcq {
                                method,
                                qtype,
                                stimulus_item: stimulus.to_string(),
                                options: ids.map(|id| OptionRef {
                                    item_id: id.to_string(),
                                    kind: qtype.choice_kind(),
                                }),
                                correct_index,
                                seed_trace: None,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
