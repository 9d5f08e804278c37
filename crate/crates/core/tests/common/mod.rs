//! Helpers shared by the integration tests: fixture loading, a seeded
//! generator of structured programs, hand-built banks, and a coverage
//! oracle that works on the syntax tree instead of the flow graph.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use covquiz::bank::{Bank, MethodCounts};
use covquiz::minilang::{Program, Stmt, StmtKind};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

/// (item id, source) for every corpus snippet, sorted by id.
pub fn corpus() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(fixtures().join("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "py"))
        .map(|p| {
            let id = p.file_stem().unwrap().to_string_lossy().into_owned();
            (id, std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

pub fn corpus_bank() -> Bank {
    corpus()
        .iter()
        .fold(Bank::new(1), |bank, (id, src)| bank.ingest(src, id).unwrap())
}

/// A bank of trivial distinct programs carrying the given
/// (path, branch, statement) counts.
pub fn bank_with_counts(counts: &[(u64, u64, u64)]) -> Bank {
    let mut bank = Bank::new(1);
    for (i, &(path, branch, statement)) in counts.iter().enumerate() {
        let id = format!("i{}", i + 1);
        bank = bank.ingest(&format!("x = {i}\n"), &id).unwrap();
        bank = bank
            .with_override(
                &id,
                MethodCounts {
                    path,
                    branch,
                    statement,
                },
            )
            .unwrap();
    }
    bank
}

/// Bank of `n` items with counts drawn from `1..=max_count` per method.
pub fn random_bank(rng: &mut ChaCha8Rng, n: usize, max_count: u64) -> Bank {
    let counts: Vec<_> = (0..n)
        .map(|_| {
            (
                rng.gen_range(1..=max_count),
                rng.gen_range(1..=max_count),
                rng.gen_range(1..=max_count),
            )
        })
        .collect();
    bank_with_counts(&counts)
}

const NAMES: [&str; 6] = ["x", "y", "total", "count", "flag", "n"];

fn simple_stmt(rng: &mut ChaCha8Rng) -> String {
    let a = *NAMES.choose(rng).unwrap();
    let b = *NAMES.choose(rng).unwrap();
    let k = rng.gen_range(0..10);
    match rng.gen_range(0..7) {
        0 => format!("{a} = {k}"),
        1 => format!("{a} = {b} + {k}"),
        2 => format!("{a} += {k}"),
        3 => format!("print({a}, \"v\")"),
        4 => format!("items.append({b} * {k})"),
        5 => format!("{a} = -({b} - {k})"),
        _ => format!("{a} = input(\"Enter {a}: \")"),
    }
}

fn condition(rng: &mut ChaCha8Rng) -> String {
    let a = *NAMES.choose(rng).unwrap();
    let b = *NAMES.choose(rng).unwrap();
    let k = rng.gen_range(0..10);
    match rng.gen_range(0..5) {
        0 => format!("{a} < {k}"),
        1 => format!("{a} == {b}"),
        2 => format!("not {a}"),
        3 => format!("{a} >= {k} and {b} != {k}"),
        _ => format!("{a} == 0 or {b} > {a}"),
    }
}

fn block(rng: &mut ChaCha8Rng, indent: usize, budget: &mut usize, depth: usize, out: &mut String) {
    let pad = " ".repeat(indent * 4);
    let len = rng.gen_range(1..=3);
    for _ in 0..len {
        let compound = *budget > 0 && depth < 3 && rng.gen_bool(0.55);
        if !compound {
            out.push_str(&format!("{pad}{}\n", simple_stmt(rng)));
            continue;
        }
        *budget -= 1;
        match rng.gen_range(0..5) {
            0 | 1 => {
                out.push_str(&format!("{pad}if {}:\n", condition(rng)));
                block(rng, indent + 1, budget, depth + 1, out);
                if *budget > 0 && rng.gen_bool(0.3) {
                    *budget -= 1;
                    out.push_str(&format!("{pad}elif {}:\n", condition(rng)));
                    block(rng, indent + 1, budget, depth + 1, out);
                }
                if rng.gen_bool(0.5) {
                    out.push_str(&format!("{pad}else:\n"));
                    block(rng, indent + 1, budget, depth + 1, out);
                }
            }
            2 | 3 => {
                out.push_str(&format!("{pad}while {}:\n", condition(rng)));
                block(rng, indent + 1, budget, depth + 1, out);
            }
            _ => {
                let iterable = ["range(3)", "items", "[1, 2, 3]"].choose(rng).unwrap();
                out.push_str(&format!("{pad}for i in {iterable}:\n"));
                block(rng, indent + 1, budget, depth + 1, out);
            }
        }
    }
}

/// Source text of a random structured program with at most
/// `max_decisions` if/elif/while/for headers.
pub fn random_program(rng: &mut ChaCha8Rng, max_decisions: usize) -> String {
    let mut budget = rng.gen_range(0..=max_decisions);
    let mut out = String::new();
    block(rng, 0, &mut budget, 0, &mut out);
    while budget > 0 && rng.gen_bool(0.7) {
        block(rng, 0, &mut budget, 0, &mut out);
    }
    out
}

/// Elements one execution touches: statements and (decision, outcome)
/// pairs, keyed by the statement's address in the tree.
#[derive(Clone, Default)]
struct Trace {
    statements: BTreeSet<usize>,
    outcomes: BTreeSet<(usize, bool)>,
}

impl Trace {
    fn join(&self, other: &Trace) -> Trace {
        Trace {
            statements: self.statements.union(&other.statements).copied().collect(),
            outcomes: self.outcomes.union(&other.outcomes).copied().collect(),
        }
    }
}

fn key(stmt: &Stmt) -> usize {
    stmt as *const Stmt as usize
}

fn block_traces(stmts: &[Stmt], bound: u32) -> Vec<Trace> {
    let mut acc = vec![Trace::default()];
    for s in stmts {
        let here = stmt_traces(s, bound);
        acc = acc.iter().flat_map(|a| here.iter().map(move |b| a.join(b))).collect();
    }
    acc
}

fn stmt_traces(stmt: &Stmt, bound: u32) -> Vec<Trace> {
    let id = key(stmt);
    let mut head = Trace::default();
    head.statements.insert(id);
    let with = |outcome: bool| {
        let mut t = head.clone();
        t.outcomes.insert((id, outcome));
        t
    };
    match &stmt.kind {
        StmtKind::If {
            then_block, else_block, ..
        } => {
            let mut out: Vec<Trace> = block_traces(then_block, bound)
                .iter()
                .map(|t| with(true).join(t))
                .collect();
            match else_block {
                Some(b) => out.extend(block_traces(b, bound).iter().map(|t| with(false).join(t))),
                None => out.push(with(false)),
            }
            out
        }
        StmtKind::While { body, .. } | StmtKind::For { body, .. } => {
            let body = block_traces(body, bound);
            let mut out = Vec::new();
            let mut runs = vec![with(false)];
            out.extend(runs.iter().cloned());
            for _ in 0..bound {
                runs = runs
                    .iter()
                    .flat_map(|r| body.iter().map(move |b| r.join(b).join(&with(true))))
                    .collect();
                out.extend(runs.iter().cloned());
            }
            out
        }
        _ => vec![head],
    }
}

fn smallest_cover(sets: &[BTreeSet<u64>]) -> u64 {
    let universe: BTreeSet<u64> = sets.iter().flatten().copied().collect();
    if universe.is_empty() {
        return 0;
    }
    let distinct: Vec<&BTreeSet<u64>> = sets.iter().collect::<BTreeSet<_>>().into_iter().collect();
    for k in 1..=distinct.len() {
        if combos(distinct.len(), k).any(|c| {
            let covered: BTreeSet<u64> = c.iter().flat_map(|&i| distinct[i].iter().copied()).collect();
            covered == universe
        }) {
            return k as u64;
        }
    }
    unreachable!()
}

fn combos(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = Some((0..k).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut c = out.clone();
        let mut i = k;
        let advanced = loop {
            if i == 0 {
                break false;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break true;
            }
        };
        cur = advanced.then_some(c);
        Some(out)
    })
}

/// (path, branch, statement) computed from the syntax tree: every bounded
/// execution is listed and the smallest covering subsets are found by
/// trying all combinations of increasing size.
pub fn oracle_counts(program: &Program, loop_bound: u32) -> (u64, u64, u64) {
    let traces = block_traces(&program.statements, loop_bound);
    let stmt_sets: Vec<BTreeSet<u64>> = traces
        .iter()
        .map(|t| t.statements.iter().map(|&s| s as u64).collect())
        .collect();
    let outcome_sets: Vec<BTreeSet<u64>> = traces
        .iter()
        .map(|t| t.outcomes.iter().map(|&(s, o)| (s as u64) * 2 + u64::from(o)).collect())
        .collect();
    (
        traces.len() as u64,
        smallest_cover(&outcome_sets).max(1),
        smallest_cover(&stmt_sets),
    )
}

/// Every violated generator invariant for one question, as messages.
pub fn mcq_violations(bank: &Bank, mcq: &covquiz::qgen::Mcq) -> Vec<String> {
    let mut v = Vec::new();
    let count = |id: &str| bank.get(id).map(|i| i.counts.get(mcq.method));
    let stimulus = count(&mcq.stimulus_item);
    if stimulus.is_none() {
        v.push(format!("unknown stimulus {}", mcq.stimulus_item));
    }
    if mcq.correct_index >= 4 {
        v.push(format!("correct index {}", mcq.correct_index));
        return v;
    }
    if count(mcq.correct_item()) != stimulus {
        v.push(format!("correct option {} has a different count", mcq.correct_item()));
    }
    for d in mcq.distractor_items() {
        if count(d).is_none() || count(d) == stimulus {
            v.push(format!("distractor {d} shares the stimulus count"));
        }
    }
    if mcq.options.iter().any(|o| o.kind != mcq.qtype.choice_kind()) {
        v.push(format!("{} option rendered as the wrong kind", mcq.qtype));
    }
    if mcq.options.iter().any(|o| o.item_id == mcq.stimulus_item) {
        v.push("stimulus appears among the options".into());
    }
    let ids: BTreeSet<&str> = mcq.options.iter().map(|o| o.item_id.as_str()).collect();
    if ids.len() != 4 {
        v.push("options are not distinct".into());
    }
    v
}

/// Two-tailed Student-t probability by composite Simpson integration of the
/// density over `[0, |t|]`. The normalising constant uses
/// `G((k+1)/2) / G(k/2)` built from its values at k = 1, 2 and the step
/// `ratio(k + 2) = ratio(k) * (k + 1) / k`.
pub fn t_two_tailed_quadrature(t: f64, df: u32) -> f64 {
    let pi = std::f64::consts::PI;
    let mut ratio = if df % 2 == 1 { 1.0 / pi.sqrt() } else { pi.sqrt() / 2.0 };
    let mut k = if df % 2 == 1 { 1 } else { 2 };
    while k < df {
        ratio *= f64::from(k + 1) / f64::from(k);
        k += 2;
    }
    let d = f64::from(df);
    let c = ratio / (d * pi).sqrt();
    let f = |x: f64| c * (1.0 + x * x / d).powf(-(d + 1.0) / 2.0);
    let b = t.abs();
    let n = 200_000;
    let h = b / n as f64;
    let mut sum = f(0.0) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(i as f64 * h);
    }
    1.0 - 2.0 * sum * h / 3.0
}
