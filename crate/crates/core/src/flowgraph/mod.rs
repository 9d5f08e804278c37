//! Control-flow graphs and minimum test-case counts per coverage method.
//!
//! Conventions:
//! - path: number of complete Entry-to-Exit paths with every loop body run
//!   at most `loop_bound` times per entry into the loop;
//! - branch: fewest of those paths that together take every outgoing edge of
//!   every decision (1 for a graph without decisions);
//! - statement: fewest of those paths that together visit every node.
//!
//! With `loop_bound = 0` loop bodies are never entered, so their nodes and
//! loop-enter edges drop out of the branch and statement universes.

mod cover;
mod graph;
mod paths;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cover::{greedy_cover, min_cover, CoverResult};
pub use graph::{build_cfg, BranchTag, Edge, FlowGraph, Node, NodeKind};
pub use paths::{enumerate_paths, Path};

pub const DEFAULT_LOOP_BOUND: u32 = 1;
pub const DEFAULT_PATH_CAP: usize = 10_000;
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

/// Largest path count the exhaustive cross-check will accept (2^n subsets).
pub const BRUTE_FORCE_PATH_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlowError {
    #[error("more than {cap} paths; raise the cap or lower the loop bound")]
    PathExplosion { cap: usize },
    #[error("element {element} is not on any candidate path")]
    UncoverableElement { element: usize },
    #[error("{paths} paths is too many for the exhaustive cross-check (limit {limit})")]
    BruteForceLimit { paths: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestingMethod {
    PathCoverage,
    BranchCoverage,
    StatementCoverage,
}

impl TestingMethod {
    pub const ALL: [TestingMethod; 3] = [
        TestingMethod::PathCoverage,
        TestingMethod::BranchCoverage,
        TestingMethod::StatementCoverage,
    ];

    /// Short name used in files and on the command line.
    pub fn key(self) -> &'static str {
        match self {
            TestingMethod::PathCoverage => "path",
            TestingMethod::BranchCoverage => "branch",
            TestingMethod::StatementCoverage => "statement",
        }
    }

    /// Name used in question text, e.g. "branch coverage".
    pub fn phrase(self) -> &'static str {
        match self {
            TestingMethod::PathCoverage => "path coverage",
            TestingMethod::BranchCoverage => "branch coverage",
            TestingMethod::StatementCoverage => "statement coverage",
        }
    }
}

impl fmt::Display for TestingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for TestingMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "path" | "path_coverage" => Ok(TestingMethod::PathCoverage),
            "branch" | "branch_coverage" => Ok(TestingMethod::BranchCoverage),
            "statement" | "statement_coverage" => Ok(TestingMethod::StatementCoverage),
            other => Err(format!(
                "unknown testing method '{other}' (expected path, branch or statement)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisConfig {
    pub loop_bound: u32,
    pub path_cap: usize,
    /// Subset evaluations allowed per exact cover search.
    pub search_budget: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            loop_bound: DEFAULT_LOOP_BOUND,
            path_cap: DEFAULT_PATH_CAP,
            search_budget: DEFAULT_SEARCH_BUDGET,
        }
    }
}

impl AnalysisConfig {
    pub fn with_loop_bound(loop_bound: u32) -> Self {
        AnalysisConfig {
            loop_bound,
            ..Default::default()
        }
    }
}

/// Minimum number of test cases for full coverage under each method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageCounts {
    pub path: u64,
    pub branch: u64,
    pub statement: u64,
    pub loop_bound: u32,
    /// Set when a cover search hit its budget and a greedy (upper bound)
    /// value was used instead.
    pub approximate: bool,
}

impl CoverageCounts {
    pub fn get(&self, method: TestingMethod) -> u64 {
        match method {
            TestingMethod::PathCoverage => self.path,
            TestingMethod::BranchCoverage => self.branch,
            TestingMethod::StatementCoverage => self.statement,
        }
    }

    pub fn triple(&self) -> (u64, u64, u64) {
        (self.path, self.branch, self.statement)
    }
}

/// Cover universes over a set of enumerated paths: per path, the node ids
/// and the decision-edge indices it touches.
struct Universes {
    nodes: Vec<usize>,
    decision_edges: Vec<usize>,
    path_nodes: Vec<Vec<usize>>,
    path_decision_edges: Vec<Vec<usize>>,
}

fn universes(graph: &FlowGraph, paths: &[Path]) -> Universes {
    let is_decision_edge: Vec<bool> = graph
        .edges
        .iter()
        .map(|e| graph.nodes[e.from].kind == NodeKind::Decision)
        .collect();
    let mut path_nodes = Vec::with_capacity(paths.len());
    let mut path_decision_edges = Vec::with_capacity(paths.len());
    let mut node_seen = vec![false; graph.nodes.len()];
    let mut edge_seen = vec![false; graph.edges.len()];
    for p in paths {
        let mut nodes = p.nodes(graph);
        nodes.sort_unstable();
        nodes.dedup();
        let mut edges: Vec<usize> = p.edges.iter().copied().filter(|&e| is_decision_edge[e]).collect();
        edges.sort_unstable();
        edges.dedup();
        nodes.iter().for_each(|&n| node_seen[n] = true);
        edges.iter().for_each(|&e| edge_seen[e] = true);
        path_nodes.push(nodes);
        path_decision_edges.push(edges);
    }
    Universes {
        nodes: (0..node_seen.len()).filter(|&n| node_seen[n]).collect(),
        decision_edges: (0..edge_seen.len()).filter(|&e| edge_seen[e]).collect(),
        path_nodes,
        path_decision_edges,
    }
}

/// Coverage counts with the default path cap and search budget.
pub fn coverage_counts(graph: &FlowGraph, loop_bound: u32) -> Result<CoverageCounts, FlowError> {
    coverage_counts_with(graph, &AnalysisConfig::with_loop_bound(loop_bound))
}

pub fn coverage_counts_with(graph: &FlowGraph, cfg: &AnalysisConfig) -> Result<CoverageCounts, FlowError> {
    let paths = enumerate_paths(graph, cfg.loop_bound, cfg.path_cap)?;
    let u = universes(graph, &paths);
    let branch = min_cover(&u.decision_edges, &u.path_decision_edges, cfg.search_budget)?;
    let statement = min_cover(&u.nodes, &u.path_nodes, cfg.search_budget)?;
    Ok(CoverageCounts {
        path: paths.len() as u64,
        branch: (branch.chosen.len() as u64).max(1),
        statement: statement.chosen.len() as u64,
        loop_bound: cfg.loop_bound,
        approximate: !(branch.exact && statement.exact),
    })
}

/// Recomputes the counts by checking every subset of the enumerated paths.
/// Used to cross-check [`coverage_counts`]; limited to
/// [`BRUTE_FORCE_PATH_LIMIT`] paths.
pub fn brute_force_counts(graph: &FlowGraph, cfg: &AnalysisConfig) -> Result<CoverageCounts, FlowError> {
    let paths = enumerate_paths(graph, cfg.loop_bound, cfg.path_cap)?;
    if paths.len() > BRUTE_FORCE_PATH_LIMIT {
        return Err(FlowError::BruteForceLimit {
            paths: paths.len(),
            limit: BRUTE_FORCE_PATH_LIMIT,
        });
    }
    let u = universes(graph, &paths);
    let smallest = |universe: &[usize], per_path: &[Vec<usize>]| -> u64 {
        let mut masks: Vec<u64> = vec![0; per_path.len()];
        for (i, elems) in per_path.iter().enumerate() {
            for e in elems {
                if let Some(bit) = universe.iter().position(|x| x == e) {
                    masks[i] |= 1 << bit;
                }
            }
        }
        let want: u64 = if universe.len() == 64 {
            u64::MAX
        } else {
            (1u64 << universe.len()) - 1
        };
        let mut best = u64::MAX;
        for subset in 0u32..(1u32 << per_path.len()) {
            let mut acc = 0u64;
            for (i, m) in masks.iter().enumerate() {
                if subset & (1 << i) != 0 {
                    acc |= m;
                }
            }
            if acc == want {
                best = best.min(u64::from(subset.count_ones()));
            }
        }
        best
    };
    Ok(CoverageCounts {
        path: paths.len() as u64,
        branch: smallest(&u.decision_edges, &u.path_decision_edges).max(1),
        statement: smallest(&u.nodes, &u.path_nodes),
        loop_bound: cfg.loop_bound,
        approximate: false,
    })
}
