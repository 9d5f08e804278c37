use serde::{Deserialize, Serialize};

use crate::minilang::{statement_label, Program, Stmt, StmtKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Entry,
    Exit,
    Statement,
    Decision,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub kind: NodeKind,
    pub label: String,
    /// Source line; `None` for Entry and Exit.
    pub line: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchTag {
    None,
    True,
    False,
    LoopEnter,
    LoopExit,
}

impl BranchTag {
    /// Order in which a decision's outcomes are explored: the taken/entering
    /// edge first.
    pub(crate) fn rank(self) -> u8 {
        match self {
            BranchTag::True | BranchTag::LoopEnter => 0,
            BranchTag::False | BranchTag::LoopExit => 1,
            BranchTag::None => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub tag: BranchTag,
}

/// Control-flow graph of a program. Node ids equal their index in `nodes`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub entry_id: usize,
    pub exit_id: usize,
}

impl FlowGraph {
    /// Edge indices leaving `node`, in exploration order.
    pub fn outgoing(&self, node: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.edges.len()).filter(|&i| self.edges[i].from == node).collect();
        out.sort_by_key(|&i| self.edges[i].tag.rank());
        out
    }

    pub fn decision_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Decision).map(|n| n.id)
    }

    /// Indices of edges that leave a Decision node.
    pub fn decision_edges(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| self.nodes[self.edges[i].from].kind == NodeKind::Decision)
            .collect()
    }

    /// Checks the structural invariants: one entry and exit, the out-degree
    /// rules per node kind, and reachability in both directions.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.nodes.len();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return Err(format!("node at index {i} has id {}", node.id));
            }
        }
        let entries: Vec<_> = self.nodes.iter().filter(|n| n.kind == NodeKind::Entry).collect();
        let exits: Vec<_> = self.nodes.iter().filter(|n| n.kind == NodeKind::Exit).collect();
        if entries.len() != 1 || exits.len() != 1 {
            return Err("graph must have exactly one entry and one exit".into());
        }
        if entries[0].id != self.entry_id || exits[0].id != self.exit_id {
            return Err("entry/exit ids disagree with node kinds".into());
        }
        if self.edges.iter().any(|e| e.to == self.entry_id) {
            return Err("entry has incoming edges".into());
        }
        for node in &self.nodes {
            let out = self.outgoing(node.id);
            let ok = match node.kind {
                NodeKind::Exit => out.is_empty(),
                NodeKind::Entry | NodeKind::Statement => out.len() == 1 && self.edges[out[0]].tag == BranchTag::None,
                NodeKind::Decision => {
                    out.len() == 2 && {
                        let (a, b) = (self.edges[out[0]].tag, self.edges[out[1]].tag);
                        matches!(
                            (a, b),
                            (BranchTag::True, BranchTag::False) | (BranchTag::LoopEnter, BranchTag::LoopExit)
                        )
                    }
                }
            };
            if !ok {
                return Err(format!("node {} has invalid outgoing edges", node.id));
            }
        }
        let forward = reach(n, self.entry_id, self.edges.iter().map(|e| (e.from, e.to)));
        let backward = reach(n, self.exit_id, self.edges.iter().map(|e| (e.to, e.from)));
        if let Some(i) = (0..n).find(|&i| !forward[i] || !backward[i]) {
            return Err(format!("node {i} is not on any entry-to-exit route"));
        }
        Ok(())
    }
}

fn reach(n: usize, start: usize, arcs: impl Iterator<Item = (usize, usize)>) -> Vec<bool> {
    let mut adj = vec![Vec::new(); n];
    for (a, b) in arcs {
        adj[a].push(b);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Builds the structured CFG of a program.
///
/// Node ids follow source order (pre-order over the AST): Entry is 0, Exit
/// is last. `if` branches rejoin at the next statement; loops get a back
/// edge from the end of the body to the loop decision.
pub fn build_cfg(program: &Program) -> FlowGraph {
    let mut b = Builder {
        nodes: Vec::new(),
        edges: Vec::new(),
    };
    let entry = b.node(NodeKind::Entry, "entry".into(), None);
    let dangling = b.block(&program.statements, vec![(entry, BranchTag::None)]);
    let exit = b.node(NodeKind::Exit, "exit".into(), None);
    b.connect(dangling, exit);
    FlowGraph {
        nodes: b.nodes,
        edges: b.edges,
        entry_id: entry,
        exit_id: exit,
    }
}

struct Builder {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

/// Edges that still need a target: (source node, tag).
type Pending = Vec<(usize, BranchTag)>;

impl Builder {
    fn node(&mut self, kind: NodeKind, label: String, line: Option<usize>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node { id, kind, label, line });
        id
    }

    fn connect(&mut self, pending: Pending, to: usize) {
        for (from, tag) in pending {
            self.edges.push(Edge { from, to, tag });
        }
    }

    fn block(&mut self, stmts: &[Stmt], mut pending: Pending) -> Pending {
        for stmt in stmts {
            pending = self.stmt(stmt, pending);
        }
        pending
    }

    fn stmt(&mut self, stmt: &Stmt, pending: Pending) -> Pending {
        let label = statement_label(stmt);
        match &stmt.kind {
            StmtKind::If {
                then_block, else_block, ..
            } => {
                let d = self.node(NodeKind::Decision, label, Some(stmt.line));
                self.connect(pending, d);
                let mut out = self.block(then_block, vec![(d, BranchTag::True)]);
                match else_block {
                    Some(block) => out.extend(self.block(block, vec![(d, BranchTag::False)])),
                    None => out.push((d, BranchTag::False)),
                }
                out
            }
            StmtKind::While { body, .. } | StmtKind::For { body, .. } => {
                let d = self.node(NodeKind::Decision, label, Some(stmt.line));
                self.connect(pending, d);
                let back = self.block(body, vec![(d, BranchTag::LoopEnter)]);
                self.connect(back, d);
                vec![(d, BranchTag::LoopExit)]
            }
            _ => {
                let s = self.node(NodeKind::Statement, label, Some(stmt.line));
                self.connect(pending, s);
                vec![(s, BranchTag::None)]
            }
        }
    }
}
