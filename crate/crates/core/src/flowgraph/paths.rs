use super::graph::{BranchTag, FlowGraph};
use super::FlowError;

/// A complete Entry-to-Exit path, as a sequence of edge indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub edges: Vec<usize>,
}

impl Path {
    /// Node ids visited, starting with the entry node.
    pub fn nodes(&self, graph: &FlowGraph) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        out.push(graph.entry_id);
        out.extend(self.edges.iter().map(|&e| graph.edges[e].to));
        out
    }
}

/// Enumerates every complete path in which each loop body runs at most
/// `loop_bound` times per entry into the loop.
///
/// Paths come out in lexicographic order of branch choices, true/enter
/// before false/exit. Fails with [`FlowError::PathExplosion`] once more
/// than `cap` paths exist.
pub fn enumerate_paths(graph: &FlowGraph, loop_bound: u32, cap: usize) -> Result<Vec<Path>, FlowError> {
    let outgoing: Vec<Vec<usize>> = (0..graph.nodes.len()).map(|n| graph.outgoing(n)).collect();
    let mut walk = Walk {
        graph,
        outgoing,
        loop_bound,
        cap,
        iterations: vec![0; graph.nodes.len()],
        current: Vec::new(),
        found: Vec::new(),
    };
    walk.visit(graph.entry_id)?;
    Ok(walk.found)
}

struct Walk<'g> {
    graph: &'g FlowGraph,
    outgoing: Vec<Vec<usize>>,
    loop_bound: u32,
    cap: usize,
    /// Iterations of each loop decision since the loop was last entered.
    iterations: Vec<u32>,
    current: Vec<usize>,
    found: Vec<Path>,
}

impl Walk<'_> {
    fn visit(&mut self, node: usize) -> Result<(), FlowError> {
        if node == self.graph.exit_id {
            if self.found.len() >= self.cap {
                return Err(FlowError::PathExplosion { cap: self.cap });
            }
            self.found.push(Path {
                edges: self.current.clone(),
            });
            return Ok(());
        }
        for i in 0..self.outgoing[node].len() {
            let e = self.outgoing[node][i];
            let edge = self.graph.edges[e];
            match edge.tag {
                BranchTag::LoopEnter => {
                    if self.iterations[node] >= self.loop_bound {
                        continue;
                    }
                    self.iterations[node] += 1;
                    self.step(e, edge.to)?;
                    self.iterations[node] -= 1;
                }
                BranchTag::LoopExit => {
                    let saved = std::mem::replace(&mut self.iterations[node], 0);
                    self.step(e, edge.to)?;
                    self.iterations[node] = saved;
                }
                _ => self.step(e, edge.to)?,
            }
        }
        Ok(())
    }

    fn step(&mut self, edge: usize, to: usize) -> Result<(), FlowError> {
        self.current.push(edge);
        let r = self.visit(to);
        self.current.pop();
        r
    }
}
