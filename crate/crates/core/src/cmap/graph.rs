use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::model::CmapOutput;
use crate::error::{Error, Result};
use crate::model::Amount;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    /// Outputs are source-rooted trees reaching every terminal.
    Multicast,
    /// Outputs are simple paths from the source to the single terminal.
    ShortestPath,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub owner: usize,
    pub cost: Amount,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub owner: usize,
}

/// A directed graph whose edges are the components of their owners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmapGraph {
    nodes: usize,
    edges: Vec<Edge>,
    source: usize,
    terminals: Vec<usize>,
    kind: GraphKind,
    agents: usize,
    /// Bit position of each edge in the agent-major layout.
    position: Vec<usize>,
    /// Edge at each bit position.
    edge_at: Vec<usize>,
}

impl CmapGraph {
    pub(crate) fn new(
        nodes: usize,
        edges: &[GraphEdge],
        source: usize,
        mut terminals: Vec<usize>,
        kind: GraphKind,
        agents: Option<usize>,
    ) -> Result<Self> {
        let node_ok = |x: usize| x < nodes;
        if !node_ok(source) || !terminals.iter().all(|&t| node_ok(t)) {
            return Err(Error::invalid("source or terminal is not a node of the graph"));
        }
        if let Some(e) = edges.iter().position(|e| !node_ok(e.from) || !node_ok(e.to)) {
            return Err(Error::invalid(format!("edge {e} has an endpoint outside the graph")));
        }
        terminals.sort_unstable();
        terminals.dedup();
        if kind == GraphKind::ShortestPath && terminals.len() != 1 {
            return Err(Error::invalid("a shortest-path instance needs exactly one terminal"));
        }
        let needed = edges.iter().map(|e| e.owner + 1).max().unwrap_or(0);
        let agents = agents.unwrap_or(needed);
        if needed > agents {
            return Err(Error::invalid(format!("edge owner {} exceeds the declared {agents} agents", needed - 1)));
        }
        let mut order: Vec<usize> = (0..edges.len()).collect();
        order.sort_by_key(|&e| (edges[e].owner, e));
        let mut position = vec![0; edges.len()];
        for (p, &e) in order.iter().enumerate() {
            position[e] = p;
        }
        let graph = CmapGraph {
            nodes,
            edges: edges.iter().map(|e| Edge { from: e.from, to: e.to, owner: e.owner }).collect(),
            source,
            terminals,
            kind,
            agents,
            position,
            edge_at: order,
        };
        let all = vec![true; graph.edges.len()];
        if !graph.reaches_terminals(&all) {
            return Err(Error::invalid("some terminal is unreachable from the source"));
        }
        for a in 0..agents {
            let without: Vec<bool> = graph.edges.iter().map(|e| e.owner != a).collect();
            if !graph.reaches_terminals(&without) {
                return Err(Error::invalid(format!("agent {a} owns a cut separating a terminal from the source")));
            }
        }
        Ok(graph)
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn position(&self, edge: usize) -> usize {
        self.position[edge]
    }

    pub fn layout(&self) -> Vec<usize> {
        let mut counts = vec![0; self.agents];
        for e in &self.edges {
            counts[e.owner] += 1;
        }
        counts
    }

    pub fn output_from_edges(&self, selected: &[bool]) -> CmapOutput {
        let mut bits = vec![false; self.edges.len()];
        for (e, &on) in selected.iter().enumerate() {
            bits[self.position[e]] = on;
        }
        CmapOutput::new(bits)
    }

    pub fn edges_of(&self, x: &CmapOutput) -> Vec<bool> {
        (0..self.edges.len()).map(|e| x.bits()[self.position[e]]).collect()
    }

    fn reaches_terminals(&self, allowed: &[bool]) -> bool {
        let reached = self.reachable(allowed);
        self.terminals.iter().all(|&t| reached[t])
    }

    fn reachable(&self, allowed: &[bool]) -> Vec<bool> {
        let mut seen = vec![false; self.nodes];
        seen[self.source] = true;
        let mut stack = vec![self.source];
        while let Some(u) = stack.pop() {
            for (e, edge) in self.edges.iter().enumerate() {
                if allowed[e] && edge.from == u && !seen[edge.to] {
                    seen[edge.to] = true;
                    stack.push(edge.to);
                }
            }
        }
        seen
    }

    pub(crate) fn is_allowable(&self, x: &CmapOutput) -> bool {
        x.len() == self.edges.len() && self.is_allowable_edges(&self.edges_of(x))
    }

    fn is_allowable_edges(&self, sel: &[bool]) -> bool {
        let mut indeg = vec![0usize; self.nodes];
        let mut outdeg = vec![0usize; self.nodes];
        for (e, edge) in self.edges.iter().enumerate() {
            if sel[e] {
                indeg[edge.to] += 1;
                outdeg[edge.from] += 1;
            }
        }
        if indeg[self.source] > 0 || indeg.iter().any(|&d| d > 1) {
            return false;
        }
        // with in-degrees at most one, reaching every selected edge from the
        // source makes the selection an arborescence
        let reached = self.reachable(sel);
        let spanning = self.edges.iter().zip(sel).all(|(e, &on)| !on || reached[e.from]);
        if !spanning || !self.terminals.iter().all(|&t| reached[t]) {
            return false;
        }
        match self.kind {
            GraphKind::Multicast => true,
            GraphKind::ShortestPath => {
                let t = self.terminals[0];
                outdeg.iter().all(|&d| d <= 1) && outdeg[t] == 0
            }
        }
    }

    /// Every allowable output, in increasing bit-vector order.
    pub(crate) fn enumerate(&self) -> Vec<CmapOutput> {
        let m = self.edges.len();
        let mut out: Vec<CmapOutput> = (0u32..1 << m)
            .map(|mask| (0..m).map(|e| mask >> e & 1 == 1).collect::<Vec<bool>>())
            .filter(|sel| self.is_allowable_edges(sel))
            .map(|sel| self.output_from_edges(&sel))
            .collect();
        out.sort();
        out
    }

    /// Single-source distances over allowed edges with non-negative costs,
    /// together with the edge used to reach each node. The parent is the
    /// first improving edge in scan order, so results are deterministic.
    pub(crate) fn dijkstra(&self, cost: &[i64], allowed: &[bool]) -> (Vec<Option<i64>>, Vec<Option<usize>>) {
        let mut dist: Vec<Option<i64>> = vec![None; self.nodes];
        let mut parent = vec![None; self.nodes];
        let mut done = vec![false; self.nodes];
        let mut heap = BinaryHeap::new();
        dist[self.source] = Some(0);
        heap.push(Reverse((0i64, self.source)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for (e, edge) in self.edges.iter().enumerate() {
                if !allowed[e] || edge.from != u || done[edge.to] {
                    continue;
                }
                let nd = d + cost[e];
                if dist[edge.to].is_none_or(|old| nd < old) {
                    dist[edge.to] = Some(nd);
                    parent[edge.to] = Some(e);
                    heap.push(Reverse((nd, edge.to)));
                }
            }
        }
        (dist, parent)
    }

    /// The welfare-maximal path with the smallest bit vector, by label
    /// setting. Needs every edge cost to be non-negative.
    pub(crate) fn best_path(&self, cost: &[i64]) -> Result<CmapOutput> {
        if self.kind != GraphKind::ShortestPath {
            return Err(Error::precondition("best_path needs a shortest-path instance"));
        }
        if cost.iter().any(|&c| c < 0) {
            return Err(Error::invalid("label setting needs non-positive component values"));
        }
        let t = self.terminals[0];
        let mut allowed = vec![true; self.edges.len()];
        let target = self.dijkstra(cost, &allowed).0[t];
        // drop edges in bit order while an optimal path survives; the
        // remaining edges are then shared by every optimal path
        for &e in &self.edge_at {
            allowed[e] = false;
            if self.dijkstra(cost, &allowed).0[t] != target {
                allowed[e] = true;
            }
        }
        Ok(self.output_from_edges(&allowed))
    }

    /// Union of tree paths from the source to the terminals.
    pub(crate) fn prune_to_terminals(&self, parent: &[Option<usize>]) -> CmapOutput {
        let mut sel = vec![false; self.edges.len()];
        for &t in &self.terminals {
            let mut node = t;
            while let Some(e) = parent[node] {
                if sel[e] {
                    break;
                }
                sel[e] = true;
                node = self.edges[e].from;
            }
        }
        self.output_from_edges(&sel)
    }

    /// Depth-first search tree exploring out-edges by `rank` (lower first).
    pub(crate) fn dfs_tree(&self, rank: &[usize]) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.nodes];
        let mut seen = vec![false; self.nodes];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.nodes];
        for (e, edge) in self.edges.iter().enumerate() {
            out[edge.from].push(e);
        }
        for list in &mut out {
            list.sort_by_key(|&e| (rank[e], e));
        }
        seen[self.source] = true;
        let mut stack = vec![(self.source, 0usize)];
        while let Some((u, next)) = stack.pop() {
            if next < out[u].len() {
                stack.push((u, next + 1));
                let e = out[u][next];
                let v = self.edges[e].to;
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(e);
                    stack.push((v, 0));
                }
            }
        }
        parent
    }
}

/// Edge costs `-v` read off a type in the graph's bit layout.
pub(crate) fn edge_costs(graph: &CmapGraph, flat: &[Amount]) -> Vec<i64> {
    (0..graph.edges.len()).map(|e| -flat[graph.position(e)].micros()).collect()
}
