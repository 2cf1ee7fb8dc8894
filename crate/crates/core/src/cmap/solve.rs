use std::fmt;
use std::sync::Arc;

use super::graph::{edge_costs, GraphKind};
use super::model::{welfare_of, CmapInstance, CmapOutput, CmapType, OutputSpace};
use crate::error::{Error, Result};

/// Exact welfare maximizer; ties go to the smallest bit vector.
pub fn solve_cmap_optimal(instance: &CmapInstance, v: &CmapType) -> Result<CmapOutput> {
    instance.check_type(v)?;
    if let Some(g) = instance.graph() {
        if g.kind() == GraphKind::ShortestPath && instance.allowable_outputs().is_err() {
            return g.best_path(&edge_costs(g, &v.flat()));
        }
    }
    let outputs = instance.allowable_outputs()?;
    let mut best = &outputs[0];
    let mut best_w = welfare_of(v, best);
    for x in &outputs[1..] {
        let w = welfare_of(v, x);
        if w > best_w {
            best = x;
            best_w = w;
        }
    }
    Ok(best.clone())
}

pub type CmapAllocateFn = dyn Fn(&CmapInstance, &CmapType) -> Result<CmapOutput> + Send + Sync;

#[derive(Clone)]
pub struct CustomCmapAlgorithm {
    pub name: String,
    pub func: Arc<CmapAllocateFn>,
}

impl fmt::Debug for CustomCmapAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomCmapAlgorithm").field("name", &self.name).finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum CmapAlgorithm {
    Optimal,
    /// [`solve_cmap_heuristic`].
    Heuristic,
    /// Depth-first search exploring edges in a fixed priority order (listed
    /// edges first, then the rest by index), pruned to the terminals. Blind
    /// to the type.
    FirstFound { priority: Vec<usize> },
    /// Union of shortest paths from the source to each terminal, taken from
    /// one shortest-path tree. Negative costs are clamped to zero.
    ShortestPathTree,
    Custom(CustomCmapAlgorithm),
}

impl CmapAlgorithm {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "optimal" => Ok(CmapAlgorithm::Optimal),
            "heuristic" => Ok(CmapAlgorithm::Heuristic),
            "first_found" => Ok(CmapAlgorithm::FirstFound { priority: Vec::new() }),
            "shortest_path_tree" => Ok(CmapAlgorithm::ShortestPathTree),
            _ => match name.strip_prefix("first_found:") {
                Some(list) => {
                    let priority = list
                        .split(',')
                        .map(|s| s.trim().parse::<usize>().map_err(|e| Error::Parse(format!("edge index {s:?}: {e}"))))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(CmapAlgorithm::FirstFound { priority })
                }
                None => Err(Error::invalid(format!("unknown cmap algorithm {name:?}"))),
            },
        }
    }

    pub fn name(&self) -> String {
        match self {
            CmapAlgorithm::Optimal => "optimal".into(),
            CmapAlgorithm::Heuristic => "heuristic".into(),
            CmapAlgorithm::FirstFound { priority } if priority.is_empty() => "first_found".into(),
            CmapAlgorithm::FirstFound { priority } => {
                let list: Vec<String> = priority.iter().map(usize::to_string).collect();
                format!("first_found:{}", list.join(","))
            }
            CmapAlgorithm::ShortestPathTree => "shortest_path_tree".into(),
            CmapAlgorithm::Custom(c) => c.name.clone(),
        }
    }

    pub fn run(&self, instance: &CmapInstance, v: &CmapType) -> Result<CmapOutput> {
        instance.check_type(v)?;
        let graph = || instance.graph().ok_or_else(|| Error::precondition(format!("{} needs a graph instance", self.name())));
        let out = match self {
            CmapAlgorithm::Optimal => return solve_cmap_optimal(instance, v),
            CmapAlgorithm::Heuristic => return solve_cmap_heuristic(instance, v),
            CmapAlgorithm::FirstFound { priority } => {
                let g = graph()?;
                let mut rank = vec![usize::MAX; g.edges().len()];
                for (r, &e) in priority.iter().enumerate() {
                    if e >= rank.len() {
                        return Err(Error::invalid(format!("priority lists edge {e}, which does not exist")));
                    }
                    rank[e] = rank[e].min(r);
                }
                g.prune_to_terminals(&g.dfs_tree(&rank))
            }
            CmapAlgorithm::ShortestPathTree => {
                let g = graph()?;
                let cost: Vec<i64> = edge_costs(g, &v.flat()).into_iter().map(|c| c.max(0)).collect();
                let (_, parent) = g.dijkstra(&cost, &vec![true; g.edges().len()]);
                g.prune_to_terminals(&parent)
            }
            CmapAlgorithm::Custom(c) => (c.func)(instance, v)?,
        };
        if !instance.is_allowable(&out) {
            return Err(Error::invalid(format!("{} produced a non-allowable output", self.name())));
        }
        Ok(out)
    }
}

/// The default suboptimal rule: shortest-path tree for multicast, first
/// path found in edge order for path instances.
pub fn solve_cmap_heuristic(instance: &CmapInstance, v: &CmapType) -> Result<CmapOutput> {
    match instance.space() {
        OutputSpace::Graph(g) if g.kind() == GraphKind::Multicast => CmapAlgorithm::ShortestPathTree.run(instance, v),
        OutputSpace::Graph(_) => CmapAlgorithm::FirstFound { priority: Vec::new() }.run(instance, v),
        OutputSpace::Explicit(_) => Err(Error::precondition("heuristics need a graph instance")),
    }
}
