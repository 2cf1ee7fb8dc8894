use serde::Serialize;

use super::graph::{CmapGraph, GraphEdge, GraphKind};
use crate::error::{Error, Result};
use crate::model::Amount;

/// Enumerating graph outputs beyond this many edges is refused.
pub const ENUMERATION_MAX_EDGES: usize = 12;

/// Per-agent component values `v^i_j`, negated costs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct CmapType {
    values: Vec<Vec<Amount>>,
}

impl CmapType {
    pub fn new(values: Vec<Vec<Amount>>) -> Self {
        CmapType { values }
    }

    pub fn agents(&self) -> usize {
        self.values.len()
    }

    pub fn components(&self, agent: usize) -> &[Amount] {
        &self.values[agent]
    }

    pub fn values(&self) -> &[Vec<Amount>] {
        &self.values
    }

    pub fn layout(&self) -> Vec<usize> {
        self.values.iter().map(Vec::len).collect()
    }

    /// Components in agent-major order.
    pub fn flat(&self) -> Vec<Amount> {
        self.values.iter().flatten().copied().collect()
    }

    pub fn from_flat(layout: &[usize], flat: &[Amount]) -> Result<Self> {
        if layout.iter().sum::<usize>() != flat.len() {
            return Err(Error::invalid("flat type length does not match the component layout"));
        }
        let mut rest = flat;
        let mut values = Vec::with_capacity(layout.len());
        for &k in layout {
            let (head, tail) = rest.split_at(k);
            values.push(head.to_vec());
            rest = tail;
        }
        Ok(CmapType { values })
    }

    pub fn with_agent(&self, agent: usize, components: Vec<Amount>) -> Result<Self> {
        if agent >= self.agents() || components.len() != self.values[agent].len() {
            return Err(Error::invalid(format!("replacement type for agent {agent} has the wrong arity")));
        }
        let mut values = self.values.clone();
        values[agent] = components;
        Ok(CmapType { values })
    }

    /// Componentwise `self ≤ other`.
    pub fn dominated_by(&self, other: &CmapType) -> bool {
        self.layout() == other.layout() && self.flat().iter().zip(other.flat()).all(|(a, b)| *a <= b)
    }
}

/// An output as a bit vector in agent-major component order. Ordering is
/// lexicographic, with unselected before selected.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct CmapOutput {
    bits: Vec<bool>,
}

impl CmapOutput {
    pub fn new(bits: Vec<bool>) -> Self {
        CmapOutput { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn selected(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutputSpace {
    Explicit(Vec<CmapOutput>),
    Graph(CmapGraph),
}

/// Component layout together with the allowable outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmapInstance {
    layout: Vec<usize>,
    space: OutputSpace,
    /// All allowable outputs in increasing order, when enumerable.
    enumerated: Option<Vec<CmapOutput>>,
}

impl CmapInstance {
    pub fn explicit(layout: Vec<usize>, mut outputs: Vec<CmapOutput>) -> Result<Self> {
        let width: usize = layout.iter().sum();
        if outputs.is_empty() {
            return Err(Error::invalid("an explicit instance needs at least one allowable output"));
        }
        if let Some(bad) = outputs.iter().position(|x| x.len() != width) {
            return Err(Error::invalid(format!("output {bad} has {} bits, expected {width}", outputs[bad].len())));
        }
        outputs.sort();
        outputs.dedup();
        Ok(CmapInstance { layout, enumerated: Some(outputs.clone()), space: OutputSpace::Explicit(outputs) })
    }

    /// Builds a graph instance and the type given by the edge costs.
    pub fn from_graph(
        nodes: usize,
        edges: &[GraphEdge],
        source: usize,
        terminals: Vec<usize>,
        kind: GraphKind,
        agents: Option<usize>,
    ) -> Result<(Self, CmapType)> {
        let graph = CmapGraph::new(nodes, edges, source, terminals, kind, agents)?;
        let layout = graph.layout();
        let enumerated = (graph.edges().len() <= ENUMERATION_MAX_EDGES).then(|| graph.enumerate());
        let mut flat = vec![Amount::ZERO; edges.len()];
        for (e, edge) in edges.iter().enumerate() {
            flat[graph.position(e)] = -edge.cost;
        }
        let v = CmapType::from_flat(&layout, &flat)?;
        if enumerated.as_ref().is_some_and(|o| o.is_empty()) {
            return Err(Error::invalid("graph has no allowable output"));
        }
        Ok((CmapInstance { layout, space: OutputSpace::Graph(graph), enumerated }, v))
    }

    pub fn layout(&self) -> &[usize] {
        &self.layout
    }

    pub fn agents(&self) -> usize {
        self.layout.len()
    }

    pub fn width(&self) -> usize {
        self.layout.iter().sum()
    }

    pub fn space(&self) -> &OutputSpace {
        &self.space
    }

    pub fn graph(&self) -> Option<&CmapGraph> {
        match &self.space {
            OutputSpace::Graph(g) => Some(g),
            OutputSpace::Explicit(_) => None,
        }
    }

    pub fn is_allowable(&self, x: &CmapOutput) -> bool {
        if x.len() != self.width() {
            return false;
        }
        match &self.space {
            OutputSpace::Explicit(outs) => outs.binary_search(x).is_ok(),
            OutputSpace::Graph(g) => g.is_allowable(x),
        }
    }

    /// Allowable outputs in increasing order.
    pub fn allowable_outputs(&self) -> Result<&[CmapOutput]> {
        self.enumerated
            .as_deref()
            .ok_or_else(|| Error::resource("graph edges for output enumeration", ENUMERATION_MAX_EDGES as u64))
    }

    pub fn check_type(&self, v: &CmapType) -> Result<()> {
        if v.layout() != self.layout {
            return Err(Error::invalid(format!("type layout {:?} differs from instance layout {:?}", v.layout(), self.layout)));
        }
        Ok(())
    }
}

/// `Σ v^i_j x^i_j` without allowability checks.
pub(crate) fn welfare_of(v: &CmapType, x: &CmapOutput) -> Amount {
    v.values.iter().flatten().zip(&x.bits).filter(|(_, &b)| b).map(|(a, _)| *a).sum()
}

/// Welfare of an allowable output.
pub fn cmap_welfare(instance: &CmapInstance, v: &CmapType, x: &CmapOutput) -> Result<Amount> {
    instance.check_type(v)?;
    if !instance.is_allowable(x) {
        return Err(Error::invalid("output is not allowable for this instance"));
    }
    Ok(welfare_of(v, x))
}

/// `v[α]`: components outside `x` are set to `-α`, the rest are kept.
pub fn forcing_type(v: &CmapType, x: &CmapOutput, alpha: Amount) -> Result<CmapType> {
    if alpha.is_negative() {
        return Err(Error::invalid("forcing parameter must be non-negative"));
    }
    let flat = v.flat();
    if flat.len() != x.len() {
        return Err(Error::invalid("output width differs from type width"));
    }
    let forced: Vec<Amount> = flat.iter().zip(x.bits()).map(|(&a, &b)| if b { a } else { -alpha }).collect();
    CmapType::from_flat(&v.layout(), &forced)
}
