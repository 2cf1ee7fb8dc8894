//! Cost-minimization allocation problems: outputs are bit vectors over the
//! agents' components and an agent's value is the sum of its selected
//! (negated) costs.

mod degeneracy;
mod graph;
mod model;
mod solve;

pub use degeneracy::{degeneracy_ratio, degeneracy_report, escalate_degeneracy, DegeneracyReport, EscalationStep};
pub use graph::{CmapGraph, Edge, GraphEdge, GraphKind};
pub use model::{cmap_welfare, forcing_type, CmapInstance, CmapOutput, CmapType, OutputSpace, ENUMERATION_MAX_EDGES};
pub use solve::{solve_cmap_heuristic, solve_cmap_optimal, CmapAlgorithm, CmapAllocateFn, CustomCmapAlgorithm};

pub mod samples;
