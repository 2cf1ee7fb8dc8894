use super::appeal::{Action, Appeal};
use crate::error::{Error, Result};
use crate::model::Valuation;

/// One domain point of a revision function: the opponents' actions (in
/// agent order, skipping the owner) and the action the owner would rather
/// have taken.
#[derive(Clone, Debug, PartialEq)]
pub struct RevisionEntry {
    pub opponents: Vec<Action>,
    pub revised: Action,
}

/// Declares that a revision function only involves appeals drawn from a
/// fixed family whose size and per-member running time are polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct DBound {
    pub d: u32,
    pub c: u64,
    pub family: Vec<Appeal>,
}

impl DBound {
    /// `c·n^d`, both the family-size cap and the per-member step cap.
    pub fn limit(&self, agents: usize) -> u64 {
        (agents as u64).checked_pow(self.d).and_then(|p| p.checked_mul(self.c)).unwrap_or(u64::MAX)
    }
}

/// A finite partial map from opponents' actions to one agent's action.
#[derive(Clone, Debug, PartialEq)]
pub struct RevisionFunction {
    agent: usize,
    agents: usize,
    entries: Vec<RevisionEntry>,
    bound: Option<DBound>,
}

impl RevisionFunction {
    pub fn new(agent: usize, agents: usize, entries: Vec<RevisionEntry>) -> Result<Self> {
        if agent >= agents {
            return Err(Error::invalid(format!("agent {agent} out of range for {agents} agents")));
        }
        for (k, e) in entries.iter().enumerate() {
            if e.opponents.len() + 1 != agents {
                return Err(Error::invalid(format!("entry {k} lists {} opponents, expected {}", e.opponents.len(), agents - 1)));
            }
            if entries[..k].iter().any(|prev| prev.opponents == e.opponents) {
                return Err(Error::invalid(format!("entry {k} repeats an earlier domain point")));
            }
        }
        Ok(RevisionFunction { agent, agents, entries, bound: None })
    }

    /// Builds an appeal-independent function: every domain point is a vector
    /// of naked opponent declarations.
    pub fn appeal_independent(agent: usize, agents: usize, entries: Vec<(Vec<Valuation>, Action)>) -> Result<Self> {
        let entries = entries
            .into_iter()
            .map(|(opps, revised)| RevisionEntry { opponents: opps.into_iter().map(Action::naked).collect(), revised })
            .collect();
        RevisionFunction::new(agent, agents, entries)
    }

    /// Attaches a d-bound, checking that the family is small enough and that
    /// every appeal mentioned anywhere in the function belongs to it.
    pub fn with_d_bound(mut self, bound: DBound) -> Result<Self> {
        let cap = bound.limit(self.agents);
        if bound.family.len() as u64 > cap {
            return Err(Error::invalid(format!("family of {} appeals exceeds c*n^d = {cap}", bound.family.len())));
        }
        let member = |a: &Appeal| a.is_decline() || bound.family.contains(a);
        for (k, e) in self.entries.iter().enumerate() {
            if !e.opponents.iter().all(|a| member(&a.appeal)) || !member(&e.revised.appeal) {
                return Err(Error::invalid(format!("entry {k} uses an appeal outside the bounded family")));
            }
        }
        self.bound = Some(bound);
        Ok(self)
    }

    pub fn agent(&self) -> usize {
        self.agent
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn entries(&self) -> &[RevisionEntry] {
        &self.entries
    }

    pub fn bound(&self) -> Option<&DBound> {
        self.bound.as_ref()
    }

    pub fn is_appeal_independent(&self) -> bool {
        self.entries.iter().all(|e| e.opponents.iter().all(|a| a.appeal.is_decline()))
    }

    pub fn lookup(&self, opponents: &[Action]) -> Option<&Action> {
        self.entries.iter().find(|e| e.opponents == opponents).map(|e| &e.revised)
    }

    /// Looks up the domain point made of these declarations with empty appeals.
    pub fn lookup_declarations(&self, opponents: &[Valuation]) -> Option<&Action> {
        self.entries
            .iter()
            .find(|e| {
                e.opponents.len() == opponents.len()
                    && e.opponents.iter().zip(opponents).all(|(a, v)| a.appeal.is_decline() && &a.declaration == v)
            })
            .map(|e| &e.revised)
    }

    /// Distinct declarations appearing in the range, in entry order.
    pub fn range_declarations(&self) -> Vec<Valuation> {
        let mut out: Vec<Valuation> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.revised.declaration) {
                out.push(e.revised.declaration.clone());
            }
        }
        out
    }
}

/// `all` without position `agent`.
pub fn opponents_of<T: Clone>(all: &[T], agent: usize) -> Vec<T> {
    all.iter().enumerate().filter(|&(j, _)| j != agent).map(|(_, x)| x.clone()).collect()
}

/// Inverse of [`opponents_of`].
pub fn insert_own<T: Clone>(opponents: &[T], agent: usize, own: T) -> Vec<T> {
    let mut out = opponents.to_vec();
    out.insert(agent, own);
    out
}
