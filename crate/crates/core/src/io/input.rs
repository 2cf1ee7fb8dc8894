use std::collections::BTreeMap;
use std::path::Path;

use serde::de::{self, Deserializer};
use serde::Deserialize;

use crate::cmap::{CmapInstance, CmapOutput, CmapType, GraphEdge, GraphKind};
use crate::error::{Error, Result};
use crate::model::{monotone_closure, Allocation, Amount, ItemSet, TypeProfile, Valuation};
use crate::second_chance::{Action, Appeal, BestOf};
use crate::wd::{AllocationAlgorithm, AllocationRange};

/// An amount written in currency units, as a JSON number or a decimal
/// string. Strings keep all six fractional digits exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Units(pub Amount);

impl<'de> Deserialize<'de> for Units {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::String(s) => s,
            other => return Err(de::Error::custom(format!("expected an amount in units, found {other}"))),
        };
        Amount::parse_units(&text).map(Units).map_err(de::Error::custom)
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct WireBid {
    pub bundle: u32,
    pub value: Units,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WireValuation {
    /// Keys are bundle bitmasks in decimal; missing bundles start at zero
    /// and the table is then closed upwards to make it monotone.
    Table { values: BTreeMap<String, Units> },
    SingleMinded { bundle: u32, value: Units },
    Additive { values: Vec<Units> },
    Xor { bids: Vec<WireBid> },
}

impl WireValuation {
    pub fn build(&self, items: usize) -> Result<Valuation> {
        let v = match self {
            WireValuation::Table { values } => {
                let mut table = vec![Amount::ZERO; 1 << items];
                for (key, Units(x)) in values {
                    let mask: u32 = key.trim().parse().map_err(|_| Error::Parse(format!("table key {key:?} is not a bitmask")))?;
                    let slot = table
                        .get_mut(mask as usize)
                        .ok_or_else(|| Error::invalid(format!("table key {mask} exceeds {items} items")))?;
                    *slot = *x;
                }
                if table[0] != Amount::ZERO {
                    return Err(Error::invalid("the empty bundle must be worth zero"));
                }
                monotone_closure(&table)?
            }
            WireValuation::SingleMinded { bundle, value } => Valuation::single_minded(ItemSet::from_bits(*bundle), value.0)?,
            WireValuation::Additive { values } => Valuation::additive(values.iter().map(|u| u.0).collect())?,
            WireValuation::Xor { bids } => {
                Valuation::xor(bids.iter().map(|b| (ItemSet::from_bits(b.bundle), b.value.0)).collect())?
            }
        };
        if !v.fits(items) {
            return Err(Error::invalid(format!("valuation mentions items outside the {items}-item universe")));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct WireAgent {
    #[serde(default)]
    pub name: Option<String>,
    pub valuation: WireValuation,
}

#[derive(Clone, Debug, Deserialize)]
pub struct WireProfile {
    pub items: usize,
    pub agents: Vec<WireAgent>,
    /// Allocations as per-agent bundle bitmasks.
    #[serde(default)]
    pub range: Option<Vec<Vec<u32>>>,
}

/// A parsed auction instance.
#[derive(Clone, Debug, PartialEq)]
pub struct AuctionInstance {
    pub names: Vec<String>,
    pub profile: TypeProfile,
    pub range: Option<AllocationRange>,
}

impl AuctionInstance {
    /// Resolves an algorithm name; `in_range` uses the instance's range.
    pub fn algorithm(&self, name: &str) -> Result<AllocationAlgorithm> {
        match (name, &self.range) {
            ("in_range", Some(r)) => Ok(AllocationAlgorithm::InRange(r.clone())),
            ("in_range", None) => Err(Error::invalid("algorithm in_range needs a \"range\" in the instance")),
            _ => AllocationAlgorithm::from_name(name),
        }
    }
}

pub fn build_range(raw: &[Vec<u32>], agents: usize, items: usize) -> Result<AllocationRange> {
    let allocations = raw
        .iter()
        .map(|bundles| {
            if bundles.len() != agents {
                return Err(Error::invalid(format!("range allocation lists {} bundles for {agents} agents", bundles.len())));
            }
            let a = Allocation::new(bundles.iter().map(|&b| ItemSet::from_bits(b)).collect())?;
            if !a.within(items) {
                return Err(Error::invalid("range allocation uses items outside the universe"));
            }
            Ok(a)
        })
        .collect::<Result<Vec<_>>>()?;
    AllocationRange::new(allocations)
}

impl WireProfile {
    pub fn build(&self) -> Result<AuctionInstance> {
        let valuations = self
            .agents
            .iter()
            .enumerate()
            .map(|(i, a)| a.valuation.build(self.items).map_err(|e| Error::invalid(format!("agent {i}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let profile = TypeProfile::new(self.items, valuations)?;
        let names = self
            .agents
            .iter()
            .enumerate()
            .map(|(i, a)| a.name.clone().unwrap_or_else(|| format!("agent{i}")))
            .collect();
        let range = self.range.as_deref().map(|r| build_range(r, profile.agents(), self.items)).transpose()?;
        Ok(AuctionInstance { names, profile, range })
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct WireTableEntry {
    pub input: Vec<WireValuation>,
    pub output: Vec<WireValuation>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WireAppeal {
    Decline,
    ReplaceOwn { agent: usize, declaration: WireValuation },
    ReplaceProfile { profile: Vec<WireValuation> },
    Table { entries: Vec<WireTableEntry> },
    BestOf {
        agent: usize,
        scoring: WireValuation,
        alg: String,
        #[serde(default = "yes")]
        include_input: bool,
        #[serde(default)]
        appeals: Vec<WireAppeal>,
        #[serde(default)]
        member_step_limit: Option<u64>,
    },
    Chain { appeals: Vec<WireAppeal> },
}

fn yes() -> bool {
    true
}

fn build_profile(vals: &[WireValuation], items: usize) -> Result<TypeProfile> {
    TypeProfile::new(items, vals.iter().map(|v| v.build(items)).collect::<Result<_>>()?)
}

impl WireAppeal {
    pub fn build(&self, items: usize) -> Result<Appeal> {
        Ok(match self {
            WireAppeal::Decline => Appeal::Decline,
            WireAppeal::ReplaceOwn { agent, declaration } => {
                Appeal::ReplaceOwn { agent: *agent, declaration: declaration.build(items)? }
            }
            WireAppeal::ReplaceProfile { profile } => Appeal::ReplaceProfile(build_profile(profile, items)?),
            WireAppeal::Table { entries } => Appeal::Table(
                entries
                    .iter()
                    .map(|e| Ok((build_profile(&e.input, items)?, build_profile(&e.output, items)?)))
                    .collect::<Result<_>>()?,
            ),
            WireAppeal::BestOf { agent, scoring, alg, include_input, appeals, member_step_limit } => {
                Appeal::BestOf(Box::new(BestOf {
                    agent: *agent,
                    scoring: scoring.build(items)?,
                    alg: AllocationAlgorithm::from_name(alg)?,
                    include_input: *include_input,
                    appeals: appeals.iter().map(|a| a.build(items)).collect::<Result<_>>()?,
                    member_step_limit: *member_step_limit,
                }))
            }
            WireAppeal::Chain { appeals } => Appeal::Chain(appeals.iter().map(|a| a.build(items)).collect::<Result<_>>()?),
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct WireAction {
    pub declaration: WireValuation,
    #[serde(default)]
    pub appeal: Option<WireAppeal>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct WireActions {
    pub actions: Vec<WireAction>,
}

impl WireActions {
    pub fn build(&self, items: usize) -> Result<Vec<Action>> {
        self.actions
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let declaration = a.declaration.build(items).map_err(|e| Error::invalid(format!("action {i}: {e}")))?;
                let appeal = a.appeal.as_ref().map(|x| x.build(items)).transpose()?.unwrap_or(Appeal::Decline);
                Ok(Action::new(declaration, appeal))
            })
            .collect()
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct WireEdge {
    pub from: usize,
    pub to: usize,
    pub owner: usize,
    pub cost: Units,
}

fn multicast() -> GraphKind {
    GraphKind::Multicast
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum WireCmap {
    Graph {
        nodes: usize,
        edges: Vec<WireEdge>,
        source: usize,
        terminals: Vec<usize>,
        #[serde(default = "multicast")]
        kind: GraphKind,
        #[serde(default)]
        agents: Option<usize>,
    },
    Explicit {
        components: Vec<usize>,
        outputs: Vec<Vec<u8>>,
        #[serde(rename = "type")]
        values: Vec<Vec<Units>>,
    },
}

impl WireCmap {
    /// The instance and the type it carries (edge costs, negated).
    pub fn build(&self) -> Result<(CmapInstance, CmapType)> {
        match self {
            WireCmap::Graph { nodes, edges, source, terminals, kind, agents } => {
                let edges: Vec<GraphEdge> =
                    edges.iter().map(|e| GraphEdge { from: e.from, to: e.to, owner: e.owner, cost: e.cost.0 }).collect();
                CmapInstance::from_graph(*nodes, &edges, *source, terminals.clone(), *kind, *agents)
            }
            WireCmap::Explicit { components, outputs, values } => {
                let outs = outputs
                    .iter()
                    .map(|bits| match bits.iter().all(|&b| b <= 1) {
                        true => Ok(CmapOutput::new(bits.iter().map(|&b| b == 1).collect())),
                        false => Err(Error::invalid("output bits must be 0 or 1")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let inst = CmapInstance::explicit(components.clone(), outs)?;
                let v = CmapType::new(values.iter().map(|row| row.iter().map(|u| u.0).collect()).collect());
                inst.check_type(&v)?;
                Ok((inst, v))
            }
        }
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn parse_profile(text: &str) -> Result<AuctionInstance> {
    parse_json::<WireProfile>(text, "profile")?.build()
}

pub fn parse_actions(text: &str, items: usize) -> Result<Vec<Action>> {
    parse_json::<WireActions>(text, "actions")?.build(items)
}

pub fn parse_cmap(text: &str) -> Result<(CmapInstance, CmapType)> {
    parse_json::<WireCmap>(text, "cmap instance")?.build()
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}
