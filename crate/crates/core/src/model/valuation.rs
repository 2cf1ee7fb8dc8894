use serde::{Deserialize, Serialize};

use super::currency::Amount;
use super::items::{ItemSet, MAX_ITEMS};
use crate::error::{Error, Result};

/// The concrete representation behind a [`Valuation`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Representation {
    /// One entry per bundle bitmask; length is `2^m`.
    Table { values: Vec<Amount> },
    SingleMinded { bundle: ItemSet, value: Amount },
    Additive { values: Vec<Amount> },
    /// The value of a bundle is the largest atom it contains (0 if none).
    Xor { bids: Vec<(ItemSet, Amount)> },
}

/// A monotone bundle-value map with `v(∅) = 0`.
///
/// Every constructor validates non-negativity and free disposal, so all
/// values of this type satisfy `s ⊆ t ⟹ v(s) ≤ v(t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Valuation(Representation);

impl Valuation {
    /// An explicit table indexed by bundle bitmask. Must already be monotone;
    /// see [`monotone_closure`] for raw input.
    pub fn table(values: Vec<Amount>) -> Result<Self> {
        let m = table_items(values.len())?;
        check_raw_table(&values)?;
        for s in 0..values.len() {
            for item in 0..m {
                let t = s | (1 << item);
                if values[s] > values[t] {
                    return Err(Error::invalid(format!(
                        "table violates free disposal: v({}) = {} > v({}) = {}",
                        ItemSet::from_bits(s as u32),
                        values[s],
                        ItemSet::from_bits(t as u32),
                        values[t]
                    )));
                }
            }
        }
        Ok(Valuation(Representation::Table { values }))
    }

    pub fn single_minded(bundle: ItemSet, value: Amount) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::invalid("single-minded value must be non-negative"));
        }
        if bundle.is_empty() && value != Amount::ZERO {
            return Err(Error::invalid("a non-zero bid on the empty bundle violates v(∅) = 0"));
        }
        Ok(Valuation(Representation::SingleMinded { bundle, value }))
    }

    pub fn additive(values: Vec<Amount>) -> Result<Self> {
        if values.len() > MAX_ITEMS {
            return Err(Error::invalid("too many per-item values"));
        }
        if values.iter().any(|v| v.is_negative()) {
            return Err(Error::invalid("additive item values must be non-negative"));
        }
        Ok(Valuation(Representation::Additive { values }))
    }

    pub fn xor(bids: Vec<(ItemSet, Amount)>) -> Result<Self> {
        for (bundle, value) in &bids {
            if value.is_negative() {
                return Err(Error::invalid("XOR bid values must be non-negative"));
            }
            if bundle.is_empty() && *value != Amount::ZERO {
                return Err(Error::invalid("a non-zero XOR bid on the empty bundle violates v(∅) = 0"));
            }
        }
        Ok(Valuation(Representation::Xor { bids }))
    }

    /// The identically-zero valuation over `m` items.
    pub fn zero(m: usize) -> Self {
        Valuation(Representation::Additive { values: vec![Amount::ZERO; m] })
    }

    pub fn representation(&self) -> &Representation {
        &self.0
    }

    pub fn evaluate(&self, s: ItemSet) -> Amount {
        match &self.0 {
            Representation::Table { values } => values[s.bits() as usize],
            Representation::SingleMinded { bundle, value } => {
                if bundle.is_subset(s) {
                    *value
                } else {
                    Amount::ZERO
                }
            }
            Representation::Additive { values } => s
                .items()
                .filter_map(|i| values.get(i))
                .sum(),
            Representation::Xor { bids } => bids
                .iter()
                .filter(|(bundle, _)| bundle.is_subset(s))
                .map(|(_, value)| *value)
                .max()
                .unwrap_or(Amount::ZERO),
        }
    }

    /// Whether every bundle this valuation mentions lies in `{0, .., m-1}`.
    pub fn fits(&self, m: usize) -> bool {
        let universe = ItemSet::full(m);
        match &self.0 {
            Representation::Table { values } => values.len() == 1 << m,
            Representation::SingleMinded { bundle, .. } => bundle.is_subset(universe),
            Representation::Additive { values } => values.len() <= m,
            Representation::Xor { bids } => bids.iter().all(|(b, _)| b.is_subset(universe)),
        }
    }

    /// Dense table of this valuation over `m` items.
    pub fn to_table(&self, m: usize) -> Vec<Amount> {
        ItemSet::full(m).subsets().map(|s| self.evaluate(s)).collect()
    }

    /// Atomic bids equivalent to this valuation under XOR semantics. Tables and
    /// additive valuations are exploded to one atom per non-empty bundle with a
    /// positive value; zero-valued atoms are dropped.
    pub fn atoms(&self, m: usize) -> Vec<(ItemSet, Amount)> {
        match &self.0 {
            Representation::SingleMinded { bundle, value } => {
                if *value > Amount::ZERO && !bundle.is_empty() {
                    vec![(*bundle, *value)]
                } else {
                    Vec::new()
                }
            }
            Representation::Xor { bids } => bids
                .iter()
                .filter(|(b, v)| *v > Amount::ZERO && !b.is_empty())
                .copied()
                .collect(),
            Representation::Table { .. } | Representation::Additive { .. } => ItemSet::full(m)
                .subsets()
                .skip(1)
                .map(|s| (s, self.evaluate(s)))
                .filter(|(_, v)| *v > Amount::ZERO)
                .collect(),
        }
    }

    /// Scales every value by a non-negative integer.
    pub fn scaled(&self, factor: i64) -> Result<Self> {
        if factor < 0 {
            return Err(Error::invalid("scale factor must be non-negative"));
        }
        let repr = match &self.0 {
            Representation::Table { values } => Representation::Table {
                values: values.iter().map(|v| *v * factor).collect(),
            },
            Representation::SingleMinded { bundle, value } => Representation::SingleMinded {
                bundle: *bundle,
                value: *value * factor,
            },
            Representation::Additive { values } => Representation::Additive {
                values: values.iter().map(|v| *v * factor).collect(),
            },
            Representation::Xor { bids } => Representation::Xor {
                bids: bids.iter().map(|(b, v)| (*b, *v * factor)).collect(),
            },
        };
        Ok(Valuation(repr))
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = Representation::deserialize(deserializer)?;
        let checked = match repr {
            Representation::Table { values } => Valuation::table(values),
            Representation::SingleMinded { bundle, value } => Valuation::single_minded(bundle, value),
            Representation::Additive { values } => Valuation::additive(values),
            Representation::Xor { bids } => Valuation::xor(bids),
        };
        checked.map_err(serde::de::Error::custom)
    }
}

/// Free-disposal closure of a raw table: `v'(s) = max_{t ⊆ s} table[t]`.
pub fn monotone_closure(table: &[Amount]) -> Result<Valuation> {
    let m = table_items(table.len())?;
    check_raw_table(table)?;
    let mut closed = table.to_vec();
    // Sweeping one item at a time propagates maxima over all subsets.
    for item in 0..m {
        let bit = 1usize << item;
        for s in 0..closed.len() {
            if s & bit != 0 {
                closed[s] = closed[s].max(closed[s ^ bit]);
            }
        }
    }
    Ok(Valuation(Representation::Table { values: closed }))
}

/// The lowest type: the zero valuation over `m` items.
pub fn lowest_type(m: usize) -> Valuation {
    Valuation::zero(m)
}

fn table_items(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::invalid(format!("table length {len} is not a power of two")));
    }
    let m = len.trailing_zeros() as usize;
    ItemSet::check_universe(m)?;
    Ok(m)
}

fn check_raw_table(values: &[Amount]) -> Result<()> {
    if values[0] != Amount::ZERO {
        return Err(Error::invalid("table[∅] must be 0"));
    }
    if let Some(pos) = values.iter().position(|v| v.is_negative()) {
        return Err(Error::invalid(format!("negative table entry at bundle {pos}")));
    }
    Ok(())
}
