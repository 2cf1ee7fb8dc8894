use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::allocation::Allocation;
use super::currency::Amount;
use super::profile::TypeProfile;
use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// A strictly positive rational agent weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weight {
    pub num: i64,
    pub den: i64,
}

impl Weight {
    pub const ONE: Weight = Weight { num: 1, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if num <= 0 || den <= 0 {
            return Err(Error::invalid(format!("weight {num}/{den} is not strictly positive")));
        }
        Ok(Weight { num, den })
    }

    pub fn integer(w: i64) -> Result<Self> {
        Weight::new(w, 1)
    }

    pub fn ratio(self) -> Rational {
        Rational::new(self.num as i128, self.den as i128)
    }
}

/// The mechanism's own preference over outputs (`a_0`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AllocationBonus {
    #[default]
    Zero,
    Constant { value: Amount },
    /// Listed allocations get their value; all others get zero.
    Table { entries: Vec<(Allocation, Amount)> },
}

impl AllocationBonus {
    pub fn value(&self, alloc: &Allocation) -> Amount {
        match self {
            AllocationBonus::Zero => Amount::ZERO,
            AllocationBonus::Constant { value } => *value,
            AllocationBonus::Table { entries } => entries
                .iter()
                .find(|(a, _)| a == alloc)
                .map(|(_, v)| *v)
                .unwrap_or(Amount::ZERO),
        }
    }
}

/// `a = (a_0, a_1, .., a_n)` for affine maximization.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineWeights {
    pub bonus: AllocationBonus,
    weights: Vec<Weight>,
}

impl AffineWeights {
    pub fn new(bonus: AllocationBonus, weights: Vec<Weight>) -> Result<Self> {
        for w in &weights {
            Weight::new(w.num, w.den)?;
        }
        Ok(AffineWeights { bonus, weights })
    }

    /// `a_0 ≡ 0`, every `a_i = 1`.
    pub fn unit(n: usize) -> Self {
        AffineWeights { bonus: AllocationBonus::Zero, weights: vec![Weight::ONE; n] }
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn weight(&self, agent: usize) -> Weight {
        self.weights[agent]
    }

    pub fn agents(&self) -> usize {
        self.weights.len()
    }

    pub(crate) fn check_arity(&self, profile: &TypeProfile) -> Result<()> {
        if self.weights.len() != profile.agents() {
            return Err(Error::invalid(format!(
                "{} weights for {} agents",
                self.weights.len(),
                profile.agents()
            )));
        }
        Ok(())
    }
}

/// `g_a(w, o)` as an exact rational number of micro-units.
pub fn weighted_welfare_exact(a: &AffineWeights, profile: &TypeProfile, alloc: &Allocation) -> Result<Rational> {
    a.check_arity(profile)?;
    profile.check_allocation(alloc)?;
    Ok(weighted_sum(a, profile, alloc, None))
}

/// `a_0(o) + Σ_{i>0} a_i w^i(o)`, optionally skipping one agent.
pub(crate) fn weighted_sum(a: &AffineWeights, profile: &TypeProfile, alloc: &Allocation, skip: Option<usize>) -> Rational {
    let mut total = Rational::from_integer(a.bonus.value(alloc).micros() as i128);
    for (agent, (v, w)) in profile.valuations().iter().zip(&a.weights).enumerate() {
        if Some(agent) == skip {
            continue;
        }
        total += w.ratio() * Rational::from_integer(v.evaluate(alloc.bundle(agent)).micros() as i128);
    }
    total
}

/// `g_a(w, o)`; rejects weights whose products do not land on whole micro-units.
pub fn weighted_welfare(a: &AffineWeights, profile: &TypeProfile, alloc: &Allocation) -> Result<Amount> {
    to_amount(weighted_welfare_exact(a, profile, alloc)?)
}

/// Serializes an exact rational as `"num/den"`, or `"num"` when integral.
pub fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

pub(crate) fn to_amount(r: Rational) -> Result<Amount> {
    if !r.is_integer() {
        return Err(Error::invalid(format!("{r} micro-units is not a whole number of micro-units")));
    }
    let v = r.to_integer();
    i64::try_from(v)
        .map(Amount::from_micros)
        .map_err(|_| Error::invalid("amount overflows 64 bits"))
}
