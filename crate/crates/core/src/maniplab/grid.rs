use crate::error::{Error, Result};
use crate::model::{Amount, ItemSet, TypeProfile, Valuation};

/// Candidate declarations per agent; profiles are their Cartesian product,
/// indexed in mixed radix with agent 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct DeclarationGrid {
    items: usize,
    per_agent: Vec<Vec<Valuation>>,
}

impl DeclarationGrid {
    pub fn new(items: usize, per_agent: Vec<Vec<Valuation>>) -> Result<Self> {
        if per_agent.is_empty() || per_agent.iter().any(Vec::is_empty) {
            return Err(Error::invalid("every agent needs at least one candidate declaration"));
        }
        if per_agent.iter().flatten().any(|v| !v.fits(items)) {
            return Err(Error::invalid("a candidate declaration mentions items outside the universe"));
        }
        Ok(DeclarationGrid { items, per_agent })
    }

    pub fn uniform(items: usize, agents: usize, candidates: Vec<Valuation>) -> Result<Self> {
        DeclarationGrid::new(items, vec![candidates; agents])
    }

    /// All monotone tables with `v(∅) = 0` and entries from `values`.
    pub fn monotone_tables(items: usize, agents: usize, values: &[Amount]) -> Result<Self> {
        DeclarationGrid::uniform(items, agents, monotone_tables(items, values)?)
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn agents(&self) -> usize {
        self.per_agent.len()
    }

    pub fn candidates(&self, agent: usize) -> &[Valuation] {
        &self.per_agent[agent]
    }

    /// Number of profiles, or `None` on overflow.
    pub fn profile_count(&self) -> Option<usize> {
        self.per_agent.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len()))
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.agents()];
        for (i, c) in self.per_agent.iter().enumerate().rev() {
            digits[i] = index % c.len();
            index /= c.len();
        }
        digits
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.per_agent).fold(0, |acc, (&d, c)| acc * c.len() + d)
    }

    pub fn profile(&self, index: usize) -> TypeProfile {
        let vals = self.digits(index).iter().enumerate().map(|(i, &d)| self.per_agent[i][d].clone()).collect();
        TypeProfile::new(self.items, vals).expect("grid members fit the universe")
    }
}

/// Monotone tables over `items` items with `v(∅) = 0` and every other entry
/// drawn from `values`, in lexicographic order of their entry vectors.
pub fn monotone_tables(items: usize, values: &[Amount]) -> Result<Vec<Valuation>> {
    let mut values = values.to_vec();
    values.sort();
    values.dedup();
    if items > 4 {
        return Err(Error::resource("items in a monotone table grid", 4));
    }
    let size = 1usize << items;
    let mut out = Vec::new();
    let mut table = vec![Amount::ZERO; size];
    fill(1, &mut table, &values, &mut out)?;
    Ok(out)
}

fn fill(s: usize, table: &mut Vec<Amount>, values: &[Amount], out: &mut Vec<Valuation>) -> Result<()> {
    if s == table.len() {
        out.push(Valuation::table(table.clone())?);
        return Ok(());
    }
    let set = ItemSet::from_bits(s as u32);
    let floor = set.items().map(|i| table[set.without(i).bits() as usize]).max().unwrap_or(Amount::ZERO);
    for &x in values.iter().filter(|&&x| x >= floor) {
        table[s] = x;
        fill(s + 1, table, values, out)?;
    }
    Ok(())
}
