use thiserror::Error;

/// Raised when a charge would push a meter past its budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("step budget exhausted")]
pub struct Exhausted;

/// Counts abstract computation steps against a budget `T`.
///
/// One step is charged per valuation evaluation and per allocation-algorithm
/// invocation performed while evaluating an appeal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepMeter {
    budget: u64,
    consumed: u64,
}

impl StepMeter {
    pub fn new(budget: u64) -> Self {
        StepMeter { budget, consumed: 0 }
    }

    /// A meter that never runs out, for measuring costs.
    pub fn unlimited() -> Self {
        StepMeter::new(u64::MAX)
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    pub fn remaining(&self) -> u64 {
        self.budget - self.consumed
    }

    /// Consumes `steps`, or fails without consuming anything.
    pub fn charge(&mut self, steps: u64) -> Result<(), Exhausted> {
        match self.consumed.checked_add(steps) {
            Some(total) if total <= self.budget => {
                self.consumed = total;
                Ok(())
            }
            _ => Err(Exhausted),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn never_exceeds_budget() {
        let mut m = StepMeter::new(3);
        assert!(m.charge(2).is_ok());
        assert_eq!(m.charge(2), Err(Exhausted));
        assert_eq!(m.consumed(), 2);
        assert!(m.charge(1).is_ok());
        assert_eq!(m.remaining(), 0);
        assert!(m.charge(0).is_ok());
        assert_eq!(m.charge(1), Err(Exhausted));
    }
}
