//! Domain types and welfare arithmetic shared by every mechanism.

mod affine;
mod allocation;
mod currency;
mod items;
mod profile;
mod valuation;

pub use affine::{serialize_rational, weighted_welfare, weighted_welfare_exact, AffineWeights, AllocationBonus, Rational, Weight};
pub(crate) use affine::{to_amount, weighted_sum};
pub use allocation::Allocation;
pub use currency::{Amount, MICROS_PER_UNIT};
pub use items::{ItemSet, MAX_ITEMS};
pub(crate) use profile::{others_welfare, welfare_unchecked};
pub use profile::{welfare, TypeProfile};
pub use valuation::{lowest_type, monotone_closure, Representation, Valuation};
