//! Exhaustive strategic analysis: manipulation search, grid truthfulness
//! certification, and canned counterexamples.

mod demos;
mod grid;
mod mechanism;
mod search;

pub use demos::{
    alice_grid, covering_partitions, demo_nonoptimal_vickrey, demo_nonreasonable, vickrey_profile, NonreasonableDemo,
    NonresProfileKind, VickreyDemo, ALICE, BOB,
};
pub use grid::{monotone_tables, DeclarationGrid};
pub use mechanism::Mechanism;
pub use search::{
    certify_truthful_on_grid, certify_with_limit, find_manipulation, random_replay, ManipulationWitness,
    CERTIFY_MAX_PROFILES,
};
