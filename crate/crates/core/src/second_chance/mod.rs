//! The second chance mechanism, appeals, revision functions, and the
//! feasibly truthful action constructions.

mod appeal;
mod construct;
mod mechanism;
mod meter;
mod revision;

pub use appeal::{Action, Appeal, BestOf, HostAppeal, HostAppealFn};
pub use construct::{
    build_d_bounded_appeal, build_feasibly_truthful_appeal, check_feasibly_dominant, lifted_family,
    FeasiblyTruthfulAppeal, RegretWitness,
};
pub use mechanism::{
    declarations, lowest_type_closure, run_second_chance, run_second_chance_ir, second_chance_utility, AppealRecord,
    AppealStatus, Candidate, SecondChanceRun,
};
pub use meter::{Exhausted, StepMeter};
pub use revision::{insert_own, opponents_of, DBound, RevisionEntry, RevisionFunction};
