//! Mechanism-design laboratory for combinatorial auctions and
//! cost-minimization allocation problems.
//!
//! The crate provides VCG-based, affine-based and second chance mechanisms
//! over exact integer currency, winner-determination algorithms, and
//! exhaustive search tools for manipulation, maximal-in-range and
//! reasonableness analysis.

pub mod cli;
pub mod cmap;
pub mod error;
pub mod io;
pub mod maniplab;
pub mod model;
pub mod payments;
pub mod second_chance;
pub mod wd;

pub use error::{Error, Result};
