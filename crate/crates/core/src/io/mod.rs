//! JSON instance formats and report rendering.
//!
//! Amounts are read in currency units, either as JSON numbers or as decimal
//! strings with at most six fractional digits. Bundles are item bitmasks.
//! Reports print amounts both in micro-units and in decimal units.

mod input;
pub mod render;

pub use input::{
    build_range, parse_actions, parse_cmap, parse_profile, read_text, AuctionInstance, Units, WireAction, WireActions,
    WireAgent, WireAppeal, WireBid, WireCmap, WireEdge, WireProfile, WireTableEntry, WireValuation,
};

#[cfg(test)]
mod tests;
