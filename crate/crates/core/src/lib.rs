//! Path synthesis for grid labyrinths by intersection type inhabitation.
//!
//! - [`typesys`]: intersection types, organization into paths, subtyping.
//! - [`inhab`]: covering, tree grammar construction and term enumeration.
//! - [`maze`]: labyrinths, their encoding as combinator repositories,
//!   plan decoding, constraints and brute-force oracles.
//! - [`bridge`]: pub/sub lab service with a tick-based robot simulator and
//!   laser frame rendering.

pub mod bridge;
pub mod inhab;
pub mod maze;
pub mod typesys;
