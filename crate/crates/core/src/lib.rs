//! Marked groups, the ultrametric on them, Cayley-ball convergence, verbal
//! subgroups and LEF witnesses.

pub mod caps;
pub mod cache;
pub mod error;
mod explore;
pub mod finite;
pub mod free;
pub mod lef;
pub mod marked;
pub mod topology;
pub mod verbal;
pub mod word;

pub use caps::Caps;
pub use error::{Error, Result};
pub use finite::FiniteGroup;
pub use free::{FreeWord, Letter};
pub use marked::{make_marked, ElementKey, GroupOracle, GroupSpec, MarkedGroup};

/// Version tag carried by every JSON document this crate emits.
pub const SCHEMA: &str = "mgl/1";
