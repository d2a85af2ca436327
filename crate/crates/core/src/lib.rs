//! Exact finite-stage arithmetic for compact-group actions on AF and AT
//! algebras: block algebras and multiplicity maps, fixed-point algebras of
//! inner actions, trace certificates, orbit density, and module invariants
//! over the representation ring of the circle.

pub mod error;
pub mod fixed_point;
pub mod linalg;
pub mod orbit;
pub mod rep_ring;
pub mod scenario;
pub mod serde_num;
pub mod system;
pub mod trace;

pub use error::{Error, Result};
