//! Exact computations on the Enriques lattice `U ⊕ E8(-1)`: isotropic
//! enumeration, the invariants φ and μ, generic gonality, witness
//! decompositions and a brute-force cross-check.

pub mod constructions;
pub mod decompose;
pub mod enumerate;
pub mod error;
pub mod invariants;
pub mod lattice;
pub mod linalg;
pub mod lll;
pub mod oracle;
pub mod verify;

pub use enumerate::{enumerate, enumerate_with, AnchorFrame, EnumQuery, EnumResult};
pub use error::{Error, Result};
pub use lattice::{EnriquesLattice, LatticeClass, RANK};
