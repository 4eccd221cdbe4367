//! Field models, trap-site search and single-particle trap physics for
//! permanent-magnet atom-chip lattices.
//!
//! Two field models are provided: a closed-form magnitude above an infinite
//! square lattice of holes ([`field::InfiniteLattice`]) and an exact
//! superposition of magnetized prisms for a finite hole-array device
//! ([`magnetostatics::FiniteLattice`]). Both feed the same trap analysis
//! ([`trap`]), atom physics ([`atom`]) and bias sweeps ([`sweep`]).

pub mod atom;
pub mod constants;
pub mod field;
pub mod magnetostatics;
pub mod model;
pub mod numeric;
pub mod sweep;
pub mod trap;

/// A position in metres.
pub type Point = nalgebra::Vector3<f64>;

pub use field::{BiasField, FieldModel, FieldValue};
pub use model::LatticeModel;
