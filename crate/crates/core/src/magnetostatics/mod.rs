//! Finite-device magnetostatics by superposition of uniformly magnetized prisms.

mod lattice;
mod prism;

pub use lattice::{
    build_hole_array, evaluate_finite, FiniteLattice, FiniteLatticeSpec, VectorSample,
};
pub use prism::{prism_field, PrismSpec, SURFACE_CLEARANCE};
