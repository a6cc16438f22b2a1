//! Vector edifices of split linear algebraic groups, computed exactly.
//!
//! The crate is organised bottom-up: [`lattice`] supplies exact scalars and
//! the LP/QP kernels, [`apartment`] models one apartment combinatorially,
//! [`metrics`] builds admissible metrics, [`gl`] realises points of `V_H(ℚ)`
//! as weighted flags for block subgroups `H ⊆ GL_n`, and [`kempf`] covers
//! destabilising cocharacters of linear torus actions.

pub mod error;
pub mod lattice;
pub mod apartment;
pub mod metrics;
pub mod gl;
pub mod io;
pub mod kempf;
