//! Edifices of block subgroups `H ⊆ GL_n` over ℚ.
//!
//! Points of `V_H` are weighted flags `F(x)` of `ℚⁿ` that are split by a
//! basis in `H(ℚ)`. Two points are equal iff their weighted flags agree.

mod apartment;
mod group;
mod maps;
mod ops;
mod point;
mod subspace;

pub use apartment::{common_apartment, is_point_of, splitting_basis, SplittingBasis};
pub use group::{BlockGroupSpec, DetConstraint, DetValue, Entry};
pub use ops::{
    add, add_in, big_cell_factor, conjugacy_witness, geodesic, is_opposite, levi_of, levi_transporter,
    limit_map, opposite, parabolic_of, point_dist2, random_point, recover_lambda, same_type_gap, unip_of, ConjugacyResult,
    FlagStabilizer, StabilizerKind,
};
pub use maps::{include_map, preimage, project_f_pl, project_f_pl_via_limit, UnipotentQuotient};
pub use point::{act, equal_points, point_from_cochar, Cocharacter, EdificePoint, Level, WeightedFlag};
pub use subspace::{unit, Subspace};
