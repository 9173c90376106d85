//! Linear finite element primitives on triangulations.

mod assembly;
mod norms;
mod quadrature;

pub use assembly::{
    basis_gradients, boundary_edge_integral, boundary_integral, element_gradient, interpolate,
    load_vector, mass_matrix, stiffness_matrix,
};
pub(crate) use norms::{difference_norms, RecoveredFields};
pub use norms::{error_norms, l2_norm, ErrorNorms, ExactField};
pub use quadrature::{
    barycentric_point, edge_rule, triangle_rule, EdgeRule, Quadrature, TriangleRule,
};
