//! Taylor-Hood finite elements for the axisymmetric equations.

pub mod assembly;
pub mod dirichlet;
pub mod field;
pub mod quadrature;
pub mod reference;
pub mod space;

pub use assembly::{
    assemble_boundary_traction, assemble_convection, assemble_divergence_block, assemble_load, assemble_mass,
    assemble_pressure_boundary_flux, assemble_pressure_operator, assemble_viscous_block, MassKind,
};
pub use dirichlet::{apply_dirichlet, constraint_map};
pub use field::{evaluate_field, Field, PointValue};
pub use quadrature::{quadrature_rule, QuadratureRule};
pub use reference::{reference_basis_eval, BasisValues, ReferenceElement};
pub use space::{build_dof_map, DofMap, FunctionSpace};
