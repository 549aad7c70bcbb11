//! Nozzle geometry and triangular meshes of the axisymmetric half-domain.

pub mod generate;
pub mod locate;
pub mod mesh;
pub mod profile;
pub mod structured;

pub use generate::{generate_axisym_mesh, generate_axisym_mesh_seeded, min_angle_deg, Sizing};
pub use locate::{Location, PointLocator};
pub use mesh::{mesh_stats, refine_uniform, AxisymMesh, BoundaryEdge, MeshStats};
pub use profile::{build_nozzle_profile, BoundaryTag, Domain, NozzleDims, NozzleProfile, Region};
pub use structured::rectangle_mesh;
