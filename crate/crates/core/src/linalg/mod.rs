//! Sparse matrices, direct and iterative solvers, saddle-point preconditioning.

pub mod csr;
pub mod gmres;
pub mod lu;
pub mod pcd;
pub mod saddle;

pub use csr::{csr_from_triplets, CsrMatrix};
pub use gmres::{gmres, FnPreconditioner, GmresOptions, GmresResult, LinearOperator, Preconditioner};
pub use lu::{reverse_cuthill_mckee, sparse_lu_solve, SparseLu};
pub use saddle::SaddleSystem;
