//! Simplex-averaged finite elements (SAFE) for convection-diffusion problems
//! posed in `H(grad)`, `H(curl)` and `H(div)` on simplicial meshes of the
//! unit square and unit cube.
//!
//! The crate is organised bottom-up:
//!
//! - [`mesh`]: structured simplicial complexes with oriented sub-simplex tables.
//! - [`whitney`]: the lowest-order Whitney spaces (Lagrange, Nedelec,
//!   Raviart-Thomas, piecewise constants), their degrees of freedom,
//!   interpolation and incidence matrices.
//! - [`exponential`]: exponential averages, the simplex-averaged operator,
//!   the fitted flux operator and the Bernoulli kernels with their
//!   vanishing-diffusion limits.
//! - [`assembly`]: graph-Laplacian weights, SAFE element matrices (Bernoulli
//!   route and operator route), global assembly and boundary conditions.
//! - [`solver`]: sparse direct and iterative solves.
//! - [`verify`]: manufactured solutions, error norms and convergence studies.
//! - [`cli`]: the batch front-end used by the `safe` binary.
//!
//! ```no_run
//! use safe_fem::verify::{builtin_case, run_convergence, CaseParams};
//!
//! let case = builtin_case("div2d", &CaseParams::default()).unwrap();
//! let report = run_convergence(&case, &[4, 8, 16]).unwrap();
//! print!("{}", report.to_csv());
//! ```

pub mod assembly;
pub mod cli;
pub mod error;
pub mod exponential;
pub mod field;
pub mod mesh;
pub mod quadrature;
pub mod solver;
pub mod sparse;
pub mod verify;
pub mod vtk;
pub mod whitney;

pub use error::{Error, Result};
pub use mesh::{build_unit_cube_mesh, build_unit_square_mesh, CellGeometry, Diagonal, MeshComplex, Point};
pub use whitney::Space;
