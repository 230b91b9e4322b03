//! The determinant winding invariant of `Ψ_c^k`.

pub mod family;
pub mod output;
pub mod pipeline;
pub mod trivialize;
pub mod winding;

pub use family::{build_family, pushforward_family, theta_grid, validate_family, FamilyTolerances, LagrangianFamily};
pub use output::{loop_svg, write_loop_csv};
pub use pipeline::{radial_constraint_check, run_invariant, InvariantOptions, InvariantRun, LoopSummary};
pub use trivialize::{stabilize_and_trivialize, MatrixLoop};
pub use winding::{winding_number, WindingReport};
