//! Small dense semidefinite programs over block-diagonal real PSD cones.

mod feasibility;
mod ipm;
mod problem;

pub use feasibility::{feasibility, Feasibility, DEFAULT_MARGIN};
pub use ipm::{solve, IterateRecord, SdpSolution, Settings, Status};
pub use problem::{decode_hermitian, SdpProblem, SdpProblemJson, SymBlockMatrix};
