pub mod constants;
pub mod constructions;
pub mod error;
pub mod linalg;
pub mod sdp;
pub mod spectrahedra;
pub mod steering;

pub use constants::TauEstimate;
pub use constructions::{AnticommutingFamily, NetInequality, UnitaryNet, VlBound};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, HermitianMatrix, RandomStream, Spectrum, C64};
pub use sdp::{Feasibility, SdpProblem, SdpSolution, Settings, Status};
pub use spectrahedra::{InclusionResult, MatrixTuplePoint, SpectrahedronTuple};
pub use steering::{Assemblage, JmDecision, PovmCollection, SteeringInequality};
