//! Finite-dimensional toolkit for bipartite entanglement: the PPT test,
//! Choi–Jamiołkowski duality, Kraus/Stinespring/Naimark dilations, a
//! commutative-image separability certificate, and time-orientation checks
//! on Jordan and C*-homomorphisms.

pub mod channels;
pub mod error;
pub mod linmap;
pub mod mat;
pub mod orientation;
pub mod separability;
pub mod states;

pub use error::{QtError, Result};
pub use channels::{Channel, CommutativeDilation, HolevoForm, KrausSet, NaimarkDilation, StinespringDilation};
pub use linmap::{Domain, LinearMapOnAlgebra};
pub use orientation::{DualOrientationReport, OrientationReport, Sign, TimeOrientation};
pub use mat::{ComplexMatrix, HermEigen, RngStream, Subsystem, C64};
pub use separability::{PptReport, SeparabilityCertificate, SeparabilityReport, Verdict};
pub use states::{BipartiteState, SchmidtDecomposition, SeparableDecomposition};
