//! Exceptional points, eigenvalue braids and their reconstruction for a
//! three-band non-Hermitian Hamiltonian family.

pub mod braid;
pub mod dilation;
pub mod eps;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod model;
pub mod pipeline;
pub mod reconstruct;
pub mod spectral;

pub use braid::{BraidWord, Letter, Permutation};
pub use dilation::DilationBundle;
pub use eps::{EpLabel, EpOrder, EpRecord, EpTrajectory, Rect};
pub use error::{Error, Result};
pub use model::{Loop, ModelParams, PolyCoeffs};
pub use pipeline::{local_braid, loop_braid, LoopBraid};
pub use reconstruct::{GenericH, PopulationRatios, Reconstruction};
pub use spectral::{BandPath, CrossingEvent, PhaseSeries, Spectrum};
