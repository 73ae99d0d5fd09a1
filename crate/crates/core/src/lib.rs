//! Logical entropy `h(ρ) = 1 - tr(ρ²)` for finite-dimensional quantum
//! states and channels, with checkers for its behaviour under measurement,
//! mixing, purification and system/environment couplings.

pub mod channel;
pub mod classical;
pub mod error;
pub mod fuzz;
pub mod linalg;
pub mod measurement;
pub mod mixing;
pub mod state;
pub mod zoo;

pub use channel::{CouplingModel, ExchangeReport, KrausSet, TheoremReport};
pub use classical::{Distribution, Partition};
pub use error::{Error, Result};
pub use linalg::{Complex, ComplexMatrix, Subsystem};
pub use measurement::ProjectorSet;
pub use mixing::Ensemble;
pub use state::{DensityMatrix, PureState};
