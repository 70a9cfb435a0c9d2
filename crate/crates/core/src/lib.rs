//! Convex mixtures of Pauli semigroups.
//!
//! This crate models the single-qubit dynamical maps obtained by convexly
//! mixing the three Pauli dephasing semigroups, and everything needed to
//! study their (non-)Markovianity in software:
//!
//! * [`qmath`]: dense complex linear algebra and density-matrix primitives,
//! * [`channels`]: the semigroups, their mixtures, Kraus and transfer forms,
//! * [`divisibility`]: decay rates, CP-divisibility checks, classification,
//! * [`dilation`]: the two-ancilla circuit realizing a mixture unitarily,
//! * [`simulator`]: exact three-qubit simulation with synthetic measurement
//!   noise and tomographic reconstruction,
//! * [`estimation`]: recovery of the decoherence parameter and rate constant
//!   from reconstructed states.

pub mod channels;
pub mod dilation;
pub mod divisibility;
mod error;
pub mod estimation;
pub mod qmath;
pub mod simulator;

pub use channels::{
    DecoherenceFunction, KrausSet, MixingWeights, PauliAxis, PauliMixture, PauliTransferDiagonal,
    Preset,
};
pub use dilation::{AncillaUnitary, DilationCircuit, MixKind};
pub use divisibility::{CpCheck, DecayRates, MarkovClass, RateTrajectory, RateWitness, Verdict};
pub use error::{Error, Result};
pub use estimation::{FitResult, PEstimate};
pub use qmath::{BlochVector, ComplexMatrix, DensityMatrix, C64};
pub use simulator::{ExperimentPoint, MeasurementRecord, NoiseModel, TomographyResult};
