//! Qubit channel representations, the measure of decoherence, a dense
//! density-matrix simulator for measurement-free error-correction circuits,
//! polynomial fitting of corrected error curves and a silicon double-dot
//! phonon model.

pub mod channel;
pub mod circuit;
pub mod codes;
pub mod decoherence;
pub mod dqd;
pub mod error;
pub mod linalg;
pub mod noise;
pub mod quadrature;
pub mod sweep;

pub use channel::{
    apply_channel, apply_chi, chi_to_choi, choi_to_chi, kraus_to_chi, maximally_entangled,
    verify_cptp, ChiMatrix, ChiParams, ChoiState, CptpReport, DensityMatrix, KrausChannel, Pauli,
    PauliBasis, Supervector,
};
pub use circuit::{Circuit, Gate, MultiQubitState, NoiseModel};
pub use codes::{simulate_choi, CodeName, QecCode};
pub use decoherence::{
    measure, measure_by_definition, measure_diagonal, measure_general, measure_quadratic,
};
pub use dqd::{DqdConfig, DqdParams, QuadratureConfig};
pub use error::{Error, Result};
pub use noise::{from_calibrated_p, NoiseKind, NoiseSpec};
pub use sweep::{break_even, fit_poly, sweep, BreakEven, PolyCoeffs};
