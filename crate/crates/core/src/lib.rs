//! Non-Hermitian tridiagonal chains whose whole spectrum coalesces in pairs.
//!
//! * [`chain`]: specs, family builders, symmetry checks.
//! * [`charpoly`]: minor recurrences, transfer matrices, coalescence certificates.
//! * [`eig`]: eigenvalues, right eigenvectors, distinct-eigenvalue counting.
//! * [`nonortho`]: overlap matrices and the `f1`/`f2` non-orthogonality measures.
//! * [`dynamics`]: time evolution and norm loss.
//! * [`sweep`]: one-parameter families and parallel grid evaluation.

// `is_multiple_of` is newer than the declared rust-version.
#![allow(clippy::manual_is_multiple_of)]

pub mod chain;
pub mod charpoly;
pub mod dense;
pub mod dynamics;
pub mod eig;
pub mod error;
pub mod nonortho;
pub mod sweep;

pub type C64 = num_complex::Complex64;

pub use chain::{
    build, check_symmetry, family_a, family_b, family_c, family_d, legacy, pc_delta, random_spec, Branch, CentralBlock,
    ChainSpec, SpecMeta, SymmetryKind, SymmetryReport, TridiagonalMatrix, Violation,
};
pub use charpoly::{
    charpoly_oracle, principal_minors, square_factor, transfer_a, transfer_t, verify_at_relation, verify_pc,
    verify_power, CertMode, PcCertificate, PcInput, Poly, Tolerances, TransferMatrix,
};
pub use dynamics::{
    approx_norm, evolve, gaussian_packet, min_norm_gamma, norm_trace, uniform_eigen, uniform_site, InitialState,
    MinNormOptions, MinNormResult, NormTrace, StateVector,
};
pub use eig::{cluster, distinct_count, eigenvalues, eigenvector_for, Cluster, Precision, Spectrum, DISTINCT_TOL};
pub use error::{Error, Result};
pub use nonortho::{f1, f2, overlap_matrix, sweep_nonortho, NonorthoRow, OverlapMatrix};
pub use sweep::{Family, Grid};
