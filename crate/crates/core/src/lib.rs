//! Matrix-valued passivity indices for linear time-invariant systems.
//!
//! The crate computes input-feedforward and output-feedback passivity
//! matrices (IFPM `Φ`, OFPM `Ξ`) from a linear matrix inequality, checks them
//! against the frequency-domain families `H(ω)` and `K(ω)`, composes them
//! through interconnection and stability conditions, and ships two worked
//! studies: feedback passivation of a 2×2 plant and stability-region
//! certification for a single-machine infinite-bus generator.
//!
//! Module map:
//!
//! * [`symmat`] dense symmetric/Hermitian kernel (eigen, Loewner order, inertia, Schur complements)
//! * [`lti`] state-space systems, frequency responses, structural tests, composition
//! * [`sdp`] small dense primal-dual interior-point SDP solver
//! * [`passivity`] LMI assembly, index computation, certificate verification
//! * [`interconnect`] certificate algebra for parallel/feedback loops and stability checks
//! * [`dissipop`] discretized dissipativity operator and its spectrum
//! * [`smib`] single-machine infinite-bus model and region sweeps
//! * [`report`] fixed-format number/CSV helpers shared with the CLI
//!
//! Data-parallel sweeps run on rayon when the `parallel` feature is enabled
//! (default) and fall back to plain iterators otherwise; see [`par`].

pub mod dissipop;
pub mod error;
pub mod interconnect;
pub mod lti;
pub mod par;
pub mod passivity;
pub mod report;
pub mod sdp;
pub mod smib;
pub mod symmat;

pub use error::{Error, Result};
pub use lti::{Frequency, FrequencyGrid, StateSpace};
pub use passivity::{CertificateKind, PassivityCertificate, Principle, Provenance};
pub use symmat::{HermitianMatrix, SymmetricMatrix};

/// Real dense matrix used throughout.
pub type Matrix = nalgebra::DMatrix<f64>;
/// Complex dense matrix used for frequency responses.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
pub use num_complex::Complex64;
