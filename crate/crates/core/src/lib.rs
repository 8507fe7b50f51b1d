//! Joint analog beam selection and digital precoding for downlink mm-wave
//! cell-free massive MIMO.
//!
//! - [`scenario`]: network configuration, channel realizations, DFT codebooks
//! - [`precode`]: effective channels, ZF/MMSE precoders, SINR and rate metrics
//! - [`search`]: exhaustive, semilinear, linear, prioritized and disjoint
//!   beam searches under optional beam conflict control
//! - [`rfadapt`]: RF-chain shutoff policies
//! - [`harness`]: Monte Carlo experiments, dataset export, assignment scoring

pub mod error;
pub mod harness;
pub mod precode;
pub mod rfadapt;
pub mod scenario;
pub mod search;
pub mod seed;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use precode::{ActiveMask, BeamAssignment, MetricsReport, PrecoderKind};
pub use scenario::{ChannelRealization, Codebook, NetworkConfig};
pub use search::{Algorithm, BccMode, Metric, SearchOutcome, SearchSettings};
