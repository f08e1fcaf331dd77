//! Genuine multipartite entanglement detection with maps built from short
//! steps of an eternally non-Markovian qubit channel.
//!
//! The pieces, bottom up: dense complex matrices and a Hermitian
//! eigensolver ([`matcore`]), the channel and its step maps ([`lindblad`]),
//! state constructors and samplers ([`states`]), the detector itself
//! ([`gmedetect`]), file formats ([`io`]) and a seeded self-check
//! ([`verify`]).

pub mod error;
pub mod gmedetect;
pub mod io;
pub mod lindblad;
pub mod matcore;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use gmedetect::{detect_gme, phi_lambda, DetectionReport, EvolveMode, GmeMap, Verdict};
pub use lindblad::{MapParams, RateSchedule};
pub use matcore::{CMatrix, DensityMatrix, PureState, C64};
