//! Joint spectra of linear codes over prime fields.
//!
//! Types, ambient and joint spectra, generating functions, code ensembles
//! (random linear, repetition, check, LDGM and serial concatenations), their
//! closed-form expected spectra and bounds, and seeded Monte Carlo
//! estimators that cross-check the closed forms.

pub mod analysis;
pub mod code;
pub mod error;
pub mod ensemble;
pub mod field;
pub mod genfun;
pub mod montecarlo;
pub mod numeric;
pub mod rng;
pub mod seq;
pub mod spectrum;
pub mod types;
pub mod verify;

pub use code::{Interleaver, LdgmSample, LinearCodeMatrix};
pub use ensemble::{EnsembleKind, EnsembleSpec};
pub use error::{Error, Result};
pub use field::{FieldMatrix, FieldSpec};
pub use genfun::GenPoly;
pub use seq::{EnumLimits, SeqMap, TableMap};
pub use spectrum::{CondSpectrum, JointSpectrum, Spectrum};
pub use types::TypeVector;
pub use analysis::{BoundReport, BoundValue, DeltaDParams, ExpectedChkSpectrum};
pub use montecarlo::McEstimate;
