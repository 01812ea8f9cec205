//! Private information retrieval from distributed storage encoded with arbitrary
//! linear codes: finite-field and code machinery, rate matrices, three retrieval
//! protocols, a rate optimizer, and a simulated storage harness.

pub mod code;
pub mod dss;
pub mod field;
pub mod fixtures;
pub mod harness;
pub mod known;
pub mod matrix;
pub mod optimizer;
pub mod protocol1;
pub mod protocol2;
pub mod protocol3;
pub mod rate;
pub mod rng;
pub mod zoo;

pub use dss::{Dss, DssError};
pub use code::{CodeError, ErasurePattern, LinearCode};
pub use field::{Field, FieldElement, FieldError};
pub use matrix::{Matrix, MatrixError, MatrixJson};
pub use rate::{BinMatrix, ErasureMatrix, RateError, RateMatrix, Rational};
pub use zoo::{CodeSpec, LrcParams, ZooError};
