//! Simulation and verification of single-shot logical state preparation on
//! alternating Tanner graph cluster states of CSS codes.

pub mod atg;
pub mod cluster;
pub mod code;
pub mod decoder;
pub mod error;
pub mod ghz;
pub mod gf2;
pub mod harness;
pub mod mbqc;
pub mod noise;
pub mod stabilizers;
pub mod tableau;

pub use error::{AtgError, Result};
