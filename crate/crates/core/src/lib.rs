// Indexed loops over Cayley tables double the index as an element, so
// the iterator rewrite clippy suggests obscures them.
#![allow(clippy::needless_range_loop)]

//! Group trellis sections and their coset machinery: splitting and
//! merging chains, the refinement and controllable matrices, generator
//! transversals, time-domain minimal encoders, the shift-register-bank
//! graph with its automorphism group, and expansion-class groups.
//! Everything is exhaustively verifiable at the small orders this crate
//! targets.

pub mod analysis;
pub mod cli;
pub mod encoder;
pub mod expansion;
pub mod fixtures;
pub mod generators;
pub mod group;
pub mod report;
pub mod schreier;
pub mod shiftbank;
pub mod trellis;

pub use analysis::{Analysis, AnalysisError};
pub use group::Chooser;
