//! Sentential decision diagrams with Dalal belief revision computed directly
//! on the compiled circuits.
//!
//! The crate is organised bottom-up:
//!
//! * [`propcore`]: formulas, model sets and the enumeration oracle.
//! * [`vtree`]: variable trees that fix how every diagram decomposes.
//! * [`sdd`]: the canonical diagram store (`apply`, counting, conditioning,
//!   editable copies for local rewrites, text I/O).
//! * [`compile`]: DIMACS/DNF parsing and bottom-up compilation.
//! * [`revision`]: semi-resolvents on diagrams, relaxation and revision.
//! * [`bench`]: the random 3-CNF size experiment.

pub mod bench;
pub mod compile;
mod error;
pub mod propcore;
pub mod revision;
pub mod sdd;
pub mod vtree;

pub use error::{Error, Result};
