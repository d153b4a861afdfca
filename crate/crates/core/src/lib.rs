//! Finite cycle sets, their permutation braces, and twisted extensions.

pub mod brace;
pub mod classify;
pub mod cli;
pub mod cycle_set;
pub mod extension;
pub mod group;
pub mod iso;
pub mod modular;
pub mod oracle;
pub mod perm;
pub mod report;
pub mod structure;

pub use cycle_set::{CycleSet, CycleSetError, Solution};
pub use perm::Permutation;
pub use report::{Report, Status};
