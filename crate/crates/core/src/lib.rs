//! Chromatic subdivisions, iterated immediate snapshot protocols, and their
//! specialization.
//!
//! The crate is organised bottom-up:
//!
//! - [`label`], [`complex`]: chromatic vertex labels and complexes.
//! - [`subdivision`]: Schlegel-diagram steps and towers `I → Ch^K I`.
//! - [`oracle`]: ordered-partition characterization of `Ch`, used as a cross-check.
//! - [`simulator`]: atomic single-writer registers, schedulers, exhaustive search.
//! - [`protocols`]: the write&scan / write&oblivious-scan step machines.
//! - [`tasks`]: task triples, the 3-process renaming instance, decision-map checks.
//! - [`optimizer`]: descendant sets, specialization tables, savings.
//! - [`verify`]: trace-level property checks and the verification suite.

pub mod complex;
pub mod error;
pub mod label;
pub mod optimizer;
pub mod oracle;
pub mod protocols;
pub mod simulator;
pub mod subdivision;
pub mod tasks;
pub mod verify;

pub use complex::{carrier_in_base, Complex, Simplex};
pub use error::{ComplexError, SimError, TaskError};
pub use label::{Color, Label};
pub use subdivision::{chromatic_subdivision, schlegel_simplex, schlegel_step, Position, Stage, StageId, Tower};
