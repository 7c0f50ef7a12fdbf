//! Batch front end for the hannay-core laboratory: scenario runs, slowness sweeps and verification suites.

pub mod run;
pub mod scenario;
pub mod svg;
pub mod sweep;
pub mod verify;

pub use run::{execute, write_artifacts, RunOutput, RunSummary};
pub use scenario::{Analysis, SchemaError, Scenario};
pub use sweep::{sweep, SweepTable};
pub use verify::{render_table, verify, Check, Suite};
