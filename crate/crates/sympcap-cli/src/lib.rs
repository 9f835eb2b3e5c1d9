//! Harness around the sympcap library: body loading, the bounds, axiom
//! and rotated-cube suite drivers, and stable CSV/JSON report emission.
//!
//! Everything callable from the binary lives here so integration tests can
//! drive the same code paths without spawning processes.

pub mod load;
pub mod report;
pub mod suite;

pub use load::{load_body_spec, parse_body_spec, preset, resolve_body, LoadError};
pub use report::{all_certified, emit_report, BoundsReport, Check, Format, StageTimes, CSV_HEADER};
pub use suite::{
    default_suite, full_suite, run_axiom_suite, run_rotated_cube_suite, run_sandwich_suite,
    AxiomReport, BodyCase, RotatedCubeReport, SuiteConfig, SuiteOutcome,
};
