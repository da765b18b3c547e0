//! Command-line driver for buildings-lab-core: result cache, run manifests,
//! tabular output and the verification suites.

pub mod apartments;
pub mod cache;
pub mod cli;
pub mod lifting;
pub mod manifest;
pub mod suites;
pub mod tables;

pub use cache::{Cache, ComplexRequest, ComplexSummary};
pub use manifest::RunManifest;
pub use suites::{run_suite, SuiteConfig, SuiteName, SuiteReport};
