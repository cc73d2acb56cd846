//! Random generators, JSON formats and the property-suite runner.

pub mod generate;
pub mod json;
pub mod suite;

pub use generate::{gen_haar_unitary, gen_hermitian, gen_projection, Sampler};
pub use suite::{run_suite, run_suite_with, Hooks, SuiteConfig, SuiteReport};
