//! Generated ground-truth instances, brute-force oracles, and the property
//! suite that checks the detectors against both.

mod oracle;
mod recipes;
mod suite;

pub use oracle::{oracle_density, oracle_dl};
pub use recipes::{generate_suite, random_levy_input, random_step_fn, Instance, RecipeKind};
pub use suite::{
    density_property_checks, levy_checks, run_suite, run_theorem_suite, CheckResult, CheckSummary, InstanceSummary,
    SuiteConfig, SuiteReport,
};
