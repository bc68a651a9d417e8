//! Random ensembles, the brute-force oracle, the end-to-end suite and
//! constant estimation.

mod constants;
mod ensemble;
mod oracle;
mod suite;

pub use constants::{
    constants_csv, constants_text, estimate_constants, interpolation_sample, random_unit_ball, ConstantRow,
    InterpolationSample,
};
pub use ensemble::{
    all_rectangles, generate, generate_one, mix, tiny_fixtures, EnsembleKind, EnsembleSpec, MAX_ENSEMBLE_LEVEL,
};
pub use oracle::{
    brute_force_oracle, check_against_main, OracleAgreement, OracleRecord, ORACLE_MAX_LEVEL, ORACLE_MAX_SUPPORT,
};
pub use suite::{
    aggregate_csv, aggregate_table, run_fixture, run_suite, summarize, Aggregate, Failure, FixtureRecord,
    PisierRecord, RunReport, SuiteConfig, REPORT_SCHEMA,
};
