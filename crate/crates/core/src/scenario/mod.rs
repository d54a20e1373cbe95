//! Scenario files, batch runs and report emission.
//!
//! A scenario names a family, a tolerance and an ordered list of checks.
//! [`run`] executes them and returns a [`RunReport`]; [`emit`] writes it as
//! JSON, CSV or both. All report content is deterministic for a fixed
//! config except the `timing` key.

mod config;
mod emit;
mod report;
mod run;

pub use config::{
    BoundsConfig, CheckKind, FamilySpec, GridConfig, LadderSpec, OutputConfig, OutputFormat, PairsConfig, SamplerConfig,
    ScenarioConfig, WitnessConfig, INLINE_FAMILY,
};
pub use emit::{emit, format_float, parse_report, strip_timing, to_json_string, value_to_json, write_csv};
pub use report::{CheckOutcome, CheckResult, CheckStatus, RunReport, Summary, Timing, WitnessEntry};
pub use run::{run, TOOL_NAME, TOOL_VERSION};
