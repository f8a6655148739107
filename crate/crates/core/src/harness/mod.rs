//! Experiment orchestration: configs, seeded Monte-Carlo trials,
//! sample-complexity search, privacy audits and reports.

mod audit;
mod complexity;
mod config;
mod report;
mod trials;

pub use audit::{audit_frequencies, privacy_audit, AuditMechanism, AuditReport};
pub use complexity::{exponent_fit, sample_complexity_search, ExponentFit, GridPoint, SearchOptions, SearchResult};
pub use config::{load_distribution, save_distribution, DistributionRef, Estimator, EstimatorId, ExperimentConfig};
pub use report::{emit_report, read_csv, read_jsonl, write_csv, write_jsonl, ReportFormat, CSV_HEADER, SCHEMA_VERSION};
pub use trials::{bonferroni_z, run_trials, wilson_interval, SuccessSummary, TrialRecord};
