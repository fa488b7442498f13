//! Experiment harness around `ringvcs-core`: campaigns over node counts
//! and seeds, CSV output, plot data and offset-table tooling.

pub mod campaign;
pub mod error;
pub mod plan;
pub mod plots;
pub mod tables;
pub mod trend;

pub use campaign::{run_campaign, CampaignSummary, ModelSummary, RunFailure};
pub use error::{HarnessError, Result};
pub use plan::{run_seed, ExperimentPlan, PlanArgs};
pub use plots::emit_plots;
pub use trend::{density_trend, TrendFit};
