//! Batch driver for the nctori verifiers: campaign configs, seeded corpora,
//! parallel execution and JSON/CSV reports.

pub mod campaign;
pub mod config;
pub mod error;
pub mod report;

pub use campaign::{run, Campaign, Overrides, VerificationReport};
pub use config::{CampaignConfig, GeneratorSpec, InstanceSource, Suite};
pub use error::{CliError, CliResult};
