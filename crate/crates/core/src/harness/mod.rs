//! Study runs, reports, plots, batch summaries and simulations.

pub mod batch;
pub mod config;
pub mod emit;
pub mod load;
pub mod plot;
pub mod report;
pub mod sim;
pub mod study;

pub use batch::{batch_summarize, BatchSummary, Panel};
pub use config::{StudyConfig, StudyDesign};
pub use emit::{emit_outputs, EmitPaths};
pub use load::{load_dataset, load_from_reader, LoadedData};
pub use report::{DiagnosticsReport, Section, SectionError, SCHEMA};
pub use sim::{monte_carlo, SimSpec, SimSummary};
pub use study::{run_study, run_study_on};
