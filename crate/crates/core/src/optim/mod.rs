//! Adam training loop with seeded batching and best-loss checkpointing.

mod adam;
mod config;
mod train;

pub use adam::{adam_step, OptimizerState};
pub use config::TrainingConfig;
pub use train::{train, write_history_csv, Evaluation, HistoryRow, TrainOutcome, TrainStatus, LOG_EVERY};
