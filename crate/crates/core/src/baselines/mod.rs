//! Incremental baselines used for comparison.

pub mod kdb;
pub mod kwcc;

pub use kdb::{kdb_update, kdb_update_counted, kdb_update_with, KdbState};
pub use kwcc::{kwcc_update, kwcc_update_counted, kwcc_update_with};
