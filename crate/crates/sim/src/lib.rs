//! Monte-Carlo BER harness for coded PAM transmission over ISI channels:
//! deterministic seeded sweeps across receiver configurations with
//! paper-style column data output.

pub mod config;
pub mod plot;
pub mod rng;
pub mod run;
pub mod selftest;

pub use config::{ChannelConfig, ReceiverKind, SimConfig, SimError};
pub use run::{run_point, run_sweep, wilson_interval, BerRecord};
