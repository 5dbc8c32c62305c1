//! Benchmark harness: plays matchups between team systems, computes
//! points/sabotage/difference/win-rate metrics against calibrated
//! baselines, runs the adaptation and self-play protocols, and writes
//! everything to a run folder.

pub mod calibration;
pub mod config;
pub mod error;
pub mod export;
pub mod metrics;
pub mod protocols;
pub mod record;
pub mod replay;
pub mod runner;
pub mod seeds;
pub mod systems;

pub use calibration::{calibrate_sigma, CalibrationTable};
pub use config::{RunConfig, SystemSpec};
pub use error::BenchError;
pub use metrics::{compute_metrics, latency_stats, LatencyStats, Metrics, MetricsReport};
pub use record::EpisodeRecord;
pub use runner::{run_benchmark, BenchOutcome, Matchup};
