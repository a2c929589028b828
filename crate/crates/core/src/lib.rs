//! Performance analysis of amplify-and-forward relaying where the relay
//! powers its transmission with energy harvested from the source signal.
//!
//! Three relay receivers are covered: time switching (TSR), power splitting
//! (PSR) and an ideal receiver that harvests and decodes from the same
//! signal. For each, the crate evaluates outage probability, ergodic capacity
//! and throughput by numerical integration, by a closed-form high-SNR
//! approximation, or by Monte-Carlo simulation, and searches for the
//! throughput-optimal harvesting fraction.

pub mod analytic;
pub mod error;
pub mod experiments;
pub mod model;
pub mod montecarlo;
pub mod optimize;
pub mod snr;
pub mod specfun;
pub mod throughput;

pub use analytic::{ergodic_capacity, outage_probability, snr_cdf, snr_pdf, AnalyticMethod};
pub use error::{Error, Result};
pub use experiments::{figure_preset, run_sweep, SweepResult, SweepRow, SweepSpec, SweptParameter};
pub use model::{ChannelRealization, Fraction, Protocol, ProtocolFamily, SystemParams, TransmissionMode};
pub use montecarlo::McSettings;
pub use optimize::{optimize_fraction, OptResult};
pub use specfun::QuadratureSettings;
pub use throughput::{throughput, EvalConfig, EvalMethod, ThroughputResult};
