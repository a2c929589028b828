//! Throughput τ in bits/sec/Hz from the outage probability (delay-limited)
//! or the ergodic capacity (delay-tolerant).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analytic::{ergodic_capacity_with, outage_probability_with, AnalyticMethod};
use crate::error::Result;
use crate::model::{Protocol, SystemParams, TransmissionMode};
use crate::montecarlo::{capacity_empirical, outage_empirical, McSettings};
use crate::specfun::QuadratureSettings;

/// Where outage and capacity figures come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    Exact,
    HighSnrApprox,
    MonteCarlo,
}

impl EvalMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            EvalMethod::Exact => "exact",
            EvalMethod::HighSnrApprox => "high_snr_approx",
            EvalMethod::MonteCarlo => "monte_carlo",
        }
    }

    pub fn analytic(self) -> Option<AnalyticMethod> {
        match self {
            EvalMethod::Exact => Some(AnalyticMethod::Exact),
            EvalMethod::HighSnrApprox => Some(AnalyticMethod::HighSnrApprox),
            EvalMethod::MonteCarlo => None,
        }
    }
}

impl From<AnalyticMethod> for EvalMethod {
    fn from(m: AnalyticMethod) -> Self {
        match m {
            AnalyticMethod::Exact => EvalMethod::Exact,
            AnalyticMethod::HighSnrApprox => EvalMethod::HighSnrApprox,
        }
    }
}

impl fmt::Display for EvalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Numerical knobs for every evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalConfig {
    pub quadrature: QuadratureSettings,
    pub monte_carlo: McSettings,
}

/// The quantity τ was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Intermediate {
    OutageProbability(f64),
    ErgodicCapacity(f64),
}

impl Intermediate {
    pub fn outage(&self) -> Option<f64> {
        match *self {
            Intermediate::OutageProbability(p) => Some(p),
            Intermediate::ErgodicCapacity(_) => None,
        }
    }

    pub fn capacity(&self) -> Option<f64> {
        match *self {
            Intermediate::OutageProbability(_) => None,
            Intermediate::ErgodicCapacity(c) => Some(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputResult {
    pub throughput: f64,
    pub intermediate: Intermediate,
    pub method: EvalMethod,
    /// Standard error of τ, Monte-Carlo only.
    pub std_error: Option<f64>,
    pub note: Option<String>,
}

/// Share of the block left for carrying data, relative to the two-hop
/// baseline: (1−α) under TSR, 1 otherwise.
pub fn time_factor(protocol: &Protocol) -> f64 {
    match protocol {
        Protocol::Tsr(alpha) => 1.0 - alpha.get(),
        Protocol::Psr(_) | Protocol::Ideal => 1.0,
    }
}

pub fn throughput(
    params: &SystemParams,
    protocol: &Protocol,
    mode: TransmissionMode,
    method: EvalMethod,
) -> Result<ThroughputResult> {
    throughput_with(params, protocol, mode, method, &EvalConfig::default())
}

pub fn throughput_with(
    params: &SystemParams,
    protocol: &Protocol,
    mode: TransmissionMode,
    method: EvalMethod,
    config: &EvalConfig,
) -> Result<ThroughputResult> {
    let params = params.validate()?;
    let scale = time_factor(protocol) / 2.0;
    // (value, standard error, note)
    let (x, se, note) = match (mode, method.analytic()) {
        (TransmissionMode::DelayLimited, Some(m)) => {
            let v = outage_probability_with(&params, protocol, m, &config.quadrature)?;
            (v.value, None, v.note)
        }
        (TransmissionMode::DelayTolerant, Some(m)) => {
            let v = ergodic_capacity_with(&params, protocol, m, &config.quadrature)?;
            (v.value, None, v.note)
        }
        (TransmissionMode::DelayLimited, None) => {
            let e = outage_empirical(&params, protocol, &config.monte_carlo)?;
            (e.value, Some(e.std_error), None)
        }
        (TransmissionMode::DelayTolerant, None) => {
            let e = capacity_empirical(&params, protocol, &config.monte_carlo)?;
            (e.value, Some(e.std_error), None)
        }
    };
    let (throughput, intermediate, std_error) = match mode {
        TransmissionMode::DelayLimited => {
            let k = params.rate * scale;
            ((1.0 - x) * k, Intermediate::OutageProbability(x), se.map(|s| s * k))
        }
        TransmissionMode::DelayTolerant => (x * scale, Intermediate::ErgodicCapacity(x), se.map(|s| s * scale)),
    };
    Ok(ThroughputResult {
        throughput,
        intermediate,
        method,
        std_error,
        note,
    })
}
