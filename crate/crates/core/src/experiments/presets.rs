use crate::error::{Error, Result};
use crate::model::{ProtocolFamily, TransmissionMode};
use crate::throughput::EvalMethod;

use super::{Coupling, SweepSpec, SweptParameter};

pub const PRESET_NAMES: [&str; 7] = ["fig3", "fig4", "fig5a", "fig5b", "fig6", "fig7", "fig8"];

const BOTH_MODES: [TransmissionMode; 2] = [TransmissionMode::DelayLimited, TransmissionMode::DelayTolerant];

fn steps(count: usize, step: f64) -> Vec<f64> {
    (1..=count).map(|i| i as f64 * step).collect()
}

// 0.005, 0.010, ..., 0.100
fn noise_grid() -> Vec<f64> {
    (1..=20).map(|i| i as f64 * 5.0 / 1000.0).collect()
}

/// A named preset sweep, `fig3` through `fig8`.
///
/// | name  | swept                         | protocols       | modes |
/// |-------|-------------------------------|-----------------|-------|
/// | fig3  | α or ρ, 0.01..0.99            | TSR, PSR        | both  |
/// | fig4  | antenna noise, optimal α / ρ  | TSR, PSR        | DL    |
/// | fig5a | antenna noise 0.005..0.1      | Ideal, TSR, PSR | both  |
/// | fig5b | conversion noise 0.005..0.1   | Ideal, TSR, PSR | both  |
/// | fig6  | d₁ 0.5..1.5 with d₂ = 2 − d₁  | TSR, PSR        | both  |
/// | fig7  | R = 1..8                      | TSR, PSR        | DL    |
/// | fig8  | η 0.1..1.0                    | TSR, PSR        | both  |
///
/// Everything except fig3 optimizes the fraction at each point.
pub fn figure_preset(name: &str) -> Result<SweepSpec> {
    let tsr_psr = vec![ProtocolFamily::Tsr, ProtocolFamily::Psr];
    let all = vec![ProtocolFamily::Ideal, ProtocolFamily::Tsr, ProtocolFamily::Psr];
    let optimized = |swept_parameter, values, protocols, modes: &[TransmissionMode]| SweepSpec {
        swept_parameter,
        values,
        protocols,
        modes: modes.to_vec(),
        methods: vec![EvalMethod::Exact, EvalMethod::MonteCarlo],
        optimize_fraction: true,
        ..Default::default()
    };
    let spec = match name {
        "fig3" => SweepSpec {
            swept_parameter: SweptParameter::Fraction,
            values: (1..100).map(|i| i as f64 / 100.0).collect(),
            protocols: tsr_psr,
            modes: BOTH_MODES.to_vec(),
            methods: vec![EvalMethod::Exact, EvalMethod::HighSnrApprox, EvalMethod::MonteCarlo],
            ..Default::default()
        },
        "fig4" => optimized(
            SweptParameter::AntennaNoiseVar,
            noise_grid(),
            tsr_psr,
            &[TransmissionMode::DelayLimited],
        ),
        "fig5a" => optimized(SweptParameter::AntennaNoiseVar, noise_grid(), all, &BOTH_MODES),
        "fig5b" => optimized(SweptParameter::ConversionNoiseVar, noise_grid(), all, &BOTH_MODES),
        "fig6" => SweepSpec {
            coupling: Some(Coupling::FixedTotalDistance { total: 2.0 }),
            ..optimized(
                SweptParameter::DistSourceRelay,
                (5..=15).map(|i| i as f64 / 10.0).collect(),
                tsr_psr,
                &BOTH_MODES,
            )
        },
        "fig7" => optimized(
            SweptParameter::Rate,
            steps(8, 1.0),
            tsr_psr,
            &[TransmissionMode::DelayLimited],
        ),
        "fig8" => optimized(
            SweptParameter::HarvestingEfficiency,
            (1..=10).map(|i| i as f64 / 10.0).collect(),
            tsr_psr,
            &BOTH_MODES,
        ),
        other => {
            return Err(Error::invalid(
                "preset",
                format!("unknown figure `{other}`, expected one of {}", PRESET_NAMES.join(", ")),
            ))
        }
    };
    Ok(spec)
}
