//! Parameter sweeps over the link model, figure presets and tabular output.

mod config;
mod output;
mod presets;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Protocol, ProtocolFamily, SystemParams, TransmissionMode};
use crate::montecarlo::McSettings;
use crate::optimize::{optimize_fraction_with, DEFAULT_FRAC_TOL};
use crate::throughput::{throughput_with, EvalConfig, EvalMethod, ThroughputResult};

pub use config::ExperimentConfig;
pub use output::{emit, parse_csv, parse_json, write_csv, write_json, Destination, OutputFormat, CSV_COLUMNS};
pub use presets::{figure_preset, PRESET_NAMES};

/// The quantity varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParameter {
    /// α for TSR rows, ρ for PSR rows.
    Fraction,
    AntennaNoiseVar,
    ConversionNoiseVar,
    DistSourceRelay,
    Rate,
    HarvestingEfficiency,
}

impl SweptParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweptParameter::Fraction => "fraction",
            SweptParameter::AntennaNoiseVar => "antenna_noise_var",
            SweptParameter::ConversionNoiseVar => "conversion_noise_var",
            SweptParameter::DistSourceRelay => "dist_source_relay",
            SweptParameter::Rate => "rate",
            SweptParameter::HarvestingEfficiency => "harvesting_efficiency",
        }
    }

    /// `base` with this parameter set to `value`. A fraction leaves the
    /// parameters untouched.
    pub fn apply(self, base: &SystemParams, value: f64) -> SystemParams {
        let mut p = *base;
        match self {
            SweptParameter::Fraction => {}
            SweptParameter::AntennaNoiseVar => p.antenna_noise_var = value,
            SweptParameter::ConversionNoiseVar => p.conversion_noise_var = value,
            SweptParameter::DistSourceRelay => p.dist_source_relay = value,
            SweptParameter::Rate => p.rate = value,
            SweptParameter::HarvestingEfficiency => p.harvesting_efficiency = value,
        }
        p
    }
}

/// Ties the relay → destination distance to the swept source → relay one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Coupling {
    /// d₂ = total − d₁
    FixedTotalDistance { total: f64 },
}

impl Coupling {
    fn apply(self, p: &mut SystemParams) {
        match self {
            Coupling::FixedTotalDistance { total } => p.dist_relay_dest = total - p.dist_source_relay,
        }
    }
}

/// One sweep: every combination of value × protocol × mode × method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub swept_parameter: SweptParameter,
    pub values: Vec<f64>,
    pub protocols: Vec<ProtocolFamily>,
    pub modes: Vec<TransmissionMode>,
    pub methods: Vec<EvalMethod>,
    /// Re-optimize α or ρ at every value. Not allowed when sweeping the
    /// fraction itself.
    pub optimize_fraction: bool,
    pub coupling: Option<Coupling>,
    /// Fraction used when neither swept nor optimized.
    pub base_fraction: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            swept_parameter: SweptParameter::Fraction,
            values: (1..100).map(|i| i as f64 / 100.0).collect(),
            protocols: vec![ProtocolFamily::Tsr, ProtocolFamily::Psr],
            modes: vec![TransmissionMode::DelayLimited, TransmissionMode::DelayTolerant],
            methods: vec![EvalMethod::Exact],
            optimize_fraction: false,
            coupling: None,
            base_fraction: 0.5,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self, base: &SystemParams) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::invalid("values", "must not be empty"));
        }
        if self.protocols.is_empty() {
            return Err(Error::invalid("protocols", "must not be empty"));
        }
        if self.modes.is_empty() {
            return Err(Error::invalid("modes", "must not be empty"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("methods", "must not be empty"));
        }
        if self.coupling.is_some() && self.swept_parameter != SweptParameter::DistSourceRelay {
            return Err(Error::invalid(
                "coupling",
                "only applies when sweeping dist_source_relay",
            ));
        }
        if self.optimize_fraction && self.swept_parameter == SweptParameter::Fraction {
            return Err(Error::invalid(
                "optimize_fraction",
                "cannot optimize the swept fraction",
            ));
        }
        if !(0.0..=1.0).contains(&self.base_fraction) {
            return Err(Error::invalid(
                "base_fraction",
                format!("must lie in [0, 1], got {}", self.base_fraction),
            ));
        }
        let base = base.validate()?;
        for &v in &self.values {
            if self.swept_parameter == SweptParameter::Fraction {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::invalid("values", format!("fraction {v} outside [0, 1]")));
                }
            } else {
                self.params_at(&base, v).validate()?;
            }
        }
        Ok(())
    }

    /// System parameters of the cells at swept value `value`.
    pub fn params_at(&self, base: &SystemParams, value: f64) -> SystemParams {
        let mut p = self.swept_parameter.apply(base, value);
        if let Some(c) = self.coupling {
            c.apply(&mut p);
        }
        p
    }

    pub fn num_cells(&self) -> usize {
        self.values.len() * self.protocols.len() * self.modes.len() * self.methods.len()
    }
}

/// One evaluated cell. Numbers the cell did not produce are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub swept_param: SweptParameter,
    pub swept_value: f64,
    pub protocol: ProtocolFamily,
    /// α or ρ used, swept or optimal.
    pub fraction: Option<f64>,
    pub mode: TransmissionMode,
    pub method: EvalMethod,
    pub p_out: Option<f64>,
    pub capacity: Option<f64>,
    pub throughput: Option<f64>,
    pub stderr: Option<f64>,
    pub note: Option<String>,
}

impl SweepRow {
    /// True when the evaluator failed and no throughput was produced.
    pub fn failed(&self) -> bool {
        self.throughput.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn failed_cells(&self) -> usize {
        self.rows.iter().filter(|r| r.failed()).count()
    }
}

struct Cell {
    value: f64,
    protocol: ProtocolFamily,
    mode: TransmissionMode,
    method: EvalMethod,
}

/// Runs every cell of `spec`. Cells evaluate in parallel but rows come back
/// in spec order: value, then protocol, then mode, then method. A failing
/// cell becomes a row with an error note.
pub fn run_sweep(spec: &SweepSpec, base: &SystemParams, mc: &McSettings) -> Result<SweepResult> {
    let config = EvalConfig {
        monte_carlo: *mc,
        ..Default::default()
    };
    run_sweep_with(spec, base, &config)
}

pub fn run_sweep_with(spec: &SweepSpec, base: &SystemParams, config: &EvalConfig) -> Result<SweepResult> {
    spec.validate(base)?;
    config.monte_carlo.validate()?;
    config.quadrature.validate()?;
    let mut cells = Vec::with_capacity(spec.num_cells());
    for &value in &spec.values {
        for &protocol in &spec.protocols {
            for &mode in &spec.modes {
                for &method in &spec.methods {
                    cells.push(Cell {
                        value,
                        protocol,
                        mode,
                        method,
                    });
                }
            }
        }
    }
    let rows = cells
        .par_iter()
        .map(|cell| evaluate(spec, base, cell, config))
        .collect();
    Ok(SweepResult { rows })
}

fn evaluate(spec: &SweepSpec, base: &SystemParams, cell: &Cell, config: &EvalConfig) -> SweepRow {
    let mut row = SweepRow {
        swept_param: spec.swept_parameter,
        swept_value: cell.value,
        protocol: cell.protocol,
        fraction: None,
        mode: cell.mode,
        method: cell.method,
        p_out: None,
        capacity: None,
        throughput: None,
        stderr: None,
        note: None,
    };
    match evaluate_cell(spec, base, cell, config, &mut row) {
        Ok(r) => {
            row.p_out = r.intermediate.outage();
            row.capacity = r.intermediate.capacity();
            row.throughput = Some(r.throughput);
            row.stderr = r.std_error;
            if let Some(n) = r.note {
                row.note = Some(match row.note.take() {
                    Some(prev) => format!("{prev}; {n}"),
                    None => n,
                });
            }
        }
        Err(e) => row.note = Some(e.to_string()),
    }
    row
}

fn evaluate_cell(
    spec: &SweepSpec,
    base: &SystemParams,
    cell: &Cell,
    config: &EvalConfig,
    row: &mut SweepRow,
) -> Result<ThroughputResult> {
    let params = spec.params_at(base, cell.value).validate()?;
    let family = cell.protocol;
    let fraction = if !family.has_fraction() {
        None
    } else if spec.swept_parameter == SweptParameter::Fraction {
        Some(cell.value)
    } else if spec.optimize_fraction {
        let opt = optimize_fraction_with(&params, family, cell.mode, cell.method, DEFAULT_FRAC_TOL, config)?;
        if opt.flat {
            row.note = Some("flat objective".to_string());
        }
        Some(opt.best_fraction)
    } else {
        Some(spec.base_fraction)
    };
    row.fraction = fraction;
    let protocol: Protocol = family.with_fraction(fraction.unwrap_or(0.0))?;
    throughput_with(&params, &protocol, cell.mode, cell.method, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SweepSpec {
        SweepSpec {
            swept_parameter: SweptParameter::AntennaNoiseVar,
            values: vec![0.01, 0.02],
            protocols: vec![ProtocolFamily::Tsr, ProtocolFamily::Ideal],
            modes: vec![TransmissionMode::DelayLimited],
            methods: vec![EvalMethod::Exact, EvalMethod::HighSnrApprox],
            ..Default::default()
        }
    }

    #[test]
    fn rows_follow_spec_order() {
        let r = run_sweep(&small_spec(), &SystemParams::default(), &McSettings::default()).unwrap();
        assert_eq!(r.rows.len(), 8);
        let key: Vec<_> = r.rows.iter().map(|r| (r.swept_value, r.protocol, r.method)).collect();
        assert_eq!(key[0], (0.01, ProtocolFamily::Tsr, EvalMethod::Exact));
        assert_eq!(key[1], (0.01, ProtocolFamily::Tsr, EvalMethod::HighSnrApprox));
        assert_eq!(key[2], (0.01, ProtocolFamily::Ideal, EvalMethod::Exact));
        assert_eq!(key[7], (0.02, ProtocolFamily::Ideal, EvalMethod::HighSnrApprox));
        assert_eq!(r.rows[0].fraction, Some(0.5));
        assert_eq!(r.rows[2].fraction, None);
        assert!(r.rows.iter().all(|r| r.p_out.is_some() && r.capacity.is_none()));
        assert_eq!(r.failed_cells(), 0);
    }

    #[test]
    fn empty_sets_rejected() {
        let base = SystemParams::default();
        let mc = McSettings::default();
        for edit in [
            |s: &mut SweepSpec| s.protocols.clear(),
            |s: &mut SweepSpec| s.values.clear(),
            |s: &mut SweepSpec| s.modes.clear(),
            |s: &mut SweepSpec| s.methods.clear(),
        ] {
            let mut s = small_spec();
            edit(&mut s);
            assert!(matches!(run_sweep(&s, &base, &mc), Err(Error::InvalidParameter { .. })));
        }
    }

    #[test]
    fn invalid_combinations_rejected() {
        let base = SystemParams::default();
        let mut s = small_spec();
        s.coupling = Some(Coupling::FixedTotalDistance { total: 2.0 });
        assert!(s.validate(&base).is_err());
        let s = SweepSpec {
            optimize_fraction: true,
            ..Default::default()
        };
        assert!(s.validate(&base).is_err());
        let s = SweepSpec {
            values: vec![1.2],
            ..Default::default()
        };
        assert!(s.validate(&base).is_err());
        let mut s = small_spec();
        s.values = vec![-0.1];
        assert!(s.validate(&base).is_err());
        let s = SweepSpec {
            swept_parameter: SweptParameter::DistSourceRelay,
            values: vec![2.5],
            coupling: Some(Coupling::FixedTotalDistance { total: 2.0 }),
            ..small_spec()
        };
        assert!(s.validate(&base).is_err());
    }

    #[test]
    fn coupling_sets_second_hop() {
        let s = SweepSpec {
            swept_parameter: SweptParameter::DistSourceRelay,
            coupling: Some(Coupling::FixedTotalDistance { total: 2.0 }),
            ..small_spec()
        };
        let p = s.params_at(&SystemParams::default(), 0.7);
        assert_eq!(p.dist_source_relay, 0.7);
        assert!((p.dist_relay_dest - 1.3).abs() < 1e-15);
    }

    #[test]
    fn failing_cells_are_recorded() {
        // one subinterval is never enough for the capacity integral
        let spec = SweepSpec {
            modes: vec![TransmissionMode::DelayTolerant],
            methods: vec![EvalMethod::Exact],
            ..small_spec()
        };
        let config = EvalConfig {
            quadrature: crate::specfun::QuadratureSettings {
                max_subdivisions: 1,
                ..Default::default()
            },
            ..Default::default()
        };
        let r = run_sweep_with(&spec, &SystemParams::default(), &config).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert_eq!(r.failed_cells(), 4);
        assert!(r.rows[0].note.as_deref().unwrap().contains("converge"));
    }

    #[test]
    fn optimized_sweep_reports_fraction() {
        let spec = SweepSpec {
            values: vec![0.01],
            protocols: vec![ProtocolFamily::Psr],
            methods: vec![EvalMethod::HighSnrApprox],
            optimize_fraction: true,
            ..small_spec()
        };
        let r = run_sweep(&spec, &SystemParams::default(), &McSettings::default()).unwrap();
        let f = r.rows[0].fraction.unwrap();
        assert!(f > 0.5 && f < 0.75, "{f}");
    }

    #[test]
    fn deterministic_rows() {
        let spec = SweepSpec {
            methods: vec![EvalMethod::MonteCarlo],
            ..small_spec()
        };
        let mc = McSettings {
            num_realizations: 2000,
            ..Default::default()
        };
        let a = run_sweep(&spec, &SystemParams::default(), &mc).unwrap();
        let b = run_sweep(&spec, &SystemParams::default(), &mc).unwrap();
        assert_eq!(a, b);
        assert!(a.rows.iter().all(|r| r.stderr.is_some()));
    }
}
