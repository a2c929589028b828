//! Search for the throughput-maximizing harvesting fraction.
//!
//! A 99-point scan over {0.01, …, 0.99} picks the best grid point, then
//! golden-section search narrows the interval between its two neighbours.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ProtocolFamily, SystemParams, TransmissionMode};
use crate::throughput::{throughput_with, EvalConfig, EvalMethod};

pub const DEFAULT_FRAC_TOL: f64 = 1e-3;
const GRID_POINTS: usize = 99;
const GRID_STEP: f64 = 0.01;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptResult {
    pub best_fraction: f64,
    pub best_throughput: f64,
    /// Objective evaluations spent.
    pub evaluations: usize,
    /// Width of the last interval known to contain the maximizer.
    pub bracket_width: f64,
    /// Every grid value was equal; `best_fraction` is then the first grid
    /// point and carries no information.
    pub flat: bool,
}

fn grid_point(i: usize) -> f64 {
    (i + 1) as f64 * GRID_STEP
}

/// Maximizes `f` over (0, 1). `f` must be deterministic.
pub fn maximize_fraction<F>(f: F, frac_tol: f64) -> Result<OptResult>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(frac_tol > 0.0 && frac_tol.is_finite()) {
        return Err(Error::invalid(
            "frac_tol",
            format!("must be finite and > 0, got {frac_tol}"),
        ));
    }
    let values = (0..GRID_POINTS)
        .into_par_iter()
        .map(|i| f(grid_point(i)))
        .collect::<Result<Vec<f64>>>()?;
    let mut evaluations = GRID_POINTS;

    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    let max = values[best];
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if max - min <= 1e-12 * max.abs().max(1.0) {
        return Ok(OptResult {
            best_fraction: grid_point(0),
            best_throughput: max,
            evaluations,
            bracket_width: 1.0,
            flat: true,
        });
    }

    let mut lo = if best == 0 { 0.0 } else { grid_point(best - 1) };
    let mut hi = if best == GRID_POINTS - 1 {
        1.0
    } else {
        grid_point(best + 1)
    };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    evaluations += 2;
    while hi - lo >= frac_tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
        evaluations += 1;
    }

    let (mut best_fraction, mut best_throughput) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if best_throughput < max {
        best_fraction = grid_point(best);
        best_throughput = max;
    }
    Ok(OptResult {
        best_fraction,
        best_throughput,
        evaluations,
        bracket_width: hi - lo,
        flat: false,
    })
}

/// Throughput-optimal α (TSR) or ρ (PSR).
pub fn optimize_fraction(
    params: &SystemParams,
    family: ProtocolFamily,
    mode: TransmissionMode,
    method: EvalMethod,
    frac_tol: f64,
) -> Result<OptResult> {
    optimize_fraction_with(params, family, mode, method, frac_tol, &EvalConfig::default())
}

/// Monte-Carlo objectives reuse the same seed at every fraction, so the
/// search sees a deterministic function.
pub fn optimize_fraction_with(
    params: &SystemParams,
    family: ProtocolFamily,
    mode: TransmissionMode,
    method: EvalMethod,
    frac_tol: f64,
    config: &EvalConfig,
) -> Result<OptResult> {
    if !family.has_fraction() {
        return Err(Error::Unsupported(format!(
            "{} has no fraction to optimize",
            family.as_str()
        )));
    }
    let params = params.validate()?;
    maximize_fraction(
        |x| {
            let protocol = family.with_fraction(x)?;
            Ok(throughput_with(&params, &protocol, mode, method, config)?.throughput)
        },
        frac_tol,
    )
}
