//! Monte-Carlo estimates of outage probability and ergodic capacity over
//! Rayleigh block fading.
//!
//! Realization `i` draws from ChaCha8 stream `i` of the master seed, so an
//! estimate depends only on `(params, protocol, settings)` and never on how
//! the work is split across threads. Partial statistics are computed per
//! fixed-size chunk and merged in chunk order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChannelRealization, Protocol, SystemParams};
use crate::snr::SnrKernel;

const CHUNK: usize = 4096;
const MANTISSA: f64 = (1u64 << 53) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSettings {
    pub num_realizations: usize,
    pub master_seed: u64,
    /// Pair every draw with its mirror image `1 − U`. Requires an even
    /// number of realizations.
    pub antithetic: bool,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            num_realizations: 100_000,
            master_seed: 0x5eed_2013,
            antithetic: false,
        }
    }
}

impl McSettings {
    pub fn validate(self) -> Result<Self> {
        if self.num_realizations == 0 {
            return Err(Error::invalid("num_realizations", "must be >= 1"));
        }
        if self.antithetic && !self.num_realizations.is_multiple_of(2) {
            return Err(Error::invalid(
                "num_realizations",
                format!("antithetic sampling needs an even count, got {}", self.num_realizations),
            ));
        }
        Ok(self)
    }
}

/// An empirical mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    /// Number of channel realizations used.
    pub n: usize,
    /// The standard error is zero because there was no spread to measure
    /// (a single sample, or every sample equal).
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.n;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0.0 {
            return other;
        }
        if other.n == 0.0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * other.n / n,
            m2: self.m2 + other.m2 + delta * delta * self.n * other.n / n,
        }
    }

    fn std_error(&self) -> f64 {
        if self.n < 2.0 {
            0.0
        } else {
            (self.m2 / (self.n - 1.0) / self.n).sqrt()
        }
    }
}

fn stream(base: &ChaCha8Rng, index: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(index);
    rng.set_word_pos(0);
    rng
}

fn raw_pair(rng: &mut ChaCha8Rng) -> (u64, u64) {
    (rng.next_u64() >> 11, rng.next_u64() >> 11)
}

// U in (0, 1], never zero
#[inline]
fn uniform(k: u64) -> f64 {
    (k + 1) as f64 / MANTISSA
}

// 1 − U + 2⁻⁵³, also in (0, 1]
#[inline]
fn mirrored(k: u64) -> f64 {
    ((1u64 << 53) - k) as f64 / MANTISSA
}

fn realization(params: &SystemParams, uh: f64, ug: f64) -> ChannelRealization {
    ChannelRealization {
        gain_sr_sq: -params.fading_mean_sr * uh.ln(),
        gain_rd_sq: -params.fading_mean_rd * ug.ln(),
    }
}

/// The `index`-th channel draw for `master_seed`: independent exponential
/// gains with means λ_h and λ_g.
pub fn sample_channel(params: &SystemParams, master_seed: u64, index: u64) -> ChannelRealization {
    let base = ChaCha8Rng::seed_from_u64(master_seed);
    let (kh, kg) = raw_pair(&mut stream(&base, index));
    realization(params, uniform(kh), uniform(kg))
}

/// Moments of `f(γ_D)` over the realizations, or over antithetic pair means.
fn moments<F: Fn(f64) -> f64 + Sync>(params: &SystemParams, protocol: &Protocol, mc: &McSettings, f: F) -> Moments {
    let kernel = SnrKernel::new(params, protocol);
    let base = ChaCha8Rng::seed_from_u64(mc.master_seed);
    let draws = if mc.antithetic {
        mc.num_realizations / 2
    } else {
        mc.num_realizations
    } as u64;
    let chunks = draws.div_ceil(CHUNK as u64);
    let partial: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut m = Moments::default();
            let end = ((c + 1) * CHUNK as u64).min(draws);
            for i in c * CHUNK as u64..end {
                let (kh, kg) = raw_pair(&mut stream(&base, i));
                let x = f(kernel.snr(&realization(params, uniform(kh), uniform(kg))));
                if mc.antithetic {
                    let y = f(kernel.snr(&realization(params, mirrored(kh), mirrored(kg))));
                    m.push(0.5 * (x + y));
                } else {
                    m.push(x);
                }
            }
            m
        })
        .collect();
    partial.into_iter().fold(Moments::default(), Moments::merge)
}

/// Fraction of realizations with γ_D below γ₀.
pub fn outage_empirical(params: &SystemParams, protocol: &Protocol, mc: &McSettings) -> Result<McEstimate> {
    let params = params.validate()?;
    let mc = mc.validate()?;
    let gamma0 = params.snr_threshold()?;
    let m = moments(&params, protocol, &mc, |snr| if snr < gamma0 { 1.0 } else { 0.0 });
    let n = mc.num_realizations;
    let p = m.mean.clamp(0.0, 1.0);
    let std_error = if mc.antithetic {
        m.std_error()
    } else {
        (p * (1.0 - p) / n as f64).sqrt()
    };
    Ok(McEstimate {
        value: p,
        std_error,
        n,
        degenerate: std_error == 0.0,
    })
}

/// Sample mean of log₂(1 + γ_D).
pub fn capacity_empirical(params: &SystemParams, protocol: &Protocol, mc: &McSettings) -> Result<McEstimate> {
    let params = params.validate()?;
    let mc = mc.validate()?;
    let m = moments(&params, protocol, &mc, |snr| snr.ln_1p() / std::f64::consts::LN_2);
    let std_error = m.std_error();
    Ok(McEstimate {
        value: m.mean.max(0.0),
        std_error,
        n: mc.num_realizations,
        degenerate: std_error == 0.0,
    })
}
