//! Link parameters, protocol selectors and channel draws shared by every
//! evaluator in the crate.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of a source → relay → destination link.
///
/// Relay and destination see the same antenna and conversion noise
/// variances. `Default` gives the reference operating point: unit power,
/// efficiency and distances, path-loss exponent 2.7, both noise variances
/// 0.01, unit-mean fading and a rate of 3 bits/sec/Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParams {
    /// Source transmit power P_s (Joules/sec).
    pub source_power: f64,
    /// RF-to-DC conversion efficiency η, in (0, 1].
    pub harvesting_efficiency: f64,
    /// Normalized source → relay distance d₁.
    pub dist_source_relay: f64,
    /// Normalized relay → destination distance d₂.
    pub dist_relay_dest: f64,
    /// Path-loss exponent m.
    pub path_loss_exponent: f64,
    /// Baseband antenna noise variance.
    pub antenna_noise_var: f64,
    /// RF-to-baseband conversion noise variance.
    pub conversion_noise_var: f64,
    /// Mean of the exponential source → relay gain |h|².
    pub fading_mean_sr: f64,
    /// Mean of the exponential relay → destination gain |g|².
    pub fading_mean_rd: f64,
    /// Fixed source rate R (bits/sec/Hz), delay-limited mode only.
    pub rate: f64,
    /// Block time T (seconds). Cancels out of every throughput figure.
    pub block_time: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            source_power: 1.0,
            harvesting_efficiency: 1.0,
            dist_source_relay: 1.0,
            dist_relay_dest: 1.0,
            path_loss_exponent: 2.7,
            antenna_noise_var: 0.01,
            conversion_noise_var: 0.01,
            fading_mean_sr: 1.0,
            fading_mean_rd: 1.0,
            rate: 3.0,
            block_time: 1.0,
        }
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

fn nonnegative(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and >= 0, got {v}")))
    }
}

impl SystemParams {
    /// Checks every field constraint and returns the parameters unchanged.
    pub fn validate(self) -> Result<Self> {
        positive("source_power", self.source_power)?;
        positive("harvesting_efficiency", self.harvesting_efficiency)?;
        if self.harvesting_efficiency > 1.0 {
            return Err(Error::invalid(
                "harvesting_efficiency",
                format!("must lie in (0, 1], got {}", self.harvesting_efficiency),
            ));
        }
        positive("dist_source_relay", self.dist_source_relay)?;
        positive("dist_relay_dest", self.dist_relay_dest)?;
        positive("path_loss_exponent", self.path_loss_exponent)?;
        nonnegative("antenna_noise_var", self.antenna_noise_var)?;
        nonnegative("conversion_noise_var", self.conversion_noise_var)?;
        if self.antenna_noise_var == 0.0 && self.conversion_noise_var == 0.0 {
            return Err(Error::invalid(
                "antenna_noise_var",
                "antenna and conversion noise variances cannot both be zero",
            ));
        }
        positive("fading_mean_sr", self.fading_mean_sr)?;
        positive("fading_mean_rd", self.fading_mean_rd)?;
        positive("rate", self.rate)?;
        positive("block_time", self.block_time)?;
        Ok(self)
    }

    /// d₁^m
    pub fn path_loss_sr(&self) -> f64 {
        self.dist_source_relay.powf(self.path_loss_exponent)
    }

    /// d₂^m
    pub fn path_loss_rd(&self) -> f64 {
        self.dist_relay_dest.powf(self.path_loss_exponent)
    }

    /// γ₀ for the configured rate.
    pub fn snr_threshold(&self) -> Result<f64> {
        snr_threshold(self.rate)
    }
}

/// SNR threshold γ₀ = 2^R − 1 needed to decode at `rate` bits/sec/Hz.
pub fn snr_threshold(rate: f64) -> Result<f64> {
    positive("rate", rate)?;
    if rate < 1.0 {
        Ok((rate * std::f64::consts::LN_2).exp_m1())
    } else {
        Ok(rate.exp2() - 1.0)
    }
}

/// A harvesting fraction (α or ρ) in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Fraction(f64);

impl Fraction {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Fraction(value))
        } else {
            Err(Error::invalid("fraction", format!("must lie in [0, 1], got {value}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// True strictly inside (0, 1).
    pub fn is_interior(self) -> bool {
        self.0 > 0.0 && self.0 < 1.0
    }
}

impl TryFrom<f64> for Fraction {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Fraction::new(value)
    }
}

impl From<Fraction> for f64 {
    fn from(f: Fraction) -> f64 {
        f.0
    }
}

/// Relaying receiver architecture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Protocol {
    /// Time switching: the relay harvests for α·T, then receives and forwards
    /// for (1−α)·T/2 each.
    Tsr(Fraction),
    /// Power splitting: ρ of the received power goes to the harvester.
    Psr(Fraction),
    /// Harvests and decodes from the same signal. Upper bound.
    Ideal,
}

impl Protocol {
    pub fn tsr(alpha: f64) -> Result<Self> {
        Ok(Protocol::Tsr(Fraction::new(alpha)?))
    }

    pub fn psr(rho: f64) -> Result<Self> {
        Ok(Protocol::Psr(Fraction::new(rho)?))
    }

    pub fn family(&self) -> ProtocolFamily {
        match self {
            Protocol::Tsr(_) => ProtocolFamily::Tsr,
            Protocol::Psr(_) => ProtocolFamily::Psr,
            Protocol::Ideal => ProtocolFamily::Ideal,
        }
    }

    pub fn fraction(&self) -> Option<f64> {
        match self {
            Protocol::Tsr(f) | Protocol::Psr(f) => Some(f.get()),
            Protocol::Ideal => None,
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Protocol::Tsr(a) => write!(f, "TSR(alpha={})", a.get()),
            Protocol::Psr(r) => write!(f, "PSR(rho={})", r.get()),
            Protocol::Ideal => f.write_str("Ideal"),
        }
    }
}

/// Protocol without its fraction; what sweeps and the optimizer select on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolFamily {
    #[serde(rename = "TSR", alias = "tsr")]
    Tsr,
    #[serde(rename = "PSR", alias = "psr")]
    Psr,
    #[serde(rename = "Ideal", alias = "ideal")]
    Ideal,
}

impl ProtocolFamily {
    /// Attaches a fraction. Ignored for `Ideal`.
    pub fn with_fraction(self, fraction: f64) -> Result<Protocol> {
        match self {
            ProtocolFamily::Tsr => Protocol::tsr(fraction),
            ProtocolFamily::Psr => Protocol::psr(fraction),
            ProtocolFamily::Ideal => Ok(Protocol::Ideal),
        }
    }

    pub fn has_fraction(self) -> bool {
        !matches!(self, ProtocolFamily::Ideal)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolFamily::Tsr => "TSR",
            ProtocolFamily::Psr => "PSR",
            ProtocolFamily::Ideal => "Ideal",
        }
    }
}

impl fmt::Display for ProtocolFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransmissionMode {
    /// Fixed rate R; throughput is driven by the outage probability.
    DelayLimited,
    /// Rate equal to the ergodic capacity.
    DelayTolerant,
}

impl TransmissionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TransmissionMode::DelayLimited => "delay_limited",
            TransmissionMode::DelayTolerant => "delay_tolerant",
        }
    }
}

impl fmt::Display for TransmissionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One block-fading draw of the two channel power gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    /// |h|², source → relay.
    pub gain_sr_sq: f64,
    /// |g|², relay → destination.
    pub gain_rd_sq: f64,
}

impl ChannelRealization {
    pub fn new(gain_sr_sq: f64, gain_rd_sq: f64) -> Result<Self> {
        nonnegative("gain_sr_sq", gain_sr_sq)?;
        nonnegative("gain_rd_sq", gain_rd_sq)?;
        Ok(ChannelRealization { gain_sr_sq, gain_rd_sq })
    }
}
