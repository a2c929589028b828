//! Per-realization quantities: harvested energy, relay transmit power and
//! the end-to-end SNR at the destination.

use crate::error::{Error, Result};
use crate::model::{ChannelRealization, Protocol, SystemParams};

/// Total noise variances seen at the relay and at the destination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseDecomposition {
    pub relay_total_var: f64,
    pub dest_total_var: f64,
}

/// The power splitter sits ahead of the baseband antenna noise, so under PSR
/// only the information branch `(1-ρ)` of that noise reaches the relay.
pub fn noise_decomposition(params: &SystemParams, protocol: &Protocol) -> NoiseDecomposition {
    let antenna = params.antenna_noise_var;
    let conversion = params.conversion_noise_var;
    let relay_total_var = match protocol {
        Protocol::Psr(rho) => (1.0 - rho.get()) * antenna + conversion,
        Protocol::Tsr(_) | Protocol::Ideal => antenna + conversion,
    };
    NoiseDecomposition {
        relay_total_var,
        dest_total_var: antenna + conversion,
    }
}

/// Energy collected by the relay during one block (Joules).
pub fn harvested_energy(params: &SystemParams, protocol: &Protocol, ch: &ChannelRealization) -> f64 {
    let received = params.harvesting_efficiency * params.source_power * ch.gain_sr_sq / params.path_loss_sr();
    let t = params.block_time;
    match protocol {
        Protocol::Tsr(alpha) => received * alpha.get() * t,
        Protocol::Psr(rho) => received * rho.get() * t / 2.0,
        Protocol::Ideal => received * t / 2.0,
    }
}

/// Relay transmit power: the harvested energy spent over the forwarding
/// interval. Fails under TSR with α = 1, where that interval is empty.
pub fn relay_power(params: &SystemParams, protocol: &Protocol, ch: &ChannelRealization) -> Result<f64> {
    let received = params.harvesting_efficiency * params.source_power * ch.gain_sr_sq / params.path_loss_sr();
    match protocol {
        Protocol::Tsr(alpha) => {
            let a = alpha.get();
            if a >= 1.0 {
                return Err(Error::DegenerateSplit);
            }
            Ok(2.0 * received * a / (1.0 - a))
        }
        Protocol::Psr(rho) => Ok(received * rho.get()),
        Protocol::Ideal => Ok(received),
    }
}

/// Precomputed coefficients of the destination SNR for one
/// (parameters, protocol) pair.
///
/// Every protocol's SNR has the shape
///
/// ```text
///            k_sig · P² h² g
/// ─────────────────────────────────────────────────────────
///  k_rel · P h g d₁ σr² + k_dst · P h d₁d₂ σd² + k_both · d₁²d₂ σr²σd²
/// ```
///
/// with `h = |h|²`, `g = |g|²`, `d₁ = d₁^m`, `d₂ = d₂^m`.
#[derive(Debug, Clone, Copy)]
pub struct SnrKernel {
    signal: f64,
    relay_term: f64,
    dest_term: f64,
    product_term: f64,
}

impl SnrKernel {
    pub fn new(params: &SystemParams, protocol: &Protocol) -> Self {
        let eta = params.harvesting_efficiency;
        let (k_sig, k_rel, k_dst, k_both) = match protocol {
            Protocol::Tsr(alpha) => {
                let a = alpha.get();
                (2.0 * eta * a, 2.0 * eta * a, 1.0 - a, 1.0 - a)
            }
            Protocol::Psr(rho) => {
                let r = rho.get();
                (eta * r * (1.0 - r), eta * r, 1.0 - r, 1.0)
            }
            Protocol::Ideal => (eta, eta, 1.0, 1.0),
        };
        let noise = noise_decomposition(params, protocol);
        let ps = params.source_power;
        let l1 = params.path_loss_sr();
        let l2 = params.path_loss_rd();
        // every term divided by Ps² so that large powers cannot overflow
        SnrKernel {
            signal: k_sig,
            relay_term: k_rel * l1 * noise.relay_total_var / ps,
            dest_term: k_dst * l1 * l2 * noise.dest_total_var / ps,
            product_term: k_both * l1 * l1 * l2 * noise.relay_total_var * noise.dest_total_var / ps / ps,
        }
    }

    #[inline]
    pub fn snr(&self, ch: &ChannelRealization) -> f64 {
        let h = ch.gain_sr_sq;
        let g = ch.gain_rd_sq;
        let num = self.signal * h * h * g;
        if num == 0.0 {
            return 0.0;
        }
        num / (self.relay_term * h * g + self.dest_term * h + self.product_term)
    }
}

/// End-to-end SNR γ_D for one channel draw. Zero gains or a boundary
/// fraction give 0. TSR at α = 1 is taken by continuity.
pub fn instantaneous_snr(params: &SystemParams, protocol: &Protocol, ch: &ChannelRealization) -> f64 {
    SnrKernel::new(params, protocol).snr(ch)
}
