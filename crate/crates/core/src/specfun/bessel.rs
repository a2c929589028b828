//! Modified Bessel functions of the second kind, orders 0 and 1.
//!
//! Both orders come out of one evaluation. For `x <= 2` the ascending series
//! is summed directly; above that Temme's form of Steed's continued fraction
//! gives `K₀` and the ratio `K₁/K₀` together, so there is no asymptotic
//! truncation error at the crossover.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 2.0;
// e^-x is already zero in f64 here
const UNDERFLOW_LIMIT: f64 = 750.0;
const MAX_TERMS: usize = 10_000;

/// K₀(x) for x > 0.
pub fn bessel_k0(x: f64) -> Result<f64> {
    check_domain("bessel_k0", x)?;
    Ok(k0_k1(x).0)
}

/// K₁(x) for x > 0.
pub fn bessel_k1(x: f64) -> Result<f64> {
    check_domain("bessel_k1", x)?;
    Ok(k0_k1(x).1)
}

fn check_domain(function: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain { function, x })
    }
}

/// x·K₁(x), continuous at the origin where it equals 1.
pub(crate) fn x_k1(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else if x > UNDERFLOW_LIMIT {
        0.0
    } else {
        x * k0_k1(x).1
    }
}

/// (K₀(x), K₁(x)) for x > 0. Underflows to zero for x beyond ~745.
pub(crate) fn k0_k1(x: f64) -> (f64, f64) {
    debug_assert!(x > 0.0);
    if x > UNDERFLOW_LIMIT {
        (0.0, 0.0)
    } else if x <= SERIES_LIMIT {
        ascending_series(x)
    } else {
        continued_fraction(x)
    }
}

fn ascending_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let log_half = (0.5 * x).ln();

    // t0 = y^k / (k!)^2, t1 = y^k / (k! (k+1)!), harmonic = H_k
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let mut harmonic = 0.0;
    let mut i0 = 0.0;
    let mut k0_tail = 0.0;
    let mut i1_sum = 0.0;
    let mut k1_tail = 0.0;
    for k in 0..MAX_TERMS {
        let next = (k + 1) as f64;
        i0 += t0;
        k0_tail += harmonic * t0;
        i1_sum += t1;
        // psi(k+1) + psi(k+2) = H_k + H_{k+1} - 2 gamma
        k1_tail += (2.0 * harmonic + 1.0 / next - 2.0 * EULER_GAMMA) * t1;
        if t0 <= f64::EPSILON * 1e-3 * i0 {
            break;
        }
        t0 *= y / (next * next);
        t1 *= y / (next * (next + 1.0));
        harmonic += 1.0 / next;
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + k0_tail;
    let k1 = 1.0 / x + log_half * 0.5 * x * i1_sum - 0.25 * x * k1_tail;
    (k0, k1)
}

fn continued_fraction(x: f64) -> (f64, f64) {
    // order mu = 0
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_TERMS {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON * 0.5 && delh.abs() < f64::EPSILON * 0.5 * h.abs() {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}
