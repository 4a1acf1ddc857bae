//! Modified Bessel functions of the first kind, orders 0 and 1.
//!
//! Power series below [`SERIES_MAX`], Hankel asymptotic expansion above it.
//! The `*_scaled` variants return `exp(-z) I_ν(z)` and never overflow.

use crate::error::{domain, Result};

/// Largest argument evaluated by the power series.
pub const SERIES_MAX: f64 = 15.0;

const MAX_TERMS: usize = 500;

/// `I_ν(z)` for `ν ∈ {0, 1}` and `z ≥ 0`.
pub fn bessel_i(order: u32, z: f64) -> Result<f64> {
    check_args(order, z)?;
    Ok(if z <= SERIES_MAX {
        series(order, z)
    } else {
        asymptotic_scaled(order, z) * z.exp()
    })
}

/// `exp(-z) I_ν(z)` for `ν ∈ {0, 1}` and `z ≥ 0`.
pub fn bessel_i_scaled(order: u32, z: f64) -> Result<f64> {
    check_args(order, z)?;
    Ok(scaled_unchecked(order, z))
}

fn check_args(order: u32, z: f64) -> Result<()> {
    if order > 1 {
        return Err(domain(
            "bessel_i",
            format!("order must be 0 or 1, got {order}"),
        ));
    }
    if z.is_nan() || z < 0.0 {
        return Err(domain(
            "bessel_i",
            format!("argument must be non-negative, got {z}"),
        ));
    }
    Ok(())
}

pub(crate) fn scaled_unchecked(order: u32, z: f64) -> f64 {
    if z <= SERIES_MAX {
        series(order, z) * (-z).exp()
    } else {
        asymptotic_scaled(order, z)
    }
}

pub(crate) fn i0_scaled(z: f64) -> f64 {
    scaled_unchecked(0, z)
}

pub(crate) fn i1_scaled(z: f64) -> f64 {
    scaled_unchecked(1, z)
}

/// Σ_k (z/2)^{2k+ν} / (k! (k+ν)!); all terms positive.
fn series(order: u32, z: f64) -> f64 {
    let half = 0.5 * z;
    let q = half * half;
    let nu = order as f64;
    let mut term = if order == 0 { 1.0 } else { half };
    let mut sum = term;
    for k in 1..MAX_TERMS {
        let k = k as f64;
        term *= q / (k * (k + nu));
        sum += term;
        if term <= sum * 0.5 * f64::EPSILON {
            break;
        }
    }
    sum
}

/// exp(-z) I_ν(z) ≈ (2πz)^{-1/2} Σ_k (-1)^k a_k(ν) / z^k, truncated at the
/// smallest term.
fn asymptotic_scaled(order: u32, z: f64) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let mut term = 1.0f64;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * z);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= sum.abs() * 0.5 * f64::EPSILON {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * z).sqrt()
}

/// `exp(-z) [I_0(z) + I_1(z) - exp(z/2)]`, which is non-negative for `z ≥ 0`.
///
/// Near zero the bracket is `O(z²)` while each piece is `O(1)`, so the small
/// argument branch sums the difference series term by term:
/// `Σ_{k≥2} (z/2)^k [1/(⌊k/2⌋! ⌈k/2⌉!) − 1/k!]`, every coefficient ≥ 0.
pub fn bessel_sum_excess_scaled(z: f64) -> Result<f64> {
    if z.is_nan() || z < 0.0 {
        return Err(domain(
            "bessel_sum_excess_scaled",
            format!("argument must be non-negative, got {z}"),
        ));
    }
    Ok(sum_excess_scaled_unchecked(z))
}

pub(crate) fn sum_excess_scaled_unchecked(z: f64) -> f64 {
    if z > SERIES_MAX {
        return (i0_scaled(z) + i1_scaled(z) - (-0.5 * z).exp()).max(0.0);
    }
    let half = 0.5 * z;
    // k = 2 terms: (z/2)^2 / (1!1!) and (z/2)^2 / 2!.
    let mut central = half * half;
    let mut plain = 0.5 * half * half;
    let mut sum = central - plain;
    for k in 2..MAX_TERMS {
        central *= half / ((k / 2 + 1) as f64);
        plain *= half / ((k + 1) as f64);
        let term = central - plain;
        sum += term;
        if central <= sum * 0.5 * f64::EPSILON {
            break;
        }
    }
    sum * (-z).exp()
}
