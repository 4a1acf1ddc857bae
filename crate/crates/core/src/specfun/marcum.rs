//! First-order Marcum Q function: the closed form on the diagonal `a = b`
//! and a direct quadrature of the defining integral used as a cross-check.

use super::bessel::i0_scaled;
use super::quad::{integrate, QuadSpec};
use crate::error::{domain, Result};

/// `Q_1(a, a) = [exp(-a²) I_0(a²) + 1] / 2`.
pub fn marcum_q1_equal(a: f64) -> Result<f64> {
    if a.is_nan() || a < 0.0 {
        return Err(domain(
            "marcum_q1_equal",
            format!("a must be non-negative, got {a}"),
        ));
    }
    Ok(0.5 * (i0_scaled(a * a) + 1.0))
}

/// `Q_1(a, b) = ∫_b^∞ x exp(-(x² + a²)/2) I_0(a x) dx` by quadrature.
///
/// The half line is mapped through `x = b − ln u` onto `u ∈ (0, 1]` and cut
/// at the first `u` where the mapped integrand drops below `abs_tol / 10`.
pub fn marcum_q1_numeric(a: f64, b: f64, spec: QuadSpec) -> Result<f64> {
    if a.is_nan() || a < 0.0 || !a.is_finite() {
        return Err(domain(
            "marcum_q1_numeric",
            format!("a must be non-negative, got {a}"),
        ));
    }
    if b.is_nan() || b < 0.0 || !b.is_finite() {
        return Err(domain(
            "marcum_q1_numeric",
            format!("b must be non-negative, got {b}"),
        ));
    }

    // exp(-(x²+a²)/2) I0(ax) = exp(-(x-a)²/2) · [exp(-ax) I0(ax)]
    let radial = |x: f64| {
        let d = x - a;
        x * (-0.5 * d * d).exp() * i0_scaled(a * x)
    };
    let mapped = |u: f64| {
        let t = -u.ln();
        radial(b + t) / u
    };

    let cutoff = spec.abs_tol / 10.0;
    let mut t_max = (a - b).max(0.0) + 1.0;
    while radial(b + t_max) * t_max.exp() >= cutoff {
        t_max *= 1.5;
    }
    let u_min = (-t_max).exp();

    let q = integrate(mapped, u_min, 1.0, spec)?;
    Ok(q.clamp(0.0, 1.0))
}
