//! Special-function kernel: log-gamma, regularized incomplete gamma,
//! modified Bessel `I_0`/`I_1`, first-order Marcum Q on the diagonal and
//! adaptive quadrature. Everything here is a pure function.

mod bessel;
mod gamma;
mod marcum;
mod quad;

pub use bessel::{bessel_i, bessel_i_scaled, bessel_sum_excess_scaled, SERIES_MAX};
pub use gamma::{incomplete_gamma_pair, log_gamma, reg_lower_gamma, reg_upper_gamma};
pub use marcum::{marcum_q1_equal, marcum_q1_numeric};
pub use quad::{integrate, integrate_with_error, QuadResult, QuadSpec};

pub(crate) use bessel::{i0_scaled, i1_scaled, sum_excess_scaled_unchecked};
pub(crate) use gamma::ln_gamma_unchecked;

/// `ln(e^a − 1)` for `a > 0` without overflow or cancellation.
pub(crate) fn ln_expm1(a: f64) -> f64 {
    if a > 36.0 {
        a + (-(-a).exp()).ln_1p()
    } else {
        a.exp_m1().ln()
    }
}

/// `ln(1 − e^{−a})` for `a > 0`.
pub(crate) fn ln_one_minus_exp_neg(a: f64) -> f64 {
    if a < std::f64::consts::LN_2 {
        (-(-a).exp_m1()).ln()
    } else {
        (-(-a).exp()).ln_1p()
    }
}
