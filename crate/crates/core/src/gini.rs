//! Population Gini coefficient of the ZTP law, the sample Gini estimator,
//! its exact finite-sample expectation and bias, and the plug-in
//! bias-corrected estimator.
//!
//! Every integrand over `y ∈ [0, 1]` carries the factor `(e^{λy} − 1)^{n-2}`
//! and a prefactor like `e^{-nλ} / (1 − e^{-λ})^n`; at moderate `λ` and `n`
//! one overflows while the other underflows. The integrands are therefore
//! assembled as a single exponent from scaled Bessel values.

use crate::error::{domain, Result};
use crate::specfun::{
    i0_scaled, i1_scaled, integrate, ln_expm1, ln_one_minus_exp_neg, sum_excess_scaled_unchecked,
    QuadSpec,
};
use crate::ztp::{mle, MleFit, Sample, ZtpParams};

/// Below this `λy` the weight `(e^{λy} − 1)^{n-2}` is taken as zero (n > 2).
const WEIGHT_FLOOR: f64 = 1e-300;

/// Outcome of estimating the Gini coefficient from one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GiniReport {
    pub g_hat: f64,
    pub lambda_hat: f64,
    pub lambda_degenerate: bool,
    /// Exact bias formula evaluated at `lambda_hat`.
    pub bias_hat: f64,
    pub g_hat_bc: f64,
    pub n: usize,
}

impl GiniReport {
    pub(crate) fn assemble(g_hat: f64, fit: MleFit, bias_hat: f64, n: usize) -> Self {
        Self {
            g_hat,
            lambda_hat: fit.lambda,
            lambda_degenerate: fit.degenerate,
            bias_hat,
            g_hat_bc: g_hat - bias_hat,
            n,
        }
    }
}

fn check_n(func: &'static str, n: usize) -> Result<()> {
    if n < 2 {
        return Err(domain(
            func,
            format!("sample size must be at least 2, got {n}"),
        ));
    }
    Ok(())
}

/// `∫_0^λ I_0(2√(λt)) e^{-t} dt` multiplied by `e^{-λ} / (1 − e^{-λ})`.
fn scaled_bessel_tail_integral(params: &ZtpParams, spec: QuadSpec) -> Result<f64> {
    let lambda = params.lambda();
    let ln_norm = params.ln_norm();
    integrate(
        |t| {
            let z = 2.0 * (lambda * t).sqrt();
            (ln_norm + z - t).exp() * i0_scaled(z)
        },
        0.0,
        lambda,
        spec,
    )
}

/// `P(X < X*)` with `X*` size-biased and independent of `X`.
pub fn prob_less(params: &ZtpParams, spec: QuadSpec) -> Result<f64> {
    Ok(1.0 - scaled_bessel_tail_integral(params, spec)?)
}

/// `P(X = X*) = e^{-2λ} I_1(2λ) / (1 − e^{-λ})`.
pub fn prob_equal(params: &ZtpParams) -> f64 {
    let lambda = params.lambda();
    (i1_scaled(2.0 * lambda).ln() - ln_one_minus_exp_neg(lambda)).exp()
}

/// Population Gini coefficient
/// `G = 1 − 2e^{-λ}/(1−e^{-λ}) ∫_0^λ I_0(2√(λt)) e^{-t} dt + e^{-2λ} I_1(2λ)/(1−e^{-λ})`.
pub fn gini_population(params: &ZtpParams, spec: QuadSpec) -> Result<f64> {
    let tail = scaled_bessel_tail_integral(params, spec)?;
    Ok((1.0 - 2.0 * tail + prob_equal(params)).max(0.0))
}

/// Sample Gini `Ĝ = Σ_{i<j} |X_i − X_j| / ((n − 1) Σ X_i)`.
///
/// Uses the sorted identity `Σ_{i<j} |x_(i) − x_(j)| = Σ_i (2i − n − 1) x_(i)`
/// in exact integer arithmetic.
pub fn gini_sample(sample: &Sample) -> f64 {
    let mut sorted = sample.values().to_vec();
    sorted.sort_unstable();
    let (pairwise, total) = sorted_pairwise_sum(&sorted);
    let n = sorted.len() as u128;
    pairwise as f64 / ((n - 1) * total) as f64
}

/// [`gini_sample`] on a raw slice, validating support and size.
pub fn gini_of_values(values: &[u64]) -> Result<f64> {
    let sample = Sample::new(values.to_vec()).map_err(|e| domain("gini_sample", e.to_string()))?;
    Ok(gini_sample(&sample))
}

/// Returns `(Σ_{i<j} |x_i − x_j|, Σ x_i)` for ascending `sorted`.
pub(crate) fn sorted_pairwise_sum(sorted: &[u64]) -> (u128, u128) {
    let n = sorted.len() as i128;
    let mut weighted: i128 = 0;
    let mut total: u128 = 0;
    for (i, &x) in sorted.iter().enumerate() {
        weighted += (2 * (i as i128 + 1) - n - 1) * x as i128;
        total += x as u128;
    }
    (weighted as u128, total)
}

/// `(n − 2) ln(e^{λy} − 1)`, or `None` where the weight vanishes.
fn ln_weight(lambda: f64, y: f64, n: usize) -> Option<f64> {
    if n == 2 {
        return Some(0.0);
    }
    let ly = lambda * y;
    if ly < WEIGHT_FLOOR {
        return None;
    }
    Some((n - 2) as f64 * ln_expm1(ly))
}

/// `∫_0^1 exp(ln_prefactor + 2λy + ln b(2λy)) (e^{λy} − 1)^{n-2} dy` where
/// `b` is an exponentially scaled Bessel combination.
fn weighted_bessel_integral(
    lambda: f64,
    n: usize,
    ln_prefactor: f64,
    scaled: impl Fn(f64) -> f64,
    spec: QuadSpec,
) -> Result<f64> {
    integrate(
        |y| {
            let Some(lw) = ln_weight(lambda, y, n) else {
                return 0.0;
            };
            let z = 2.0 * lambda * y;
            let b = scaled(z);
            if b <= 0.0 {
                return 0.0;
            }
            (ln_prefactor + z + b.ln() + lw).exp()
        },
        0.0,
        1.0,
        spec,
    )
}

/// `R_1(F)`: the `ε → 1` limit of the `R_ε` functional,
/// `e^{-nλ}/(2(1−e^{-λ})^{n-1}) ∫_0^1 I_0(2λy)(e^{λy}−1)^{n-2} dy
///  + (e^{-λ}+n−1)/(2n(n−1)λ) − e^{-λ}/((n−1)λ)`.
pub fn r1(params: &ZtpParams, n: usize, spec: QuadSpec) -> Result<f64> {
    check_n("r1", n)?;
    let lambda = params.lambda();
    let nf = n as f64;
    let ln_pre = -nf * lambda - (nf - 1.0) * ln_one_minus_exp_neg(lambda) - std::f64::consts::LN_2;
    let integral = weighted_bessel_integral(lambda, n, ln_pre, i0_scaled, spec)?;
    let e = (-lambda).exp();
    Ok(integral + (e + nf - 1.0) / (2.0 * nf * (nf - 1.0) * lambda) - e / ((nf - 1.0) * lambda))
}

/// `R_∞(F) = (1 − e^{-λ}) / (nλ)`.
pub fn r_infinity(params: &ZtpParams, n: usize) -> Result<f64> {
    check_n("r_infinity", n)?;
    let lambda = params.lambda();
    Ok(-(-lambda).exp_m1() / (n as f64 * lambda))
}

/// `E[g(X*, X) 1{X = X*}] = e^{-nλ}/(1−e^{-λ})^{n-1} ∫_0^1 I_1(2λy)(e^{λy}−1)^{n-2} dy`.
pub fn expected_g_diag(params: &ZtpParams, n: usize, spec: QuadSpec) -> Result<f64> {
    check_n("expected_g_diag", n)?;
    let lambda = params.lambda();
    let nf = n as f64;
    let ln_pre = -nf * lambda - (nf - 1.0) * ln_one_minus_exp_neg(lambda);
    weighted_bessel_integral(lambda, n, ln_pre, i1_scaled, spec)
}

/// `ln(nλ e^{-nλ} / (1 − e^{-λ})^n)`.
fn ln_expectation_prefactor(lambda: f64, n: usize) -> f64 {
    let nf = n as f64;
    (nf * lambda).ln() - nf * lambda - nf * ln_one_minus_exp_neg(lambda)
}

/// Exact expectation `E(Ĝ)` of the sample Gini for `n` i.i.d. ZTP draws.
///
/// Evaluated as
/// `nλe^{-nλ}/(1−e^{-λ})^n ∫_0^1 [I_0(2λy) + I_1(2λy) − e^{λy}] (e^{λy}−1)^{n-2} dy`,
/// which equals the textbook form with the constant
/// `n e^{-λ} / ((n−1)(1−e^{-λ}))` folded into the integral. The bracket is
/// non-negative, so nothing cancels as `λ → 0`.
pub fn expected_gini(params: &ZtpParams, n: usize, spec: QuadSpec) -> Result<f64> {
    check_n("expected_gini", n)?;
    let lambda = params.lambda();
    let ln_pre = ln_expectation_prefactor(lambda, n);
    weighted_bessel_integral(lambda, n, ln_pre, sum_excess_scaled_unchecked, spec)
}

/// `E(Ĝ)` in its textbook arrangement: an integral of `I_0 + I_1` minus
/// `n e^{-λ} / ((n−1)(1−e^{-λ}))`. Loses precision for small `λ`.
pub fn expected_gini_unreduced(params: &ZtpParams, n: usize, spec: QuadSpec) -> Result<f64> {
    check_n("expected_gini_unreduced", n)?;
    let lambda = params.lambda();
    let nf = n as f64;
    let ln_pre = ln_expectation_prefactor(lambda, n);
    let integral =
        weighted_bessel_integral(lambda, n, ln_pre, |z| i0_scaled(z) + i1_scaled(z), spec)?;
    let odds = (-lambda - ln_one_minus_exp_neg(lambda)).exp();
    Ok(integral - nf * odds / (nf - 1.0))
}

/// `Bias(Ĝ, G) = E(Ĝ) − G`.
pub fn bias(params: &ZtpParams, n: usize, spec: QuadSpec) -> Result<f64> {
    Ok(expected_gini(params, n, spec)? - gini_population(params, spec)?)
}

/// The bias written out term by term, with the expectation in its textbook
/// arrangement and the population Gini expanded in place.
pub fn bias_expanded(params: &ZtpParams, n: usize, spec: QuadSpec) -> Result<f64> {
    let expectation = expected_gini_unreduced(params, n, spec)?;
    let tail = scaled_bessel_tail_integral(params, spec)?;
    Ok(expectation + 2.0 * tail - prob_equal(params) - 1.0)
}

/// Estimates `G` from a sample: `Ĝ`, the MLE `λ̂`, the plug-in bias at
/// `λ̂`, and `Ĝ_bc = Ĝ − bias`.
pub fn estimate(sample: &Sample, spec: QuadSpec) -> Result<GiniReport> {
    let g_hat = gini_sample(sample);
    let fit = mle(sample);
    let fitted = ZtpParams::new(fit.lambda)?;
    let bias_hat = bias(&fitted, sample.len(), spec)?;
    Ok(GiniReport::assemble(g_hat, fit, bias_hat, sample.len()))
}
