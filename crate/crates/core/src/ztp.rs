//! The zero-truncated Poisson law `P(X = k) = e^{-λ} λ^k / (k! (1 − e^{-λ}))`,
//! `k ≥ 1`, together with its size-biased companion, Laplace transform,
//! sampler and maximum-likelihood fit.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{domain, Error, Result};
use crate::specfun::{self, ln_expm1, ln_gamma_unchecked, ln_one_minus_exp_neg};

/// Lower end of the MLE search bracket and the value reported for samples
/// whose mean sits on the `λ → 0` boundary.
pub const MLE_LAMBDA_FLOOR: f64 = 1e-8;

/// Above this rate the sampler switches from sequential inversion to
/// rejection from the untruncated Poisson law.
const INVERSION_MAX_LAMBDA: f64 = 50.0;

/// Parameter of a ZTP law; `λ > 0` and finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZtpParams {
    lambda: f64,
}

impl ZtpParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
                reason: "must be positive and finite",
            });
        }
        Ok(Self { lambda })
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `ln(e^{-λ} / (1 − e^{-λ}))`, the normalising factor shared by most
    /// closed forms.
    pub(crate) fn ln_norm(&self) -> f64 {
        -self.lambda - ln_one_minus_exp_neg(self.lambda)
    }

    pub fn log_pmf(&self, k: u64) -> Result<f64> {
        if k == 0 {
            return Err(domain("pmf", "k must be at least 1"));
        }
        let kf = k as f64;
        Ok(kf * self.lambda.ln()
            - self.lambda
            - ln_gamma_unchecked(kf + 1.0)
            - ln_one_minus_exp_neg(self.lambda))
    }

    pub fn pmf(&self, k: u64) -> Result<f64> {
        self.log_pmf(k).map(f64::exp)
    }

    /// `F(x) = 1 − P(⌊x⌋ + 1, λ) / (1 − e^{-λ})` for `x ≥ 1`, zero below.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() || x < 1.0 {
            return 0.0;
        }
        if x.is_infinite() {
            return 1.0;
        }
        let s = x.floor() + 1.0;
        let p = specfun::reg_lower_gamma(s, self.lambda)
            .expect("s ≥ 2 and λ > 0 are inside the incomplete gamma domain");
        (1.0 - p / -(-self.lambda).exp_m1()).clamp(0.0, 1.0)
    }

    /// `μ = λ / (1 − e^{-λ})`.
    pub fn mean(&self) -> f64 {
        ztp_mean(self.lambda)
    }

    /// Size-biased law `k P(k) / μ = e^{-λ} λ^{k-1} / (k-1)!`.
    pub fn size_biased_pmf(&self, k: u64) -> Result<f64> {
        if k == 0 {
            return Err(domain("size_biased_pmf", "k must be at least 1"));
        }
        let j = (k - 1) as f64;
        let ln_power = if k == 1 { 0.0 } else { j * self.lambda.ln() };
        Ok((ln_power - self.lambda - ln_gamma_unchecked(j + 1.0)).exp())
    }

    /// `L(x) = Σ_k e^{-xk} P(k) = e^{-λ} (exp(λ e^{-x}) − 1) / (1 − e^{-λ})`.
    pub fn laplace_transform(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x <= 0.0 {
            return Err(domain(
                "laplace_transform",
                format!("x must be positive, got {x}"),
            ));
        }
        let a = self.lambda * (-x).exp();
        if a == 0.0 {
            return Ok(0.0);
        }
        Ok((self.ln_norm() + ln_expm1(a)).exp())
    }

    /// `H(x, x*) = Σ_{k=1}^{x*-1} e^{-xk} P(k)`, evaluated through the upper
    /// incomplete gamma closed form
    /// `e^{-λ} {exp(λe^{-x}) Q(x*, λe^{-x}) − 1} / (1 − e^{-λ})`.
    pub fn h_function(&self, x: f64, xstar: u64) -> Result<f64> {
        if x.is_nan() || x <= 0.0 {
            return Err(domain("h_function", format!("x must be positive, got {x}")));
        }
        if xstar == 0 {
            return Err(domain("h_function", "x* must be at least 1"));
        }
        let a = self.lambda * (-x).exp();
        if a == 0.0 {
            return Ok(0.0);
        }
        let (p, q) = specfun::incomplete_gamma_pair(xstar as f64, a)?;
        if q == 0.0 {
            return self.laplace_transform(x);
        }
        let ln_q = if p < 0.5 { (-p).ln_1p() } else { q.ln() };
        let ln_scaled = a + ln_q;
        if ln_scaled <= 0.0 {
            return Ok(0.0);
        }
        Ok((self.ln_norm() + ln_expm1(ln_scaled)).exp())
    }

    /// Draws one value.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        if self.lambda > INVERSION_MAX_LAMBDA {
            let parent = Poisson::new(self.lambda).expect("λ is positive and finite");
            loop {
                let k = parent.sample(rng) as u64;
                if k >= 1 {
                    return k;
                }
            }
        }
        // Sequential inversion: smallest k with F(k) > u.
        let u: f64 = rng.random();
        let mut k = 1u64;
        let mut p = self.lambda / self.lambda.exp_m1();
        let mut cum = p;
        while u >= cum {
            k += 1;
            p *= self.lambda / k as f64;
            if p == 0.0 {
                break;
            }
            cum += p;
        }
        k
    }

    /// `n` independent draws; deterministic for a given generator state.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<u64> {
        (0..n).map(|_| self.draw(rng)).collect()
    }
}

/// `λ / (1 − e^{-λ})`, with the series `1 + λ/2 + λ²/12` for tiny `λ`.
pub fn ztp_mean(lambda: f64) -> f64 {
    if lambda < 1e-6 {
        1.0 + lambda / 2.0 + lambda * lambda / 12.0
    } else {
        lambda / -(-lambda).exp_m1()
    }
}

/// Observed counts; at least two values, all ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    values: Vec<u64>,
}

impl Sample {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSample(format!(
                "need at least 2 observations, got {}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|&v| v == 0) {
            return Err(Error::InvalidSample(format!(
                "values must be >= 1 (zero at position {pos})"
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.values.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() as f64 / self.len() as f64
    }
}

impl TryFrom<Vec<u64>> for Sample {
    type Error = Error;

    fn try_from(values: Vec<u64>) -> Result<Self> {
        Sample::new(values)
    }
}

/// Maximum-likelihood estimate of `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleFit {
    pub lambda: f64,
    /// Set when the sample mean sits on the `λ → 0` boundary (all ones) and
    /// `lambda` has been clamped to [`MLE_LAMBDA_FLOOR`].
    pub degenerate: bool,
}

pub fn mle(sample: &Sample) -> MleFit {
    mle_from_mean(sample.mean())
}

/// Solves `x̄ = λ / (1 − e^{-λ})` for `λ`.
///
/// Bisection on `[1e-8, 51 x̄]` brackets the root of the strictly increasing
/// mean map; a few guarded Newton steps then polish it.
pub fn mle_from_mean(xbar: f64) -> MleFit {
    let degenerate = MleFit {
        lambda: MLE_LAMBDA_FLOOR,
        degenerate: true,
    };
    if xbar.is_nan() || xbar <= 1.0 + 1e-12 || ztp_mean(MLE_LAMBDA_FLOOR) >= xbar {
        return degenerate;
    }

    let mut lo = MLE_LAMBDA_FLOOR;
    let mut hi = xbar * 51.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ztp_mean(mid) < xbar {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut lambda = 0.5 * (lo + hi);
    for _ in 0..4 {
        let resid = ztp_mean(lambda) - xbar;
        if resid == 0.0 {
            break;
        }
        let slope = mean_derivative(lambda);
        let next = lambda - resid / slope;
        if !(next.is_finite() && next > 0.0) {
            break;
        }
        if (ztp_mean(next) - xbar).abs() < resid.abs() {
            lambda = next;
        } else {
            break;
        }
    }
    MleFit {
        lambda,
        degenerate: false,
    }
}

/// `dμ/dλ = (1 − e^{-λ} − λ e^{-λ}) / (1 − e^{-λ})²`.
fn mean_derivative(lambda: f64) -> f64 {
    if lambda < 1e-4 {
        return 0.5 + lambda / 6.0;
    }
    let e = (-lambda).exp();
    let om = -(-lambda).exp_m1();
    (om - lambda * e) / (om * om)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(l: f64) -> ZtpParams {
        ZtpParams::new(l).unwrap()
    }

    #[test]
    fn rejects_bad_lambda() {
        for l in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(ZtpParams::new(l).is_err(), "{l}");
        }
    }

    #[test]
    fn pmf_examples() {
        let d = p(1.0);
        assert!((d.pmf(1).unwrap() - 0.581_976_706_869_326_4).abs() < 1e-15);
        assert!((d.pmf(2).unwrap() - 0.5 * 0.581_976_706_869_326_4).abs() < 1e-15);
        assert!((p(0.1).pmf(1).unwrap() - 0.950_833_194_477_505).abs() < 1e-14);
        assert!(d.pmf(0).is_err());
        assert!((d.log_pmf(3).unwrap() - d.pmf(3).unwrap().ln()).abs() < 1e-14);
    }

    #[test]
    fn pmf_follows_ratio_recursion() {
        for l in [0.1, 1.0, 7.0] {
            let d = p(l);
            for k in 1..40 {
                let a = d.pmf(k).unwrap() * l / (k + 1) as f64;
                let b = d.pmf(k + 1).unwrap();
                assert!(((a - b) / b).abs() < 1e-12, "λ={l} k={k}");
            }
        }
    }

    #[test]
    fn cdf_examples() {
        let d = p(1.0);
        assert_eq!(d.cdf(0.5), 0.0);
        assert!((d.cdf(2.7) - 0.872_965_060_303_989_6).abs() < 1e-14);
        assert_eq!(d.cdf(f64::INFINITY), 1.0);
        assert!((d.cdf(1e6) - 1.0).abs() < 1e-15);
        assert_eq!(d.cdf(2.0), d.cdf(2.999));
    }

    #[test]
    fn mean_examples() {
        assert!((p(1.0).mean() - 1.581_976_706_869_326_4).abs() < 1e-15);
        assert!((p(2.0).mean() - 2.313_035_285_499_331_3).abs() < 1e-15);
        assert!((p(1e-9).mean() - 1.0).abs() < 1e-9);
        // series and closed form meet smoothly at the switch
        let below = ztp_mean(0.999_999e-6);
        let above = ztp_mean(1.000_001e-6);
        assert!((above - below - 1e-12).abs() < 1e-15);
    }

    #[test]
    fn size_biased_examples() {
        let d = p(1.0);
        let e1 = (-1.0f64).exp();
        assert!((d.size_biased_pmf(1).unwrap() - e1).abs() < 1e-16);
        assert!((d.size_biased_pmf(3).unwrap() - e1 / 2.0).abs() < 1e-15);
        assert!(d.size_biased_pmf(0).is_err());
        for l in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let total: f64 = (1..200).map(|k| p(l).size_biased_pmf(k).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn laplace_examples() {
        let d = p(1.0);
        assert!((d.laplace_transform(1e-12).unwrap() - 1.0).abs() < 1e-11);
        assert!((d.laplace_transform(2f64.ln()).unwrap() - 0.377_540_668_798_145_4).abs() < 1e-15);
        assert!(d.laplace_transform(800.0).unwrap() < 1e-300);
        assert!(d.laplace_transform(0.0).is_err());
        // large λ does not overflow
        let big = p(900.0).laplace_transform(1e-3).unwrap();
        assert!(big.is_finite() && big > 0.0 && big < 1.0);
    }

    #[test]
    fn h_function_examples() {
        let d = p(1.0);
        let x = 2f64.ln();
        assert!(d.h_function(x, 1).unwrap().abs() < 1e-15);
        assert!((d.h_function(x, 2).unwrap() - 0.5 * 0.581_976_706_869_326_4).abs() < 1e-14);
        let lf = d.laplace_transform(x).unwrap();
        assert!((d.h_function(x, 200).unwrap() - lf).abs() < 1e-14);
        assert!(d.h_function(0.0, 2).is_err());
        assert!(d.h_function(1.0, 0).is_err());
    }

    #[test]
    fn sampler_is_deterministic_and_supported() {
        let d = p(1.3);
        let a = d.sample(1000, &mut ChaCha8Rng::seed_from_u64(7));
        let b = d.sample(1000, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        assert!(a.iter().all(|&v| v >= 1));
        let big = p(120.0).sample(500, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(big.iter().all(|&v| v >= 1));
        let m = big.iter().sum::<u64>() as f64 / 500.0;
        assert!((m - 120.0).abs() < 4.0 * (120.0f64 / 500.0).sqrt());
    }

    #[test]
    fn sample_validation() {
        assert!(Sample::new(vec![3]).is_err());
        assert!(Sample::new(vec![]).is_err());
        assert!(Sample::new(vec![1, 0, 2]).is_err());
        let s = Sample::new(vec![1, 2, 3]).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.sum(), 6);
    }

    #[test]
    fn mle_examples() {
        let fit = mle(&Sample::new(vec![1, 1, 2]).unwrap());
        assert!(!fit.degenerate);
        assert!((fit.lambda - 0.605_859_977_919_000_3).abs() < 1e-12);
        let fit = mle(&Sample::new(vec![1, 1, 1]).unwrap());
        assert!(fit.degenerate);
        assert_eq!(fit.lambda, MLE_LAMBDA_FLOOR);
    }

    #[test]
    fn mle_residual_contract() {
        for sum in [4u64, 7, 13, 40, 101, 1000, 25_000] {
            let n = 3;
            let xbar = sum as f64 / n as f64;
            let fit = mle_from_mean(xbar);
            assert!(
                (ztp_mean(fit.lambda) - xbar).abs() <= 1e-12 * xbar,
                "x̄={xbar}"
            );
        }
        let xbar = 1.0 + 1.0 / 50_000.0;
        let fit = mle_from_mean(xbar);
        assert!(!fit.degenerate);
        assert!((ztp_mean(fit.lambda) - xbar).abs() <= 1e-12 * xbar);
    }
}
