//! Brute-force reference implementations.
//!
//! Everything here is computed from defining sums and enumerations (mean
//! absolute difference, the estimator applied to every tuple, defining
//! series of the transforms), never from the closed forms in [`crate::gini`]
//! or [`crate::ztp`]. The probabilities come from the pmf ratio recursion
//! `p_{k+1} = p_k λ / (k + 1)` started at `p_1 = λ / (e^λ − 1)`.

use std::cell::Cell;
use std::fmt;

use crate::error::{domain, Error, Result};
use crate::gini;
use crate::specfun::{integrate, ln_expm1, ln_one_minus_exp_neg, marcum_q1_numeric, QuadSpec};
use crate::ztp::ZtpParams;

/// Default neglected probability mass for series truncation.
pub const DEFAULT_TAIL: f64 = 1e-12;

/// Work cap for exhaustive enumeration (number of tuples).
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

/// Golden fixture produced by `ztpgini verify --write-golden`.
pub const GOLDEN_CSV: &str = include_str!("../data/oracle_golden.csv");

pub const GOLDEN_HEADER: &str = "quantity,lambda,n,value,tail,kmax";

/// pmf values `p_1, p_2, ...` and survival `S(k) = P(X > k)`, truncated once
/// `k > λ + 10√λ + 20` and the term is below 1e-20.
#[derive(Debug, Clone)]
struct PmfTable {
    pmf: Vec<f64>,
    survival: Vec<f64>,
}

impl PmfTable {
    fn new(lambda: f64) -> Self {
        let far = lambda + 10.0 * lambda.sqrt() + 20.0;
        let mut pmf = Vec::new();
        let mut p = lambda / lambda.exp_m1();
        let mut k = 1usize;
        loop {
            pmf.push(p);
            if (k as f64) > far && p < 1e-20 {
                break;
            }
            k += 1;
            p *= lambda / k as f64;
            if p == 0.0 {
                break;
            }
        }
        let mut survival = vec![0.0; pmf.len()];
        let mut acc = 0.0;
        for i in (0..pmf.len()).rev() {
            survival[i] = acc;
            acc += pmf[i];
        }
        Self { pmf, survival }
    }

    /// `P(X = k)` for 1-based `k`.
    fn p(&self, k: usize) -> f64 {
        self.pmf.get(k - 1).copied().unwrap_or(0.0)
    }

    fn mean(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .rev()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }

    /// `P*(k) = k P(k) / μ`.
    fn size_biased(&self, k: usize, mean: f64) -> f64 {
        k as f64 * self.p(k) / mean
    }

    /// Smallest `k` with `P(X > k) < tail`.
    fn kmax(&self, tail: f64) -> usize {
        self.survival
            .iter()
            .position(|&s| s < tail)
            .map(|i| i + 1)
            .unwrap_or(self.pmf.len())
    }
}

/// Smallest `k` with `P(X > k) < 1e-12`.
pub fn default_kmax(params: &ZtpParams) -> usize {
    PmfTable::new(params.lambda()).kmax(DEFAULT_TAIL)
}

/// `G = E|X₁ − X₂| / (2μ)` with `E|X₁ − X₂| = 2 Σ_k F(k)(1 − F(k))`, summed
/// until the survival function drops below `tail`.
pub fn gini_population_bruteforce(params: &ZtpParams, tail: f64) -> f64 {
    let table = PmfTable::new(params.lambda());
    let mut cdf = 0.0;
    let mut mad_half = 0.0;
    for (p, s) in table.pmf.iter().zip(&table.survival) {
        cdf += p;
        if *s < tail {
            break;
        }
        mad_half += cdf.min(1.0) * s;
    }
    mad_half / table.mean()
}

/// Same quantity through `E|X₁ − X₂| = 2 Σ_{k<l} (l − k) p_k p_l`.
pub fn gini_population_double_sum(params: &ZtpParams) -> f64 {
    let table = PmfTable::new(params.lambda());
    let len = table.pmf.len();
    let mut acc = 0.0;
    for k in 1..=len {
        for l in (k + 1)..=len {
            acc += (l - k) as f64 * table.p(k) * table.p(l);
        }
    }
    acc / table.mean()
}

/// `P(X < X*) = Σ_k F(k − 1) P*(k)`.
pub fn prob_less_series(params: &ZtpParams) -> f64 {
    let table = PmfTable::new(params.lambda());
    let mean = table.mean();
    let mut cdf_prev = 0.0;
    let mut acc = 0.0;
    for k in 1..=table.pmf.len() {
        acc += cdf_prev * table.size_biased(k, mean);
        cdf_prev += table.p(k);
    }
    acc
}

/// `P(X = X*) = Σ_k P(k) P*(k)`.
pub fn prob_equal_series(params: &ZtpParams) -> f64 {
    let table = PmfTable::new(params.lambda());
    let mean = table.mean();
    (1..=table.pmf.len())
        .map(|k| table.p(k) * table.size_biased(k, mean))
        .sum()
}

/// For `n = 2`, `g(k, k) = 1/(2k)`, so the diagonal expectation is
/// `Σ_k P(k) P*(k) / (2k)`.
pub fn g_diag_series_n2(params: &ZtpParams) -> f64 {
    let table = PmfTable::new(params.lambda());
    let mean = table.mean();
    (1..=table.pmf.len())
        .map(|k| table.p(k) * table.size_biased(k, mean) / (2 * k) as f64)
        .sum()
}

/// `Σ_k e^{-xk} P(k)`.
pub fn laplace_series(params: &ZtpParams, x: f64) -> f64 {
    let table = PmfTable::new(params.lambda());
    table
        .pmf
        .iter()
        .enumerate()
        .map(|(i, p)| (-x * (i + 1) as f64).exp() * p)
        .sum()
}

/// `Σ_{k=1}^{x*-1} e^{-xk} P(k)`.
pub fn h_series(params: &ZtpParams, x: f64, xstar: u64) -> f64 {
    let table = PmfTable::new(params.lambda());
    let mut p = table.p(1);
    let mut acc = 0.0;
    for k in 1..xstar {
        if k > 1 {
            p *= params.lambda() / k as f64;
        }
        acc += (-x * k as f64).exp() * p;
    }
    acc
}

/// Sample Gini by the O(n²) pairwise definition, in exact integer sums.
pub fn gini_pairwise(values: &[u64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(domain("gini_pairwise", "need at least two values"));
    }
    let mut pairwise: u128 = 0;
    for (i, &a) in values.iter().enumerate() {
        for &b in &values[i + 1..] {
            pairwise += a.abs_diff(b) as u128;
        }
    }
    let total: u128 = values.iter().map(|&v| v as u128).sum();
    if total == 0 {
        return Err(domain("gini_pairwise", "values must be positive"));
    }
    Ok(pairwise as f64 / ((values.len() as u128 - 1) * total) as f64)
}

/// `E(Ĝ)` by summing `Π p(k_i) · Ĝ(k_1, …, k_n)` over `{1..kmax}^n`.
///
/// `n = 4` must be requested explicitly through `allow_n4`.
pub fn expected_gini_enumeration(
    params: &ZtpParams,
    n: usize,
    kmax: usize,
    allow_n4: bool,
) -> Result<f64> {
    if !(2..=4).contains(&n) {
        return Err(domain(
            "expected_gini_enumeration",
            format!("n must be 2, 3 or 4, got {n}"),
        ));
    }
    if n == 4 && !allow_n4 {
        return Err(Error::Budget(
            "n = 4 enumeration must be enabled explicitly".into(),
        ));
    }
    if kmax == 0 {
        return Err(domain("expected_gini_enumeration", "kmax must be positive"));
    }
    let tuples = (kmax as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if tuples > ENUMERATION_BUDGET {
        return Err(Error::Budget(format!(
            "{kmax}^{n} = {tuples} tuples exceeds {ENUMERATION_BUDGET}"
        )));
    }

    let table = PmfTable::new(params.lambda());
    let probs: Vec<f64> = (1..=kmax).map(|k| table.p(k)).collect();
    let mut idx = vec![0usize; n];
    let mut values = vec![0u64; n];
    let mut acc = 0.0;
    'outer: loop {
        let mut weight = 1.0;
        for (slot, &i) in idx.iter().enumerate() {
            weight *= probs[i];
            values[slot] = (i + 1) as u64;
        }
        if weight > 0.0 {
            acc += weight * gini_pairwise(&values)?;
        }
        for slot in (0..n).rev() {
            idx[slot] += 1;
            if idx[slot] < kmax {
                continue 'outer;
            }
            idx[slot] = 0;
        }
        break;
    }
    Ok(acc)
}

/// `R_1(F)` before the diagonal Marcum identity is applied:
/// `e^{-nλ}/(1−e^{-λ})^{n-1} ∫_0^1 e^{2λy} Q_1(√(2λy), √(2λy)) (e^{λy}−1)^{n-2} dy
///  − e^{-λ}/((n−1)λ)`, with `Q_1` integrated numerically.
pub fn r1_marcum_form(params: &ZtpParams, n: usize, spec: QuadSpec) -> Result<f64> {
    if n < 2 {
        return Err(domain("r1_marcum_form", "n must be at least 2"));
    }
    let lambda = params.lambda();
    let nf = n as f64;
    let ln_pre = -nf * lambda - (nf - 1.0) * ln_one_minus_exp_neg(lambda);
    let failure: Cell<Option<Error>> = Cell::new(None);
    let integral = integrate(
        |y| {
            let ly = lambda * y;
            let ln_w = if n == 2 {
                0.0
            } else if ly < 1e-300 {
                return 0.0;
            } else {
                (nf - 2.0) * ln_expm1(ly)
            };
            let a = (2.0 * ly).sqrt();
            match marcum_q1_numeric(a, a, spec) {
                Ok(q) => (ln_pre + 2.0 * ly + ln_w).exp() * q,
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        },
        0.0,
        1.0,
        spec,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(integral - (-lambda).exp() / ((nf - 1.0) * lambda))
}

/// `R_∞(F)` from its integral over the Laplace variable,
/// `e^{-nλ}/(1−e^{-λ})^{n-1} ∫_0^∞ exp(λe^{-x} − x) (exp(λe^{-x}) − 1)^{n-1} dx`,
/// truncated where the integrand falls below `abs_tol / 10`.
pub fn r_infinity_numeric(params: &ZtpParams, n: usize, spec: QuadSpec) -> Result<f64> {
    if n < 2 {
        return Err(domain("r_infinity_numeric", "n must be at least 2"));
    }
    let lambda = params.lambda();
    let nf = n as f64;
    let ln_pre = -nf * lambda - (nf - 1.0) * ln_one_minus_exp_neg(lambda);
    let integrand = |x: f64| {
        let a = lambda * (-x).exp();
        if a <= 0.0 {
            return 0.0;
        }
        (ln_pre + a - x + (nf - 1.0) * ln_expm1(a)).exp()
    };
    let cutoff = spec.abs_tol / 10.0;
    let mut upper = 1.0;
    while integrand(upper) >= cutoff {
        upper *= 2.0;
    }
    integrate(integrand, 0.0, upper, spec)
}

/// Outcome of one identity comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub lambda: f64,
    pub n: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(
        name: impl Into<String>,
        lambda: f64,
        n: Option<usize>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        let residual = (lhs - rhs).abs();
        Self {
            name: name.into(),
            lambda,
            n,
            lhs,
            rhs,
            residual,
            tolerance,
            passed: residual.is_finite() && residual <= tolerance,
        }
    }

    fn failed(name: impl Into<String>, lambda: f64, n: Option<usize>, err: &Error) -> Self {
        Self {
            name: format!("{} ({err})", name.into()),
            lambda,
            n,
            lhs: f64::NAN,
            rhs: f64::NAN,
            residual: f64::NAN,
            tolerance: 0.0,
            passed: false,
        }
    }
}

impl fmt::Display for IdentityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n.map(|n| n.to_string()).unwrap_or_else(|| "-".into());
        let lambda = if self.lambda.is_nan() {
            "-".to_string()
        } else {
            self.lambda.to_string()
        };
        write!(
            f,
            "[{}] {:<44} lambda={:<8} n={:<4} residual={:.3e} tol={:.0e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            lambda,
            n,
            self.residual,
            self.tolerance
        )
    }
}

/// Collection of identity checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn extend(&mut self, other: IdentityReport) {
        self.checks.extend(other.checks);
    }
}

/// Tolerances applied by [`identity_suite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityTolerances {
    pub characterization: f64,
    pub assembly: f64,
    pub r1_dual_path: f64,
    pub r_infinity_numeric: f64,
    pub transforms: f64,
    pub marcum: f64,
}

impl Default for IdentityTolerances {
    fn default() -> Self {
        Self {
            characterization: 1e-10,
            assembly: 1e-10,
            r1_dual_path: 1e-8,
            r_infinity_numeric: 1e-9,
            transforms: 1e-12,
            marcum: 1e-9,
        }
    }
}

/// Options for [`identity_suite`]. `perturbation` is added to every
/// closed-form side and exists only to exercise the failure path.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SuiteOptions {
    pub tolerances: IdentityTolerances,
    pub perturbation: f64,
}

const TRANSFORM_XS: [f64; 4] = [0.1, std::f64::consts::LN_2, 1.0, 3.0];
const TRANSFORM_XSTARS: [u64; 5] = [1, 2, 3, 7, 20];

/// Cross-checks the closed forms for one `(λ, n)` against independent routes:
/// the characterization `G = 2P(X<X*) − 1 + P(X=X*)` and its two
/// probabilities against their series, the decomposition
/// `E(Ĝ) = nμ(2R_1 − R_∞ + E_diag)`, `R_1` against its Marcum-Q integral,
/// `R_∞` against its Laplace-variable integral, and the transform closed
/// forms against their defining sums.
pub fn identity_suite(
    params: &ZtpParams,
    n: usize,
    spec: QuadSpec,
    opts: SuiteOptions,
) -> IdentityReport {
    let lambda = params.lambda();
    let tol = opts.tolerances;
    let bump = opts.perturbation;
    let mut checks = Vec::new();
    let mut push = |name: &str, n: Option<usize>, r: Result<(f64, f64)>, tolerance: f64| {
        checks.push(match r {
            Ok((lhs, rhs)) => IdentityCheck::new(name, lambda, n, lhs + bump, rhs, tolerance),
            Err(e) => IdentityCheck::failed(name, lambda, n, &e),
        });
    };

    push(
        "characterization G = 2P(X<X*) - 1 + P(X=X*)",
        None,
        (|| {
            let g = gini::gini_population(params, spec)?;
            let less = gini::prob_less(params, spec)?;
            Ok((g, 2.0 * less - 1.0 + gini::prob_equal(params)))
        })(),
        tol.characterization,
    );
    push(
        "P(X<X*) closed form vs series",
        None,
        gini::prob_less(params, spec).map(|v| (v, prob_less_series(params))),
        tol.characterization,
    );
    push(
        "P(X=X*) closed form vs series",
        None,
        Ok((gini::prob_equal(params), prob_equal_series(params))),
        tol.characterization,
    );
    push(
        "E(G^) vs n*mu*(2R1 - Rinf + Ediag)",
        Some(n),
        (|| {
            let e = gini::expected_gini(params, n, spec)?;
            let r1 = gini::r1(params, n, spec)?;
            let rinf = gini::r_infinity(params, n)?;
            let ed = gini::expected_g_diag(params, n, spec)?;
            Ok((e, n as f64 * params.mean() * (2.0 * r1 - rinf + ed)))
        })(),
        tol.assembly,
    );
    push(
        "R1 Bessel form vs Marcum-Q integral",
        Some(n),
        (|| Ok((gini::r1(params, n, spec)?, r1_marcum_form(params, n, spec)?)))(),
        tol.r1_dual_path,
    );
    push(
        "Rinf closed form vs numeric integral",
        Some(n),
        (|| {
            Ok((
                gini::r_infinity(params, n)?,
                r_infinity_numeric(params, n, spec)?,
            ))
        })(),
        tol.r_infinity_numeric,
    );
    push(
        "laplace transform vs series",
        None,
        worst_pair(
            TRANSFORM_XS
                .iter()
                .map(|&x| Ok((params.laplace_transform(x)?, laplace_series(params, x)))),
        ),
        tol.transforms,
    );
    push(
        "H(x, x*) vs finite sum",
        None,
        worst_pair(TRANSFORM_XS.iter().flat_map(|&x| {
            TRANSFORM_XSTARS
                .iter()
                .map(move |&xs| Ok((params.h_function(x, xs)?, h_series(params, x, xs))))
        })),
        tol.transforms,
    );

    IdentityReport { checks }
}

fn worst_pair(pairs: impl Iterator<Item = Result<(f64, f64)>>) -> Result<(f64, f64)> {
    let mut worst = (0.0, 0.0);
    let mut worst_res = -1.0;
    for pair in pairs {
        let (a, b) = pair?;
        let res = (a - b).abs();
        if res.is_nan() || res > worst_res {
            worst = (a, b);
            worst_res = if res.is_nan() { f64::INFINITY } else { res };
        }
    }
    Ok(worst)
}

/// Values of `a²` at which the Marcum identity is checked.
pub const MARCUM_A2: [f64; 4] = [0.2, 1.0, 2.0, 4.0];

/// `Q_1(a, a) = [e^{-a²} I_0(a²) + 1] / 2` against direct integration of the
/// defining integral, for each `a²` in [`MARCUM_A2`].
pub fn marcum_identity_checks(spec: QuadSpec, opts: SuiteOptions) -> IdentityReport {
    let checks = MARCUM_A2
        .iter()
        .map(|&a2| {
            let a = f64::sqrt(a2);
            let name = format!("Marcum Q1(a,a) identity, a^2={a2}");
            let r = crate::specfun::marcum_q1_equal(a)
                .and_then(|closed| Ok((closed, marcum_q1_numeric(a, a, spec)?)));
            match r {
                Ok((lhs, rhs)) => IdentityCheck::new(
                    name,
                    f64::NAN,
                    None,
                    lhs + opts.perturbation,
                    rhs,
                    opts.tolerances.marcum,
                ),
                Err(e) => IdentityCheck::failed(name, f64::NAN, None, &e),
            }
        })
        .collect();
    IdentityReport { checks }
}

/// One row of the golden fixture.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenRow {
    pub quantity: GoldenQuantity,
    pub lambda: f64,
    pub n: Option<usize>,
    pub value: f64,
    pub tail: f64,
    pub kmax: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoldenQuantity {
    GiniPopulation,
    ProbLess,
    ProbEqual,
    ExpectedGini,
    GDiag,
}

impl GoldenQuantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::GiniPopulation => "gini_population",
            Self::ProbLess => "prob_less",
            Self::ProbEqual => "prob_equal",
            Self::ExpectedGini => "expected_gini",
            Self::GDiag => "expected_g_diag",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "gini_population" => Self::GiniPopulation,
            "prob_less" => Self::ProbLess,
            "prob_equal" => Self::ProbEqual,
            "expected_gini" => Self::ExpectedGini,
            "expected_g_diag" => Self::GDiag,
            _ => return None,
        })
    }

    /// Agreement required between the closed form and the oracle value.
    pub fn tolerance(&self) -> f64 {
        match self {
            Self::GiniPopulation => 1e-9,
            Self::ProbLess | Self::ProbEqual | Self::GDiag => 1e-10,
            Self::ExpectedGini => 1e-8,
        }
    }
}

/// Oracle values on the standard grid.
pub fn golden_rows() -> Result<Vec<GoldenRow>> {
    let lambdas = [0.1, 0.5, 1.0, 2.0, 5.0];
    let mut rows = Vec::new();
    for &l in &lambdas {
        let params = ZtpParams::new(l)?;
        let kmax = default_kmax(&params);
        for (quantity, value) in [
            (
                GoldenQuantity::GiniPopulation,
                gini_population_bruteforce(&params, DEFAULT_TAIL),
            ),
            (GoldenQuantity::ProbLess, prob_less_series(&params)),
            (GoldenQuantity::ProbEqual, prob_equal_series(&params)),
        ] {
            rows.push(GoldenRow {
                quantity,
                lambda: l,
                n: None,
                value,
                tail: DEFAULT_TAIL,
                kmax: None,
            });
        }
        rows.push(GoldenRow {
            quantity: GoldenQuantity::GDiag,
            lambda: l,
            n: Some(2),
            value: g_diag_series_n2(&params),
            tail: DEFAULT_TAIL,
            kmax: None,
        });
        for n in [2, 3] {
            rows.push(GoldenRow {
                quantity: GoldenQuantity::ExpectedGini,
                lambda: l,
                n: Some(n),
                value: expected_gini_enumeration(&params, n, kmax, false)?,
                tail: DEFAULT_TAIL,
                kmax: Some(kmax),
            });
        }
    }
    Ok(rows)
}

fn opt_to_string(v: Option<usize>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn render_golden(rows: &[GoldenRow]) -> String {
    let mut out = String::from(GOLDEN_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:e},{}\n",
            r.quantity.as_str(),
            r.lambda,
            opt_to_string(r.n),
            r.value,
            r.tail,
            opt_to_string(r.kmax)
        ));
    }
    out
}

pub fn parse_golden(text: &str) -> Result<Vec<GoldenRow>> {
    let bad = |line: usize, what: &str| domain("parse_golden", format!("line {line}: {what}"));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == GOLDEN_HEADER => {}
        _ => return Err(bad(1, "missing header")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad(i + 1, "expected 6 fields"));
        }
        let opt = |s: &str| -> Result<Option<usize>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(i + 1, "bad integer"))
            }
        };
        let num = |s: &str| -> Result<f64> { s.parse().map_err(|_| bad(i + 1, "bad number")) };
        rows.push(GoldenRow {
            quantity: GoldenQuantity::parse(f[0]).ok_or_else(|| bad(i + 1, "unknown quantity"))?,
            lambda: num(f[1])?,
            n: opt(f[2])?,
            value: num(f[3])?,
            tail: num(f[4])?,
            kmax: opt(f[5])?,
        });
    }
    Ok(rows)
}

/// Compares the library's closed forms against golden oracle rows.
pub fn compare_golden(rows: &[GoldenRow], spec: QuadSpec, perturbation: f64) -> IdentityReport {
    let checks = rows
        .iter()
        .map(|row| {
            let name = format!("golden {}", row.quantity.as_str());
            let computed = (|| -> Result<f64> {
                let params = ZtpParams::new(row.lambda)?;
                let need_n = || row.n.ok_or_else(|| domain("compare_golden", "row needs n"));
                Ok(match row.quantity {
                    GoldenQuantity::GiniPopulation => gini::gini_population(&params, spec)?,
                    GoldenQuantity::ProbLess => gini::prob_less(&params, spec)?,
                    GoldenQuantity::ProbEqual => gini::prob_equal(&params),
                    GoldenQuantity::ExpectedGini => gini::expected_gini(&params, need_n()?, spec)?,
                    GoldenQuantity::GDiag => gini::expected_g_diag(&params, need_n()?, spec)?,
                })
            })();
            match computed {
                Ok(v) => IdentityCheck::new(
                    name,
                    row.lambda,
                    row.n,
                    v + perturbation,
                    row.value,
                    row.quantity.tolerance(),
                ),
                Err(e) => IdentityCheck::failed(name, row.lambda, row.n, &e),
            }
        })
        .collect();
    IdentityReport { checks }
}
