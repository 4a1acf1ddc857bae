//! Globally adaptive Gauss–Kronrod (10/21 point) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate falls below `max(abs_tol, rel_tol·|result|)`. A subinterval may be
//! bisected at most `max_depth` times; hitting that cap before convergence
//! yields [`Error::Accuracy`] with the best estimate and its bound.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

/// Tolerances and refinement cap for every numeric integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_depth: 40,
        }
    }
}

impl QuadSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32) -> Result<Self> {
        if !(abs_tol.is_finite() && abs_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "abs_tol",
                value: abs_tol,
                reason: "must be positive and finite",
            });
        }
        if !(rel_tol.is_finite() && rel_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                value: rel_tol,
                reason: "must be positive and finite",
            });
        }
        if max_depth == 0 {
            return Err(Error::InvalidParameter {
                name: "max_depth",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_depth,
        })
    }

    fn target(&self, result: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * result.abs())
    }
}

/// Value and estimated absolute error of a converged integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_906_489_461,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ...
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_146,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    // Roundoff floor: no rule can resolve below a few ulps of the result.
    let floor = 50.0 * f64::EPSILON * value.abs();
    (value, error.max(floor))
}

/// Integrates `f` over `[lo, hi]`, returning only the value.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: QuadSpec) -> Result<f64> {
    integrate_with_error(f, lo, hi, spec).map(|r| r.value)
}

/// Integrates `f` over `[lo, hi]` and reports the error estimate.
pub fn integrate_with_error<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: QuadSpec,
) -> Result<QuadResult> {
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(domain(
            "integrate",
            format!("need finite lo < hi, got [{lo}, {hi}]"),
        ));
    }

    let (value, error) = kronrod21(&f, lo, hi);
    if !value.is_finite() || !error.is_finite() {
        return Err(domain(
            "integrate",
            "integrand is not finite on the interval",
        ));
    }
    let mut evaluations = 21;
    let mut total = value;
    let mut total_err = error;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        lo,
        hi,
        value,
        error,
        depth: 0,
    });

    while total_err > spec.target(total) {
        let worst = heap.pop().expect("heap holds at least one segment");
        if worst.depth >= spec.max_depth {
            return Err(Error::Accuracy {
                estimate: total,
                error_bound: total_err,
            });
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let (lv, le) = kronrod21(&f, worst.lo, mid);
        let (rv, re) = kronrod21(&f, mid, worst.hi);
        evaluations += 42;
        if !(lv.is_finite() && rv.is_finite() && le.is_finite() && re.is_finite()) {
            return Err(domain(
                "integrate",
                "integrand is not finite on the interval",
            ));
        }
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        for (a, b, v, e) in [(worst.lo, mid, lv, le), (mid, worst.hi, rv, re)] {
            heap.push(Segment {
                lo: a,
                hi: b,
                value: v,
                error: e,
                depth: worst.depth + 1,
            });
        }
        // Periodic resummation keeps the running totals free of drift.
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }

    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}
