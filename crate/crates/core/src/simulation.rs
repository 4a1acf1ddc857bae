//! Reproducible Monte Carlo study of the standard and bias-corrected Gini
//! estimators over a grid of `(λ, n)` cells.
//!
//! Every replication draws from its own ChaCha stream keyed by
//! `(cell_seed, replication index)`, per-replication results are stored in
//! replication order, and all reductions run sequentially over that array.
//! The output therefore does not depend on the thread count or schedule.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::gini::{self, GiniReport};
use crate::specfun::QuadSpec;
use crate::ztp::{mle_from_mean, MleFit, Sample, ZtpParams};

/// Grid and settings of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub lambdas: Vec<f64>,
    pub ns: Vec<usize>,
    pub reps: usize,
    pub master_seed: u64,
    pub quad: QuadSpec,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
}

pub const DEFAULT_LAMBDAS: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
pub const DEFAULT_NS: [usize; 4] = [5, 10, 30, 50];
pub const DEFAULT_REPS: usize = 1000;
pub const DEFAULT_SEED: u64 = 20_250_101;

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            ns: DEFAULT_NS.to_vec(),
            reps: DEFAULT_REPS,
            master_seed: DEFAULT_SEED,
            quad: QuadSpec::default(),
            threads: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() {
            return Err(domain("SimConfig", "lambda grid is empty"));
        }
        if self.ns.is_empty() {
            return Err(domain("SimConfig", "sample-size grid is empty"));
        }
        for &l in &self.lambdas {
            ZtpParams::new(l)?;
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidParameter {
                name: "n",
                value: n as f64,
                reason: "sample sizes must be at least 2",
            });
        }
        if self.reps == 0 {
            return Err(Error::InvalidParameter {
                name: "reps",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidParameter {
                name: "threads",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(())
    }
}

/// Monte Carlo summary of one `(λ, n)` cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimCellSummary {
    pub lambda: f64,
    pub n: usize,
    pub reps: usize,
    pub cell_seed: u64,
    pub true_g: f64,
    pub mean_g_hat: f64,
    pub mean_g_bc: f64,
    pub rel_bias_std: f64,
    pub rel_bias_bc: f64,
    pub mse_std: f64,
    pub mse_bc: f64,
    pub degenerate_count: usize,
}

/// Per-replication record kept by [`run_cell_detailed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replication {
    pub values_sum: u64,
    pub report: GiniReport,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the cell at grid position `(lambda_index, n_index)`.
pub fn cell_seed(master_seed: u64, lambda_index: usize, n_index: usize) -> u64 {
    let h = splitmix64(master_seed);
    let h = splitmix64(h ^ (lambda_index as u64).wrapping_mul(0xD1B5_4A32_D192_ED03));
    splitmix64(h ^ (n_index as u64).wrapping_mul(0xABC9_8388_FB8F_AC03))
}

/// Generator for replication `rep` of a cell.
pub fn replication_rng(cell_seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed);
    rng.set_stream(rep as u64);
    rng
}

/// `|mean(estimates) − true_g| / true_g`.
pub fn relative_bias(estimates: &[f64], true_g: f64) -> Result<f64> {
    if estimates.is_empty() {
        return Err(domain("relative_bias", "no estimates"));
    }
    if true_g.is_nan() || true_g <= 0.0 {
        return Err(domain(
            "relative_bias",
            format!("true value must be positive, got {true_g}"),
        ));
    }
    Ok((mean(estimates) - true_g).abs() / true_g)
}

/// `(1/N) Σ (estimate − true_g)²`.
pub fn mse(estimates: &[f64], true_g: f64) -> Result<f64> {
    if estimates.is_empty() {
        return Err(domain("mse", "no estimates"));
    }
    let ss: f64 = estimates.iter().map(|e| (e - true_g) * (e - true_g)).sum();
    Ok(ss / estimates.len() as f64)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Runs one cell and returns its summary.
pub fn run_cell(
    lambda: f64,
    n: usize,
    reps: usize,
    cell_seed: u64,
    quad: QuadSpec,
) -> Result<SimCellSummary> {
    run_cell_detailed(lambda, n, reps, cell_seed, quad).map(|(s, _)| s)
}

/// Runs one cell and also returns every replication in order.
///
/// The plug-in bias depends on a sample only through its sum, so it is
/// evaluated once per distinct sum; the values are bit-identical to calling
/// [`gini::estimate`] on each sample.
pub fn run_cell_detailed(
    lambda: f64,
    n: usize,
    reps: usize,
    cell_seed: u64,
    quad: QuadSpec,
) -> Result<(SimCellSummary, Vec<Replication>)> {
    let params = ZtpParams::new(lambda)?;
    if n < 2 {
        return Err(domain("run_cell", format!("n must be at least 2, got {n}")));
    }
    if reps == 0 {
        return Err(domain("run_cell", "reps must be at least 1"));
    }
    let true_g = gini::gini_population(&params, quad)?;

    let draws: Vec<(f64, Sample)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(cell_seed, rep);
            let sample =
                Sample::new(params.sample(n, &mut rng)).expect("n ≥ 2 draws of support ≥ 1");
            (gini::gini_sample(&sample), sample)
        })
        .collect();

    let mut sums: Vec<u64> = draws.iter().map(|(_, s)| s.sum()).collect();
    sums.sort_unstable();
    sums.dedup();
    let fitted: BTreeMap<u64, (MleFit, f64)> = sums
        .into_par_iter()
        .map(|sum| {
            let fit = mle_from_mean(sum as f64 / n as f64);
            let b = gini::bias(&ZtpParams::new(fit.lambda)?, n, quad)?;
            Ok((sum, (fit, b)))
        })
        .collect::<Result<_>>()?;

    let replications: Vec<Replication> = draws
        .iter()
        .map(|(g_hat, sample)| {
            let sum = sample.sum();
            let (fit, b) = fitted[&sum];
            Replication {
                values_sum: sum,
                report: GiniReport::assemble(*g_hat, fit, b, n),
            }
        })
        .collect();

    let g_std: Vec<f64> = replications.iter().map(|r| r.report.g_hat).collect();
    let g_bc: Vec<f64> = replications.iter().map(|r| r.report.g_hat_bc).collect();
    let summary = SimCellSummary {
        lambda,
        n,
        reps,
        cell_seed,
        true_g,
        mean_g_hat: mean(&g_std),
        mean_g_bc: mean(&g_bc),
        rel_bias_std: relative_bias(&g_std, true_g)?,
        rel_bias_bc: relative_bias(&g_bc, true_g)?,
        mse_std: mse(&g_std, true_g)?,
        mse_bc: mse(&g_bc, true_g)?,
        degenerate_count: replications
            .iter()
            .filter(|r| r.report.lambda_degenerate)
            .count(),
    };
    Ok((summary, replications))
}

/// A cell that could not be completed.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub lambda: f64,
    pub n: usize,
    pub cell_seed: u64,
    pub error: Error,
}

pub type CellOutcome = std::result::Result<SimCellSummary, CellFailure>;

/// Progress notification emitted after each finished cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellProgress {
    pub lambda: f64,
    pub n: usize,
    pub completed: usize,
    pub total: usize,
}

/// Runs every `(λ, n)` cell of the grid, in row-major order (λ outer).
///
/// Cells run concurrently; a failed cell is reported in place and the rest
/// still complete.
pub fn run_simulation(
    config: &SimConfig,
    progress: Option<&(dyn Fn(CellProgress) + Sync)>,
) -> Result<Vec<CellOutcome>> {
    config.validate()?;
    let cells: Vec<(usize, usize)> = (0..config.lambdas.len())
        .flat_map(|li| (0..config.ns.len()).map(move |ni| (li, ni)))
        .collect();
    let total = cells.len();
    let completed = std::sync::atomic::AtomicUsize::new(0);

    let work = || -> Vec<CellOutcome> {
        cells
            .par_iter()
            .map(|&(li, ni)| {
                let lambda = config.lambdas[li];
                let n = config.ns[ni];
                let seed = cell_seed(config.master_seed, li, ni);
                let outcome =
                    run_cell(lambda, n, config.reps, seed, config.quad).map_err(|error| {
                        CellFailure {
                            lambda,
                            n,
                            cell_seed: seed,
                            error,
                        }
                    });
                let done = completed.fetch_add(1, std::sync::atomic::Ordering::SeqCst) + 1;
                if let Some(cb) = progress {
                    cb(CellProgress {
                        lambda,
                        n,
                        completed: done,
                        total,
                    });
                }
                outcome
            })
            .collect()
    };

    match config.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| domain("run_simulation", format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_bias_and_mse_definitions() {
        let g = 0.25;
        assert_eq!(relative_bias(&[g, g, g], g).unwrap(), 0.0);
        assert!((relative_bias(&[0.23, 0.25], g).unwrap() - 0.04).abs() < 1e-15);
        assert!((relative_bias(&[0.3], g).unwrap() - 0.2).abs() < 1e-15);
        assert!(relative_bias(&[], g).is_err());
        assert!(relative_bias(&[0.1], 0.0).is_err());

        assert_eq!(mse(&[g, g], g).unwrap(), 0.0);
        let d = 0.01;
        assert!((mse(&[g - d, g + d], g).unwrap() - d * d).abs() < 1e-18);
        assert!((mse(&[0.3], g).unwrap() - 0.05 * 0.05).abs() < 1e-17);
        assert!(mse(&[], g).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::default().validate().is_ok());
        let bad = |f: fn(&mut SimConfig)| {
            let mut c = SimConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.lambdas.clear()));
        assert!(bad(|c| c.ns.clear()));
        assert!(bad(|c| c.lambdas.push(-1.0)));
        assert!(bad(|c| c.ns.push(1)));
        assert!(bad(|c| c.reps = 0));
        assert!(bad(|c| c.threads = Some(0)));
    }

    #[test]
    fn cell_seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for li in 0..10 {
            for ni in 0..10 {
                assert!(seen.insert(cell_seed(42, li, ni)));
            }
        }
        assert_ne!(cell_seed(1, 0, 0), cell_seed(2, 0, 0));
    }

    #[test]
    fn single_replication_summary() {
        let q = QuadSpec::default();
        let (s, reps) = run_cell_detailed(1.0, 2, 1, 99, q).unwrap();
        let r = reps[0].report;
        assert_eq!(s.mean_g_hat, r.g_hat);
        assert_eq!(s.rel_bias_std, (r.g_hat - s.true_g).abs() / s.true_g);
        assert_eq!(s.mse_bc, (r.g_hat_bc - s.true_g).powi(2));
    }

    #[test]
    fn cached_bias_matches_direct_estimate() {
        let q = QuadSpec::default();
        let (_, reps) = run_cell_detailed(0.5, 5, 40, 7, q).unwrap();
        for (i, r) in reps.iter().enumerate() {
            let mut rng = replication_rng(7, i);
            let sample = Sample::new(ZtpParams::new(0.5).unwrap().sample(5, &mut rng)).unwrap();
            assert_eq!(gini::estimate(&sample, q).unwrap(), r.report);
        }
    }

    #[test]
    fn cell_is_deterministic() {
        let q = QuadSpec::default();
        let a = run_cell(2.0, 10, 200, 5, q).unwrap();
        let b = run_cell(2.0, 10, 200, 5, q).unwrap();
        assert_eq!(a, b);
    }
}
