use ztpgini::simulation::replication_rng;
use ztpgini::specfun::reg_upper_gamma;
use ztpgini::ZtpParams;

fn chi_square_pvalue(lambda: f64, draws: usize, seed: u64) -> f64 {
    let d = ZtpParams::new(lambda).unwrap();
    let mut rng = replication_rng(seed, 0);
    let xs = d.sample(draws, &mut rng);
    assert!(xs.iter().all(|&x| x >= 1));

    let total = draws as f64;
    let kmax = xs
        .iter()
        .copied()
        .max()
        .unwrap()
        .max((lambda + 20.0 * lambda.sqrt() + 20.0) as u64);
    // adjacent values are merged until every bin expects at least 5 draws
    let mut bin_of = vec![0usize; kmax as usize + 1];
    let mut expected = vec![0.0];
    for k in 1..=kmax {
        let e = d.pmf(k).unwrap() * total;
        let remaining = (1.0 - d.cdf(k as f64)) * total;
        let cur = expected.len() - 1;
        bin_of[k as usize] = cur;
        expected[cur] += e;
        if expected[cur] >= 5.0 && remaining >= 5.0 {
            expected.push(0.0);
        }
    }
    let last = expected.len() - 1;
    expected[last] += (1.0 - d.cdf(kmax as f64)) * total;
    let mut observed = vec![0f64; expected.len()];
    for x in xs {
        observed[bin_of[x as usize]] += 1.0;
    }
    let stat: f64 = observed
        .iter()
        .zip(&expected)
        .map(|(o, e)| (o - e).powi(2) / e)
        .sum();
    let df = (observed.len() - 1) as f64;
    reg_upper_gamma(df / 2.0, stat / 2.0).unwrap()
}

#[test]
fn inversion_branch_fits_pmf() {
    for (i, lambda) in [0.05, 0.7, 3.0, 12.0, 49.0].into_iter().enumerate() {
        let p = chi_square_pvalue(lambda, 200_000, 100 + i as u64);
        assert!(p > 1e-3, "λ={lambda}: p={p}");
    }
}

#[test]
fn rejection_branch_fits_pmf() {
    for (i, lambda) in [50.5, 80.0, 300.0].into_iter().enumerate() {
        let p = chi_square_pvalue(lambda, 200_000, 200 + i as u64);
        assert!(p > 1e-3, "λ={lambda}: p={p}");
    }
}

#[test]
fn tiny_lambda_draws_mostly_ones() {
    let d = ZtpParams::new(1e-9).unwrap();
    let mut rng = replication_rng(1, 0);
    let xs = d.sample(10_000, &mut rng);
    assert!(xs.iter().all(|&x| x == 1));
}

#[test]
fn same_stream_same_draws() {
    let d = ZtpParams::new(2.5).unwrap();
    let a = d.sample(1000, &mut replication_rng(7, 3));
    let b = d.sample(1000, &mut replication_rng(7, 3));
    let c = d.sample(1000, &mut replication_rng(7, 4));
    assert_eq!(a, b);
    assert_ne!(a, c);
}
