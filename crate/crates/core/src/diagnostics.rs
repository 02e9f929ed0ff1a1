//! Chain diagnostics: acceptance rate, expected squared jumping distance,
//! autocorrelation, effective sample size and Kolmogorov–Smirnov distance.
//!
//! Multivariate traces are summarised through their first coordinate, except
//! ESJD which sums squared jumps over all coordinates.

use crate::error::{Error, Result};
use crate::kernel::ChainTrace;

pub fn acceptance_rate(accepted: &[bool]) -> Result<f64> {
    if accepted.is_empty() {
        return Err(Error::EmptyTrace);
    }
    Ok(accepted.iter().filter(|&&a| a).count() as f64 / accepted.len() as f64)
}

pub fn empirical_acceptance(trace: &ChainTrace) -> Result<f64> {
    acceptance_rate(&trace.accepted)
}

/// Mean over transitions of the squared Euclidean jump.
pub fn esjd(trace: &ChainTrace) -> Result<f64> {
    let n = trace.n_states();
    if n < 2 {
        return Err(Error::TooFewStates {
            needed: 2,
            found: n,
        });
    }
    let total: f64 = trace
        .raw_states()
        .chunks_exact(trace.dim())
        .zip(trace.raw_states().chunks_exact(trace.dim()).skip(1))
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (y - x) * (y - x)).sum::<f64>())
        .sum();
    Ok(total / (n - 1) as f64)
}

struct Centered {
    values: Vec<f64>,
    gamma0: f64,
}

impl Centered {
    fn new(series: &[f64]) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::TooFewStates {
                needed: 1,
                found: 0,
            });
        }
        let n = series.len() as f64;
        let mean = series.iter().sum::<f64>() / n;
        let values: Vec<f64> = series.iter().map(|x| x - mean).collect();
        let gamma0 = values.iter().map(|x| x * x).sum::<f64>() / n;
        if gamma0.is_nan() || gamma0 <= 0.0 {
            return Err(Error::ZeroVariance);
        }
        Ok(Centered { values, gamma0 })
    }

    /// Biased (divide-by-n) autocorrelation at `lag`.
    fn rho(&self, lag: usize) -> f64 {
        let v = &self.values;
        let cov: f64 = v.iter().zip(&v[lag..]).map(|(a, b)| a * b).sum();
        cov / v.len() as f64 / self.gamma0
    }
}

/// Autocorrelations at lags `0..=max_lag`.
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if series.len() <= max_lag {
        return Err(Error::TooFewStates {
            needed: max_lag + 1,
            found: series.len(),
        });
    }
    let c = Centered::new(series)?;
    let mut out: Vec<f64> = (0..=max_lag).map(|k| c.rho(k)).collect();
    out[0] = 1.0;
    Ok(out)
}

/// Effective sample size n / tau, with tau = -1 + 2 sum_m (rho_{2m} + rho_{2m+1})
/// truncated at the first non-positive pair (Geyer's initial positive sequence).
pub fn ess(series: &[f64]) -> Result<f64> {
    let c = Centered::new(series)?;
    let n = series.len();
    let mut tau = -1.0;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = c.rho(lag) + c.rho(lag + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        lag += 2;
    }
    Ok(n as f64 / tau.max(f64::EPSILON))
}

/// sup_x |F_n(x) - F(x)|.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::TooFewStates {
            needed: 1,
            found: 0,
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub acceptance_rate: f64,
    pub acf: Vec<f64>,
    pub esjd: f64,
    pub ess: f64,
    pub ks_to_target: f64,
}

impl DiagnosticsReport {
    /// Diagnose `trace` on its first coordinate against the marginal CDF `cdf`.
    pub fn from_trace<F: Fn(f64) -> f64>(
        trace: &ChainTrace,
        cdf: F,
        max_lag: usize,
    ) -> Result<Self> {
        let first = trace.coordinate(0);
        Ok(DiagnosticsReport {
            acceptance_rate: empirical_acceptance(trace)?,
            acf: acf(&first, max_lag)?,
            esjd: esjd(trace)?,
            ess: ess(&first)?,
            ks_to_target: ks_distance(&first, cdf)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn trace(d: usize, states: Vec<f64>, accepted: Vec<bool>) -> ChainTrace {
        ChainTrace::from_parts(d, states, accepted, 0).unwrap()
    }

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn acceptance_examples() {
        assert_eq!(acceptance_rate(&[true; 7]).unwrap(), 1.0);
        assert_eq!(acceptance_rate(&[true, false, true, false]).unwrap(), 0.5);
        assert!(matches!(acceptance_rate(&[]), Err(Error::EmptyTrace)));
        let t = trace(1, vec![0.0], vec![]);
        assert!(empirical_acceptance(&t).is_err());
    }

    #[test]
    fn esjd_examples() {
        let t = trace(2, vec![0.0, 0.0, 1.0, 1.0], vec![true]);
        assert_eq!(esjd(&t).unwrap(), 2.0);
        let stuck = trace(2, vec![0.3, 0.1, 0.3, 0.1, 0.3, 0.1], vec![false, false]);
        assert_eq!(esjd(&stuck).unwrap(), 0.0);
        assert!(matches!(
            esjd(&trace(1, vec![0.0], vec![])),
            Err(Error::TooFewStates { .. })
        ));
    }

    #[test]
    fn acf_examples() {
        let white = normals(100_000, 1);
        let r = acf(&white, 10).unwrap();
        assert_eq!(r[0], 1.0);
        assert!(r[1..].iter().all(|v| v.abs() < 0.02), "{r:?}");

        let alternating: Vec<f64> = (0..1000)
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        assert_abs_diff_eq!(acf(&alternating, 1).unwrap()[1], -1.0, epsilon = 2e-3);

        assert!(matches!(acf(&[2.0; 20], 3), Err(Error::ZeroVariance)));
        assert!(acf(&[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn ess_examples() {
        let n = 100_000;
        let e = ess(&normals(n, 2)).unwrap();
        assert!(e > 0.8 * n as f64 && e < 1.2 * n as f64, "{e}");
        assert!(matches!(ess(&[1.5; 100]), Err(Error::ZeroVariance)));

        // AR(1) with phi = 0.9 has tau = (1 + phi) / (1 - phi) = 19
        let z = normals(200_000, 3);
        let mut x = 0.0;
        let ar: Vec<f64> = z
            .iter()
            .map(|e| {
                x = 0.9 * x + e;
                x
            })
            .collect();
        let e = ess(&ar).unwrap();
        let expected = ar.len() as f64 / 19.0;
        assert!((e / expected - 1.0).abs() < 0.1, "{e} vs {expected}");
    }

    #[test]
    fn ks_examples() {
        let n = 999;
        let quantiles: Vec<f64> = (1..=n).map(|k| k as f64 / (n + 1) as f64).collect();
        let d = ks_distance(&quantiles, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(d <= 1.0 / (n + 1) as f64 + 1e-12);

        let c = 0.3;
        let constant = vec![c; 50];
        let d = ks_distance(&constant, |x| x).unwrap();
        assert!(d >= c.max(1.0 - c) - 1.0 / 50.0);
        assert!(ks_distance(&[], |x| x).is_err());
    }

    #[test]
    fn report_from_trace() {
        let states: Vec<f64> = normals(2001, 9);
        let accepted = vec![true; 2000];
        let t = trace(1, states, accepted);
        let r = DiagnosticsReport::from_trace(&t, crate::special::std_normal_cdf, 5).unwrap();
        assert_eq!(r.acceptance_rate, 1.0);
        assert_eq!(r.acf.len(), 6);
        assert_eq!(r.acf[0], 1.0);
        assert!(r.ks_to_target < 0.05);
    }

    proptest! {
        #[test]
        fn acf_is_bounded(series in proptest::collection::vec(-100.0f64..100.0, 20..200)) {
            prop_assume!(series.iter().any(|&x| (x - series[0]).abs() > 1e-6));
            let r = acf(&series, 10).unwrap();
            prop_assert_eq!(r[0], 1.0);
            prop_assert!(r.iter().all(|v| v.abs() <= 1.0 + 1e-12));
        }

        #[test]
        fn acceptance_halves_average(flags in proptest::collection::vec(any::<bool>(), 2..400)) {
            let flags = if flags.len() % 2 == 1 { &flags[1..] } else { &flags[..] };
            let h = flags.len() / 2;
            let full = acceptance_rate(flags).unwrap();
            let halves = 0.5 * (acceptance_rate(&flags[..h]).unwrap() + acceptance_rate(&flags[h..]).unwrap());
            prop_assert!((full - halves).abs() < 1e-12);
        }

        #[test]
        fn esjd_zero_iff_all_rejected(
            start in proptest::collection::vec(-1.0f64..1.0, 3),
            moves in proptest::collection::vec(proptest::option::of(-1.0f64..1.0), 1..30),
        ) {
            let mut states = start.clone();
            let mut accepted = Vec::new();
            let mut cur = start;
            for m in &moves {
                match m {
                    Some(delta) if *delta != 0.0 => {
                        cur = cur.iter().map(|x| x + delta).collect();
                        accepted.push(true);
                    }
                    _ => accepted.push(false),
                }
                states.extend_from_slice(&cur);
            }
            let t = trace(3, states, accepted.clone());
            let e = esjd(&t).unwrap();
            prop_assert!(e >= 0.0);
            prop_assert_eq!(e == 0.0, accepted.iter().all(|a| !a));
        }
    }
}
