//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature.
//!
//! Intervals are kept in a max-heap keyed on their error estimate; the worst
//! interval is bisected until the summed error meets the tolerance. Infinite
//! ranges are compactified before integration so there is no tail truncation.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIntegrand { abscissa: x })
    }
}

/// One 21-point Kronrod rule on [a, b]; returns (value, error estimate).
fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = eval(f, center)?;

    let mut res_k = f_center * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let abs_half = half.abs();
    let value = res_k * half;
    let err = rescale_error(
        (res_k - res_g) * half,
        res_abs * abs_half,
        res_asc * abs_half,
    );
    Ok((value, err))
}

impl Quadrature {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Quadrature {
            abs_tol,
            rel_tol,
            ..Quadrature::default()
        }
    }

    /// Integrate `f` over the finite interval [a, b]. Endpoints are never evaluated.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        let (value, error) = kronrod21(&f, a, b)?;
        let mut evaluations = 21;
        let mut total = value;
        let mut total_err = error;
        let mut heap = BinaryHeap::new();
        heap.push(Segment { a, b, value, error });

        while total_err > self.abs_tol.max(self.rel_tol * total.abs()) {
            if heap.len() >= self.max_intervals {
                return Err(Error::QuadratureNonConvergence {
                    estimate: total,
                    residual: total_err,
                });
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            // The worst interval can no longer be split in floating point.
            if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
                return Err(Error::QuadratureNonConvergence {
                    estimate: total,
                    residual: total_err,
                });
            }
            let (v1, e1) = kronrod21(&f, worst.a, mid)?;
            let (v2, e2) = kronrod21(&f, mid, worst.b)?;
            evaluations += 42;
            total += v1 + v2 - worst.value;
            total_err += e1 + e2 - worst.error;
            heap.push(Segment {
                a: worst.a,
                b: mid,
                value: v1,
                error: e1,
            });
            heap.push(Segment {
                a: mid,
                b: worst.b,
                value: v2,
                error: e2,
            });

            // Resum periodically to keep the running totals from drifting.
            if heap.len() % 64 == 0 {
                total = heap.iter().map(|s| s.value).sum();
                total_err = heap.iter().map(|s| s.error).sum();
            }
        }

        let value = heap.iter().map(|s| s.value).sum();
        let abs_error = heap.iter().map(|s| s.error).sum();
        Ok(Estimate {
            value,
            abs_error,
            evaluations,
        })
    }

    /// Integrate over [a, inf) through u = a + s / (1 - s), s in (0, 1).
    pub fn integrate_upper<F: Fn(f64) -> f64>(&self, f: F, a: f64) -> Result<Estimate> {
        let mapped = |s: f64| {
            let w = 1.0 - s;
            f(a + s / w) / (w * w)
        };
        self.integrate(mapped, 0.0, 1.0).map_err(|e| match e {
            Error::NonFiniteIntegrand { abscissa } => Error::NonFiniteIntegrand {
                abscissa: a + abscissa / (1.0 - abscissa),
            },
            other => other,
        })
    }

    /// Integrate over the whole real line through x = t / (1 - t^2), t in (-1, 1).
    pub fn integrate_real_line<F: Fn(f64) -> f64>(&self, f: F) -> Result<Estimate> {
        let to_x = |t: f64| t / (1.0 - t * t);
        let mapped = |t: f64| {
            let w = 1.0 - t * t;
            f(to_x(t)) * (1.0 + t * t) / (w * w)
        };
        self.integrate(mapped, -1.0, 1.0).map_err(|e| match e {
            Error::NonFiniteIntegrand { abscissa } => Error::NonFiniteIntegrand {
                abscissa: to_x(abscissa),
            },
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_rule_is_exact_for_polynomials() {
        let q = Quadrature::default();
        let est = q.integrate(|x| x.powi(20), 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(est.value, 1.0 / 21.0, epsilon = 1e-15);
        assert_eq!(est.evaluations, 21);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2
        let q = Quadrature::with_tolerance(1e-10, 1e-12);
        let est = q.integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(est.value, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn semi_infinite_and_real_line() {
        let q = Quadrature::default();
        let e = q.integrate_upper(|x| (-x).exp(), 0.0).unwrap();
        assert_abs_diff_eq!(e.value, 1.0, epsilon = 1e-10);
        let c = q
            .integrate_upper(|x| 1.0 / (std::f64::consts::PI * (1.0 + x * x)), 0.0)
            .unwrap();
        assert_abs_diff_eq!(c.value, 0.5, epsilon = 1e-10);
        let g = q.integrate_real_line(|x| (-x * x).exp()).unwrap();
        assert_abs_diff_eq!(g.value, std::f64::consts::PI.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn non_finite_integrand_reports_abscissa() {
        let q = Quadrature::default();
        let err = q
            .integrate(|x| if x > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0)
            .unwrap_err();
        match err {
            Error::NonFiniteIntegrand { abscissa } => assert!(abscissa > 0.5 && abscissa < 1.0),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_convergence_carries_residual() {
        let q = Quadrature {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_intervals: 4,
        };
        match q.integrate(|x| (1.0 / x).sin(), 1e-4, 1.0).unwrap_err() {
            Error::QuadratureNonConvergence { residual, .. } => assert!(residual > 1e-14),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
