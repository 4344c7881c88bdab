//! Globally adaptive Gauss–Kronrod (G10/K21) integration.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and subdivision budget for the Duhamel integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rel_tol: 1e-10, abs_tol: 1e-12, max_subdivisions: 10_000 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("quadrature tolerances must be > 0".into()));
        }
        if self.max_subdivisions < 16 {
            return Err(Error::InvalidParameter("max_subdivisions must be >= 16".into()));
        }
        Ok(())
    }
}

/// Result of a converged integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
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
    0.123_491_976_262_065_851_077_600_525_513_213,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One G10/K21 panel with the QUADPACK error heuristic.
pub(crate) fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = WGK[10] * fc.abs();
    let mut fv = [(0.0, 0.0); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = (f1, f2);
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv[j].0 - mean).abs() + (fv[j].1 - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// `∫_a^b f`, starting from at least `min_panels` panels split at
/// `breakpoints` and bisecting the worst panel until the total error
/// estimate meets `spec`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    min_panels: usize,
    spec: &QuadratureSpec,
) -> Result<QuadEstimate> {
    spec.validate()?;
    if a == b {
        return Ok(QuadEstimate { value: 0.0, error: 0.0, subdivisions: 0 });
    }
    if b < a {
        let r = integrate(f, b, a, breakpoints, min_panels, spec)?;
        return Ok(QuadEstimate { value: -r.value, ..r });
    }

    let mut edges = vec![a];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|p| *p > a && *p < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(b);

    let budget = min_panels.clamp(1, spec.max_subdivisions / 2);
    let width = b - a;
    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        let pieces = ((budget as f64) * (w[1] - w[0]) / width).ceil().max(1.0) as usize;
        let step = (w[1] - w[0]) / pieces as f64;
        for j in 0..pieces {
            let lo = w[0] + step * j as f64;
            let hi = if j + 1 == pieces { w[1] } else { lo + step };
            heap.push(evaluate_panel(&f, lo, hi)?);
        }
    }

    let mut total: f64 = heap.iter().map(|p| p.value).sum();
    let mut total_err: f64 = heap.iter().map(|p| p.error).sum();
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        let worst = *heap.peek().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if heap.len() >= spec.max_subdivisions || mid <= worst.a || mid >= worst.b {
            return Err(Error::Integration { a: worst.a, b: worst.b, error: worst.error });
        }
        heap.pop();
        let left = evaluate_panel(&f, worst.a, mid)?;
        let right = evaluate_panel(&f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    Ok(QuadEstimate {
        value: panels.iter().map(|p| p.value).sum(),
        error: panels.iter().map(|p| p.error).sum(),
        subdivisions: panels.len(),
    })
}

fn evaluate_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let (value, error) = gauss_kronrod_21(f, a, b);
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::Integration { a, b, error: f64::INFINITY });
    }
    Ok(Panel { a, b, value, error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rule_weights_sum_to_two() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert_relative_eq!(k, 2.0, epsilon = 1e-15);
        assert_relative_eq!(g, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn kronrod_exact_to_degree_31_gauss_to_19() {
        for deg in 0..=31u32 {
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            let mut k = WGK[10] * if deg == 0 { 1.0 } else { 0.0 };
            let mut g = 0.0;
            for j in 0..10 {
                let v = XGK[j].powi(deg as i32) + (-XGK[j]).powi(deg as i32);
                k += WGK[j] * v;
                if j % 2 == 1 {
                    g += WG[j / 2] * v;
                }
            }
            assert!((k - exact).abs() < 1e-14, "kronrod degree {deg}: {k} vs {exact}");
            if deg <= 19 {
                assert!((g - exact).abs() < 1e-14, "gauss degree {deg}: {g} vs {exact}");
            }
        }
    }

    #[test]
    fn oscillatory_integral() {
        let spec = QuadratureSpec::default();
        let w = 517.557_528_611_262_7_f64;
        let t = 3.0;
        let r = integrate(|s| (w * s).sin().powi(2), 0.0, t, &[], 64, &spec).unwrap();
        let exact = t / 2.0 - (2.0 * w * t).sin() / (4.0 * w);
        assert_relative_eq!(r.value, exact, max_relative = 1e-12);
    }

    #[test]
    fn honours_breakpoints_of_a_jump() {
        let spec = QuadratureSpec::default();
        let f = |x: f64| if x < 0.3 { 1.0 } else { 0.0 };
        let r = integrate(f, 0.0, 1.0, &[0.3], 1, &spec).unwrap();
        assert_relative_eq!(r.value, 0.3, epsilon = 1e-14);
    }

    #[test]
    fn reports_non_convergence() {
        let spec = QuadratureSpec { max_subdivisions: 16, ..Default::default() };
        let err = integrate(|x: f64| (1000.0 * x).sin() * x.sqrt(), 0.0, 50.0, &[], 1, &spec).unwrap_err();
        assert!(matches!(err, Error::Integration { .. }));
    }

    #[test]
    fn rejects_bad_spec() {
        let spec = QuadratureSpec { rel_tol: 0.0, ..Default::default() };
        assert!(integrate(|x| x, 0.0, 1.0, &[], 1, &spec).is_err());
        let spec = QuadratureSpec { max_subdivisions: 4, ..Default::default() };
        assert!(spec.validate().is_err());
    }
}
