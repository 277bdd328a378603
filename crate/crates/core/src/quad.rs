//! Adaptive Gauss-Kronrod (7/15) quadrature on finite and semi-infinite intervals.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the odd Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
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
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kr = WGK[7] * fc;
    let mut ga = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kr += WGK[i] * s;
        if i % 2 == 1 {
            ga += WG[i / 2] * s;
        }
    }
    (kr * h, ((kr - ga) * h).abs())
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Input(format!("finite limits required, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (value, error) = kronrod(&mut f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    loop {
        if !total.is_finite() {
            return Err(Error::Tolerance {
                tolerance: abs_tol,
                estimate: f64::INFINITY,
            });
        }
        let target = abs_tol.max(rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Tolerance {
                tolerance: target,
                estimate: total_err,
            });
        }
        let s = heap.pop().expect("non-empty");
        let m = 0.5 * (s.a + s.b);
        if m <= s.a || m >= s.b {
            // interval cannot be split further in floating point
            return Err(Error::Tolerance {
                tolerance: target,
                estimate: total_err,
            });
        }
        let (v1, e1) = kronrod(&mut f, s.a, m);
        let (v2, e2) = kronrod(&mut f, m, s.b);
        evaluations += 30;
        total += v1 + v2 - s.value;
        total_err += e1 + e2 - s.error;
        heap.push(Segment { a: s.a, b: m, value: v1, error: e1 });
        heap.push(Segment { a: m, b: s.b, value: v2, error: e2 });
    }
    // re-sum to limit drift from the incremental updates
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

/// Sums [`integrate`] over consecutive breakpoints, sharing the absolute tolerance evenly.
pub fn integrate_points<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(Error::Input("at least two breakpoints required".into()));
    }
    let share = abs_tol / (points.len() - 1) as f64;
    let mut out = QuadResult {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    for w in points.windows(2) {
        let r = integrate(&mut f, w[0], w[1], share, rel_tol)?;
        out.value += r.value;
        out.error += r.error;
        out.evaluations += r.evaluations;
    }
    Ok(out)
}

/// Integrates `f` over `[a, ∞)` via `x = a + s·t/(1 - t)`, `t ∈ [0, 1)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    scale: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    if !(scale > 0.0) {
        return Err(Error::Input(format!("scale must be positive, got {scale}")));
    }
    integrate(
        |t| {
            let u = 1.0 - t;
            let v = f(a + scale * t / u) * scale / (u * u);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x.powi(5) - 2.0 * x * x, -1.0, 2.0, 1e-14, 0.0).unwrap();
        assert_abs_diff_eq!(r.value, 64.0 / 6.0 - 1.0 / 6.0 - 6.0, epsilon = 1e-13);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn oscillatory_and_peaked() {
        let r = integrate(|x| (10.0 * x).sin(), 0.0, PI, 1e-12, 0.0).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-12);
        let e = 1e-3;
        let r = integrate(|x| e / (e * e + x * x), -1.0, 1.0, 1e-12, 0.0).unwrap();
        assert_abs_diff_eq!(r.value, 2.0 * (1.0 / e).atan(), epsilon = 1e-11);
    }

    #[test]
    fn semi_infinite() {
        let r = integrate_to_infinity(|x| (-x).exp(), 0.0, 1.0, 1e-12, 0.0).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
        // ∫_0^∞ q / (q² + 1)^{3/2} dq = 1
        let r = integrate_to_infinity(|q| q / (q * q + 1.0).powf(1.5), 0.0, 1.0, 1e-12, 0.0)
            .unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-11);
    }

    #[test]
    fn gauss_legendre_rules() {
        for n in [1, 2, 5, 16, 24] {
            let (x, w) = gauss_legendre(n);
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            // exact for degree 2n - 1
            let d = 2 * n - 2;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(d as i32)).sum();
            assert_abs_diff_eq!(q, 2.0 / (d as f64 + 1.0), epsilon = 1e-13);
        }
    }

    #[test]
    fn breakpoints_and_failure() {
        let r = integrate_points(|x| x.abs(), &[-1.0, 0.0, 1.0], 1e-14, 0.0).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-14);
        let r = integrate(|x| 1.0 / x.abs(), -1.0, 2.0, 1e-10, 0.0);
        assert!(matches!(r, Err(Error::Tolerance { .. })));
    }
}
