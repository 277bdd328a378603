//! Dormand-Prince 5(4) integrator with local extrapolation.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (identical to the last stage row).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates `y' = f(t, y)` from `times[0]`, returning the state at every entry of `times`
/// (which must be increasing). The fifth-order solution is propagated; the embedded estimate of
/// each step's local error is held below `tol / (1 + span·rate)`, where `rate = |f(t0, y0)| / |y0|`
/// counts the characteristic times in the span, so that the accumulated error stays near `tol`.
/// Steps are taken as exact differences of representable times and the state update is
/// compensated, which keeps round-off from growing with the step count.
pub fn dopri5<const N: usize, F>(
    mut f: F,
    y0: [f64; N],
    times: &[f64],
    tol: f64,
) -> Result<(Vec<[f64; N]>, OdeStats)>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    if times.is_empty() {
        return Err(Error::Input("no output times".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Input("output times must be strictly increasing".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }
    let t0 = times[0];
    let span = times[times.len() - 1] - t0;
    let mut out = Vec::with_capacity(times.len());
    out.push(y0);
    let mut stats = OdeStats { accepted: 0, rejected: 0 };
    if times.len() == 1 {
        return Ok((out, stats));
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let fmax = k1.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
    let ymax = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let rate = if ymax > 0.0 { fmax / ymax } else { 0.0 };
    let allowed = tol / (1.0 + span * rate);
    let mut h = (0.01 / fmax).min(span);
    let mut carry = [0.0; N];

    for &target in &times[1..] {
        while t < target {
            let last = target - t <= h * (1.0 + 1e-12);
            let t_new = if last { target } else { t + h };
            let step = t_new - t;
            if step <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::Stiffness { t });
            }
            let mut k = [[0.0; N]; 7];
            k[0] = k1;
            for s in 1..7 {
                let mut ys = y;
                for (j, row) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        for i in 0..N {
                            ys[i] += step * a * row[i];
                        }
                    }
                }
                k[s] = f(t + C[s] * step, &ys);
            }
            let mut incr = [0.0; N];
            let mut err = 0.0_f64;
            for i in 0..N {
                let mut d5 = 0.0;
                let mut d4 = 0.0;
                for s in 0..7 {
                    d5 += B5[s] * k[s][i];
                    d4 += B4[s] * k[s][i];
                }
                incr[i] = step * d5;
                err = err.max((step * (d5 - d4)).abs());
            }
            let ratio = err / allowed;
            let factor = if ratio == 0.0 {
                5.0
            } else {
                (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
            };
            if ratio <= 1.0 {
                t = t_new;
                for i in 0..N {
                    // Kahan summation of the increment
                    let dy = incr[i] - carry[i];
                    let sum = y[i] + dy;
                    carry[i] = (sum - y[i]) - dy;
                    y[i] = sum;
                }
                k1 = k[6];
                stats.accepted += 1;
                if !last || factor < 1.0 {
                    h = step * factor;
                }
            } else {
                stats.rejected += 1;
                h = step * factor;
            }
        }
        out.push(y);
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn harmonic_oscillator() {
        let times: Vec<f64> = (0..=10).map(|k| k as f64).collect();
        let (ys, stats) = dopri5(|_, y: &[f64; 2]| [y[1], -y[0]], [1.0, 0.0], &times, 1e-11).unwrap();
        for (t, y) in times.iter().zip(&ys) {
            assert_abs_diff_eq!(y[0], t.cos(), epsilon = 1e-10);
            assert_abs_diff_eq!(y[1], -t.sin(), epsilon = 1e-10);
        }
        assert!(stats.accepted > 10);
    }

    #[test]
    fn exponential_growth_hits_output_times() {
        let times = [0.0, 0.5, 1.7];
        let (ys, _) = dopri5(|_, y: &[f64; 1]| [y[0]], [1.0], &times, 1e-12).unwrap();
        assert_abs_diff_eq!(ys[2][0], 1.7f64.exp(), epsilon = 1e-10);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(dopri5(|_, y: &[f64; 1]| *y, [1.0], &[1.0, 0.0], 1e-8).is_err());
        assert!(dopri5(|_, y: &[f64; 1]| *y, [1.0], &[], 1e-8).is_err());
    }
}
