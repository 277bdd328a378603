//! Locating conical intersections and classifying the sign of their topological phase.

use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{CartesianCoupling, ComplexCoupling, CouplingSeries, PlanarCoupling};
use crate::tracing::LoopSpec;

/// Distance below which two located points are merged.
pub const DEDUP_TOL: f64 = 1e-6;
/// Jacobian magnitude below which an intersection is not conical.
pub const JACOBIAN_EPS: f64 = 1e-10;
/// Distance from the double-root radius `sqrt(μ/3λ)` flagged as degenerate.
pub const DOUBLE_ROOT_TOL: f64 = 1e-6;
/// Outer radius of the polar scan used for general series models.
pub const DEFAULT_SCAN_RADIUS: f64 = 25.0;

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CiKind {
    Origin,
    /// Roots of `1 - μq + λq³` at `φ0 = 0, 2π/3, 4π/3`.
    TrigonalA,
    /// Roots of `1 + μq - λq³` at `φ0 = π/3, π, 5π/3`.
    TrigonalB,
    /// `q0 = sqrt(-μ/λ)` for opposite-sign `μ, λ`.
    ShiftedTrigonal,
    CartesianRoot,
}

impl CiKind {
    pub fn name(self) -> &'static str {
        match self {
            CiKind::Origin => "origin",
            CiKind::TrigonalA => "trigonal_A",
            CiKind::TrigonalB => "trigonal_B",
            CiKind::ShiftedTrigonal => "shifted_trigonal",
            CiKind::CartesianRoot => "cartesian_root",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseSign {
    Plus,
    Minus,
    Degenerate,
}

impl PhaseSign {
    /// `+1`, `-1` or `0`.
    pub fn value(self) -> i32 {
        match self {
            PhaseSign::Plus => 1,
            PhaseSign::Minus => -1,
            PhaseSign::Degenerate => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PhaseSign::Plus => "plus",
            PhaseSign::Minus => "minus",
            PhaseSign::Degenerate => "degenerate",
        }
    }

    fn from_value(v: f64, eps: f64) -> Self {
        if v.abs() < eps || !v.is_finite() {
            PhaseSign::Degenerate
        } else if v > 0.0 {
            PhaseSign::Plus
        } else {
            PhaseSign::Minus
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiPoint {
    pub x: f64,
    pub y: f64,
    pub q: f64,
    /// Azimuth in `[0, 2π)`.
    pub phi: f64,
    pub kind: CiKind,
    pub sign: PhaseSign,
    pub residual: f64,
}

impl CiPoint {
    fn from_cartesian(x: f64, y: f64, kind: CiKind) -> Self {
        Self {
            x,
            y,
            q: x.hypot(y),
            phi: normalize_angle(y.atan2(x)),
            kind,
            sign: PhaseSign::Degenerate,
            residual: 0.0,
        }
    }

    fn from_polar(q: f64, phi: f64, kind: CiKind) -> Self {
        let phi = normalize_angle(phi);
        Self {
            x: q * phi.cos(),
            y: q * phi.sin(),
            q,
            phi,
            kind,
            sign: PhaseSign::Degenerate,
            residual: 0.0,
        }
    }
}

fn normalize_angle(phi: f64) -> f64 {
    let p = phi.rem_euclid(TWO_PI);
    // values within rounding of 2π fold back to 0
    if TWO_PI - p < 1e-12 {
        0.0
    } else {
        p
    }
}

/// Axis-aligned search rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Region {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || y_min >= y_max {
            return Err(Error::Input(format!(
                "invalid region [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    pub fn square(half_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width, -half_width, half_width)
    }

    fn contains(&self, x: f64, y: f64, margin: f64) -> bool {
        x >= self.x_min - margin
            && x <= self.x_max + margin
            && y >= self.y_min - margin
            && y <= self.y_max + margin
    }
}

// ---------------------------------------------------------------------------
// Cartesian models
// ---------------------------------------------------------------------------

fn straddles(values: &[f64; 4]) -> bool {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    min <= 0.0 && max >= 0.0
}

/// Solves `w(x, y) = 0` by Newton iteration starting at `start`.
fn newton_2d<F, J>(f: F, jac: J, start: [f64; 2], scale: impl Fn(f64, f64) -> f64) -> Option<[f64; 2]>
where
    F: Fn(f64, f64) -> [f64; 2],
    J: Fn(f64, f64) -> [[f64; 2]; 2],
{
    let [mut x, mut y] = start;
    for _ in 0..100 {
        let [f0, f1] = f(x, y);
        if !(f0.is_finite() && f1.is_finite()) {
            return None;
        }
        if f0.hypot(f1) <= 1e-14 * scale(x, y).max(1.0) {
            return Some([x, y]);
        }
        let [[a, b], [c, d]] = jac(x, y);
        let det = a * d - b * c;
        let norm = a.abs() + b.abs() + c.abs() + d.abs();
        let (dx, dy) = if det.abs() > 1e-14 * norm * norm && det != 0.0 {
            ((d * f0 - b * f1) / det, (-c * f0 + a * f1) / det)
        } else if norm > 0.0 {
            // singular Jacobian: gradient step on ½|w|², enough for touching roots
            let gx = a * f0 + c * f1;
            let gy = b * f0 + d * f1;
            let g2 = gx * gx + gy * gy;
            if g2 == 0.0 {
                return None;
            }
            let s = (f0 * f0 + f1 * f1) / g2;
            (s * gx, s * gy)
        } else {
            return None;
        };
        x -= dx;
        y -= dy;
        if dx.hypot(dy) <= 1e-15 * (1.0 + x.hypot(y)) {
            let [f0, f1] = f(x, y);
            return (f0.hypot(f1) <= 1e-9 * scale(x, y).max(1.0)).then_some([x, y]);
        }
    }
    let [f0, f1] = f(x, y);
    (f0.hypot(f1) <= 1e-9 * scale(x, y).max(1.0)).then_some([x, y])
}

fn push_unique(out: &mut Vec<CiPoint>, p: CiPoint) {
    if !out
        .iter()
        .any(|o| (o.x - p.x).hypot(o.y - p.y) < DEDUP_TOL)
    {
        out.push(p);
    }
}

/// Finds all simultaneous zeros of `A` and `B` inside `region`, scanning a `grid × grid`
/// mesh for cells where both functions change sign and polishing each candidate by Newton.
pub fn locate_cartesian_cis(
    model: &CartesianCoupling,
    region: &Region,
    grid: usize,
) -> Result<Vec<CiPoint>> {
    if grid < 16 {
        return Err(Error::Input(format!("grid resolution {grid} below 16")));
    }
    let hx = (region.x_max - region.x_min) / grid as f64;
    let hy = (region.y_max - region.y_min) / grid as f64;
    let xs: Vec<f64> = (0..=grid).map(|i| region.x_min + hx * i as f64).collect();
    let ys: Vec<f64> = (0..=grid).map(|j| region.y_min + hy * j as f64).collect();
    let vals: Vec<Vec<[f64; 2]>> = xs
        .iter()
        .map(|&x| ys.iter().map(|&y| model.coupling(x, y)).collect())
        .collect();

    let scale = |x: f64, y: f64| model.coupling_scale(x, y).max(model.coefficient_scale());
    let margin = hx.max(hy);
    let mut found = Vec::new();
    for i in 0..grid {
        for j in 0..grid {
            let corners = [vals[i][j], vals[i + 1][j], vals[i][j + 1], vals[i + 1][j + 1]];
            let a = corners.map(|c| c[0]);
            let b = corners.map(|c| c[1]);
            if !(straddles(&a) && straddles(&b)) {
                continue;
            }
            let start = [xs[i] + 0.5 * hx, ys[j] + 0.5 * hy];
            match newton_2d(
                |x, y| model.coupling(x, y),
                |x, y| model.coupling_jacobian(x, y),
                start,
                scale,
            ) {
                Some([x, y]) if region.contains(x, y, margin) => {
                    let mut p = CiPoint::from_cartesian(x, y, CiKind::CartesianRoot);
                    p.residual = model.a(x, y).abs().max(model.b(x, y).abs());
                    p.sign = jacobian_sign(model, &p);
                    push_unique(&mut found, p);
                }
                Some([x, y]) => {
                    log::debug!("candidate from cell ({i}, {j}) left the region at ({x}, {y})");
                }
                None => {
                    log::debug!("Newton iteration from cell ({i}, {j}) did not converge");
                }
            }
        }
    }
    found.retain(|p| region.contains(p.x, p.y, 0.0));
    found.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    Ok(found)
}

/// Sign of `A_X B_Y - B_X A_Y` at the intersection.
pub fn jacobian_sign(model: &CartesianCoupling, ci: &CiPoint) -> PhaseSign {
    let d = model.derivatives(ci.x, ci.y);
    if d.iter().all(|v| *v == 0.0) {
        return PhaseSign::Degenerate;
    }
    PhaseSign::from_value(model.jacobian(ci.x, ci.y), JACOBIAN_EPS)
}

// ---------------------------------------------------------------------------
// Complex (trigonal) models
// ---------------------------------------------------------------------------

/// Real roots of `a3 q³ + a1 q + a0`, polished by Newton. Double roots are reported once.
fn depressed_cubic_real_roots(a3: f64, a1: f64, a0: f64) -> Vec<f64> {
    let f = |q: f64| (a3 * q * q + a1) * q + a0;
    let df = |q: f64| 3.0 * a3 * q * q + a1;
    let polish = |mut q: f64| {
        for _ in 0..60 {
            let d = df(q);
            if d == 0.0 {
                break;
            }
            let step = f(q) / d;
            q -= step;
            if step.abs() <= 1e-16 * q.abs().max(1.0) {
                break;
            }
        }
        q
    };

    if a3 == 0.0 {
        return if a1 != 0.0 { vec![-a0 / a1] } else { vec![] };
    }
    let p = a1 / a3;
    let r = a0 / a3;
    // q³ + p q + r, discriminant Δ = -(4p³ + 27r²)
    let disc = -(4.0 * p * p * p + 27.0 * r * r);
    let disc_scale = 4.0 * p.abs().powi(3) + 27.0 * r * r;
    let mut roots = if disc.abs() <= 1e-12 * disc_scale && p != 0.0 {
        let a = -3.0 * r / (2.0 * p);
        vec![a, -2.0 * a]
    } else if disc > 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * r / (p * m)).clamp(-1.0, 1.0);
        let t = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (t - TWO_PI * k as f64 / 3.0).cos())
            .collect()
    } else {
        let s = (r * r / 4.0 + p * p * p / 27.0).sqrt();
        vec![(-r / 2.0 + s).cbrt() + (-r / 2.0 - s).cbrt()]
    };
    for q in roots.iter_mut() {
        *q = polish(*q);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-7 * a.abs().max(1.0));
    roots
}

fn complex_residual(model: &ComplexCoupling, q: f64, phi: f64) -> f64 {
    model.v12(q, phi).norm()
}

fn sort_polar(points: &mut [CiPoint]) {
    points.sort_by(|a, b| match a.q.total_cmp(&b.q) {
        Ordering::Equal => a.phi.total_cmp(&b.phi),
        o => o,
    });
}

/// Merges points closer than `DEDUP_TOL`, keeping the first occurrence.
fn dedupe(points: Vec<CiPoint>) -> Vec<CiPoint> {
    let mut out = Vec::new();
    for p in points {
        push_unique(&mut out, p);
    }
    out
}

/// All intersections of a trigonal coupling model with `q <= DEFAULT_SCAN_RADIUS` for
/// general series; quartic models are solved exactly and cross-checked by the same scan.
pub fn locate_complex_cis(model: &ComplexCoupling) -> Result<Vec<CiPoint>> {
    locate_complex_cis_within(model, DEFAULT_SCAN_RADIUS)
}

/// As [`locate_complex_cis`] with an explicit outer radius for the numerical polar scan.
/// Exact quartic roots are returned regardless of radius.
pub fn locate_complex_cis_within(model: &ComplexCoupling, q_max: f64) -> Result<Vec<CiPoint>> {
    if !(q_max.is_finite() && q_max > 0.0) {
        return Err(Error::Input(format!("scan radius must be positive, got {q_max}")));
    }
    let mut points = vec![CiPoint {
        sign: PhaseSign::Minus,
        ..CiPoint::from_polar(0.0, 0.0, CiKind::Origin)
    }];

    match model.series {
        CouplingSeries::Quartic { mu, lambda } => {
            points.extend(quartic_roots(model, mu, lambda));
            let scanned = polar_scan(model, q_max)?;
            for p in scanned {
                if !points
                    .iter()
                    .any(|o| (o.x - p.x).hypot(o.y - p.y) < 1e-5 * (1.0 + p.q))
                {
                    log::warn!(
                        "polar scan found a root at q = {}, phi = {} missed by the exact reduction",
                        p.q,
                        p.phi
                    );
                    points.push(p);
                }
            }
        }
        CouplingSeries::General { .. } => points.extend(polar_scan(model, q_max)?),
    }
    let mut points = dedupe(points);
    sort_polar(&mut points);
    Ok(points)
}

fn quartic_roots(model: &ComplexCoupling, mu: f64, lambda: f64) -> Vec<CiPoint> {
    let mut out = Vec::new();
    // e^{3iφ0} = +1: 1 - μq + λq³ = 0
    for q in depressed_cubic_real_roots(lambda, -mu, 1.0) {
        if q > 0.0 {
            for k in 0..3 {
                out.push(CiPoint::from_polar(q, TWO_PI * k as f64 / 3.0, CiKind::TrigonalA));
            }
        }
    }
    // e^{3iφ0} = -1: 1 + μq - λq³ = 0
    for q in depressed_cubic_real_roots(-lambda, mu, 1.0) {
        if q > 0.0 {
            for k in 0..3 {
                out.push(CiPoint::from_polar(
                    q,
                    PI / 3.0 + TWO_PI * k as f64 / 3.0,
                    CiKind::TrigonalB,
                ));
            }
        }
    }
    // opposite signs: λq0² = -μ and cos 3φ0 = sqrt(λ/-μ) / (2μ)
    if mu * lambda < 0.0 {
        let q0 = (-mu / lambda).sqrt();
        let c = (lambda / -mu).sqrt() / (2.0 * mu);
        if c.abs() < 1.0 {
            let phi0 = c.acos() / 3.0;
            for k in 0..3 {
                let base = TWO_PI * k as f64 / 3.0;
                out.push(CiPoint::from_polar(q0, base + phi0, CiKind::ShiftedTrigonal));
                out.push(CiPoint::from_polar(q0, base - phi0, CiKind::ShiftedTrigonal));
            }
        }
    }
    let mut out = dedupe(out);
    for p in out.iter_mut() {
        p.residual = complex_residual(model, p.q, p.phi);
        p.sign = trigonal_sign(model, p);
    }
    out
}

/// Sign-change scan of the bracket factor on a polar grid, polished by polar Newton.
fn polar_scan(model: &ComplexCoupling, q_max: f64) -> Result<Vec<CiPoint>> {
    let nq = ((q_max * 40.0).ceil() as usize).clamp(64, 4000);
    let nphi = 360;
    let hq = q_max / nq as f64;
    let hphi = TWO_PI / nphi as f64;
    let g = |q: f64, phi: f64| {
        let v = model.bracket(q, phi);
        [v.re, v.im]
    };
    let jac = |q: f64, phi: f64| {
        let (dq, dphi) = model.bracket_derivatives(q, phi);
        [[dq.re, dphi.re], [dq.im, dphi.im]]
    };
    let grid: Vec<Vec<[f64; 2]>> = (0..=nq)
        .map(|i| {
            let q = hq * i as f64;
            (0..=nphi).map(|j| g(q, hphi * j as f64)).collect()
        })
        .collect();

    let mut out = Vec::new();
    for i in 0..nq {
        for j in 0..nphi {
            let corners = [grid[i][j], grid[i + 1][j], grid[i][j + 1], grid[i + 1][j + 1]];
            if !(straddles(&corners.map(|c| c[0])) && straddles(&corners.map(|c| c[1]))) {
                continue;
            }
            let start = [hq * (i as f64 + 0.5), hphi * (j as f64 + 0.5)];
            let Some([q, phi]) = newton_2d(g, jac, start, |q, _| model.bracket_scale(q)) else {
                log::debug!("polar Newton from cell ({i}, {j}) did not converge");
                continue;
            };
            if !(q > 0.0 && q <= q_max * (1.0 + 1e-9)) {
                continue;
            }
            let s3 = (3.0 * phi).sin();
            let kind = if s3.abs() < 1e-8 {
                if (3.0 * phi).cos() > 0.0 {
                    CiKind::TrigonalA
                } else {
                    CiKind::TrigonalB
                }
            } else {
                CiKind::ShiftedTrigonal
            };
            let mut p = CiPoint::from_polar(q, phi, kind);
            p.residual = complex_residual(model, p.q, p.phi);
            p.sign = trigonal_sign(model, &p);
            push_unique(&mut out, p);
        }
    }
    Ok(out)
}

/// Sign of the topological phase at an intersection of a trigonal coupling model.
pub fn trigonal_sign(model: &ComplexCoupling, ci: &CiPoint) -> PhaseSign {
    match ci.kind {
        CiKind::Origin => PhaseSign::Minus,
        CiKind::CartesianRoot => complex_jacobian_sign(model, ci),
        CiKind::ShiftedTrigonal => match model.series {
            CouplingSeries::Quartic { .. } => PhaseSign::Minus,
            CouplingSeries::General { .. } => complex_jacobian_sign(model, ci),
        },
        CiKind::TrigonalA | CiKind::TrigonalB => match model.series {
            CouplingSeries::Quartic { mu, lambda } => {
                let q = ci.q;
                if lambda != 0.0 && mu / lambda > 0.0 {
                    let threshold = (mu / (3.0 * lambda)).sqrt();
                    if (q - threshold).abs() < DOUBLE_ROOT_TOL {
                        return PhaseSign::Degenerate;
                    }
                }
                let num = 3.0 * mu * q + 3.0 * lambda * q.powi(3);
                let den = mu * q - 3.0 * lambda * q.powi(3);
                if den == 0.0 {
                    PhaseSign::Degenerate
                } else {
                    PhaseSign::from_value(num / den, 0.0)
                }
            }
            CouplingSeries::General { .. } => complex_jacobian_sign(model, ci),
        },
    }
}

fn complex_jacobian_sign(model: &ComplexCoupling, ci: &CiPoint) -> PhaseSign {
    let [[a, b], [c, d]] = model.coupling_jacobian(ci.x, ci.y);
    let s = model.k * model.bracket_scale(ci.q);
    PhaseSign::from_value(a * d - b * c, JACOBIAN_EPS * s * s)
}

/// Net phase enclosed by a planar loop, as a signed multiple of π.
pub fn predicted_loop_phase(cis: &[CiPoint], spec: &LoopSpec) -> Result<i32> {
    let [cx, cy, _] = spec.center;
    let mut total = 0;
    for ci in cis {
        let d = (ci.x - cx).hypot(ci.y - cy);
        if (d - spec.radius).abs() < 1e-6 {
            return Err(Error::Contour(format!(
                "intersection at ({}, {}) lies on the loop",
                ci.x, ci.y
            )));
        }
        if d < spec.radius {
            if ci.sign == PhaseSign::Degenerate {
                log::warn!(
                    "degenerate intersection at ({}, {}) contributes no net phase",
                    ci.x,
                    ci.y
                );
            }
            total += ci.sign.value();
        }
    }
    Ok(total * spec.orientation.factor())
}
