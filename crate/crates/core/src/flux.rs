//! Line integrals, surface fluxes and the `b → 0` limiting procedure.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{magnetic_field, nact, seam_flux_density, yang_mills_field, FieldKind};
use crate::model::{BerryModel, Representation};
use crate::quad::{integrate, integrate_points, integrate_to_infinity};

/// Absolute tolerance of the azimuthal quadratures.
pub const ANGULAR_TOL: f64 = 1e-11;
/// Absolute tolerance of each radial quadrature.
pub const RADIAL_TOL: f64 = 1e-12;

fn check_element(element: (usize, usize)) -> Result<()> {
    if element.0 > 1 || element.1 > 1 {
        return Err(Error::Input(format!(
            "matrix element ({}, {}) out of range",
            element.0, element.1
        )));
    }
    Ok(())
}

/// `∮ A_ij · dR` with `A = iτ` around the circle of radius `q` about the seam at height `z`
/// (seam frame, counter-clockwise).
pub fn line_integral(
    model: &BerryModel,
    representation: Representation,
    element: (usize, usize),
    q: f64,
    z: f64,
) -> Result<Complex64> {
    check_element(element)?;
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::Input(format!("contour radius must be positive, got {q}")));
    }
    let (i, j) = element;
    let tangential = |phi: f64| -> Result<Complex64> {
        let p = model.physical_point([q * phi.cos(), q * phi.sin(), z]);
        let t = nact(model, representation, p)?;
        let v = t.regular.get(i, j).to_cylindrical(model.geometry(p).phi);
        Ok(Complex64::new(0.0, 1.0) * v.c[1] * q)
    };
    let mut failure = None;
    let mut part = |im: bool| {
        integrate(
            |phi| match tangential(phi) {
                Ok(v) => {
                    if im {
                        v.im
                    } else {
                        v.re
                    }
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            0.0,
            2.0 * PI,
            ANGULAR_TOL,
            0.0,
        )
        .map(|r| r.value)
    };
    let re = part(false)?;
    let im = part(true)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Complex64::new(re, im))
}

/// Ẑ component of the regular part of one field element at frame cylindrical `(q, φ, z)`.
fn regular_z(
    model: &BerryModel,
    representation: Representation,
    element: (usize, usize),
    kind: FieldKind,
    q: f64,
    phi: f64,
    z: f64,
) -> Result<f64> {
    let p = model.physical_point([q * phi.cos(), q * phi.sin(), z]);
    let t = match kind {
        FieldKind::Magnetic => magnetic_field(model, representation, p)?,
        FieldKind::YangMills => yang_mills_field(model, representation, p)?,
    };
    Ok(t.regular.get(element.0, element.1).c[2].re)
}

/// Flux of one field element through the disc `q <= q_max` at height `z` (seam frame).
/// `q_max = ∞` integrates the whole plane.
pub fn surface_flux(
    model: &BerryModel,
    representation: Representation,
    element: (usize, usize),
    kind: FieldKind,
    q_max: f64,
    z: f64,
) -> Result<f64> {
    check_element(element)?;
    if !(q_max > 0.0) {
        return Err(Error::Input(format!("disc radius must be positive, got {q_max}")));
    }
    let mut failure: Option<Error> = None;
    let mut record = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };

    let seam = integrate(
        |phi| {
            record(
                seam_flux_density(model, representation, z, phi)
                    .map(|m| m[(element.0, element.1)].re),
            )
        },
        0.0,
        2.0 * PI,
        ANGULAR_TOL,
        0.0,
    )?
    .value;

    // radial structure lives on the scale bZ
    let scale = (model.b * z).abs().max(1e-12);
    let q_core = if q_max.is_finite() { q_max } else { 1e3 * scale };
    let mut points = vec![0.0];
    for f in [1.0, 10.0, 100.0] {
        if f * scale < q_core {
            points.push(f * scale);
        }
    }
    points.push(q_core);

    let mut failure_inner: Option<Error> = None;
    let regular = integrate(
        |phi| {
            let mut radial = |q: f64| match regular_z(model, representation, element, kind, q, phi, z) {
                Ok(v) => v * q,
                Err(e) => {
                    failure_inner.get_or_insert(e);
                    0.0
                }
            };
            let core = integrate_points(&mut radial, &points, RADIAL_TOL, 0.0);
            let tail = if q_max.is_finite() {
                Ok(0.0)
            } else {
                integrate_to_infinity(&mut radial, q_core, q_core, RADIAL_TOL, 0.0).map(|r| r.value)
            };
            match (core, tail) {
                (Ok(c), Ok(t)) => c.value + t,
                (Err(e), _) | (_, Err(e)) => {
                    failure_inner.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        2.0 * PI,
        ANGULAR_TOL,
        0.0,
    )?
    .value;
    if let Some(e) = failure.or(failure_inner) {
        return Err(e);
    }
    Ok(seam + regular)
}

/// Result of extrapolating a sequence to `b → 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    /// `|difference of the last two extrapolants|`.
    pub residual: f64,
    /// Assumed leading power of `b` in the error (0 for a constant sequence).
    pub order: u32,
}

/// Richardson extrapolation of `values[k] = v(bs[k])` to `b = 0`, assuming a leading error
/// `O(b)` or `O(b²)` chosen from the ratios of successive differences.
pub fn b_limit(values: &[f64], bs: &[f64]) -> Result<Extrapolation> {
    if values.len() != bs.len() {
        return Err(Error::Input("values and b sequence differ in length".into()));
    }
    if bs.len() < 4 {
        return Err(Error::Input("at least four b values are required".into()));
    }
    if bs.windows(2).any(|w| !(w[1] < w[0] && w[1] > 0.0)) {
        return Err(Error::Input("b sequence must be positive and strictly decreasing".into()));
    }
    let ratios: Vec<f64> = bs.windows(2).map(|w| w[0] / w[1]).collect();
    let r = ratios[0];
    if ratios.iter().any(|x| (x - r).abs() > 1e-9 * r) {
        return Err(Error::Input("b sequence must be geometric".into()));
    }
    let mag = values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    let diffs: Vec<f64> = values.windows(2).map(|w| w[0] - w[1]).collect();
    let noise = 1e-13 * mag;
    let last = *values.last().expect("non-empty");
    if diffs.iter().all(|d| d.abs() <= noise) {
        return Ok(Extrapolation {
            value: last,
            residual: 0.0,
            order: 0,
        });
    }
    let significant: Vec<f64> = diffs.iter().cloned().filter(|d| d.abs() > noise).collect();
    if significant.windows(2).any(|w| w[0].signum() != w[1].signum()) {
        return Err(Error::NoLimit(format!(
            "successive differences change sign: {diffs:?}"
        )));
    }
    if significant.windows(2).any(|w| w[1].abs() > w[0].abs() * (1.0 + 1e-9)) {
        return Err(Error::NoLimit(format!(
            "successive differences do not shrink: {diffs:?}"
        )));
    }
    let n = diffs.len();
    let order = if diffs[n - 2].abs() > noise && diffs[n - 1].abs() > noise {
        let p = (diffs[n - 2] / diffs[n - 1]).ln() / r.ln();
        if p < 1.5 {
            1
        } else {
            2
        }
    } else {
        1
    };
    let factor = r.powi(order as i32) - 1.0;
    let extrapolants: Vec<f64> = values
        .windows(2)
        .map(|w| w[1] + (w[1] - w[0]) / factor)
        .collect();
    let m = extrapolants.len();
    Ok(Extrapolation {
        value: extrapolants[m - 1],
        residual: (extrapolants[m - 1] - extrapolants[m - 2]).abs(),
        order,
    })
}

/// Default b sequence `0.1·4^{-k}`, `k = 0..4`.
pub fn default_b_sequence() -> Vec<f64> {
    (0..5).map(|k| 0.1 * 0.25f64.powi(k)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableConfig {
    pub b_sequence: Vec<f64>,
    pub q_max: f64,
    pub z: f64,
    pub tolerance: f64,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self {
            b_sequence: default_b_sequence(),
            q_max: 1.0,
            z: 1.0,
            tolerance: 1e-3,
        }
    }
}

/// One extrapolated flux entry.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxEntry {
    pub kind: FieldKind,
    pub element: (usize, usize),
    pub label: &'static str,
    pub b_sequence: Vec<f64>,
    pub values: Vec<f64>,
    pub limit: f64,
    pub residual: f64,
    pub target: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxTable {
    pub model: BerryModel,
    pub representation: Representation,
    pub config: TableConfig,
    pub entries: Vec<FluxEntry>,
}

impl FluxTable {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failing(&self) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| !e.pass)
            .map(|e| format!("{} {}", e.kind.name(), e.label))
            .collect()
    }

    /// `Err` listing every failing entry.
    pub fn check(&self) -> Result<()> {
        let failing = self.failing();
        if failing.is_empty() {
            Ok(())
        } else {
            Err(Error::TableFailed { failing })
        }
    }

    pub fn entry(&self, kind: FieldKind, element: (usize, usize)) -> Option<&FluxEntry> {
        self.entries
            .iter()
            .find(|e| e.kind == kind && e.element == element)
    }
}

/// Expected `b → 0` fluxes.
pub fn expected_flux(representation: Representation, kind: FieldKind, element: (usize, usize)) -> f64 {
    let diag_sign = if element.0 == 0 { 1.0 } else { -1.0 };
    let diagonal = element.0 == element.1;
    match (representation, kind, diagonal) {
        (Representation::Adiabatic, FieldKind::Magnetic, true) => 0.0,
        (Representation::Adiabatic, FieldKind::Magnetic, false) => -PI,
        (Representation::Adiabatic, FieldKind::YangMills, true) => PI * diag_sign,
        (Representation::Adiabatic, FieldKind::YangMills, false) => 0.0,
        (Representation::Circulating, FieldKind::Magnetic, true) => -PI * diag_sign,
        (Representation::Circulating, FieldKind::Magnetic, false) => 0.0,
        (Representation::Circulating, FieldKind::YangMills, true) => 0.0,
        (Representation::Circulating, FieldKind::YangMills, false) => PI,
    }
}

/// Extrapolated magnetic and Yang-Mills fluxes of all four elements, with pass flags against
/// the expected `b → 0` values.
pub fn table_report(
    model: &BerryModel,
    representation: Representation,
    config: &TableConfig,
) -> Result<FluxTable> {
    let mut entries = Vec::new();
    for kind in [FieldKind::Magnetic, FieldKind::YangMills] {
        for element in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let values = config
                .b_sequence
                .iter()
                .map(|&b| {
                    let m = model.with_b(b)?;
                    surface_flux(&m, representation, element, kind, config.q_max, config.z)
                })
                .collect::<Result<Vec<f64>>>()?;
            let ex = b_limit(&values, &config.b_sequence)?;
            let target = expected_flux(representation, kind, element);
            let pass = (ex.value - target).abs() <= config.tolerance && ex.residual <= config.tolerance;
            entries.push(FluxEntry {
                kind,
                element,
                label: representation.element_label(element.0, element.1),
                b_sequence: config.b_sequence.clone(),
                values,
                limit: ex.value,
                residual: ex.residual,
                target,
                pass,
            });
        }
    }
    Ok(FluxTable {
        model: *model,
        representation,
        config: config.clone(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ActiveAxis;
    use approx::assert_abs_diff_eq;

    fn cos_theta(b: f64, q: f64, z: f64) -> f64 {
        b * z / q.hypot(b * z)
    }

    #[test]
    fn line_integral_examples() {
        let m = BerryModel::circular(1.0).unwrap();
        let v = line_integral(&m, Representation::Adiabatic, (0, 0), 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(v.re, PI / 2f64.sqrt(), epsilon = 1e-9);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
        let v = line_integral(&m, Representation::Adiabatic, (0, 0), 1.3, 0.0).unwrap();
        assert_abs_diff_eq!(v.norm(), 0.0, epsilon = 1e-12);

        let m = BerryModel::circular(1e-5).unwrap();
        let v = line_integral(&m, Representation::Adiabatic, (0, 1), 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(v.re, -PI, epsilon = 1e-4);
        let v = line_integral(&m, Representation::Circulating, (0, 0), 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(v.re, -PI, epsilon = 1e-4);
    }

    #[test]
    fn line_integrals_match_closed_forms() {
        for b in [1.0, 0.3, 0.01] {
            let m = BerryModel::circular(b).unwrap();
            for (q, z) in [(0.5, 1.0), (2.0, -0.5)] {
                let c = cos_theta(b, q, z);
                let s = (1.0 - c * c).sqrt();
                let d = line_integral(&m, Representation::Adiabatic, (0, 0), q, z).unwrap();
                let o = line_integral(&m, Representation::Adiabatic, (0, 1), q, z).unwrap();
                assert_abs_diff_eq!(d.re, PI * c, epsilon = 1e-9);
                assert_abs_diff_eq!(o.re, -PI * s, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn elliptic_berry_phase_is_independent_of_gamma() {
        for gamma in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let m = BerryModel::elliptic(1e-5, gamma).unwrap();
            let v = line_integral(&m, Representation::Adiabatic, (0, 1), 1.0, 1.0).unwrap();
            assert_abs_diff_eq!(v.re, -PI, epsilon = 1e-3);
            let d = line_integral(&m, Representation::Adiabatic, (0, 0), 1.0, 1.0).unwrap();
            assert_abs_diff_eq!(d.re, 0.0, epsilon = 1e-3);
        }
    }

    #[test]
    fn stokes_consistency() {
        for b in [1.0, 0.1, 0.01] {
            let m = BerryModel::circular(b).unwrap();
            for q in [0.5, 1.0, 2.0] {
                for z in [0.5, 1.0] {
                    for el in [(0, 0), (0, 1)] {
                        let s = surface_flux(&m, Representation::Adiabatic, el, FieldKind::Magnetic, q, z)
                            .unwrap();
                        let l = line_integral(&m, Representation::Adiabatic, el, q, z).unwrap();
                        assert!((s - l.re).abs() <= 1e-6, "b={b} q={q} z={z} {el:?}: {s} vs {l}");
                    }
                }
            }
        }
    }

    #[test]
    fn stokes_elliptic_and_alternative_axis() {
        let m = BerryModel::new(0.2, 0.5, 1.0, ActiveAxis::ZCarriesB).unwrap();
        let s = surface_flux(&m, Representation::Adiabatic, (0, 0), FieldKind::Magnetic, 1.0, 1.0).unwrap();
        let l = line_integral(&m, Representation::Adiabatic, (0, 0), 1.0, 1.0).unwrap();
        assert!((s - l.re).abs() < 1e-6);
        let m = BerryModel::new(0.2, 1.0, 1.0, ActiveAxis::YCarriesB).unwrap();
        let s = surface_flux(&m, Representation::Adiabatic, (0, 1), FieldKind::Magnetic, 1.0, 1.0).unwrap();
        let l = line_integral(&m, Representation::Adiabatic, (0, 1), 1.0, 1.0).unwrap();
        assert!((s - l.re).abs() < 1e-6);
    }

    #[test]
    fn infinite_disc_diagonal_flux_vanishes() {
        let m = BerryModel::circular(1.0).unwrap();
        let s = surface_flux(&m, Representation::Adiabatic, (0, 0), FieldKind::Magnetic, f64::INFINITY, 1.0)
            .unwrap();
        assert_abs_diff_eq!(s, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn yang_mills_fluxes() {
        for b in [0.5, 1e-3] {
            let m = BerryModel::circular(b).unwrap();
            let d = surface_flux(&m, Representation::Adiabatic, (0, 0), FieldKind::YangMills, 0.7, 1.0).unwrap();
            let o = surface_flux(&m, Representation::Adiabatic, (0, 1), FieldKind::YangMills, 0.7, 1.0).unwrap();
            assert_abs_diff_eq!(d, PI, epsilon = 1e-9);
            assert_abs_diff_eq!(o, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn b_limit_examples() {
        let bs = default_b_sequence();
        let v: Vec<f64> = bs.iter().map(|&b| PI * cos_theta(b, 1.0, 1.0)).collect();
        let e = b_limit(&v, &bs).unwrap();
        assert_eq!(e.order, 1);
        assert_abs_diff_eq!(e.value, 0.0, epsilon = 1e-4);

        let v = vec![2.5; 5];
        let e = b_limit(&v, &bs).unwrap();
        assert_eq!((e.value, e.residual), (2.5, 0.0));

        let v: Vec<f64> = bs
            .iter()
            .map(|&b| -PI * (1.0 - cos_theta(b, 1.0, 1.0).powi(2)).sqrt())
            .collect();
        let e = b_limit(&v, &bs).unwrap();
        assert_eq!(e.order, 2);
        assert_abs_diff_eq!(e.value, -PI, epsilon = 1e-8);

        let v = vec![1.0, 2.0, 1.0, 2.0, 1.0];
        assert!(matches!(b_limit(&v, &bs), Err(Error::NoLimit(_))));
        assert!(b_limit(&v[..3], &bs[..3]).is_err());
    }

    #[test]
    fn tables() {
        let cfg = TableConfig::default();
        let m = BerryModel::circular(1.0).unwrap();
        for rep in [Representation::Adiabatic, Representation::Circulating] {
            let t = table_report(&m, rep, &cfg).unwrap();
            assert!(t.passed(), "{:?}", t.failing());
            // magnetic and Yang-Mills limits complement each other
            for el in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let h = t.entry(FieldKind::Magnetic, el).unwrap().limit;
                let f = t.entry(FieldKind::YangMills, el).unwrap().limit;
                assert!((h.abs() < 1e-3) ^ (f.abs() < 1e-3));
            }
        }
        let e = BerryModel::elliptic(1.0, 0.5).unwrap();
        let t = table_report(&e, Representation::Adiabatic, &cfg).unwrap();
        assert!(t.check().is_ok());
    }
}
