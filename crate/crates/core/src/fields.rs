//! Nonadiabatic coupling terms, curl ("magnetic") fields and Yang-Mills fields of the
//! linear 3D model, in closed form.
//!
//! Every field is a 2×2 matrix of complex 3-vectors split into a regular part, valid off the
//! seam `q = 0`, and the coefficient multiplying `δ(q)`. Components are given in the
//! cylindrical basis `(q̂, φ̂, Ẑ)` of the seam frame unless converted explicitly.
//!
//! The seam coefficients of the coupling terms are the `b → 0` limits; those of the curl and
//! Yang-Mills fields are evaluated at the model's `b`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{
    c, circulating_unitary, to_circulating, BerryModel, Mat2,
    Representation, SeamGeometry, Spinor,
};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basis {
    /// `(q̂, φ̂, Ẑ)` at azimuth `phi`.
    Cylindrical { phi: f64 },
    /// `(i, j, k)`.
    Cartesian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3C {
    pub c: [Complex64; 3],
    pub basis: Basis,
}

impl Vec3C {
    pub fn new(c: [Complex64; 3], basis: Basis) -> Self {
        Self { c, basis }
    }

    pub fn real(v: [f64; 3], basis: Basis) -> Self {
        Self::new([c(v[0]), c(v[1]), c(v[2])], basis)
    }

    pub fn zero(basis: Basis) -> Self {
        Self::new([ZERO; 3], basis)
    }

    pub fn to_cartesian(self) -> Self {
        match self.basis {
            Basis::Cartesian => self,
            Basis::Cylindrical { phi } => {
                let (s, co) = phi.sin_cos();
                let [vq, vp, vz] = self.c;
                Self::new([vq * co - vp * s, vq * s + vp * co, vz], Basis::Cartesian)
            }
        }
    }

    pub fn to_cylindrical(self, phi: f64) -> Self {
        let [vx, vy, vz] = self.to_cartesian().c;
        let (s, co) = phi.sin_cos();
        Self::new([vx * co + vy * s, -vx * s + vy * co, vz], Basis::Cylindrical { phi })
    }

    fn aligned(self, other: Self) -> (Self, Self) {
        match (self.basis, other.basis) {
            (Basis::Cartesian, Basis::Cartesian) => (self, other),
            (Basis::Cylindrical { phi: a }, Basis::Cylindrical { phi: b }) if a == b => (self, other),
            _ => (self.to_cartesian(), other.to_cartesian()),
        }
    }

    pub fn cross(self, other: Self) -> Self {
        let (a, b) = self.aligned(other);
        let [a0, a1, a2] = a.c;
        let [b0, b1, b2] = b.c;
        Self::new(
            [a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0],
            a.basis,
        )
    }

    pub fn conj(self) -> Self {
        Self::new(self.c.map(|z| z.conj()), self.basis)
    }

    pub fn scale(self, s: Complex64) -> Self {
        Self::new(self.c.map(|z| z * s), self.basis)
    }

    /// Largest component modulus.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `v · w` for a real vector `w` given in the same basis.
    pub fn dot_real(&self, w: [f64; 3]) -> Complex64 {
        self.c[0] * w[0] + self.c[1] * w[1] + self.c[2] * w[2]
    }
}

impl Add for Vec3C {
    type Output = Vec3C;
    fn add(self, rhs: Vec3C) -> Vec3C {
        let (a, b) = self.aligned(rhs);
        Vec3C::new([a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2]], a.basis)
    }
}

impl Sub for Vec3C {
    type Output = Vec3C;
    fn sub(self, rhs: Vec3C) -> Vec3C {
        self + (-rhs)
    }
}

impl Neg for Vec3C {
    type Output = Vec3C;
    fn neg(self) -> Vec3C {
        self.scale(c(-1.0))
    }
}

impl Mul<Complex64> for Vec3C {
    type Output = Vec3C;
    fn mul(self, s: Complex64) -> Vec3C {
        self.scale(s)
    }
}

impl Mul<f64> for Vec3C {
    type Output = Vec3C;
    fn mul(self, s: f64) -> Vec3C {
        self.scale(c(s))
    }
}

/// 2×2 matrix of complex 3-vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMatrix {
    pub el: [[Vec3C; 2]; 2],
}

impl FieldMatrix {
    pub fn zero(basis: Basis) -> Self {
        let z = Vec3C::zero(basis);
        Self { el: [[z; 2]; 2] }
    }

    pub fn get(&self, i: usize, j: usize) -> Vec3C {
        self.el[i][j]
    }

    pub fn map(&self, f: impl Fn(Vec3C) -> Vec3C) -> Self {
        Self {
            el: [
                [f(self.el[0][0]), f(self.el[0][1])],
                [f(self.el[1][0]), f(self.el[1][1])],
            ],
        }
    }

    pub fn to_cartesian(&self) -> Self {
        self.map(Vec3C::to_cartesian)
    }

    /// `(U† M U)_{ij} = Σ_{kl} conj(U_ki) M_kl U_lj`.
    pub fn conjugate(&self, u: &Mat2) -> Self {
        let basis = self.el[0][0].basis;
        let mut out = Self::zero(basis);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Vec3C::zero(basis);
                for k in 0..2 {
                    for l in 0..2 {
                        acc = acc + self.el[k][l] * (u[(k, i)].conj() * u[(l, j)]);
                    }
                }
                out.el[i][j] = acc;
            }
        }
        out
    }

    /// `(A ∧ B)_{ij} = Σ_k A_ik × B_kj`.
    pub fn wedge(&self, other: &Self) -> Self {
        let basis = self.el[0][0].basis;
        let mut out = Self::zero(basis);
        for i in 0..2 {
            for j in 0..2 {
                out.el[i][j] = self.el[i][0].cross(other.el[0][j]) + self.el[i][1].cross(other.el[1][j]);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.el[i][j] = self.el[i][j] + other.el[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|v| v * s)
    }

    /// Largest component modulus over all elements.
    pub fn max_abs(&self) -> f64 {
        self.el
            .iter()
            .flatten()
            .map(Vec3C::max_abs)
            .fold(0.0, f64::max)
    }

    /// `max |M_ij + conj(M_ji)|`.
    pub fn anti_hermiticity_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let a = self.el[i][j].to_cartesian();
                let b = self.el[j][i].to_cartesian().conj();
                d = d.max((a + b).max_abs());
            }
        }
        d
    }

    /// `max |M_ij - conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let a = self.el[i][j].to_cartesian();
                let b = self.el[j][i].to_cartesian().conj();
                d = d.max((a - b).max_abs());
            }
        }
        d
    }
}

/// Coupling terms `τ_ij = <i|∇|j>` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NactField {
    pub point: [f64; 3],
    pub model: BerryModel,
    pub representation: Representation,
    pub regular: FieldMatrix,
    pub seam: FieldMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Magnetic,
    YangMills,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Magnetic => "magnetic",
            FieldKind::YangMills => "yang_mills",
        }
    }
}

/// Curl field `H = ∇∧(iτ)` or Yang-Mills field `F = H + iτ∧τ` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeTensor {
    pub point: [f64; 3],
    pub model: BerryModel,
    pub representation: Representation,
    pub kind: FieldKind,
    pub regular: FieldMatrix,
    pub seam: FieldMatrix,
}

/// Maps a frame-basis field matrix to physical Cartesian components.
fn physical(model: &BerryModel, m: &FieldMatrix) -> FieldMatrix {
    m.map(|v| Vec3C::new(model.frame_vector_to_physical(v.to_cartesian().c), Basis::Cartesian))
}

impl NactField {
    pub fn regular_physical(&self) -> FieldMatrix {
        physical(&self.model, &self.regular)
    }

    pub fn seam_physical(&self) -> FieldMatrix {
        physical(&self.model, &self.seam)
    }
}

impl GaugeTensor {
    pub fn regular_physical(&self) -> FieldMatrix {
        physical(&self.model, &self.regular)
    }

    pub fn seam_physical(&self) -> FieldMatrix {
        physical(&self.model, &self.seam)
    }
}

/// Gradients of the mixing angles at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleGradients {
    pub geometry: SeamGeometry,
    pub grad_phi: Vec3C,
    pub grad_theta: Vec3C,
    pub grad_theta_cross_grad_phi: Vec3C,
    /// Coefficient of `δ(q)` in `∇∧∇φ'`.
    pub curl_grad_phi_seam: Vec3C,
}

fn check_model(model: &BerryModel) -> Result<()> {
    if model.b == 0.0 {
        return Err(Error::Input(
            "fields require b > 0; take b -> 0 through a b sequence".into(),
        ));
    }
    Ok(())
}

fn geometry_off_seam(model: &BerryModel, point: [f64; 3]) -> Result<SeamGeometry> {
    check_model(model)?;
    let g = model.geometry(point);
    if g.q == 0.0 {
        return Err(Error::Seam {
            point: point.to_vec(),
        });
    }
    Ok(g)
}

pub fn angle_gradients(model: &BerryModel, point: [f64; 3]) -> Result<AngleGradients> {
    let g = geometry_off_seam(model, point)?;
    let basis = Basis::Cylindrical { phi: g.phi };
    let (a, be, b) = (model.alpha, model.beta, model.b);
    let r2 = g.r * g.r;
    let bz = b * g.z;
    let s2 = (2.0 * g.phi).sin();
    let gphi = a * be * g.q / (g.q_mod * g.q_mod);

    let grad_phi = Vec3C::real([0.0, gphi, 0.0], basis);
    let tq = bz * g.q_mod / (g.q * r2);
    let tp = -bz * g.q * (a * a - be * be) * s2 / (2.0 * g.q_mod * r2);
    let tz = -b * g.q_mod / r2;
    let grad_theta = Vec3C::real([tq, tp, tz], basis);
    let cross = Vec3C::real([-tz * gphi, 0.0, tq * gphi], basis);
    let seam = Vec3C::real([0.0, 0.0, gphi], basis);
    Ok(AngleGradients {
        geometry: g,
        grad_phi,
        grad_theta,
        grad_theta_cross_grad_phi: cross,
        curl_grad_phi_seam: seam,
    })
}

/// `g(φ) = αβ / (α² cos²φ + β² sin²φ)`, the angular weight of the seam terms; `∫₀^{2π} g dφ = 2π`.
pub fn seam_angular_weight(model: &BerryModel, phi: f64) -> f64 {
    let (s, co) = phi.sin_cos();
    let (a, b) = (model.alpha, model.beta);
    a * b / (a * a * co * co + b * b * s * s)
}

/// `b → 0` seam coefficients of the adiabatic coupling terms at azimuth `phi` and height `z`.
fn nact_seam_adiabatic(model: &BerryModel, phi: f64, z: f64) -> FieldMatrix {
    let basis = Basis::Cylindrical { phi };
    let sgn = if z > 0.0 {
        1.0
    } else if z < 0.0 {
        -1.0
    } else {
        0.0
    };
    let pi = std::f64::consts::PI;
    let (a, b) = (model.alpha, model.beta);
    let d = a * a * phi.cos().powi(2) + b * b * phi.sin().powi(2);
    let gw = seam_angular_weight(model, phi);
    let t11 = Vec3C::new([ZERO, -I * (0.5 * pi * gw * sgn), ZERO], basis);
    let theta = Vec3C::real(
        [pi * sgn, -pi * sgn * (a * a - b * b) * (2.0 * phi).sin() / (2.0 * d), 0.0],
        basis,
    );
    FieldMatrix {
        el: [[t11, -theta * 0.5], [theta * 0.5, -t11]],
    }
}

fn adiabatic_nact(model: &BerryModel, point: [f64; 3]) -> Result<NactField> {
    let ag = angle_gradients(model, point)?;
    let g = ag.geometry;
    let (st, ct) = g.theta.sin_cos();
    let t11 = ag.grad_phi * (-0.5 * I * ct);
    let t12 = ag.grad_phi * (0.5 * I * st) - ag.grad_theta * 0.5;
    let t21 = ag.grad_phi * (0.5 * I * st) + ag.grad_theta * 0.5;
    Ok(NactField {
        point,
        model: *model,
        representation: Representation::Adiabatic,
        regular: FieldMatrix {
            el: [[t11, t12], [t21, -t11]],
        },
        seam: nact_seam_adiabatic(model, g.phi, g.z),
    })
}

/// Coupling-term matrix in the requested representation.
pub fn nact(model: &BerryModel, representation: Representation, point: [f64; 3]) -> Result<NactField> {
    let ad = adiabatic_nact(model, point)?;
    match representation {
        Representation::Adiabatic => Ok(ad),
        Representation::Circulating => {
            gauge_transform(&ad, &circulating_unitary(), None, Representation::Circulating)
        }
    }
}

/// `τ' = U†τU + U†∇U` with `grad_u` the Cartesian-frame (or field-basis) derivatives of `U`;
/// `None` for a constant transformation.
pub fn gauge_transform(
    field: &NactField,
    u: &Mat2,
    grad_u: Option<[Mat2; 3]>,
    target: Representation,
) -> Result<NactField> {
    let uu = u.adjoint() * u;
    if (uu - Mat2::identity()).norm() > 1e-12 {
        return Err(Error::Input("gauge transformation is not unitary".into()));
    }
    let mut regular = field.regular.conjugate(u);
    if let Some(du) = grad_u {
        let basis = regular.el[0][0].basis;
        let terms: Vec<Mat2> = du.iter().map(|d| u.adjoint() * d).collect();
        for i in 0..2 {
            for j in 0..2 {
                let v = Vec3C::new([terms[0][(i, j)], terms[1][(i, j)], terms[2][(i, j)]], basis);
                regular.el[i][j] = regular.el[i][j] + v;
            }
        }
    }
    Ok(NactField {
        point: field.point,
        model: field.model,
        representation: target,
        regular,
        seam: field.seam.conjugate(u),
    })
}

fn adiabatic_magnetic(model: &BerryModel, point: [f64; 3]) -> Result<GaugeTensor> {
    let ag = angle_gradients(model, point)?;
    let g = ag.geometry;
    let (st, ct) = g.theta.sin_cos();
    let w = ag.grad_theta_cross_grad_phi;
    let s = ag.curl_grad_phi_seam;
    let h11 = w * (-0.5 * st);
    let h12 = w * (-0.5 * ct);
    let s11 = s * (0.5 * ct);
    let s12 = s * (-0.5 * st);
    Ok(GaugeTensor {
        point,
        model: *model,
        representation: Representation::Adiabatic,
        kind: FieldKind::Magnetic,
        regular: FieldMatrix {
            el: [[h11, h12], [h12, -h11]],
        },
        seam: FieldMatrix {
            el: [[s11, s12], [s12, -s11]],
        },
    })
}

/// Curl field `H = ∇∧A`, `A = iτ`.
pub fn magnetic_field(
    model: &BerryModel,
    representation: Representation,
    point: [f64; 3],
) -> Result<GaugeTensor> {
    let h = adiabatic_magnetic(model, point)?;
    Ok(match representation {
        Representation::Adiabatic => h,
        Representation::Circulating => conjugate_tensor(&h, &circulating_unitary(), representation),
    })
}

fn conjugate_tensor(t: &GaugeTensor, u: &Mat2, representation: Representation) -> GaugeTensor {
    GaugeTensor {
        representation,
        regular: t.regular.conjugate(u),
        seam: t.seam.conjugate(u),
        ..*t
    }
}

/// Yang-Mills field `F = H + iτ∧τ`, assembled from [`magnetic_field`] and [`nact`]. The
/// product term has no `δ(q)` content, so the seam part of `F` is that of `H`.
pub fn yang_mills_field(
    model: &BerryModel,
    representation: Representation,
    point: [f64; 3],
) -> Result<GaugeTensor> {
    let h = magnetic_field(model, representation, point)?;
    let tau = nact(model, representation, point)?;
    let product = tau.regular.wedge(&tau.regular).scale(I);
    Ok(GaugeTensor {
        kind: FieldKind::YangMills,
        regular: h.regular.add(&product),
        ..h
    })
}

/// `lim_{q→0+} q · (seam Ẑ-coefficient)` at azimuth `phi`: integrating this over `φ` gives
/// the seam contribution to the flux through a disc about the seam at height `z`.
pub fn seam_flux_density(
    model: &BerryModel,
    representation: Representation,
    z: f64,
    phi: f64,
) -> Result<Mat2> {
    check_model(model)?;
    let (c0, s0) = if z > 0.0 {
        (1.0, 0.0)
    } else if z < 0.0 {
        (-1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    let gw = seam_angular_weight(model, phi);
    let m = Mat2::new(c(0.5 * c0 * gw), c(-0.5 * s0 * gw), c(-0.5 * s0 * gw), c(-0.5 * c0 * gw));
    Ok(match representation {
        Representation::Adiabatic => m,
        Representation::Circulating => {
            let u = circulating_unitary();
            u.adjoint() * m * u
        }
    })
}

fn states_for(
    model: &BerryModel,
    representation: Representation,
    p: [f64; 3],
    phi_ref: f64,
) -> Result<[Spinor; 2]> {
    let s = model.adiabatic_states_near(p, Some(phi_ref))?;
    let s = match representation {
        Representation::Adiabatic => s,
        Representation::Circulating => to_circulating(&s)?,
    };
    Ok([s.first, s.second])
}

/// Central-difference `<i|∂_k|j>` from the gauge-fixed states, in physical Cartesian
/// components. The seam part is left at zero.
pub fn nact_numeric(
    model: &BerryModel,
    representation: Representation,
    point: [f64; 3],
    h: f64,
) -> Result<NactField> {
    let g = geometry_off_seam(model, point)?;
    if !(h > 0.0) || g.q <= 2.0 * h {
        return Err(Error::Input(format!(
            "step {h} must be positive and below half the seam distance {}",
            g.q
        )));
    }
    let phi_ref = g.phi_mod;
    let centre = states_for(model, representation, point, phi_ref)?;
    let mut comps = [[[ZERO; 3]; 2]; 2];
    for k in 0..3 {
        let mut pp = point;
        let mut pm = point;
        pp[k] += h;
        pm[k] -= h;
        let plus = states_for(model, representation, pp, phi_ref)?;
        let minus = states_for(model, representation, pm, phi_ref)?;
        for j in 0..2 {
            for side in [&plus[j], &minus[j]] {
                let ov = centre[j].dotc(side).norm();
                if ov < 0.9 {
                    return Err(Error::Step { overlap: ov });
                }
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                let d = (plus[j] - minus[j]) / c(2.0 * h);
                comps[i][j][k] = centre[i].dotc(&d);
            }
        }
    }
    let v = |i: usize, j: usize| Vec3C::new(comps[i][j], Basis::Cartesian);
    Ok(NactField {
        point,
        model: *model,
        representation,
        regular: FieldMatrix {
            el: [[v(0, 0), v(0, 1)], [v(1, 0), v(1, 1)]],
        },
        seam: FieldMatrix::zero(Basis::Cartesian),
    })
}

/// Direct circular-model forms in the seam cylindrical basis, used as golden values.
pub mod reference {
    use super::*;

    fn rb(b: f64, q: f64, z: f64) -> f64 {
        q.hypot(b * z)
    }

    pub fn tau11(b: f64, q: f64, z: f64) -> [Complex64; 3] {
        let r = rb(b, q, z);
        [ZERO, -0.5 * I * (b * z / (q * r)), ZERO]
    }

    pub fn tau12(b: f64, q: f64, z: f64) -> [Complex64; 3] {
        let r = rb(b, q, z);
        let r2 = r * r;
        [c(-b * z / (2.0 * r2)), 0.5 * I / r, c(b * q / (2.0 * r2))]
    }

    pub fn tau_pp(b: f64, q: f64, z: f64) -> [Complex64; 3] {
        [ZERO, 0.5 * I / rb(b, q, z), ZERO]
    }

    pub fn tau_mm(b: f64, q: f64, z: f64) -> [Complex64; 3] {
        [ZERO, -0.5 * I / rb(b, q, z), ZERO]
    }

    pub fn tau_pm(b: f64, q: f64, z: f64) -> [Complex64; 3] {
        let r = rb(b, q, z);
        let r2 = r * r;
        [
            c(0.5 * b * z / r2),
            -0.5 * I * (b * z / (q * r)),
            c(-0.5 * b * q / r2),
        ]
    }

    pub fn tau_mp(b: f64, q: f64, z: f64) -> [Complex64; 3] {
        let r = rb(b, q, z);
        let r2 = r * r;
        [
            c(-0.5 * b * z / r2),
            -0.5 * I * (b * z / (q * r)),
            c(0.5 * b * q / r2),
        ]
    }

    /// Regular part of `H_11`.
    pub fn h11(b: f64, q: f64, z: f64) -> [f64; 3] {
        let r3 = rb(b, q, z).powi(3);
        [-b * q / (2.0 * r3), 0.0, -b * z / (2.0 * r3)]
    }

    /// Regular part of `H_12`.
    pub fn h12(b: f64, q: f64, z: f64) -> [f64; 3] {
        let r3 = rb(b, q, z).powi(3);
        [-b * b * z / (2.0 * r3), 0.0, -(b * z).powi(2) / (2.0 * q * r3)]
    }

    /// `δ(q)` coefficients of `F_11` and `F_12` (Ẑ components).
    pub fn f_seam(b: f64, q: f64, z: f64) -> (f64, f64) {
        let r = rb(b, q, z);
        (b * z / (2.0 * q * r), -1.0 / (2.0 * r))
    }

    /// `b → 0` off-diagonal coupling of the elliptic model, `φ̂` component.
    pub fn tau12_elliptic_limit(gamma: f64, q: f64, phi: f64) -> Complex64 {
        0.5 * I * gamma / (1.0 + (gamma * gamma - 1.0) * phi.cos().powi(2)) / q
    }

    /// `b → 0` seam magnetic coefficient of `H_12` for the elliptic model (Ẑ component).
    pub fn h12_seam_elliptic_limit(gamma: f64, q: f64, phi: f64) -> f64 {
        -0.5 * gamma / (1.0 + (gamma * gamma - 1.0) * phi.cos().powi(2)) / q
    }
}
