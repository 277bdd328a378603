//! Two-state coupling models and their adiabatic eigenstates.
//!
//! Three families are provided:
//!
//! * [`CartesianCoupling`]: `V = [[-A, B], [B, A]]` with real polynomial `A(X,Y)`, `B(X,Y)`.
//! * [`ComplexCoupling`]: `V = [[0, V12], [V12*, 0]]` with the trigonal vibronic series for
//!   `V12(q, φ)`, including the quartic special case `Kq e^{-iφ}[1 - μq e^{3iφ} + λq³e^{-3iφ}]`.
//! * [`BerryModel`]: the linear 3D family `αX σx + βY σy + bZ σz` whose `b → 0` limit embeds
//!   a planar conical intersection in a monopole-like field.
//!
//! All Hamiltonians are traceless and use ħ = 1 with dimensionless coordinates.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::BivariatePoly;

pub type Mat2 = Matrix2<Complex64>;
pub type Spinor = Vector2<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative size below which a coupling vector counts as an exact zero.
pub const DEGENERACY_EPS: f64 = 1e-12;

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Planar two-state models whose mixing angle is half the polar angle of a
/// real 2-vector `(w0, w1)`: `(A, B)` for the Cartesian form, `(Re V12, Im V12)`
/// for the complex form.
pub trait PlanarCoupling {
    fn coupling(&self, x: f64, y: f64) -> [f64; 2];

    /// `∂(w0, w1)/∂(x, y)` as `[[∂x w0, ∂y w0], [∂x w1, ∂y w1]]`.
    fn coupling_jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2];

    /// Rounding scale of `coupling` at `(x, y)`.
    fn coupling_scale(&self, x: f64, y: f64) -> f64;

    fn potential(&self, x: f64, y: f64) -> Mat2;
}

/// `θ = ½·atan2(w1, w0)`, in `(-π/2, π/2]`.
pub fn mixing_angle<M: PlanarCoupling + ?Sized>(model: &M, x: f64, y: f64) -> Result<f64> {
    let [w0, w1] = model.coupling(x, y);
    let scale = model.coupling_scale(x, y).max(f64::MIN_POSITIVE);
    if w0.hypot(w1) <= DEGENERACY_EPS * scale {
        return Err(Error::Degeneracy {
            point: vec![x, y],
        });
    }
    Ok(0.5 * w1.atan2(w0))
}

// ---------------------------------------------------------------------------
// Cartesian real representation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct CartesianCoupling {
    a: BivariatePoly,
    b: BivariatePoly,
    a_x: BivariatePoly,
    a_y: BivariatePoly,
    b_x: BivariatePoly,
    b_y: BivariatePoly,
}

impl CartesianCoupling {
    pub fn new(a: BivariatePoly, b: BivariatePoly) -> Self {
        Self {
            a_x: a.d_dx(),
            a_y: a.d_dy(),
            b_x: b.d_dx(),
            b_y: b.d_dy(),
            a,
            b,
        }
    }

    pub fn from_terms(a: &[(usize, usize, f64)], b: &[(usize, usize, f64)]) -> Result<Self> {
        Ok(Self::new(
            BivariatePoly::from_terms(a)?,
            BivariatePoly::from_terms(b)?,
        ))
    }

    /// `A = X² - 1`, `B = Y`: a pair of intersections at `(±1, 0)` with opposite phases.
    pub fn example_one() -> Self {
        Self::from_terms(&[(2, 0, 1.0), (0, 0, -1.0)], &[(0, 1, 1.0)]).expect("valid terms")
    }

    /// `A = X² - 1`, `B = XZ` in the `(X, Z)` plane; the second coordinate plays the role of `Y`.
    pub fn example_two() -> Self {
        Self::from_terms(&[(2, 0, 1.0), (0, 0, -1.0)], &[(1, 1, 1.0)]).expect("valid terms")
    }

    pub fn a_poly(&self) -> &BivariatePoly {
        &self.a
    }

    pub fn b_poly(&self) -> &BivariatePoly {
        &self.b
    }

    pub fn a(&self, x: f64, y: f64) -> f64 {
        self.a.eval(x, y)
    }

    pub fn b(&self, x: f64, y: f64) -> f64 {
        self.b.eval(x, y)
    }

    /// `[A_X, A_Y, B_X, B_Y]` at `(x, y)`.
    pub fn derivatives(&self, x: f64, y: f64) -> [f64; 4] {
        [
            self.a_x.eval(x, y),
            self.a_y.eval(x, y),
            self.b_x.eval(x, y),
            self.b_y.eval(x, y),
        ]
    }

    /// `A_X B_Y - B_X A_Y`.
    pub fn jacobian(&self, x: f64, y: f64) -> f64 {
        let [ax, ay, bx, by] = self.derivatives(x, y);
        ax * by - bx * ay
    }

    pub fn coefficient_scale(&self) -> f64 {
        self.a.coefficient_scale().max(self.b.coefficient_scale())
    }
}

impl PlanarCoupling for CartesianCoupling {
    fn coupling(&self, x: f64, y: f64) -> [f64; 2] {
        [self.a(x, y), self.b(x, y)]
    }

    fn coupling_jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let [ax, ay, bx, by] = self.derivatives(x, y);
        [[ax, ay], [bx, by]]
    }

    fn coupling_scale(&self, x: f64, y: f64) -> f64 {
        self.a.magnitude_scale(x, y) + self.b.magnitude_scale(x, y)
    }

    fn potential(&self, x: f64, y: f64) -> Mat2 {
        let a = self.a(x, y);
        let b = self.b(x, y);
        Mat2::new(c(-a), c(b), c(b), c(a))
    }
}

// ---------------------------------------------------------------------------
// Complex (E ⊗ ε) representation
// ---------------------------------------------------------------------------

/// Angular series inside the square bracket of `V12`.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingSeries {
    /// `1 - μ q e^{3iφ} + λ q³ e^{-3iφ}`.
    Quartic { mu: f64, lambda: f64 },
    /// `1 + q⁻² Σ_m q^{3m} Q_{m+}(q) e^{3imφ} + Σ_m q^{3m} Q_{m-}(q) e^{-3imφ}`, where
    /// `q_plus[m-1][k]` is the coefficient of `q^{2k}` in `Q_{m+}` (likewise `q_minus`).
    General {
        q_plus: Vec<Vec<f64>>,
        q_minus: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexCoupling {
    pub k: f64,
    pub series: CouplingSeries,
}

fn poly_in_q2(coeffs: &[f64], q2: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * q2 + c)
}

fn poly_in_q2_derivative(coeffs: &[f64], q: f64) -> f64 {
    // d/dq Σ c_k q^{2k} = Σ 2k c_k q^{2k-1}
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| 2.0 * k as f64 * c * q.powi(2 * k as i32 - 1))
        .sum()
}

impl ComplexCoupling {
    pub fn quartic(k: f64, mu: f64, lambda: f64) -> Result<Self> {
        if !(k.is_finite() && mu.is_finite() && lambda.is_finite()) || k == 0.0 {
            return Err(Error::Input(
                "quartic coupling needs finite K != 0, mu, lambda".into(),
            ));
        }
        Ok(Self {
            k,
            series: CouplingSeries::Quartic { mu, lambda },
        })
    }

    pub fn general(k: f64, q_plus: Vec<Vec<f64>>, q_minus: Vec<Vec<f64>>) -> Result<Self> {
        if !k.is_finite() || k == 0.0 {
            return Err(Error::Input("coupling constant K must be finite and nonzero".into()));
        }
        if q_plus
            .iter()
            .chain(q_minus.iter())
            .flatten()
            .any(|c| !c.is_finite())
        {
            return Err(Error::Input("series coefficients must be finite".into()));
        }
        Ok(Self {
            k,
            series: CouplingSeries::General { q_plus, q_minus },
        })
    }

    /// `(μ, λ)` for the quartic shortcut.
    pub fn quartic_parameters(&self) -> Option<(f64, f64)> {
        match self.series {
            CouplingSeries::Quartic { mu, lambda } => Some((mu, lambda)),
            CouplingSeries::General { .. } => None,
        }
    }

    /// The same model expressed through the general `Q_{m±}` series.
    pub fn to_general(&self) -> Self {
        match &self.series {
            CouplingSeries::Quartic { mu, lambda } => Self {
                k: self.k,
                series: CouplingSeries::General {
                    q_plus: vec![vec![-mu]],
                    q_minus: vec![vec![*lambda]],
                },
            },
            CouplingSeries::General { .. } => self.clone(),
        }
    }

    /// Square-bracket factor of `V12`.
    pub fn bracket(&self, q: f64, phi: f64) -> Complex64 {
        match &self.series {
            CouplingSeries::Quartic { mu, lambda } => {
                c(1.0) - mu * q * Complex64::cis(3.0 * phi)
                    + lambda * q.powi(3) * Complex64::cis(-3.0 * phi)
            }
            CouplingSeries::General { q_plus, q_minus } => {
                let q2 = q * q;
                let mut acc = c(1.0);
                for (idx, coeffs) in q_plus.iter().enumerate() {
                    let m = idx as i32 + 1;
                    acc += q.powi(3 * m - 2)
                        * poly_in_q2(coeffs, q2)
                        * Complex64::cis(3.0 * m as f64 * phi);
                }
                for (idx, coeffs) in q_minus.iter().enumerate() {
                    let m = idx as i32 + 1;
                    acc += q.powi(3 * m)
                        * poly_in_q2(coeffs, q2)
                        * Complex64::cis(-3.0 * m as f64 * phi);
                }
                acc
            }
        }
    }

    /// `(∂/∂q, ∂/∂φ)` of the bracket factor.
    pub fn bracket_derivatives(&self, q: f64, phi: f64) -> (Complex64, Complex64) {
        match &self.series {
            CouplingSeries::Quartic { mu, lambda } => {
                let e3 = Complex64::cis(3.0 * phi);
                let em3 = Complex64::cis(-3.0 * phi);
                let dq = -mu * e3 + 3.0 * lambda * q * q * em3;
                let dphi = -3.0 * I * mu * q * e3 - 3.0 * I * lambda * q.powi(3) * em3;
                (dq, dphi)
            }
            CouplingSeries::General { q_plus, q_minus } => {
                let q2 = q * q;
                let mut dq = c(0.0);
                let mut dphi = c(0.0);
                for (idx, coeffs) in q_plus.iter().enumerate() {
                    let m = idx as i32 + 1;
                    let p = 3 * m - 2;
                    let e = Complex64::cis(3.0 * m as f64 * phi);
                    let radial = q.powi(p) * poly_in_q2(coeffs, q2);
                    let radial_dq = if p > 0 {
                        p as f64 * q.powi(p - 1) * poly_in_q2(coeffs, q2)
                    } else {
                        0.0
                    } + q.powi(p) * poly_in_q2_derivative(coeffs, q);
                    dq += radial_dq * e;
                    dphi += radial * I * (3.0 * m as f64) * e;
                }
                for (idx, coeffs) in q_minus.iter().enumerate() {
                    let m = idx as i32 + 1;
                    let p = 3 * m;
                    let e = Complex64::cis(-3.0 * m as f64 * phi);
                    let radial = q.powi(p) * poly_in_q2(coeffs, q2);
                    let radial_dq = p as f64 * q.powi(p - 1) * poly_in_q2(coeffs, q2)
                        + q.powi(p) * poly_in_q2_derivative(coeffs, q);
                    dq += radial_dq * e;
                    dphi += radial * (-I) * (3.0 * m as f64) * e;
                }
                (dq, dphi)
            }
        }
    }

    /// Sum of magnitudes of the bracket terms (rounding scale of `bracket`).
    pub fn bracket_scale(&self, q: f64) -> f64 {
        match &self.series {
            CouplingSeries::Quartic { mu, lambda } => {
                1.0 + (mu * q).abs() + (lambda * q.powi(3)).abs()
            }
            CouplingSeries::General { q_plus, q_minus } => {
                let q2 = q * q;
                let mut s = 1.0;
                for (idx, coeffs) in q_plus.iter().enumerate() {
                    let m = idx as i32 + 1;
                    let abs: Vec<f64> = coeffs.iter().map(|c| c.abs()).collect();
                    s += q.powi(3 * m - 2) * poly_in_q2(&abs, q2);
                }
                for (idx, coeffs) in q_minus.iter().enumerate() {
                    let m = idx as i32 + 1;
                    let abs: Vec<f64> = coeffs.iter().map(|c| c.abs()).collect();
                    s += q.powi(3 * m) * poly_in_q2(&abs, q2);
                }
                s
            }
        }
    }

    /// `V12(q, φ) = K q e^{-iφ} [bracket]`.
    pub fn v12(&self, q: f64, phi: f64) -> Complex64 {
        self.k * q * Complex64::cis(-phi) * self.bracket(q, phi)
    }

    pub fn v12_xy(&self, x: f64, y: f64) -> Complex64 {
        let q = x.hypot(y);
        let phi = y.atan2(x);
        self.v12(q, phi)
    }

    /// `U12 = e^{iφ0} V12`, the form used for expansions about a trigonal point.
    pub fn u12(&self, q: f64, phi: f64, phi0: f64) -> Complex64 {
        Complex64::cis(phi0) * self.v12(q, phi)
    }
}

impl PlanarCoupling for ComplexCoupling {
    fn coupling(&self, x: f64, y: f64) -> [f64; 2] {
        let v = self.v12_xy(x, y);
        [v.re, v.im]
    }

    fn coupling_jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        // V12 = K z̄ g(q, φ) with z = x + iy; chain rule through (q, φ).
        let q = x.hypot(y);
        let phi = y.atan2(x);
        let g = self.bracket(q, phi);
        let (gq, gphi) = self.bracket_derivatives(q, phi);
        let zbar = Complex64::new(x, -y);
        let (dq_dx, dq_dy, dphi_dx, dphi_dy) = if q > 0.0 {
            (x / q, y / q, -y / (q * q), x / (q * q))
        } else {
            (0.0, 0.0, 0.0, 0.0)
        };
        let dx = self.k * (g + zbar * (gq * dq_dx + gphi * dphi_dx));
        let dy = self.k * (-I * g + zbar * (gq * dq_dy + gphi * dphi_dy));
        [[dx.re, dy.re], [dx.im, dy.im]]
    }

    fn coupling_scale(&self, x: f64, y: f64) -> f64 {
        let q = x.hypot(y);
        self.k.abs() * q * self.bracket_scale(q)
    }

    fn potential(&self, x: f64, y: f64) -> Mat2 {
        let v = self.v12_xy(x, y);
        Mat2::new(c(0.0), v, v.conj(), c(0.0))
    }
}

// ---------------------------------------------------------------------------
// Berry / elliptic 3D model
// ---------------------------------------------------------------------------

/// Which coordinate carries the seam-regularization parameter `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActiveAxis {
    /// `H = αX σx + βY σy + bZ σz`; seam along Z.
    ZCarriesB,
    /// `H = αX σx + bY σy + βZ σz`; seam along Y, `(X, Z)` active.
    YCarriesB,
}

impl ActiveAxis {
    pub fn name(self) -> &'static str {
        match self {
            ActiveAxis::ZCarriesB => "Z_carries_b",
            ActiveAxis::YCarriesB => "Y_carries_b",
        }
    }
}

/// Cylindrical geometry of a point in the model's seam frame (seam along the frame Z axis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeamGeometry {
    /// Frame radius `q = sqrt(X² + Y²)`.
    pub q: f64,
    /// Frame azimuth `φ = atan2(Y, X)`.
    pub phi: f64,
    /// Frame seam coordinate.
    pub z: f64,
    /// `q' = sqrt((αX)² + (βY)²)`.
    pub q_mod: f64,
    /// `φ' = atan2(βY, αX)`.
    pub phi_mod: f64,
    /// `R'_b = sqrt(q'² + (bZ)²)`.
    pub r: f64,
    /// `θ'_b = atan2(q', bZ)`.
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerryModel {
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub active_axis: ActiveAxis,
}

impl BerryModel {
    pub fn new(b: f64, alpha: f64, beta: f64, active_axis: ActiveAxis) -> Result<Self> {
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::Input(format!("b must be finite and >= 0, got {b}")));
        }
        if !(alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0) {
            return Err(Error::Input(format!(
                "alpha and beta must be finite and > 0, got ({alpha}, {beta})"
            )));
        }
        Ok(Self {
            b,
            alpha,
            beta,
            active_axis,
        })
    }

    /// Circular model `α = β = 1`, seam along Z.
    pub fn circular(b: f64) -> Result<Self> {
        Self::new(b, 1.0, 1.0, ActiveAxis::ZCarriesB)
    }

    /// Elliptic model with `α = γ`, `β = 1`, seam along Z.
    pub fn elliptic(b: f64, gamma: f64) -> Result<Self> {
        Self::new(b, gamma, 1.0, ActiveAxis::ZCarriesB)
    }

    pub fn with_b(&self, b: f64) -> Result<Self> {
        Self::new(b, self.alpha, self.beta, self.active_axis)
    }

    /// `γ = α / β`.
    pub fn gamma(&self) -> f64 {
        self.alpha / self.beta
    }

    pub fn hamiltonian(&self, p: [f64; 3]) -> Mat2 {
        let [x, y, z] = p;
        match self.active_axis {
            ActiveAxis::ZCarriesB => {
                let off = Complex64::new(self.alpha * x, -self.beta * y);
                Mat2::new(c(self.b * z), off, off.conj(), c(-self.b * z))
            }
            ActiveAxis::YCarriesB => {
                let off = Complex64::new(self.alpha * x, -self.b * y);
                Mat2::new(c(self.beta * z), off, off.conj(), c(-self.beta * z))
            }
        }
    }

    /// Maps a physical point to the seam frame in which the Hamiltonian takes the
    /// standard form `αX' σx + βY' σy + bZ' σz`.
    pub fn frame_point(&self, p: [f64; 3]) -> [f64; 3] {
        match self.active_axis {
            ActiveAxis::ZCarriesB => p,
            ActiveAxis::YCarriesB => [p[0], p[2], -p[1]],
        }
    }

    /// Inverse of [`frame_point`](Self::frame_point).
    pub fn physical_point(&self, f: [f64; 3]) -> [f64; 3] {
        match self.active_axis {
            ActiveAxis::ZCarriesB => f,
            ActiveAxis::YCarriesB => [f[0], -f[2], f[1]],
        }
    }

    /// Maps Cartesian components of a vector field given in the seam frame to physical
    /// components (the frame map is a proper rotation, so gradients and curls transform alike).
    pub fn frame_vector_to_physical(&self, v: [Complex64; 3]) -> [Complex64; 3] {
        match self.active_axis {
            ActiveAxis::ZCarriesB => v,
            ActiveAxis::YCarriesB => [v[0], -v[2], v[1]],
        }
    }

    /// Constant unitary relating the diabatic basis of this formalism to the standard one:
    /// `H(p) = V · H_std(frame(p)) · V†`.
    pub fn diabatic_unitary(&self) -> Mat2 {
        match self.active_axis {
            ActiveAxis::ZCarriesB => Mat2::identity(),
            ActiveAxis::YCarriesB => {
                let s = c(FRAC_1_SQRT_2);
                let mi = Complex64::new(0.0, -FRAC_1_SQRT_2);
                Mat2::new(s, mi, mi, s)
            }
        }
    }

    /// Seam-frame geometry of a physical point.
    pub fn geometry(&self, p: [f64; 3]) -> SeamGeometry {
        self.frame_geometry(self.frame_point(p))
    }

    pub fn frame_geometry(&self, f: [f64; 3]) -> SeamGeometry {
        let [x, y, z] = f;
        let ax = self.alpha * x;
        let by = self.beta * y;
        let q_mod = ax.hypot(by);
        let bz = self.b * z;
        SeamGeometry {
            q: x.hypot(y),
            phi: y.atan2(x),
            z,
            q_mod,
            phi_mod: by.atan2(ax),
            r: q_mod.hypot(bz),
            theta: q_mod.atan2(bz),
        }
    }

    /// Adiabatic states `|1>` (eigenvalue `+R'_b`) and `|2>` (eigenvalue `-R'_b`) in the
    /// half-angle gauge.
    pub fn adiabatic_states(&self, p: [f64; 3]) -> Result<SpinorPair> {
        self.adiabatic_states_near(p, None)
    }

    /// As [`adiabatic_states`](Self::adiabatic_states), choosing the branch of `φ'` closest to
    /// `phi_ref` so that states sampled along a path vary continuously.
    pub fn adiabatic_states_near(&self, p: [f64; 3], phi_ref: Option<f64>) -> Result<SpinorPair> {
        if self.b == 0.0 {
            return Err(Error::Input(
                "b = 0 is not allowed for eigen-decomposition; use the b -> 0 limiting procedure"
                    .into(),
            ));
        }
        let g = self.geometry(p);
        if g.r == 0.0 {
            return Err(Error::Degeneracy { point: p.to_vec() });
        }
        let phi = match phi_ref {
            Some(r) => nearest_branch(g.phi_mod, r),
            None => g.phi_mod,
        };
        let (one, two) = half_angle_states(g.theta, phi);
        let v = self.diabatic_unitary();
        Ok(SpinorPair {
            point: p,
            first: v * one,
            second: v * two,
            representation: Representation::Adiabatic,
        })
    }

    /// Eigenvalue magnitude `R'_b`.
    pub fn splitting_radius(&self, p: [f64; 3]) -> f64 {
        self.geometry(p).r
    }
}

/// Shifts `angle` by a multiple of 2π to lie within π of `reference`.
pub fn nearest_branch(angle: f64, reference: f64) -> f64 {
    let two_pi = 2.0 * PI;
    angle + two_pi * ((reference - angle) / two_pi).round()
}

/// `|1> = (e^{-iφ/2} cos(θ/2), e^{iφ/2} sin(θ/2))`, `|2> = (-e^{-iφ/2} sin(θ/2), e^{iφ/2} cos(θ/2))`.
pub fn half_angle_states(theta: f64, phi: f64) -> (Spinor, Spinor) {
    let (s, co) = (0.5 * theta).sin_cos();
    let em = Complex64::cis(-0.5 * phi);
    let ep = Complex64::cis(0.5 * phi);
    (
        Spinor::new(em * co, ep * s),
        Spinor::new(-em * s, ep * co),
    )
}

// ---------------------------------------------------------------------------
// Representations
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    /// Instantaneous eigenstates `|1>, |2>`.
    Adiabatic,
    /// `|+) = (|1> + |2>)/√2`, `|-) = (|1> - |2>)/√2`.
    Circulating,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Adiabatic => "adiabatic",
            Representation::Circulating => "circulating",
        }
    }

    /// Element labels `[[11, 12], [21, 22]]` or `[[++, +-], [-+, --]]`.
    pub fn element_label(self, row: usize, col: usize) -> &'static str {
        const AD: [[&str; 2]; 2] = [["11", "12"], ["21", "22"]];
        const CI: [[&str; 2]; 2] = [["++", "+-"], ["-+", "--"]];
        match self {
            Representation::Adiabatic => AD[row][col],
            Representation::Circulating => CI[row][col],
        }
    }
}

/// Columns are the circulating states expressed in the adiabatic basis.
pub fn circulating_unitary() -> Mat2 {
    let s = c(FRAC_1_SQRT_2);
    Mat2::new(s, s, s, -s)
}

/// Pair of orthonormal spinors at a point. Adiabatic: `first = |1>` (upper, `+R'_b`),
/// `second = |2>` (lower, `-R'_b`). Circulating: `first = |+)`, `second = |-)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorPair {
    pub point: [f64; 3],
    pub first: Spinor,
    pub second: Spinor,
    pub representation: Representation,
}

impl SpinorPair {
    pub fn upper(&self) -> Option<Spinor> {
        (self.representation == Representation::Adiabatic).then_some(self.first)
    }

    pub fn lower(&self) -> Option<Spinor> {
        (self.representation == Representation::Adiabatic).then_some(self.second)
    }

    pub fn get(&self, index: usize) -> Spinor {
        if index == 0 {
            self.first
        } else {
            self.second
        }
    }

    /// Largest deviation from orthonormality.
    pub fn orthonormality_defect(&self) -> f64 {
        let n1 = (self.first.norm() - 1.0).abs();
        let n2 = (self.second.norm() - 1.0).abs();
        let ov = self.first.dotc(&self.second).norm();
        n1.max(n2).max(ov)
    }
}

pub fn to_circulating(states: &SpinorPair) -> Result<SpinorPair> {
    if states.representation != Representation::Adiabatic {
        return Err(Error::Representation {
            expected: Representation::Adiabatic.name(),
            found: states.representation.name(),
        });
    }
    let s = FRAC_1_SQRT_2;
    Ok(SpinorPair {
        point: states.point,
        first: (states.first + states.second) * c(s),
        second: (states.first - states.second) * c(s),
        representation: Representation::Circulating,
    })
}

pub fn from_circulating(states: &SpinorPair) -> Result<SpinorPair> {
    if states.representation != Representation::Circulating {
        return Err(Error::Representation {
            expected: Representation::Circulating.name(),
            found: states.representation.name(),
        });
    }
    let s = FRAC_1_SQRT_2;
    Ok(SpinorPair {
        point: states.point,
        first: (states.first + states.second) * c(s),
        second: (states.first - states.second) * c(s),
        representation: Representation::Adiabatic,
    })
}

// ---------------------------------------------------------------------------
// Model dispatch
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Cartesian(CartesianCoupling),
    Complex(ComplexCoupling),
    Berry(BerryModel),
}

impl Model {
    pub fn arity(&self) -> usize {
        match self {
            Model::Cartesian(_) | Model::Complex(_) => 2,
            Model::Berry(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Cartesian(_) => "cartesian",
            Model::Complex(_) => "complex",
            Model::Berry(_) => "berry",
        }
    }
}

/// Hermitian, traceless potential matrix of any model at `point`.
pub fn eval_potential(model: &Model, point: &[f64]) -> Result<Mat2> {
    if point.len() != model.arity() {
        return Err(Error::Input(format!(
            "{} model expects {} coordinates, got {}",
            model.kind(),
            model.arity(),
            point.len()
        )));
    }
    Ok(match model {
        Model::Cartesian(m) => m.potential(point[0], point[1]),
        Model::Complex(m) => m.potential(point[0], point[1]),
        Model::Berry(m) => m.hamiltonian([point[0], point[1], point[2]]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::SymmetricEigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_mat_close(a: &Mat2, b: &Mat2, tol: f64) {
        assert!((a - b).norm() <= tol, "{a} vs {b}");
    }

    #[test]
    fn example_one_vanishes_at_intersection() {
        let m = Model::Cartesian(CartesianCoupling::example_one());
        let v = eval_potential(&m, &[1.0, 0.0]).unwrap();
        assert_eq!(v, Mat2::zeros());
    }

    #[test]
    fn berry_on_axis_is_diagonal() {
        let m = Model::Berry(BerryModel::circular(1.0).unwrap());
        let v = eval_potential(&m, &[0.0, 0.0, 1.0]).unwrap();
        assert_mat_close(&v, &Mat2::new(c(1.0), c(0.0), c(0.0), c(-1.0)), 0.0);
    }

    #[test]
    fn arity_mismatch_is_input_error() {
        let m = Model::Berry(BerryModel::circular(1.0).unwrap());
        assert!(matches!(eval_potential(&m, &[1.0, 0.0]), Err(Error::Input(_))));
        let m = Model::Cartesian(CartesianCoupling::example_one());
        assert!(matches!(
            eval_potential(&m, &[1.0, 0.0, 0.0]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn quartic_offdiagonal_small_near_first_root() {
        let m = ComplexCoupling::quartic(1.0, 0.3, 0.003).unwrap();
        let q = 3.95;
        assert!(m.v12(q, 0.0).norm() < 1e-2 * q);
    }

    #[test]
    fn quartic_and_general_series_agree() {
        let quartic = ComplexCoupling::quartic(1.3, 0.3, 0.003).unwrap();
        let general = quartic.to_general();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let q = rng.gen_range(0.0..15.0);
            let phi = rng.gen_range(-PI..PI);
            let a = quartic.v12(q, phi);
            let b = general.v12(q, phi);
            assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
            let (aq, ap) = quartic.bracket_derivatives(q, phi);
            let (bq, bp) = general.bracket_derivatives(q, phi);
            assert!((aq - bq).norm() < 1e-10 * (1.0 + aq.norm()));
            assert!((ap - bp).norm() < 1e-10 * (1.0 + ap.norm()));
        }
    }

    #[test]
    fn complex_jacobian_matches_finite_differences() {
        let m = ComplexCoupling::quartic(1.0, 0.3, 0.003).unwrap();
        let h = 1e-6;
        for &(x, y) in &[(1.0, 0.5), (-2.0, 3.0), (4.0, -1.0), (0.3, -0.2)] {
            let j = m.coupling_jacobian(x, y);
            let fx = |x: f64, y: f64| m.coupling(x, y);
            for comp in 0..2 {
                let dx = (fx(x + h, y)[comp] - fx(x - h, y)[comp]) / (2.0 * h);
                let dy = (fx(x, y + h)[comp] - fx(x, y - h)[comp]) / (2.0 * h);
                assert_abs_diff_eq!(j[comp][0], dx, epsilon = 1e-6 * (1.0 + dx.abs()));
                assert_abs_diff_eq!(j[comp][1], dy, epsilon = 1e-6 * (1.0 + dy.abs()));
            }
        }
    }

    #[test]
    fn mixing_angle_cases() {
        let m = CartesianCoupling::example_one();
        assert_eq!(mixing_angle(&m, 2.0, 0.0).unwrap(), 0.0);

        // Direct evaluation of ½ atan(B/A) near the intersection at (1, 0).
        let (delta, alpha) = (1e-3, 0.1_f64);
        let x = 1.0 + delta * alpha.cos();
        let y = delta * alpha.sin();
        let theta = mixing_angle(&m, x, y).unwrap();
        assert_abs_diff_eq!(theta, 0.025_050_215, epsilon = 1e-9);
        // linearized form ½ arctan(α J / A_X²) with J = 2, A_X = 2
        assert_abs_diff_eq!(theta, 0.5 * (alpha / 2.0).atan(), epsilon = 1e-4);

        assert!(matches!(
            mixing_angle(&m, 1.0, 0.0),
            Err(Error::Degeneracy { .. })
        ));
    }

    #[test]
    fn mixing_angle_degenerate_at_double_root() {
        // λ = 4μ³/27 makes 1 - μq + λq³ have a double root at q0 = sqrt(μ/3λ) = 3/(2μ).
        let mu = 0.3;
        let lambda = 4.0 * mu * mu * mu / 27.0;
        let m = ComplexCoupling::quartic(1.0, mu, lambda).unwrap();
        let q0 = (mu / (3.0 * lambda)).sqrt();
        assert_abs_diff_eq!(q0, 5.0, epsilon = 1e-12);
        assert!(matches!(
            mixing_angle(&m, q0, 0.0),
            Err(Error::Degeneracy { .. })
        ));
    }

    #[test]
    fn adiabatic_state_examples() {
        let m = BerryModel::circular(1.0).unwrap();
        let s = m.adiabatic_states([0.0, 0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(s.second[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.second[1].re, 1.0, epsilon = 1e-15);

        let s = m.adiabatic_states([1.0, 0.0, 0.0]).unwrap();
        let lower = s.lower().unwrap();
        assert_abs_diff_eq!(lower[0].re, -FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(lower[1].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(lower[0].im, 0.0, epsilon = 1e-15);

        // Oracle: dense eigensolver, phase-aligned by overlap.
        let h = m.hamiltonian([1.0, 0.0, 0.0]);
        let eig = SymmetricEigen::new(h);
        let k = if eig.eigenvalues[0] < eig.eigenvalues[1] { 0 } else { 1 };
        let v = eig.eigenvectors.column(k).into_owned();
        let ov = v.dotc(&lower);
        let aligned = v * (ov / ov.norm());
        assert!((aligned - lower).norm() < 1e-12);
    }

    #[test]
    fn elliptic_phase_enters_spinors() {
        let m = BerryModel::new(1e-9, 1.0, 2.0, ActiveAxis::ZCarriesB).unwrap();
        let g = m.geometry([1.0, 1.0, 0.0]);
        assert_abs_diff_eq!(g.phi_mod, 2.0_f64.atan2(1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(g.phi_mod, 1.10715, epsilon = 1e-5);
        let s = m.adiabatic_states([1.0, 1.0, 0.0]).unwrap();
        let upper = s.upper().unwrap();
        assert_abs_diff_eq!(upper[0].arg(), -0.5 * g.phi_mod, epsilon = 1e-12);
        assert_abs_diff_eq!(upper[1].arg(), 0.5 * g.phi_mod, epsilon = 1e-12);
    }

    #[test]
    fn b_zero_rejected() {
        let m = BerryModel::circular(0.0).unwrap();
        assert!(matches!(
            m.adiabatic_states([1.0, 0.0, 1.0]),
            Err(Error::Input(_))
        ));
        let m = BerryModel::circular(1.0).unwrap();
        assert!(matches!(
            m.adiabatic_states([0.0, 0.0, 0.0]),
            Err(Error::Degeneracy { .. })
        ));
    }

    #[test]
    fn circulating_limit_is_diabatic() {
        // b → 0 at q = 1, φ = 0: |+) = e^{iφ/2}|-> = (0, 1)
        let m = BerryModel::circular(1e-12).unwrap();
        let s = to_circulating(&m.adiabatic_states([1.0, 0.0, 1.0]).unwrap()).unwrap();
        assert!((s.first - Spinor::new(c(0.0), c(1.0))).norm() < 1e-11);
        assert!((s.second - Spinor::new(c(1.0), c(0.0))).norm() < 1e-11);
    }

    #[test]
    fn circulating_requires_adiabatic_input() {
        let m = BerryModel::circular(1.0).unwrap();
        let s = to_circulating(&m.adiabatic_states([1.0, 0.0, 1.0]).unwrap()).unwrap();
        assert!(s.orthonormality_defect() < 1e-14);
        assert_abs_diff_eq!(s.first.dotc(&s.second).norm(), 0.0, epsilon = 1e-12);
        assert!(matches!(
            to_circulating(&s),
            Err(Error::Representation { .. })
        ));
        let back = from_circulating(&s).unwrap();
        let orig = m.adiabatic_states([1.0, 0.0, 1.0]).unwrap();
        assert!((back.first - orig.first).norm() < 1e-14);
        assert!((back.second - orig.second).norm() < 1e-14);
    }

    #[test]
    fn diabatic_unitary_maps_standard_form() {
        let m = BerryModel::new(0.7, 1.3, 0.8, ActiveAxis::YCarriesB).unwrap();
        let std = BerryModel::new(0.7, 1.3, 0.8, ActiveAxis::ZCarriesB).unwrap();
        let v = m.diabatic_unitary();
        for p in [[0.3, -0.4, 1.1], [-1.0, 2.0, 0.5], [0.0, 1.0, -0.2]] {
            let lhs = m.hamiltonian(p);
            let rhs = v * std.hamiltonian(m.frame_point(p)) * v.adjoint();
            assert_mat_close(&lhs, &rhs, 1e-14);
        }
    }

    #[test]
    fn random_point_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let models = [
            BerryModel::circular(1.0).unwrap(),
            BerryModel::new(0.3, 0.5, 1.7, ActiveAxis::ZCarriesB).unwrap(),
            BerryModel::new(0.05, 2.0, 1.0, ActiveAxis::YCarriesB).unwrap(),
        ];
        for _ in 0..10_000 {
            let m = models[rng.gen_range(0..models.len())];
            let p = [
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            ];
            let h = m.hamiltonian(p);
            assert!((h - h.adjoint()).norm() <= 1e-14);
            assert!((h[(0, 0)] + h[(1, 1)]).norm() <= 1e-14);
            let r = m.splitting_radius(p);
            let s = m.adiabatic_states(p).unwrap();
            let hn = h.norm();
            assert!((h * s.first - s.first * c(r)).norm() <= 1e-12 * hn);
            assert!((h * s.second + s.second * c(r)).norm() <= 1e-12 * hn);
            assert!(s.orthonormality_defect() <= 1e-12);
            let round = from_circulating(&to_circulating(&s).unwrap()).unwrap();
            assert!((round.first - s.first).norm() <= 1e-14);
            assert!((round.second - s.second).norm() <= 1e-14);
        }
    }

    #[test]
    fn alternative_formalism_agrees_in_limit() {
        // Y-axis formalism at (X, Y_f, Z) against the Z-axis formalism at (X, Z, Y_f),
        // both expressed in the standard diabatic basis.
        let b = 1e-6;
        let alt = BerryModel::new(b, 1.0, 1.0, ActiveAxis::YCarriesB).unwrap();
        let std = BerryModel::new(b, 1.0, 1.0, ActiveAxis::ZCarriesB).unwrap();
        let v = alt.diabatic_unitary();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let (x, yf, z): (f64, f64, f64) = (
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            if x.hypot(z) < 0.3 {
                continue;
            }
            let a = alt.adiabatic_states([x, yf, z]).unwrap();
            let s = std.adiabatic_states([x, z, yf]).unwrap();
            let a1 = v.adjoint() * a.first;
            let a2 = v.adjoint() * a.second;
            assert!((a1 - s.first).norm() < 1e-5);
            assert!((a2 - s.second).norm() < 1e-5);
        }
    }
}
