//! Driven two-level dynamics and monopole Berry phases.
//!
//! The doublet Hamiltonian is `H(t) = (G/2)(-cos ωt σz + sin ωt σx)`; its exact solution is
//! evaluated in closed form and cross-checked against direct integration.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{dopri5, OdeStats};
use crate::quad::gauss_legendre;

type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// Minimum `G/ω` for phase extraction.
pub const ADIABATIC_RATIO: f64 = 10.0;
/// Minimum ratio between the surviving and the suppressed branch coefficient.
pub const BRANCH_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubletDynamics {
    pub g: f64,
    pub omega: f64,
    pub chi0: [C64; 2],
}

impl DoubletDynamics {
    pub fn new(g: f64, omega: f64, chi0: [C64; 2]) -> Result<Self> {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::Input(format!("coupling G must be positive, got {g}")));
        }
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(Error::Input(format!("frequency must be non-negative, got {omega}")));
        }
        let norm = chi0[0].norm_sqr() + chi0[1].norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Input(format!("initial state has norm² {norm}, expected 1")));
        }
        Ok(Self { g, omega, chi0 })
    }

    /// Starts in the lower eigenstate `(1, 0)` of `H(0)`.
    pub fn ground(g: f64, omega: f64) -> Result<Self> {
        Self::new(g, omega, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
    }

    /// Starts in the upper eigenstate `(0, 1)` of `H(0)`.
    pub fn excited(g: f64, omega: f64) -> Result<Self> {
        Self::new(g, omega, [C64::new(0.0, 0.0), C64::new(1.0, 0.0)])
    }

    pub fn k(&self) -> f64 {
        0.5 * self.g.hypot(self.omega)
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// `f1`; equals 1 in the static limit.
    pub fn f1(&self) -> f64 {
        let (k, g, w) = (self.k(), self.g, self.omega);
        (k + 0.5 * g - 0.5 * w) / (k + 0.5 * g + 0.5 * w)
    }

    /// `f2`; its static limit is -1.
    pub fn f2(&self) -> f64 {
        if self.omega == 0.0 {
            return -1.0;
        }
        let (g, w) = (self.g, self.omega);
        // K - G/2 written without cancellation
        let d = 0.25 * w * w / (self.k() + 0.5 * g);
        (d - 0.5 * w) / (d + 0.5 * w)
    }

    pub fn hamiltonian(&self, t: f64) -> [[C64; 2]; 2] {
        let (s, c) = (self.omega * t).sin_cos();
        let h = 0.5 * self.g;
        [
            [C64::new(-h * c, 0.0), C64::new(h * s, 0.0)],
            [C64::new(h * s, 0.0), C64::new(h * c, 0.0)],
        ]
    }

    /// Coefficients of the `e^{+i(K-ω/2)t}` and `e^{-i(K-ω/2)t}` branches at `t = 0`.
    pub fn branch_coefficients(&self) -> (C64, C64) {
        let (k, g, w) = (self.k(), self.g, self.omega);
        let [x1, x2] = self.chi0;
        let kp = k + 0.5 * g + 0.5 * w;
        let km = self.k_minus() + 0.5 * w;
        (x1 * kp + I * x2 * km, x1 * km - I * x2 * kp)
    }

    /// `K - G/2`.
    fn k_minus(&self) -> f64 {
        0.25 * self.omega * self.omega / (self.k() + 0.5 * self.g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `e^{+i(K-ω/2)t}`, surviving for the ground state.
    Rising,
    /// `e^{-i(K-ω/2)t}`, surviving for the excited state.
    Falling,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Rising => "ground",
            Branch::Falling => "excited",
        }
    }

    fn sign(self) -> f64 {
        match self {
            Branch::Rising => 1.0,
            Branch::Falling => -1.0,
        }
    }
}

/// One branch of the exact amplitude of component `comp` (0 or 1).
fn branch_term(d: &DoubletDynamics, branch: Branch, comp: usize, t: f64) -> C64 {
    let (k, g, w) = (d.k(), d.g, d.omega);
    let [x1, x2] = d.chi0;
    let s = if comp == 0 { 1.0 } else { -1.0 };
    let pre = if comp == 0 { C64::new(1.0, 0.0) } else { -I } / (4.0 * k);
    let kpp = k + 0.5 * g + 0.5 * w;
    let kpm = k + 0.5 * g - 0.5 * w;
    let kmp = d.k_minus() + 0.5 * w;
    let kmm = d.k_minus() - 0.5 * w;
    let phase = (k - 0.5 * w) * t;
    match branch {
        Branch::Rising => {
            let e = C64::from_polar(1.0, w * t);
            let bracket = x1 * (kpp + s * kpm * e) + I * x2 * (kmp - s * kmm * e);
            pre * C64::from_polar(1.0, phase) * bracket
        }
        Branch::Falling => {
            let e = C64::from_polar(1.0, -w * t);
            let bracket = x1 * (kmp + s * kmm * e) - I * x2 * (kpp - s * kpm * e);
            pre * s * C64::from_polar(1.0, -phase) * bracket
        }
    }
}

/// Exact amplitudes `(χ₁(t), χ₂(t))` for arbitrary initial values.
pub fn closed_form_amplitudes(d: &DoubletDynamics, t: f64) -> (C64, C64) {
    let comp = |c| branch_term(d, Branch::Rising, c, t) + branch_term(d, Branch::Falling, c, t);
    (comp(0), comp(1))
}

/// Ground-state `χ₁(t)` in its trigonometric form.
pub fn ground_amplitude(g: f64, omega: f64, t: f64) -> C64 {
    let k = 0.5 * g.hypot(omega);
    let (sk, ck) = (k * t).sin_cos();
    let (sw, cw) = (0.5 * omega * t).sin_cos();
    C64::new(ck * cw + omega / (2.0 * k) * sk * sw, g / (2.0 * k) * sk * cw)
}

/// Populations `(lower, upper)` of the instantaneous eigenstates of `H(t)` for state `chi`.
pub fn adiabatic_populations(d: &DoubletDynamics, t: f64, chi: (C64, C64)) -> (f64, f64) {
    let (s, c) = (0.5 * d.omega * t).sin_cos();
    let lower = (c * chi.0 - s * chi.1).norm_sqr();
    let upper = (s * chi.0 + c * chi.1).norm_sqr();
    (lower, upper)
}

/// First-order adiabatic form of the amplitudes: prefactors expanded to `O(ω/G)`, with the
/// exact `K` kept in the exponents.
pub fn adiabatic_amplitudes(d: &DoubletDynamics, t: f64) -> (C64, C64) {
    let (k, g, w) = (d.k(), d.g, d.omega);
    let [x1, x2] = d.chi0;
    let (f1, f2) = (d.f1(), d.f2());
    let big = 1.0 + w / (2.0 * g);
    let small = w / (2.0 * g);
    let ep = C64::from_polar(1.0, w * t);
    let em = ep.conj();
    let rise = C64::from_polar(1.0, (k - 0.5 * w) * t);
    let fall = rise.conj();
    let comp = |s: f64, pre: C64| {
        let a = x1 * big * (1.0 + s * f1 * ep) + I * x2 * small * (1.0 - s * f2 * ep);
        let b = x1 * small * (1.0 + s * f2 * em) - I * x2 * big * (1.0 - s * f1 * em);
        pre * 0.5 * (rise * a + s * fall * b)
    };
    (comp(1.0, C64::new(1.0, 0.0)), comp(-1.0, -I))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrace {
    pub t: Vec<f64>,
    pub chi1: Vec<C64>,
    pub chi2: Vec<C64>,
    pub norm: Vec<f64>,
    /// Unwrapped phase of the component that is larger at `t = 0` (χ₁ on ties).
    pub phase: Vec<f64>,
    pub stats: Option<OdeStats>,
}

impl AmplitudeTrace {
    fn from_samples(t: Vec<f64>, chi1: Vec<C64>, chi2: Vec<C64>, stats: Option<OdeStats>) -> Self {
        let norm = chi1.iter().zip(&chi2).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
        let lead = if chi2[0].norm() > chi1[0].norm() { &chi2 } else { &chi1 };
        let phase = unwrap(lead.iter().map(|z| z.arg()));
        Self {
            t,
            chi1,
            chi2,
            norm,
            phase,
            stats,
        }
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm.iter().fold(0.0, |m, n| m.max((n - 1.0).abs()))
    }

    /// Largest componentwise deviation from the closed form.
    pub fn max_deviation(&self, d: &DoubletDynamics) -> f64 {
        self.t
            .iter()
            .zip(self.chi1.iter().zip(&self.chi2))
            .map(|(&t, (a, b))| {
                let (e1, e2) = closed_form_amplitudes(d, t);
                (a - e1).norm().max((b - e2).norm())
            })
            .fold(0.0, f64::max)
    }
}

fn unwrap(args: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for a in args {
        match out.last() {
            None => out.push(a),
            Some(&prev) => {
                let mut d = a - prev.rem_euclid(2.0 * PI);
                d = (d + PI).rem_euclid(2.0 * PI) - PI;
                out.push(prev + d);
            }
        }
    }
    out
}

fn uniform_grid(t_end: f64, samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|k| t_end * k as f64 / (samples - 1) as f64)
        .collect()
}

/// Closed-form trace on `samples` uniform times in `[0, t_end]`.
pub fn closed_form_trace(d: &DoubletDynamics, t_end: f64, samples: usize) -> Result<AmplitudeTrace> {
    if samples < 2 || !(t_end > 0.0) {
        return Err(Error::Input("need t_end > 0 and at least two samples".into()));
    }
    let t = uniform_grid(t_end, samples);
    let (chi1, chi2) = t.iter().map(|&t| closed_form_amplitudes(d, t)).unzip();
    Ok(AmplitudeTrace::from_samples(t, chi1, chi2, None))
}

/// Integrates `i χ' = H(t) χ` numerically, reporting `samples` uniform times in `[0, t_end]`.
pub fn integrate_tdse(d: &DoubletDynamics, t_end: f64, tol: f64, samples: usize) -> Result<AmplitudeTrace> {
    if tol < 1e-13 {
        return Err(Error::Input(format!("tolerance {tol:e} below 1e-13")));
    }
    if samples < 2 || !(t_end > 0.0) {
        return Err(Error::Input("need t_end > 0 and at least two samples".into()));
    }
    let t = uniform_grid(t_end, samples);
    let y0 = [d.chi0[0].re, d.chi0[0].im, d.chi0[1].re, d.chi0[1].im];
    let rhs = |t: f64, y: &[f64; 4]| {
        let h = d.hamiltonian(t);
        let x = [C64::new(y[0], y[1]), C64::new(y[2], y[3])];
        let r0 = -I * (h[0][0] * x[0] + h[0][1] * x[1]);
        let r1 = -I * (h[1][0] * x[0] + h[1][1] * x[1]);
        [r0.re, r0.im, r1.re, r1.im]
    };
    let (ys, stats) = dopri5(rhs, y0, &t, tol)?;
    let chi1 = ys.iter().map(|y| C64::new(y[0], y[1])).collect();
    let chi2 = ys.iter().map(|y| C64::new(y[2], y[3])).collect();
    Ok(AmplitudeTrace::from_samples(t, chi1, chi2, Some(stats)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologicalPhase {
    pub branch: Branch,
    /// `|surviving| / |suppressed|` branch coefficient.
    pub branch_ratio: f64,
    /// Phase of the leading exact amplitude over one period, dynamical factor removed.
    pub phase: f64,
    /// Same, for the surviving branch of each component separately.
    pub component_phases: [f64; 2],
}

/// Sample count used to unwrap phases over one period.
pub fn phase_samples(d: &DoubletDynamics) -> usize {
    4096usize.max((64.0 * d.g / d.omega).ceil() as usize)
}

/// Topological phase of the state selected by the initial amplitudes over one drive period.
/// The dynamical factor `e^{±iKt}` of the surviving branch is divided out before unwrapping.
pub fn geometric_phase_extract(d: &DoubletDynamics) -> Result<TopologicalPhase> {
    if d.omega == 0.0 || d.g / d.omega < ADIABATIC_RATIO {
        return Err(Error::Regime(format!(
            "G/omega = {} is below {ADIABATIC_RATIO}",
            d.g / d.omega
        )));
    }
    let (p, m) = d.branch_coefficients();
    let (branch, ratio) = if p.norm() >= BRANCH_RATIO * m.norm() {
        (Branch::Rising, p.norm() / m.norm())
    } else if m.norm() >= BRANCH_RATIO * p.norm() {
        (Branch::Falling, m.norm() / p.norm())
    } else {
        return Err(Error::Regime(format!(
            "branch coefficients {:.3e} and {:.3e} are comparable",
            p.norm(),
            m.norm()
        )));
    };
    let n = phase_samples(d);
    let t = uniform_grid(d.period(), n + 1);
    let k = d.k() * branch.sign();
    let strip = |tt: f64, z: C64| z * C64::from_polar(1.0, -k * tt);
    let net = |z: &dyn Fn(f64) -> C64| {
        let u = unwrap(t.iter().map(|&tt| strip(tt, z(tt)).arg()));
        u[u.len() - 1] - u[0]
    };
    let lead = if d.chi0[1].norm() > d.chi0[0].norm() { 1 } else { 0 };
    let phase = net(&|tt| {
        let (a, b) = closed_form_amplitudes(d, tt);
        if lead == 0 {
            a
        } else {
            b
        }
    });
    let component_phases = [
        net(&|tt| branch_term(d, branch, 0, tt)),
        net(&|tt| branch_term(d, branch, 1, tt)),
    ];
    Ok(TopologicalPhase {
        branch,
        branch_ratio: ratio,
        phase,
        component_phases,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonopoleState {
    Lower,
    Upper,
}

impl MonopoleState {
    pub fn name(self) -> &'static str {
        match self {
            MonopoleState::Lower => "lower",
            MonopoleState::Upper => "upper",
        }
    }
}

/// Spherical cap `θ ≤ θ_cap` on the sphere of radius `r` around the monopole degeneracy of
/// `H = (X σx + Y σy + Z σz)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monopole3D {
    pub r: f64,
    pub theta_cap: f64,
}

impl Monopole3D {
    pub fn new(r: f64, theta_cap: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Input(format!("radius must be positive, got {r}")));
        }
        if !(0.0..=PI).contains(&theta_cap) {
            return Err(Error::Input(format!("cap angle {theta_cap} outside [0, pi]")));
        }
        Ok(Self { r, theta_cap })
    }

    pub fn cap(theta_cap: f64) -> Result<Self> {
        Self::new(1.0, theta_cap)
    }
}

pub fn monopole_hamiltonian(p: [f64; 3]) -> [[C64; 2]; 2] {
    [
        [C64::new(0.5 * p[2], 0.0), C64::new(0.5 * p[0], -0.5 * p[1])],
        [C64::new(0.5 * p[0], 0.5 * p[1]), C64::new(-0.5 * p[2], 0.0)],
    ]
}

/// Eigenvector at spherical angles `(θ, φ)`, in the single-valued-modulus gauge with
/// `e^{∓iφ/2}` on the two components.
pub fn monopole_state(state: MonopoleState, theta: f64, phi: f64) -> [C64; 2] {
    let (s, c) = (0.5 * theta).sin_cos();
    let lo = C64::from_polar(1.0, -0.5 * phi);
    let hi = C64::from_polar(1.0, 0.5 * phi);
    match state {
        MonopoleState::Lower => [-s * lo, c * hi],
        MonopoleState::Upper => [c * lo, s * hi],
    }
}

/// Closed-form Berry phase for the circle at constant `θ_cap`.
pub fn berry3d_phase(cap: &Monopole3D, state: MonopoleState) -> f64 {
    let g = -(1.0 - cap.theta_cap.cos()) * PI;
    match state {
        MonopoleState::Lower => g,
        MonopoleState::Upper => -g,
    }
}

fn cap_quadrature(cap: &Monopole3D, state: MonopoleState, n_theta: usize, n_phi: usize) -> f64 {
    let (x, w) = gauss_legendre(n_theta);
    let lo = cap.theta_cap.cos();
    let half = 0.5 * (1.0 - lo);
    let mut total = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let ct = lo + half * (xi + 1.0);
        let theta = ct.clamp(-1.0, 1.0).acos();
        let mut ring = 0.0;
        for j in 0..n_phi {
            let phi = 2.0 * PI * j as f64 / n_phi as f64;
            let psi = monopole_state(state, theta, phi);
            // (ψ|σ|ψ)/2 · R̂
            let sx = 2.0 * (psi[0].conj() * psi[1]).re;
            let sy = 2.0 * (psi[0].conj() * psi[1]).im;
            let sz = psi[0].norm_sqr() - psi[1].norm_sqr();
            let (st, ctt) = theta.sin_cos();
            let (sp, cp) = phi.sin_cos();
            ring += 0.5 * (sx * st * cp + sy * st * sp + sz * ctt);
        }
        total += wi * half * ring * 2.0 * PI / n_phi as f64;
    }
    total
}

/// Berry phase by surface quadrature of `(ψ|∇H|ψ)/R²` over the cap.
pub fn berry3d_surface_integral(cap: &Monopole3D, state: MonopoleState) -> Result<f64> {
    let coarse = cap_quadrature(cap, state, 16, 16);
    let fine = cap_quadrature(cap, state, 32, 16);
    let estimate = (fine - coarse).abs();
    if estimate > 1e-10 {
        return Err(Error::Tolerance {
            tolerance: 1e-10,
            estimate,
        });
    }
    Ok(fine)
}
