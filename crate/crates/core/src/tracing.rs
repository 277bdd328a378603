//! Numerical phase accumulation around closed circular loops.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::ci::{CiPoint, PhaseSign};
use crate::error::{Error, Result};
use crate::model::{mixing_angle, to_circulating, BerryModel, PlanarCoupling, Spinor};

pub const DEFAULT_SAMPLES: usize = 2048;
pub const MAX_SAMPLES: usize = 1 << 20;
/// Closure tolerance, as a fraction of π, for snapping a total phase to a winding number.
pub const CLOSURE_TOL: f64 = 1e-3;
/// Circling-angle offset used by [`local_sign`].
pub const LOCAL_SIGN_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
}

impl Orientation {
    pub fn factor(self) -> i32 {
        match self {
            Orientation::CounterClockwise => 1,
            Orientation::Clockwise => -1,
        }
    }
}

/// Circle of radius `radius` about `center`, in the plane normal to the third axis.
/// Planar models ignore `center[2]`; Berry models interpret the circle in the seam frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopSpec {
    pub center: [f64; 3],
    pub radius: f64,
    pub samples: usize,
    pub orientation: Orientation,
}

impl LoopSpec {
    pub fn new(center: [f64; 3], radius: f64, samples: usize, orientation: Orientation) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Input(format!("loop radius must be positive, got {radius}")));
        }
        if samples < 64 {
            return Err(Error::Input(format!("loop needs at least 64 samples, got {samples}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Input("loop center must be finite".into()));
        }
        Ok(Self {
            center,
            radius,
            samples,
            orientation,
        })
    }

    /// Counter-clockwise planar loop with the default sample count.
    pub fn planar(cx: f64, cy: f64, radius: f64) -> Result<Self> {
        Self::new([cx, cy, 0.0], radius, DEFAULT_SAMPLES, Orientation::CounterClockwise)
    }

    /// Counter-clockwise circle of radius `q` about the seam at height `z`.
    pub fn about_seam(q: f64, z: f64) -> Result<Self> {
        Self::new([0.0, 0.0, z], q, DEFAULT_SAMPLES, Orientation::CounterClockwise)
    }

    pub fn with_samples(self, samples: usize) -> Result<Self> {
        Self::new(self.center, self.radius, samples, self.orientation)
    }

    pub fn reversed(self) -> Self {
        let orientation = match self.orientation {
            Orientation::CounterClockwise => Orientation::Clockwise,
            Orientation::Clockwise => Orientation::CounterClockwise,
        };
        Self { orientation, ..self }
    }

    /// Signed circling angle of sample `k` (sample `samples` closes the loop).
    pub fn alpha(&self, k: usize) -> f64 {
        self.orientation.factor() as f64 * 2.0 * PI * k as f64 / self.samples as f64
    }

    pub fn point(&self, alpha: f64) -> [f64; 3] {
        let [cx, cy, cz] = self.center;
        [
            cx + self.radius * alpha.cos(),
            cy + self.radius * alpha.sin(),
            cz,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrace {
    pub alphas: Vec<f64>,
    pub theta_track: Vec<f64>,
    pub total_phase: f64,
    /// `total_phase / π` snapped to an integer.
    pub winding: i32,
}

impl PhaseTrace {
    /// Phase accumulated from the start of the loop to each sample.
    pub fn partial_phase(&self) -> Vec<f64> {
        let t0 = self.theta_track[0];
        self.theta_track.iter().map(|t| t - t0).collect()
    }
}

/// Wraps a mixing-angle increment into `(-π/2, π/2]`.
fn wrap_half_pi(d: f64) -> f64 {
    d - PI * (d / PI).round()
}

/// Tracks the mixing angle continuously around `spec`, doubling the sample count when a
/// step is too large to continue the branch unambiguously.
pub fn trace_phase<M: PlanarCoupling + ?Sized>(model: &M, spec: &LoopSpec) -> Result<PhaseTrace> {
    let mut n = spec.samples;
    loop {
        match trace_phase_fixed(model, &spec.with_samples(n)?) {
            Err(Error::Undersampled(msg)) => {
                if n >= MAX_SAMPLES {
                    return Err(Error::Undersampled(msg));
                }
                log::debug!("trace undersampled at N = {n}; doubling");
                n *= 2;
            }
            other => return other,
        }
    }
}

/// As [`trace_phase`] with no automatic refinement.
pub fn trace_phase_fixed<M: PlanarCoupling + ?Sized>(
    model: &M,
    spec: &LoopSpec,
) -> Result<PhaseTrace> {
    let n = spec.samples;
    let mut alphas = Vec::with_capacity(n + 1);
    let mut track = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let alpha = spec.alpha(k);
        let [x, y, _] = spec.point(alpha);
        let theta = mixing_angle(model, x, y).map_err(|e| match e {
            Error::Degeneracy { point } => {
                Error::Contour(format!("degeneracy on the loop at {point:?}"))
            }
            other => other,
        })?;
        let value = match track.last() {
            None => theta,
            Some(&prev) => {
                let step = wrap_half_pi(theta - prev);
                if step.abs() >= FRAC_PI_4 {
                    return Err(Error::Undersampled(format!(
                        "mixing-angle step {step:.3} at alpha = {alpha:.6} with N = {n}"
                    )));
                }
                prev + step
            }
        };
        alphas.push(alpha);
        track.push(value);
    }
    let total_phase = track[n] - track[0];
    let winding = (total_phase / PI).round();
    if (total_phase - winding * PI).abs() > CLOSURE_TOL * PI {
        return Err(Error::NotClosed { phase: total_phase });
    }
    Ok(PhaseTrace {
        alphas,
        theta_track: track,
        total_phase,
        winding: winding as i32,
    })
}

/// Sign of `dθ/dα` at `α = 0` on a circle of radius `delta` around `ci`.
pub fn local_sign<M: PlanarCoupling + ?Sized>(model: &M, ci: &CiPoint, delta: f64) -> Result<PhaseSign> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Input(format!("radius must be positive, got {delta}")));
    }
    let h = LOCAL_SIGN_STEP;
    let at = |a: f64| mixing_angle(model, ci.x + delta * a.cos(), ci.y + delta * a.sin());
    let d = wrap_half_pi(at(h)? - at(-h)?) / (2.0 * h);
    Ok(if d.abs() < 1e-12 {
        PhaseSign::Degenerate
    } else if d > 0.0 {
        PhaseSign::Plus
    } else {
        PhaseSign::Minus
    })
}

/// State whose Berry phase [`overlap_phase`] accumulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisState {
    /// Upper adiabatic state `|1>`.
    One,
    /// Lower adiabatic state `|2>`.
    Two,
    /// Circulating `|+)`.
    Plus,
    /// Circulating `|-)`.
    Minus,
}

impl BasisState {
    pub fn name(self) -> &'static str {
        match self {
            BasisState::One => "1",
            BasisState::Two => "2",
            BasisState::Plus => "+",
            BasisState::Minus => "-",
        }
    }
}

fn basis_state(model: &BerryModel, p: [f64; 3], phi_ref: f64, which: BasisState) -> Result<Spinor> {
    let s = model.adiabatic_states_near(p, Some(phi_ref))?;
    Ok(match which {
        BasisState::One => s.first,
        BasisState::Two => s.second,
        BasisState::Plus => to_circulating(&s)?.first,
        BasisState::Minus => to_circulating(&s)?.second,
    })
}

/// Discrete line integral `∮ A·dR` (with `A = iτ`) of the chosen diagonal element, from
/// successive overlaps of the gauge-fixed states. The circle lies in the seam frame at
/// height `spec.center[2]` around `spec.center`.
pub fn overlap_phase(model: &BerryModel, spec: &LoopSpec, which: BasisState) -> Result<f64> {
    let n = spec.samples;
    let offset = spec.center[0].hypot(spec.center[1]);
    if (offset - spec.radius).abs() <= 1e-9 * spec.radius {
        return Err(Error::Seam {
            point: spec.center.to_vec(),
        });
    }
    let mut phi_ref = None::<f64>;
    let mut prev: Option<Spinor> = None;
    let mut total = 0.0;
    for k in 0..=n {
        let frame = spec.point(spec.alpha(k));
        let g = model.frame_geometry(frame);
        if g.q == 0.0 {
            return Err(Error::Seam {
                point: frame.to_vec(),
            });
        }
        let reference = phi_ref.unwrap_or(g.phi_mod);
        let p = model.physical_point(frame);
        let psi = basis_state(model, p, reference, which)?;
        phi_ref = Some(crate::model::nearest_branch(g.phi_mod, reference));
        if let Some(prev) = prev {
            let ov = prev.dotc(&psi);
            if ov.norm() < 0.5 {
                return Err(Error::Undersampled(format!(
                    "overlap magnitude {:.3} at sample {k} of {n}",
                    ov.norm()
                )));
            }
            total -= ov.arg();
        }
        prev = Some(psi);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ci::{locate_cartesian_cis, locate_complex_cis, CiKind, Region};
    use crate::model::{CartesianCoupling, ComplexCoupling};
    use approx::assert_abs_diff_eq;

    fn ci_at(x: f64, y: f64) -> CiPoint {
        CiPoint {
            x,
            y,
            q: x.hypot(y),
            phi: 0.0,
            kind: CiKind::CartesianRoot,
            sign: PhaseSign::Degenerate,
            residual: 0.0,
        }
    }

    #[test]
    fn example_one_loops() {
        let m = CartesianCoupling::example_one();
        let t = trace_phase(&m, &LoopSpec::planar(1.0, 0.0, 0.1).unwrap()).unwrap();
        assert_abs_diff_eq!(t.total_phase, PI, epsilon = 1e-9);
        assert_eq!(t.winding, 1);
        let t = trace_phase(&m, &LoopSpec::planar(-1.0, 0.0, 0.1).unwrap()).unwrap();
        assert_abs_diff_eq!(t.total_phase, -PI, epsilon = 1e-9);
        let t = trace_phase(&m, &LoopSpec::planar(0.0, 0.0, 2.0).unwrap()).unwrap();
        assert_abs_diff_eq!(t.total_phase, 0.0, epsilon = 1e-9);
        let t = trace_phase(&m, &LoopSpec::planar(0.0, 3.0, 0.5).unwrap()).unwrap();
        assert_eq!(t.winding, 0);
    }

    #[test]
    fn orientation_reversal_negates() {
        let m = CartesianCoupling::example_two();
        let spec = LoopSpec::planar(0.0, 0.0, 2.0).unwrap();
        let a = trace_phase(&m, &spec).unwrap();
        let b = trace_phase(&m, &spec.reversed()).unwrap();
        assert_eq!(a.winding, 2);
        assert_eq!(a.total_phase, -b.total_phase);
    }

    #[test]
    fn quartic_radii_match_prediction() {
        let m = ComplexCoupling::quartic(1.0, 0.3, 0.003).unwrap();
        let cis = locate_complex_cis(&m).unwrap();
        for r in [2.0, 5.0, 9.0, 20.0] {
            let spec = LoopSpec::planar(0.0, 0.0, r).unwrap();
            let t = trace_phase(&m, &spec).unwrap();
            let predicted = crate::ci::predicted_loop_phase(&cis, &spec).unwrap();
            assert_eq!(t.winding, predicted, "radius {r}");
            let doubled = trace_phase(&m, &spec.with_samples(2 * spec.samples).unwrap()).unwrap();
            assert!((doubled.total_phase - t.total_phase).abs() < 1e-6);
        }
    }

    #[test]
    fn contour_through_degeneracy() {
        let m = CartesianCoupling::example_one();
        let spec = LoopSpec::new([0.0; 3], 1.0, 64, Orientation::CounterClockwise).unwrap();
        assert!(matches!(trace_phase(&m, &spec), Err(Error::Contour(_))));
    }

    #[test]
    fn local_signs() {
        let m = CartesianCoupling::example_one();
        assert_eq!(local_sign(&m, &ci_at(1.0, 0.0), 1e-3).unwrap(), PhaseSign::Plus);
        assert_eq!(local_sign(&m, &ci_at(-1.0, 0.0), 1e-3).unwrap(), PhaseSign::Minus);
        // dθ/dα ≈ 1/4 near α = 0
        let th = |a: f64| mixing_angle(&m, 1.0 + 1e-3 * a.cos(), 1e-3 * a.sin()).unwrap();
        assert_abs_diff_eq!((th(1e-4) - th(-1e-4)) / 2e-4, 0.25, epsilon = 1e-3);

        let m2 = CartesianCoupling::example_two();
        assert_eq!(local_sign(&m2, &ci_at(-1.0, 0.0), 1e-3).unwrap(), PhaseSign::Plus);

        let q = ComplexCoupling::quartic(1.0, 0.3, 0.003).unwrap();
        let origin = locate_complex_cis(&q).unwrap()[0];
        assert_eq!(local_sign(&q, &origin, 1e-3).unwrap(), PhaseSign::Minus);
    }

    #[test]
    fn jacobian_sign_agrees_with_local_sign_on_random_models() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut models = 0;
        let mut compared = 0;
        while models < 50 {
            let mut terms = || -> Vec<(usize, usize, f64)> {
                let mut t = Vec::new();
                for i in 0..=3 {
                    for j in 0..=(3 - i) {
                        if rng.gen_bool(0.6) {
                            t.push((i, j, rng.gen_range(-1.0..1.0)));
                        }
                    }
                }
                t
            };
            let (ta, tb) = (terms(), terms());
            let m = CartesianCoupling::from_terms(&ta, &tb).unwrap();
            let cis = locate_cartesian_cis(&m, &Region::square(2.0).unwrap(), 64).unwrap();
            models += 1;
            for ci in cis {
                if ci.sign == PhaseSign::Degenerate {
                    continue;
                }
                let [ax, ay, bx, by] = m.derivatives(ci.x, ci.y);
                let scale = ax.abs() + ay.abs() + bx.abs() + by.abs();
                // nearly touching intersections need a radius inside their linear region
                if (ax * by - bx * ay).abs() < 1e-3 * scale * scale {
                    continue;
                }
                let s = local_sign(&m, &ci, 1e-7).unwrap();
                assert_eq!(s, ci.sign, "{ta:?} {tb:?} at {ci:?}");
                compared += 1;
            }
        }
        assert!(compared > 10);
    }

    #[test]
    fn overlap_phase_examples() {
        let m = BerryModel::circular(1.0).unwrap();
        let g = overlap_phase(&m, &LoopSpec::about_seam(1.0, 0.0).unwrap(), BasisState::One).unwrap();
        assert_abs_diff_eq!(g, 0.0, epsilon = 1e-9);
        let g = overlap_phase(&m, &LoopSpec::about_seam(1.0, 1.0).unwrap(), BasisState::One).unwrap();
        assert_abs_diff_eq!(g, PI / 2f64.sqrt(), epsilon = 1e-5);
        let g2 = overlap_phase(&m, &LoopSpec::about_seam(1.0, 1.0).unwrap(), BasisState::Two).unwrap();
        assert_abs_diff_eq!(g2, -g, epsilon = 1e-9);

        let m = BerryModel::circular(1e-4).unwrap();
        let g = overlap_phase(&m, &LoopSpec::about_seam(1.0, 1.0).unwrap(), BasisState::Plus).unwrap();
        assert_abs_diff_eq!(g, -PI, epsilon = 1e-3);
    }

    #[test]
    fn overlap_phase_grid() {
        for b in [1.0, 0.1, 0.01] {
            let m = BerryModel::circular(b).unwrap();
            for q in [0.5, 1.0, 2.0] {
                for z in [0.5, 1.0] {
                    let g = overlap_phase(&m, &LoopSpec::about_seam(q, z).unwrap(), BasisState::One)
                        .unwrap();
                    let cos_t = (b * z) / q.hypot(b * z);
                    assert!((g - PI * cos_t).abs() < 5e-4, "b={b} q={q} z={z}: {g}");
                }
            }
        }
    }

    #[test]
    fn overlap_phase_alternative_axis() {
        use crate::model::ActiveAxis;
        let m = BerryModel::new(1.0, 1.0, 1.0, ActiveAxis::YCarriesB).unwrap();
        let g = overlap_phase(&m, &LoopSpec::about_seam(1.0, 1.0).unwrap(), BasisState::One).unwrap();
        assert_abs_diff_eq!(g, PI / 2f64.sqrt(), epsilon = 1e-5);
    }

    #[test]
    fn seam_loop_rejected() {
        let m = BerryModel::circular(1.0).unwrap();
        let spec = LoopSpec::new([1.0, 0.0, 1.0], 1.0, 64, Orientation::CounterClockwise).unwrap();
        assert!(matches!(
            overlap_phase(&m, &spec, BasisState::One),
            Err(Error::Seam { .. })
        ));
    }
}
