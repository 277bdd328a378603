//! Golden-value verification suite: every headline result recomputed and checked.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use crate::ci::{
    locate_cartesian_cis, locate_complex_cis, predicted_loop_phase, CiKind, CiPoint, PhaseSign, Region,
};
use crate::dynamics::{
    berry3d_phase, berry3d_surface_integral, geometric_phase_extract, integrate_tdse, DoubletDynamics,
    Monopole3D, MonopoleState,
};
use crate::error::Result;
use crate::fields::{nact, nact_numeric, reference, yang_mills_field, Basis, FieldKind, Vec3C};
use crate::flux::{line_integral, surface_flux, table_report, TableConfig};
use crate::model::{ActiveAxis, BerryModel, CartesianCoupling, ComplexCoupling, Representation};
use crate::tracing::{trace_phase, LoopSpec};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

/// Collects failures and notes for one criterion.
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn near(&mut self, label: &str, value: f64, target: f64, tol: f64) {
        self.check(
            (value - target).abs() <= tol,
            format!("{label} = {value:.9} (expected {target:.9} ± {tol:e})"),
        );
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn result(&mut self, r: Result<()>) {
        if let Err(e) = r {
            self.failures.push(e.to_string());
        }
    }

    fn finish(self, id: u32, name: &'static str, start: Instant) -> Criterion {
        let pass = self.failures.is_empty();
        let detail = if pass {
            self.notes.join("; ")
        } else {
            self.failures.join("; ")
        };
        Criterion {
            id,
            name,
            pass,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

pub fn quartic_model() -> ComplexCoupling {
    ComplexCoupling::quartic(1.0, 0.3, 0.003).expect("valid quartic parameters")
}

fn ring(cis: &[CiPoint], q: f64) -> Vec<&CiPoint> {
    cis.iter().filter(|c| (c.q - q).abs() <= 0.01).collect()
}

fn same_angles(ring: &[&CiPoint], offset: f64) -> bool {
    ring.len() == 3
        && (0..3).all(|k| {
            let target = offset + 2.0 * PI * k as f64 / 3.0;
            ring.iter().any(|c| {
                let d = (c.phi - target).rem_euclid(2.0 * PI);
                d.min(2.0 * PI - d) < 1e-6
            })
        })
}

fn quartic_roots() -> Criterion {
    let start = Instant::now();
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        let m = quartic_model();
        let cis = locate_complex_cis(&m)?;
        let (mu, lambda) = m.quartic_parameters().expect("quartic");
        c.near("threshold", (mu / (3.0 * lambda)).sqrt(), 5.77, 0.01);
        for (q, kind, sign, offset) in [
            (3.95, CiKind::TrigonalA, PhaseSign::Plus, 0.0),
            (7.42, CiKind::TrigonalA, PhaseSign::Minus, 0.0),
            (11.37, CiKind::TrigonalB, PhaseSign::Minus, PI / 3.0),
        ] {
            let r = ring(&cis, q);
            c.check(same_angles(&r, offset), format!("ring q = {q}: azimuths {:?}", r.iter().map(|c| c.phi).collect::<Vec<_>>()));
            c.check(
                r.iter().all(|p| p.kind == kind && p.sign == sign),
                format!("ring q = {q}: kinds or signs differ"),
            );
            if let Some(p) = r.first() {
                c.note(format!("q = {:.6} ({})", p.q, p.sign.name()));
            }
        }
        c.check(cis.len() == 10, format!("{} intersections, expected 10", cis.len()));
        c.check(
            cis.first().map(|p| p.kind == CiKind::Origin && p.sign == PhaseSign::Minus) == Some(true),
            "origin intersection missing or not minus",
        );
        Ok(())
    })();
    c.result(r);
    c.finish(1, "quartic roots and threshold", start)
}

fn loop_phases() -> Criterion {
    let start = Instant::now();
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        let m = quartic_model();
        let cis = locate_complex_cis(&m)?;
        for (r, n) in [(2.0, -1), (5.0, 2), (9.0, -1), (20.0, -4)] {
            let spec = LoopSpec::planar(0.0, 0.0, r)?;
            let predicted = predicted_loop_phase(&cis, &spec)?;
            c.check(predicted == n, format!("r = {r}: predicted {predicted}π, expected {n}π"));
            let traced = trace_phase(&m, &spec)?.total_phase;
            c.near(&format!("r = {r} traced/π"), traced / PI, n as f64, 1e-3);
            c.note(format!("r={r}: {n}π"));
        }
        Ok(())
    })();
    c.result(r);
    c.finish(2, "quartic loop phases", start)
}

fn cartesian_examples() -> Criterion {
    let start = Instant::now();
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        let region = Region::square(2.0)?;
        let spec = LoopSpec::planar(0.0, 0.0, 2.0)?;

        let one = CartesianCoupling::example_one();
        let cis = locate_cartesian_cis(&one, &region, 32)?;
        let sign_at = |x: f64| cis.iter().find(|p| (p.x - x).abs() < 1e-9).map(|p| p.sign);
        c.check(sign_at(1.0) == Some(PhaseSign::Plus), "example 1: sign at X = +1");
        c.check(sign_at(-1.0) == Some(PhaseSign::Minus), "example 1: sign at X = -1");
        for p in &cis {
            let j = one.jacobian(p.x, p.y);
            c.check((j - 2.0 * p.x).abs() < 1e-12, format!("example 1: Jacobian {j} at X = {}", p.x));
        }
        let predicted = predicted_loop_phase(&cis, &spec)?;
        let traced = trace_phase(&one, &spec)?;
        c.check(predicted == 0 && traced.winding == 0, "example 1: total phase not 0");

        let two = CartesianCoupling::example_two();
        let cis = locate_cartesian_cis(&two, &region, 17)?;
        for p in &cis {
            let j = two.jacobian(p.x, p.y);
            c.check((j - 2.0 * p.x * p.x).abs() < 1e-12, format!("example 2: Jacobian {j} at X = {}", p.x));
        }
        let predicted = predicted_loop_phase(&cis, &spec)?;
        let traced = trace_phase(&two, &spec)?;
        c.check(predicted == 2 && traced.winding == 2, "example 2: total phase not 2π");
        c.note("example 1: +, - → 0; example 2: +, + → 2π");
        Ok(())
    })();
    c.result(r);
    c.finish(3, "cartesian example signs", start)
}

fn flux_table(id: u32, name: &'static str, representation: Representation) -> Criterion {
    let start = Instant::now();
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        let m = BerryModel::circular(1.0)?;
        let t = table_report(&m, representation, &TableConfig::default())?;
        for e in &t.entries {
            c.check(
                e.pass,
                format!(
                    "{} {}: limit {:.6} target {:.6} residual {:.2e}",
                    e.kind.name(),
                    e.label,
                    e.limit,
                    e.target,
                    e.residual
                ),
            );
            if e.element.0 == 0 {
                c.note(format!("{} {} → {:.6}", e.kind.name(), e.label, e.limit));
            }
        }
        Ok(())
    })();
    c.result(r);
    c.finish(id, name, start)
}

fn stokes() -> Criterion {
    let start = Instant::now();
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        let mut worst = 0.0_f64;
        for b in [1.0, 0.1, 0.01] {
            let m = BerryModel::circular(b)?;
            for q in [0.5, 1.0, 2.0] {
                for z in [0.5, 1.0] {
                    for el in [(0, 0), (0, 1)] {
                        let s = surface_flux(&m, Representation::Adiabatic, el, FieldKind::Magnetic, q, z)?;
                        let l = line_integral(&m, Representation::Adiabatic, el, q, z)?;
                        let d = (s - l.re).abs() + l.im.abs();
                        worst = worst.max(d);
                        c.check(d <= 1e-6, format!("b={b} q={q} Z={z} {el:?}: |Δ| = {d:.2e}"));
                    }
                }
            }
        }
        c.note(format!("max |flux - circulation| = {worst:.2e}"));
        Ok(())
    })();
    c.result(r);
    c.finish(6, "Stokes consistency", start)
}

fn berry3d() -> Criterion {
    let start = Instant::now();
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        let mut worst = 0.0_f64;
        for k in 0..20 {
            let cap = Monopole3D::cap(PI * k as f64 / 19.0)?;
            let lo = berry3d_surface_integral(&cap, MonopoleState::Lower)?;
            let up = berry3d_surface_integral(&cap, MonopoleState::Upper)?;
            let exact = berry3d_phase(&cap, MonopoleState::Lower);
            worst = worst.max((lo - exact).abs());
            c.near(&format!("lower θ={:.4}", cap.theta_cap), lo, exact, 1e-8);
            c.near(&format!("upper θ={:.4}", cap.theta_cap), up, -lo, 1e-12);
        }
        c.note(format!("20 caps, max deviation {worst:.2e}"));
        Ok(())
    })();
    c.result(r);
    c.finish(7, "monopole cap phases", start)
}

fn dynamics() -> Criterion {
    let start = Instant::now();
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        for (g, w) in [(10.0, 1.0), (100.0, 1.0), (2.0, 1.0)] {
            let d = DoubletDynamics::ground(g, w)?;
            let tr = integrate_tdse(&d, 2.0 * PI / w, 1e-10, 257)?;
            let dev = tr.max_deviation(&d);
            c.check(dev <= 1e-9, format!("G={g}, ω={w}: ODE deviation {dev:.2e}"));
        }
        let g = geometric_phase_extract(&DoubletDynamics::ground(1000.0, 1.0)?)?;
        let e = geometric_phase_extract(&DoubletDynamics::excited(1000.0, 1.0)?)?;
        c.near("ground phase", g.phase, -PI, 0.01);
        c.near("excited phase", e.phase, PI, 0.01);
        for (k, p) in g.component_phases.iter().enumerate() {
            c.near(&format!("ground component {}", k + 1), *p, -PI, 0.01);
        }
        for (k, p) in e.component_phases.iter().enumerate() {
            c.near(&format!("excited component {}", k + 1), *p, PI, 0.01);
        }
        c.note(format!("ground {:.6}, excited {:.6}", g.phase, e.phase));
        Ok(())
    })();
    c.result(r);
    c.finish(8, "doublet dynamics", start)
}

fn elliptic() -> Criterion {
    let start = Instant::now();
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        for gamma in [0.25, 0.5, 2.0, 4.0] {
            let m = BerryModel::elliptic(1e-5, gamma)?;
            let v = line_integral(&m, Representation::Adiabatic, (0, 1), 1.0, 1.0)?;
            c.near(&format!("γ={gamma} circulation"), v.re, -PI, 1e-3);
        }
        // angular profile of the φ̂ coupling, analytic and by finite differences
        let mut worst = 0.0_f64;
        for gamma in [0.25, 0.5, 2.0, 4.0] {
            let m = BerryModel::elliptic(1e-9, gamma)?;
            for k in 0..24 {
                let phi = 2.0 * PI * (k as f64 + 0.25) / 24.0;
                let p = [phi.cos(), phi.sin(), 1.0];
                let limit = reference::tau12_elliptic_limit(gamma, 1.0, phi);
                let a = nact(&m, Representation::Adiabatic, p)?.regular.get(0, 1).to_cylindrical(phi).c[1];
                let n = nact_numeric(&m, Representation::Adiabatic, p, 1e-5)?;
                let fd = Vec3C::new(n.regular.get(0, 1).c, Basis::Cartesian).to_cylindrical(phi).c[1];
                let d = (a - limit).norm().max((fd - limit).norm());
                worst = worst.max(d);
                c.check(d <= 1e-7, format!("γ={gamma} φ={phi:.3}: profile deviation {d:.2e}"));
            }
        }
        c.note(format!("circulation -π for 4 ellipticities; profile deviation {worst:.2e}"));
        Ok(())
    })();
    c.result(r);
    c.finish(9, "elliptic coupling", start)
}

fn properties() -> Criterion {
    let start = Instant::now();
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        let mut anti = 0.0_f64;
        let mut ym = 0.0_f64;
        let grid = [-1.5, -0.4, 0.7, 1.8];
        for b in [1e-3, 0.1, 1.0] {
            for (alpha, beta) in [(1.0, 1.0), (0.5, 1.0), (1.0, 2.5)] {
                let m = BerryModel::new(b, alpha, beta, ActiveAxis::ZCarriesB)?;
                for &x in &grid {
                    for &y in &grid {
                        for &z in &grid {
                            let p = [x, y, z];
                            for rep in [Representation::Adiabatic, Representation::Circulating] {
                                let t = nact(&m, rep, p)?;
                                anti = anti.max(t.regular.anti_hermiticity_defect() / (1.0 + t.regular.max_abs()));
                            }
                            let f = yang_mills_field(&m, Representation::Adiabatic, p)?;
                            ym = ym.max(f.regular.max_abs());
                        }
                    }
                }
            }
        }
        c.check(anti <= 1e-12, format!("anti-hermiticity defect {anti:.2e}"));
        c.check(ym <= 1e-10, format!("Yang-Mills regular part {ym:.2e}"));

        let mut drift = 0.0_f64;
        for ratio in [1.0, 10.0, 100.0, 1000.0] {
            let d = DoubletDynamics::excited(ratio, 1.0)?;
            let tr = integrate_tdse(&d, 2.0 * PI, 1e-10, 65)?;
            drift = drift.max(tr.max_norm_drift());
        }
        c.check(drift <= 1e-9, format!("norm drift {drift:.2e}"));

        let b = 1e-6;
        let alt = BerryModel::new(b, 1.0, 1.0, ActiveAxis::YCarriesB)?;
        let std = BerryModel::new(b, 1.0, 1.0, ActiveAxis::ZCarriesB)?;
        let mut alt_dev = 0.0_f64;
        for &x in &grid {
            for &y in &grid {
                for &z in &grid {
                    let a = nact(&alt, Representation::Adiabatic, [x, y, z])?.regular_physical();
                    let s = nact(&std, Representation::Adiabatic, [x, z, y])?.regular_physical();
                    for i in 0..2 {
                        for j in 0..2 {
                            let u = a.get(i, j).c;
                            let v = s.get(i, j).c;
                            let mapped = [v[0], -v[2], v[1]];
                            for k in 0..3 {
                                alt_dev = alt_dev.max((u[k] - mapped[k]).norm());
                            }
                        }
                    }
                }
            }
        }
        c.check(alt_dev <= 1e-5, format!("alternative formalism deviation {alt_dev:.2e}"));
        c.note(format!(
            "anti-herm {anti:.1e}, YM {ym:.1e}, norm {drift:.1e}, alt {alt_dev:.1e}"
        ));
        Ok(())
    })();
    c.result(r);
    c.finish(10, "property suites", start)
}

/// Runs every acceptance criterion in order.
pub fn run_all() -> Vec<Criterion> {
    vec![
        quartic_roots(),
        loop_phases(),
        cartesian_examples(),
        flux_table(4, "adiabatic flux table", Representation::Adiabatic),
        flux_table(5, "circulating flux table", Representation::Circulating),
        stokes(),
        berry3d(),
        dynamics(),
        elliptic(),
        properties(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_criteria_pass() {
        for c in [quartic_roots(), cartesian_examples(), berry3d()] {
            assert!(c.pass, "{c}");
        }
    }
}
