use std::f64::consts::PI;

use conical_phase::dynamics::{
    adiabatic_populations, closed_form_amplitudes, geometric_phase_extract, integrate_tdse, DoubletDynamics,
};
use conical_phase::effh::{build_effh, EffHSpec};
use conical_phase::fields::FieldKind;
use conical_phase::flux::{table_report, TableConfig};
use conical_phase::model::{BerryModel, Representation};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type CMat = DMatrix<Complex64>;

#[test]
fn ode_tracks_closed_form_across_adiabaticity() {
    for ratio in [1.0, 10.0, 100.0, 1e3, 1e4] {
        let d = DoubletDynamics::excited(ratio, 1.0).unwrap();
        let tol = 1e-10;
        // about a thousand fast oscillations at most
        let t_end = (2.0 * PI).min(4000.0 * PI / ratio);
        let tr = integrate_tdse(&d, t_end, tol, 33).unwrap();
        let dev = tr.max_deviation(&d);
        assert!(dev <= 10.0 * tol, "G/ω = {ratio}: {dev:e}");
        assert!(tr.max_norm_drift() <= 1e-9);
    }
}

#[test]
fn trace_reports_leading_phase_and_norm() {
    let d = DoubletDynamics::ground(20.0, 1.0).unwrap();
    let tr = integrate_tdse(&d, 1.0, 1e-11, 11).unwrap();
    assert_eq!(tr.t.len(), 11);
    assert_eq!(tr.phase[0], 0.0);
    for k in 1..tr.t.len() {
        assert!((tr.phase[k] - tr.phase[k - 1]).abs() < PI);
        let (a, _) = closed_form_amplitudes(&d, tr.t[k]);
        let wrapped = (tr.phase[k] - a.arg()).rem_euclid(2.0 * PI);
        assert!(wrapped.min(2.0 * PI - wrapped) < 1e-8);
    }
    assert!(integrate_tdse(&d, 1.0, 1e-14, 11).is_err());
}

#[test]
fn phase_signs_are_antisymmetric() {
    for ratio in [10.0, 100.0, 1e3, 1e4] {
        let g = geometric_phase_extract(&DoubletDynamics::ground(ratio, 1.0).unwrap()).unwrap();
        let e = geometric_phase_extract(&DoubletDynamics::excited(ratio, 1.0).unwrap()).unwrap();
        assert!((g.phase + e.phase).abs() <= 2.0 * PI / ratio);
        assert!(g.phase < 0.0 && e.phase > 0.0);
        assert!(g.branch_ratio >= 10.0 && e.branch_ratio >= 10.0);
    }
}

#[test]
fn adiabatic_populations_sum_to_one() {
    let d = DoubletDynamics::ground(7.0, 2.0).unwrap();
    for k in 0..20 {
        let t = 0.37 * k as f64;
        let chi = closed_form_amplitudes(&d, t);
        let (lo, up) = adiabatic_populations(&d, t, chi);
        assert!((lo + up - 1.0).abs() < 1e-12);
    }
}

fn random_unitary(rng: &mut ChaCha8Rng) -> CMat {
    let (a, b, c, d) = (
        rng.gen_range(0.0..PI),
        rng.gen_range(0.0..2.0 * PI),
        rng.gen_range(0.0..2.0 * PI),
        rng.gen_range(0.0..2.0 * PI),
    );
    let ph = Complex64::from_polar(1.0, d);
    let u = Complex64::from_polar(a.cos(), b);
    let v = Complex64::from_polar(a.sin(), c);
    CMat::from_row_slice(2, 2, &[u, v, -v.conj() * ph, u.conj() * ph])
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let m = CMat::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn random_spec(rng: &mut ChaCha8Rng, c1: f64, c2: f64) -> EffHSpec {
    EffHSpec {
        field: (0..3).map(|_| random_hermitian(rng, 2)).collect(),
        op1: Some((0..3).map(|_| random_hermitian(rng, 2)).collect()),
        op2: Some((0..3).map(|_| (0..3).map(|_| random_hermitian(rng, 2)).collect()).collect()),
        c1,
        c2,
        spin_dim: 1,
    }
}

#[test]
fn effh_is_linear_in_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let base = random_spec(&mut rng, 1.0, 0.0);
        let mut quad = base.clone();
        quad.c1 = 0.0;
        quad.c2 = 1.0;
        let mut both = base.clone();
        both.c1 = 0.3;
        both.c2 = -1.7;
        let h1 = build_effh(&base).unwrap().matrix;
        let h2 = build_effh(&quad).unwrap().matrix;
        let h = build_effh(&both).unwrap().matrix;
        let combo = h1 * Complex64::new(0.3, 0.0) + h2 * Complex64::new(-1.7, 0.0);
        assert!((h - combo).norm() < 1e-12);
    }
}

#[test]
fn effh_is_basis_covariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let spec = random_spec(&mut rng, 0.8, 0.6);
        let u = random_unitary(&mut rng);
        let ud = u.adjoint();
        let rot = |m: &CMat| &ud * m * &u;
        let rotated = EffHSpec {
            field: spec.field.iter().map(rot).collect(),
            op1: spec.op1.as_ref().map(|v| v.iter().map(rot).collect()),
            op2: spec
                .op2
                .as_ref()
                .map(|v| v.iter().map(|row| row.iter().map(rot).collect()).collect()),
            ..spec.clone()
        };
        let h = build_effh(&spec).unwrap().matrix;
        let hr = build_effh(&rotated).unwrap().matrix;
        assert!((rot(&h) - hr).norm() < 1e-12);
    }
}

#[test]
fn table_fluxes_discriminate_field_types() {
    let m = BerryModel::circular(1.0).unwrap();
    let table = table_report(&m, Representation::Adiabatic, &TableConfig::default()).unwrap();
    let field_of = |kind| {
        let z = CMat::from_fn(2, 2, |i, j| Complex64::new(table.entry(kind, (i, j)).unwrap().limit, 0.0));
        let zero = CMat::zeros(2, 2);
        vec![zero.clone(), zero, z]
    };
    let spec = |field| EffHSpec {
        field,
        op1: Some(vec![CMat::identity(2, 2); 3]),
        op2: None,
        c1: 1.0,
        c2: 0.0,
        spin_dim: 1,
    };
    let ym = build_effh(&spec(field_of(FieldKind::YangMills))).unwrap().matrix;
    let mag = build_effh(&spec(field_of(FieldKind::Magnetic))).unwrap().matrix;
    assert!(ym[(0, 0)].norm() > 3.0 && ym[(0, 1)].norm() < 1e-3);
    assert!(mag[(0, 0)].norm() < 1e-3 && mag[(0, 1)].norm() > 3.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_is_unitary(g in 0.01f64..100.0, w in 0.0f64..10.0, t in 0.0f64..50.0, a in 0.0f64..(2.0 * PI)) {
        let d = DoubletDynamics::new(g, w, [Complex64::new(a.cos(), 0.0), Complex64::new(0.0, a.sin())]).unwrap();
        let (x, y) = closed_form_amplitudes(&d, t);
        prop_assert!((x.norm_sqr() + y.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn auxiliary_functions_stay_inside_unit_interval(g in 1e-3f64..1e4, w in 1e-3f64..1e3) {
        let d = DoubletDynamics::ground(g, w).unwrap();
        prop_assert!(d.f1().abs() < 1.0);
        prop_assert!(d.f2().abs() < 1.0);
    }
}
