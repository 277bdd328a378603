use std::f64::consts::PI;

use conical_phase::ci::{locate_complex_cis, locate_complex_cis_within, predicted_loop_phase, PhaseSign};
use conical_phase::fields::FieldKind;
use conical_phase::flux::{b_limit, line_integral, surface_flux};
use conical_phase::model::{BerryModel, ComplexCoupling, Representation};
use conical_phase::tracing::{overlap_phase, trace_phase, BasisState, LoopSpec};
use conical_phase::Error;
use proptest::prelude::*;

#[test]
fn traced_and_predicted_phases_agree_off_centre() {
    let m = ComplexCoupling::quartic(1.0, 0.3, 0.003).unwrap();
    let cis = locate_complex_cis(&m).unwrap();
    for (cx, cy, r) in [(3.95, 0.0, 1.0), (-2.0, 3.0, 2.5), (6.0, 6.0, 4.0), (0.5, -0.5, 12.0)] {
        let spec = LoopSpec::planar(cx, cy, r).unwrap();
        let predicted = predicted_loop_phase(&cis, &spec).unwrap();
        let traced = trace_phase(&m, &spec).unwrap();
        assert_eq!(traced.winding, predicted, "loop at ({cx}, {cy}) r = {r}");
        let back = trace_phase(&m, &spec.reversed()).unwrap();
        assert_eq!(back.winding, -predicted);
    }
}

#[test]
fn exact_roots_survive_a_short_scan() {
    let m = ComplexCoupling::quartic(1.0, 0.3, 0.003).unwrap();
    let short = locate_complex_cis_within(&m, 5.0).unwrap();
    let full = locate_complex_cis(&m).unwrap();
    assert_eq!(short.len(), full.len());
    let inner: Vec<_> = short.iter().filter(|c| c.q < 5.0).collect();
    assert_eq!(inner.len(), 4);
    assert_eq!(inner.iter().filter(|c| c.sign == PhaseSign::Plus).count(), 3);
}

#[test]
fn overlap_phase_matches_circulation() {
    for b in [1.0, 0.2] {
        let m = BerryModel::circular(b).unwrap();
        let spec = LoopSpec::about_seam(1.0, 1.0).unwrap();
        let phase = overlap_phase(&m, &spec, BasisState::One).unwrap();
        let circ = line_integral(&m, Representation::Adiabatic, (0, 0), 1.0, 1.0).unwrap();
        assert!((phase - circ.re).abs() < 1e-5, "b = {b}: {phase} vs {}", circ.re);
    }
}

#[test]
fn flux_limits_match_closed_forms() {
    let bs: Vec<f64> = (0..5).map(|k| 0.1 * 0.25f64.powi(k)).collect();
    let flux = |el, kind| -> Vec<f64> {
        bs.iter()
            .map(|&b| {
                let m = BerryModel::circular(b).unwrap();
                surface_flux(&m, Representation::Adiabatic, el, kind, 2.0, 0.5).unwrap()
            })
            .collect()
    };
    let h11 = b_limit(&flux((0, 0), FieldKind::Magnetic), &bs).unwrap();
    let h12 = b_limit(&flux((0, 1), FieldKind::Magnetic), &bs).unwrap();
    assert!(h11.value.abs() < 1e-3 && h11.order == 1);
    assert!((h12.value + PI).abs() < 1e-3 && h12.order == 2);
    let f11 = b_limit(&flux((0, 0), FieldKind::YangMills), &bs).unwrap();
    assert!((f11.value - PI).abs() < 1e-9);
}

#[test]
fn flux_rejects_bad_input() {
    let m = BerryModel::circular(1.0).unwrap();
    assert!(matches!(
        surface_flux(&m, Representation::Adiabatic, (2, 0), FieldKind::Magnetic, 1.0, 1.0),
        Err(Error::Input(_))
    ));
    assert!(line_integral(&m, Representation::Adiabatic, (0, 0), 0.0, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stokes_holds_for_random_discs(b in 0.05f64..2.0, q in 0.2f64..3.0, z in 0.1f64..2.0) {
        let m = BerryModel::circular(b).unwrap();
        for el in [(0, 0), (0, 1)] {
            let s = surface_flux(&m, Representation::Adiabatic, el, FieldKind::Magnetic, q, z).unwrap();
            let l = line_integral(&m, Representation::Adiabatic, el, q, z).unwrap();
            prop_assert!((s - l.re).abs() < 1e-6);
        }
    }
}
