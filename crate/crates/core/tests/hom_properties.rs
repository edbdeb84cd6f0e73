use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spdc_core::biphoton::{assemble_jsa, assemble_jsa_from, f_minus, Route};
use spdc_core::config::Scenario;
use spdc_core::device::{arcmin_to_rad, DeviceParams, PhaseSpacePoint, DEFAULT_GROUP_VELOCITY};
use spdc_core::grid::Axis;
use spdc_core::hom::{
    coincidence_from_wigner, hom_coincidence, pump_engineered_coincidence, tomography_jsa_axes, tomography_scan,
    HomCalibration, HomSetting, SwapProfile,
};
use spdc_core::pump::{BeamSpec, CavityPhase, PumpPulse};
use spdc_core::wigner::{snapped_omega_axis, wigner_transform};
use spdc_core::Complex64;

fn scenario(spots: &[(f64, f64)]) -> Scenario {
    let device = DeviceParams::new(2e-3, DEFAULT_GROUP_VELOCITY, 775e-9, arcmin_to_rad(9.37)).unwrap();
    let pulse = PumpPulse::new(775e-9, 3.2e-12).unwrap();
    let beams = spots
        .iter()
        .map(|(z_mm, tilt)| BeamSpec::new(z_mm * 1e-3, arcmin_to_rad(*tilt), 200e-6, Complex64::new(1.0, 0.0)).unwrap())
        .collect();
    Scenario::new(device, pulse, beams, None).unwrap()
}

fn gaussian() -> Scenario {
    scenario(&[(0.0, 0.0)])
}

fn cat() -> Scenario {
    scenario(&[(0.3, 0.0), (-0.3, 0.0)])
}

fn width(s: &Scenario) -> f64 {
    s.beams[0].spectral_width(&s.device)
}

#[test]
fn cavity_phase_leaves_coincidences_unchanged() {
    let plain = cat();
    let mut dressed = plain.clone();
    let w0 = dressed.pulse.center_omega();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let omega: Vec<f64> = (0..41).map(|k| w0 + (k as f64 - 20.0) * 1e11).collect();
    let phase: Vec<f64> = omega.iter().map(|_| rng.gen_range(-3.0..3.0)).collect();
    dressed.pulse.cavity_phase = Some(CavityPhase::new(omega, phase).unwrap());

    let a = assemble_jsa(&plain, Route::Finite).unwrap();
    let b = assemble_jsa(&dressed, Route::Finite).unwrap();
    let d = width(&plain);
    // whole-sample shifts: the row shift is then exact whatever the phase roughness
    let h = a.axes.step();
    for (delay, shift) in [(0.0, 0.0), (1.0 / d, 0.0), (0.0, 3.0 * h), (-2.0 / d, -5.0 * h), (6.5e-12, 0.0)] {
        let setting = HomSetting::interferometer(delay, shift).unwrap();
        let pa = hom_coincidence(&a, &setting).unwrap();
        let pb = hom_coincidence(&b, &setting).unwrap();
        assert!((pa - pb).abs() < 1e-10, "({delay}, {shift}): {pa} {pb}");
    }
}

#[test]
fn interferometer_and_pump_routes_agree() {
    for s in [gaussian(), cat()] {
        let d = width(&s);
        let shifts = Axis::symmetric(2.0 * d, 5).unwrap();
        let axes = tomography_jsa_axes(&s, &shifts).unwrap();
        let jsa = assemble_jsa_from(&s.beams, &s.device, &s.pulse, &axes, Route::Finite).unwrap();
        for shift in shifts.values() {
            let profile = SwapProfile::new(&jsa, shift).unwrap();
            for delay in [-4.0 / d, -1.0 / d, 0.0, 0.5 / d, 3.0 / d] {
                let a = profile.coincidence(delay);
                let b = pump_engineered_coincidence(&s, &axes, Route::Finite, delay, shift).unwrap();
                assert!((a - b).abs() < 1e-6, "({delay}, {shift}): {a} {b}");
            }
        }
    }
}

#[test]
fn gaussian_tomography_matches_direct_transform() {
    let s = gaussian();
    let d = width(&s);
    let f_axis = Axis::symmetric(s.grids.omega_minus_halfspan, s.grids.omega_minus_points).unwrap();
    let tau = Axis::symmetric(3.0 / d, 21).unwrap();
    let omega = snapped_omega_axis(&f_axis, 0.0, 3.0 * d, 21).unwrap();
    let r = tomography_scan(&s, &tau, &omega, Route::Finite).unwrap();
    assert_eq!(r.invalid_count, 0);
    assert!(r.max_abs_error <= 1e-6 * r.peak, "{} vs peak {}", r.max_abs_error, r.peak);
    assert!((r.affine_gain - 1.0).abs() < 1e-6);
}

#[test]
fn tomography_error_shrinks_under_refinement() {
    let base = cat();
    let d = width(&base);
    let mut errors = Vec::new();
    for points in [20, 28, 40, 56] {
        let mut s = base.clone();
        s.grids.omega_minus_halfspan = 4.0 * d;
        s.grids.omega_minus_points = points;
        let f_axis = Axis::symmetric(s.grids.omega_minus_halfspan, points).unwrap();
        let tau = Axis::symmetric(2.0 / d, 9).unwrap();
        let omega = snapped_omega_axis(&f_axis, 0.0, d, 9).unwrap();
        let r = tomography_scan(&s, &tau, &omega, Route::Infinite).unwrap();
        errors.push(r.max_abs_error / r.peak);
    }
    for pair in errors.windows(2) {
        assert!(pair[1] <= pair[0] / 4.0 || pair[1] < 1e-9, "{errors:?}");
    }
}

#[test]
fn wigner_prediction_matches_measured_coincidence() {
    let s = cat();
    let d = width(&s);
    let f_axis = Axis::symmetric(s.grids.omega_minus_halfspan, s.grids.omega_minus_points).unwrap();
    let f = f_minus(&s.beams, &s.device, &f_axis, Route::Finite).unwrap();
    let tau = Axis::symmetric(4.0 / d, 17).unwrap();
    let omega = snapped_omega_axis(&f_axis, 0.0, 2.0 * d, 17).unwrap();
    let w = wigner_transform(&f, &tau, &omega).unwrap();

    let shifts = Axis::symmetric(2.0 * d, 5).unwrap();
    let axes = tomography_jsa_axes(&s, &shifts).unwrap();
    let calibration = HomCalibration::measure(&s, &axes, Route::Finite).unwrap();
    assert!((calibration.gain - 1.0).abs() < 1e-8);
    assert!(calibration.tau_offset.abs() < 1e-8 / d && calibration.omega_offset.abs() < 1e-8 * d);

    let jsa = assemble_jsa_from(&s.beams, &s.device, &s.pulse, &axes, Route::Finite).unwrap();
    for (it, iw) in [(8, 8), (5, 8), (8, 6), (11, 10), (2, 13)] {
        let (delay, shift) = (2.0 * tau.value(it), omega.value(iw));
        let measured = SwapProfile::new(&jsa, shift).unwrap().coincidence(delay);
        let point = PhaseSpacePoint::new(tau.value(it), shift).unwrap();
        let (predicted, clamped) = coincidence_from_wigner(&w, point, 1.0).unwrap();
        assert!(!clamped);
        assert!((measured - predicted).abs() < 1e-8, "({it}, {iw}): {measured} {predicted}");
    }
}
