use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use spdc_core::biphoton::{f_minus, Route};
use spdc_core::device::{arcmin_to_rad, DeviceParams, DEFAULT_GROUP_VELOCITY};
use spdc_core::grid::Axis;
use spdc_core::pump::BeamSpec;
use spdc_core::wigner::{marginal_over_omega, snapped_omega_axis, wigner_transform, MultibeamWigner};

fn device() -> DeviceParams {
    DeviceParams::new(2e-3, DEFAULT_GROUP_VELOCITY, 775e-9, arcmin_to_rad(9.37)).unwrap()
}

fn beam(z0_mm: f64, tilt_arcmin: f64, weight: Complex64) -> BeamSpec {
    BeamSpec::new(z0_mm * 1e-3, arcmin_to_rad(tilt_arcmin), 200e-6, weight).unwrap()
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[test]
fn parity_of_a_real_even_amplitude() {
    let d = device();
    let fa = Axis::symmetric(8e12, 1025).unwrap();
    let f = f_minus(&[beam(0.0, 0.0, one())], &d, &fa, Route::Finite).unwrap();
    for (a, b) in f.values.iter().zip(f.values.iter().rev()) {
        assert!(a.im.abs() < 1e-9 * f.values[512].norm());
        assert!((a - b).norm() < 1e-9 * f.values[512].norm());
    }
    let tau = Axis::symmetric(6e-12, 61).unwrap();
    let omega = snapped_omega_axis(&fa, 0.0, 3e12, 61).unwrap();
    let w = wigner_transform(&f, &tau, &omega).unwrap();
    let (nt, nw) = (tau.len, omega.len);
    for it in 0..nt {
        for iw in 0..nw {
            let v = w.get(it, iw);
            assert!((v - w.get(nt - 1 - it, iw)).abs() < 1e-9);
            assert!((v - w.get(it, nw - 1 - iw)).abs() < 1e-9);
        }
    }
}

#[test]
fn omega_marginal_is_the_time_intensity() {
    let d = device();
    let beams = [beam(0.3, 0.0, one()), beam(-0.2, 4.0, Complex64::new(0.0, 0.7))];
    let fa = Axis::symmetric(9e12, 512).unwrap();
    let f = f_minus(&beams, &d, &fa, Route::Infinite).unwrap();
    // Ω nodes on every half step: the marginal sum then covers all index pairs
    let omega = Axis::new(fa.start, fa.step / 2.0, 2 * fa.len - 1).unwrap();
    let tau = Axis::symmetric(8e-12, 33).unwrap();
    let w = wigner_transform(&f, &tau, &omega).unwrap();
    let m = marginal_over_omega(&w);
    for (it, t) in tau.values().enumerate() {
        let ft: Complex64 = fa
            .values()
            .zip(&f.values)
            .map(|(x, v)| v * Complex64::from_polar(1.0, -t * x))
            .sum::<Complex64>()
            * fa.step;
        let unitary = ft.norm_sqr() / (2.0 * PI);
        assert!((m[it] - PI * unitary).abs() < 1e-6 * PI * unitary.max(1e-3), "{it}: {} {}", m[it], PI * unitary);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn superpositions_are_sesquilinear(ar in -2.0f64..2.0, ai in -2.0f64..2.0, br in -2.0f64..2.0, bi in -2.0f64..2.0) {
        let (a, b) = (Complex64::new(ar, ai), Complex64::new(br, bi));
        prop_assume!(a.norm() > 0.05 && b.norm() > 0.05);
        let d = device();
        let beams = [beam(0.35, 2.0, a), beam(-0.25, -3.0, b)];
        let fa = Axis::symmetric(9e12, 768).unwrap();
        let f = f_minus(&beams, &d, &fa, Route::Infinite).unwrap();
        let tau = Axis::symmetric(8e-12, 25).unwrap();
        let omega = snapped_omega_axis(&fa, 0.0, 3e12, 25).unwrap();
        let w = wigner_transform(&f, &tau, &omega).unwrap();
        let oracle = MultibeamWigner::new(&beams, &d).unwrap().grid(&tau, &omega);
        let scale = w.max_abs();
        for (x, y) in w.values.iter().zip(&oracle.values) {
            prop_assert!((x - y).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn displacements_translate_the_argmax(shift_mm in -0.3f64..0.3, tilt in -6.0f64..6.0) {
        let d = device();
        let fa = Axis::symmetric(9e12, 1024).unwrap();
        let tau = Axis::symmetric(6e-12, 121).unwrap();
        let omega = snapped_omega_axis(&fa, 0.0, 4e12, 121).unwrap();
        let base = beam(0.0, 0.0, one());
        let moved = beam(shift_mm, tilt, one());
        let w0 = wigner_transform(&f_minus(std::slice::from_ref(&base), &d, &fa, Route::Finite).unwrap(), &tau, &omega).unwrap();
        let w1 = wigner_transform(&f_minus(std::slice::from_ref(&moved), &d, &fa, Route::Finite).unwrap(), &tau, &omega).unwrap();
        let (t0, o0) = w0.argmax();
        let (t1, o1) = w1.argmax();
        let dt = tau.value(t1) - tau.value(t0);
        let dw = omega.value(o1) - omega.value(o0);
        prop_assert!((dt - moved.delay(&d)).abs() <= tau.step);
        prop_assert!((dw - moved.center_detuning(&d)).abs() <= omega.step);
    }
}
