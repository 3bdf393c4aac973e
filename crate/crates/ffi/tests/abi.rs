use std::ffi::CStr;
use std::ptr;

use nullgauge_ffi::*;

fn grid() -> ng_grid {
    ng_grid {
        n_x: 128,
        dx: 0.1,
        dt: 0.02,
    }
}

fn consts() -> ng_constants {
    ng_constants {
        e: 1.0,
        m: 1.0,
        background: 0.0,
    }
}

fn message() -> String {
    unsafe { CStr::from_ptr(ng_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn packet() -> (*mut ng_kgm, f64) {
    let mut h = ptr::null_mut();
    let mut bg = 0.0;
    let s = unsafe { ng_kgm_packet(grid(), consts(), ptr::null(), &mut bg, &mut h) };
    assert_eq!(s, ng_status::NG_OK, "{}", message());
    (h, bg)
}

#[test]
fn packet_evolves_and_conserves_charge() {
    let (h, bg) = packet();
    assert!((bg + 0.5).abs() < 1e-15);
    let mut d0 = ng_diagnostics::default();
    let mut d1 = ng_diagnostics::default();
    unsafe {
        assert_eq!(ng_kgm_diagnostics(h, &mut d0), ng_status::NG_OK);
        assert_eq!(ng_kgm_step(h, 10), ng_status::NG_OK);
        assert_eq!(ng_kgm_diagnostics(h, &mut d1), ng_status::NG_OK);
        ng_kgm_free(h);
    }
    assert!((d1.t - 0.2).abs() < 1e-12);
    assert!((d1.charge - d0.charge).abs() < 1e-8 * d0.charge.abs());
}

#[test]
fn unitary_round_trip_and_reconstruction() {
    let (h, _) = packet();
    let n = grid().n_x;
    let mut u = ptr::null_mut();
    let mut winding = -1;
    let mut abs_psi = vec![0.0; n];
    let mut phi = vec![0.0; n];
    let mut phi_rec = vec![0.0; n];
    let mut phi_dot = vec![0.0; n];
    let mut phi_dot_rec = vec![0.0; n];
    unsafe {
        assert_eq!(ng_kgm_abs_psi(h, abs_psi.as_mut_ptr(), n), ng_status::NG_OK);
        assert_eq!(ng_kgm_to_unitary(h, 1e-8, &mut winding, &mut u), ng_status::NG_OK);
        assert_eq!(
            ng_unitary_field(u, ng_field::NG_FIELD_PHI, phi.as_mut_ptr(), n),
            ng_status::NG_OK
        );
        assert_eq!(
            ng_unitary_field(u, ng_field::NG_FIELD_PHI_DOT, phi_dot.as_mut_ptr(), n),
            ng_status::NG_OK
        );
        let s = ng_unitary_reconstruct(u, phi_rec.as_mut_ptr(), phi_dot_rec.as_mut_ptr(), n);
        assert_eq!(s, ng_status::NG_OK, "{}", message());
        ng_unitary_free(u);
        ng_kgm_free(h);
    }
    assert_eq!(winding, 0);
    for i in 0..n {
        assert!((phi[i].abs() - abs_psi[i]).abs() < 1e-14);
        assert!((phi[i] - phi_rec[i]).abs() < 1e-12 * abs_psi[i].max(1.0));
        // The discrete conservation law only holds to O(dx^2), and phi_dot_rec
        // inherits that residual.
        assert!((phi_dot[i] - phi_dot_rec[i]).abs() < grid().dx * grid().dx);
    }
}

#[test]
fn em_only_tracks_unitary_evolution() {
    let (h, _) = packet();
    let n = grid().n_x;
    let mut u = ptr::null_mut();
    let mut em = ptr::null_mut();
    let (mut b0_u, mut b0_em, mut phi_u, mut phi_em) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut t = 0.0;
    unsafe {
        assert_eq!(
            ng_kgm_to_unitary(h, 1e-8, ptr::null_mut(), &mut u),
            ng_status::NG_OK
        );
        assert_eq!(ng_unitary_to_em_only(u, &mut em), ng_status::NG_OK);
        assert_eq!(ng_unitary_step(u, 10), ng_status::NG_OK);
        assert_eq!(ng_em_only_step(em, 10), ng_status::NG_OK, "{}", message());
        assert_eq!(ng_em_only_time(em, &mut t), ng_status::NG_OK);
        ng_unitary_field(u, ng_field::NG_FIELD_B0, b0_u.as_mut_ptr(), n);
        ng_unitary_field(u, ng_field::NG_FIELD_PHI, phi_u.as_mut_ptr(), n);
        ng_em_only_field(em, ng_field::NG_FIELD_B0, b0_em.as_mut_ptr(), n);
        assert_eq!(
            ng_em_only_field(em, ng_field::NG_FIELD_PHI, phi_em.as_mut_ptr(), n),
            ng_status::NG_OK
        );
        ng_em_only_free(em);
        ng_unitary_free(u);
        ng_kgm_free(h);
    }
    assert!((t - 0.2).abs() < 1e-12);
    let scale = b0_u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..n {
        assert!((b0_u[i] - b0_em[i]).abs() < 1e-3 * scale);
        assert!((phi_u[i] - phi_em[i]).abs() < grid().dx * grid().dx);
    }
}

#[test]
fn null_and_length_errors_are_reported() {
    let (h, _) = packet();
    let mut buf = vec![0.0; 3];
    unsafe {
        assert_eq!(ng_kgm_step(ptr::null_mut(), 1), ng_status::NG_NULL_POINTER);
        assert!(message().contains("null"));
        assert_eq!(ng_kgm_diagnostics(h, ptr::null_mut()), ng_status::NG_NULL_POINTER);
        assert_eq!(
            ng_kgm_abs_psi(h, buf.as_mut_ptr(), 3),
            ng_status::NG_LENGTH_MISMATCH
        );
        assert!(message().contains("128"), "{}", message());
        assert_eq!(
            ng_kgm_abs_psi(h, ptr::null_mut(), 128),
            ng_status::NG_NULL_POINTER
        );
        ng_kgm_free(h);
        ng_kgm_free(ptr::null_mut());
        ng_unitary_free(ptr::null_mut());
        ng_em_only_free(ptr::null_mut());
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let mut h = ptr::null_mut();
    let bad_cfl = ng_grid {
        n_x: 128,
        dx: 0.1,
        dt: 0.2,
    };
    unsafe {
        assert_eq!(
            ng_kgm_packet(bad_cfl, consts(), ptr::null(), ptr::null_mut(), &mut h),
            ng_status::NG_INVALID_ARGUMENT
        );
        assert!(h.is_null());
        let neutral = ng_constants {
            e: 0.0,
            m: 1.0,
            background: 0.0,
        };
        assert_eq!(
            ng_kgm_packet(grid(), neutral, ptr::null(), ptr::null_mut(), &mut h),
            ng_status::NG_INVALID_ARGUMENT
        );
        let bad = ng_packet {
            phi0: -1.0,
            amplitude: 0.3,
            width: 1.0,
            chirp: 0.5,
            kick: 0.1,
        };
        assert_eq!(
            ng_kgm_packet(grid(), consts(), &bad, ptr::null_mut(), &mut h),
            ng_status::NG_INVALID_ARGUMENT
        );
    }
}

#[test]
fn explicit_state_with_wrong_background_breaks_down() {
    // A uniform condensate needs the background -2 e m phi0^2; the opposite
    // sign makes the reconstruction radicand negative.
    let g = ng_grid {
        n_x: 32,
        dx: 0.2,
        dt: 0.04,
    };
    let n = g.n_x;
    let psi = vec![ng_complex { re: 0.5, im: 0.0 }; n];
    let psi_dot = vec![ng_complex { re: 0.0, im: -0.5 }; n];
    let a0 = vec![0.0; n];
    let zeros = vec![0.0; n];
    let mut h = ptr::null_mut();
    let mut u = ptr::null_mut();
    let mut out = vec![0.0; n];
    unsafe {
        let s = ng_kgm_new(
            g,
            ng_constants {
                background: 0.5,
                ..consts()
            },
            psi.as_ptr(),
            psi_dot.as_ptr(),
            a0.as_ptr(),
            zeros.as_ptr(),
            zeros.as_ptr(),
            zeros.as_ptr(),
            &mut h,
        );
        assert_eq!(s, ng_status::NG_OK, "{}", message());
        assert_eq!(
            ng_kgm_to_unitary(h, 1e-8, ptr::null_mut(), &mut u),
            ng_status::NG_OK
        );
        let s = ng_unitary_reconstruct(u, out.as_mut_ptr(), ptr::null_mut(), n);
        assert_eq!(s, ng_status::NG_BREAKDOWN, "{}", message());
        assert!(message().contains("radicand"), "{}", message());
        ng_unitary_free(u);
        ng_kgm_free(h);
    }
}

#[test]
fn spinor_functions() {
    let c = |re, im| ng_complex { re, im };
    // Real spinors are Majorana in the Majorana representation.
    let psi = [c(0.3, 0.0), c(-1.2, 0.0), c(0.7, 0.0), c(0.1, 0.0)];
    let mut j = [0.0; 4];
    let mut k = [0.0; 4];
    let mut theta = 0.0;
    let mut phi = [c(0.0, 0.0); 4];
    unsafe {
        assert_eq!(
            ng_dirac_current(ng_representation::NG_REP_MAJORANA, psi.as_ptr(), j.as_mut_ptr()),
            ng_status::NG_OK
        );
        assert_eq!(
            ng_axial_current(ng_representation::NG_REP_MAJORANA, psi.as_ptr(), k.as_mut_ptr()),
            ng_status::NG_OK
        );
        let rotated: Vec<ng_complex> = psi
            .iter()
            .map(|z| c(z.re * 0.6_f64.cos(), z.re * 0.6_f64.sin()))
            .collect();
        let s = ng_phase_factorization(
            ng_representation::NG_REP_MAJORANA,
            rotated.as_ptr(),
            1e-10,
            &mut theta,
            phi.as_mut_ptr(),
        );
        assert_eq!(s, ng_status::NG_OK, "{}", message());
        let generic = [c(1.0, 0.2), c(0.0, 1.0), c(0.3, -0.4), c(0.5, 0.0)];
        let s = ng_phase_factorization(
            ng_representation::NG_REP_DIRAC,
            generic.as_ptr(),
            1e-10,
            &mut theta,
            phi.as_mut_ptr(),
        );
        assert_eq!(s, ng_status::NG_ALGEBRA);
        assert_eq!(
            ng_dirac_current(ng_representation::NG_REP_DIRAC, ptr::null(), j.as_mut_ptr()),
            ng_status::NG_NULL_POINTER
        );
    }
    let square = j[0] * j[0] - j[1] * j[1] - j[2] * j[2] - j[3] * j[3];
    assert!(square.abs() < 1e-12 * j[0] * j[0]);
    assert!(k.iter().all(|v| v.abs() < 1e-12));
    // theta is defined modulo pi (phi -> -phi).
    let d = (theta - 0.6).rem_euclid(std::f64::consts::PI);
    assert!(d.min(std::f64::consts::PI - d) < 1e-12, "{theta}");
}

#[test]
fn panics_do_not_unwind_across_the_boundary() {
    std::panic::set_hook(Box::new(|_| {}));
    assert_eq!(ng_test_panic(), ng_status::NG_PANIC);
    let _ = std::panic::take_hook();
    assert!(message().starts_with("panic:"));
    let version = unsafe { CStr::from_ptr(ng_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}
