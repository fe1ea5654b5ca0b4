use schatten_lab_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn last_error() -> String {
    let p = sl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn monomial_spectrum_through_handles() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(sl_symbol_monomial(3, &mut g), SlStatus::Ok);
        let mut m = ptr::null_mut();
        assert_eq!(sl_assemble_tg(g, 0.5, 64, SL_MODE_COEFFICIENT, &mut m), SlStatus::Ok);
        assert_eq!(sl_matrix_dim(m), 65);
        let mut s = ptr::null_mut();
        assert_eq!(sl_singular_values(m, &mut s), SlStatus::Ok);
        let mut c = ptr::null_mut();
        assert_eq!(sl_monomial_closed_form(3, 0.5, 64, &mut c), SlStatus::Ok);

        let mut got = vec![0.0; sl_spectrum_len(s)];
        let mut n = 0;
        assert_eq!(sl_spectrum_values(s, got.as_mut_ptr(), got.len(), &mut n), SlStatus::Ok);
        let mut want = vec![0.0; sl_spectrum_len(c)];
        assert_eq!(sl_spectrum_values(c, want.as_mut_ptr(), want.len(), ptr::null_mut()), SlStatus::Ok);
        want.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() <= 1e-12 * b, "{a} vs {b}");
        }

        let (mut v, mut u, mut e) = (0.0, 0.0, 0.0);
        assert_eq!(sl_schatten_norm(c, 2.0, &mut v, &mut u, &mut e), SlStatus::Ok);
        assert!(v <= e && e <= u * (1.0 + 1e-12));

        sl_spectrum_free(c);
        sl_spectrum_free(s);
        sl_matrix_free(m);
        sl_symbol_free(g);
    }
}

#[test]
fn hs_certificate_for_z() {
    unsafe {
        let spec = CString::new("monomial:1").unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(sl_symbol_parse(spec.as_ptr(), &mut g), SlStatus::Ok);
        let mut m = ptr::null_mut();
        assert_eq!(sl_assemble_tg(g, 0.0, 2048, SL_MODE_INTEGRAL, &mut m), SlStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(sl_singular_values(m, &mut s), SlStatus::Ok);
        let mut v = 0.0;
        assert_eq!(sl_schatten_norm(s, 2.0, &mut v, ptr::null_mut(), ptr::null_mut()), SlStatus::Ok);
        let mut tail = 0.0;
        assert_eq!(sl_matrix_tail_certificate(m, &mut tail), SlStatus::Ok);
        // Σ‖T_z e_n‖² = 2
        assert!((v * v + tail - 2.0).abs() < 1e-6, "{}", v * v + tail);
        sl_spectrum_free(s);
        sl_matrix_free(m);
        sl_symbol_free(g);
    }
}

#[test]
fn json_round_trip_and_kernel_power() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(sl_symbol_kernel_power(0.5, 0.0, 1.0, &mut g), SlStatus::Ok);
        sl_symbol_free(g);
        let doc = CString::new(schatten_lab::spaces::Symbol::monomial(2).unwrap().to_json()).unwrap();
        assert_eq!(sl_symbol_from_json(doc.as_ptr(), &mut g), SlStatus::Ok);
        sl_symbol_free(g);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(sl_symbol_monomial(0, &mut g), SlStatus::InvalidParameter);
        assert!(g.is_null());
        assert!(last_error().contains("degree"), "{}", last_error());
        assert_eq!(sl_symbol_kernel_power(1.5, 0.0, 1.0, &mut g), SlStatus::InvalidParameter);
        assert_eq!(sl_symbol_monomial(1, ptr::null_mut()), SlStatus::NullPointer);

        let bad = CString::new("nonsense:1").unwrap();
        assert_eq!(sl_symbol_parse(bad.as_ptr(), &mut g), SlStatus::InvalidParameter);
        let bad = CString::new("{").unwrap();
        assert_ne!(sl_symbol_from_json(bad.as_ptr(), &mut g), SlStatus::Ok);
        assert_eq!(sl_symbol_parse(ptr::null(), &mut g), SlStatus::NullPointer);

        let mut m = ptr::null_mut();
        assert_eq!(sl_assemble_tg(ptr::null(), 0.0, 8, SL_MODE_COEFFICIENT, &mut m), SlStatus::NullPointer);
        assert_eq!(sl_symbol_monomial(2, &mut g), SlStatus::Ok);
        assert_eq!(sl_assemble_tg(g, 0.0, 8, 7, &mut m), SlStatus::InvalidParameter);
        assert!(last_error().contains("mode"));
        assert_eq!(sl_assemble_tg(g, 0.0, 8, SL_MODE_COEFFICIENT, &mut m), SlStatus::Ok);

        let mut s = ptr::null_mut();
        assert_eq!(sl_singular_values(m, &mut s), SlStatus::Ok);
        let mut buf = [0.0; 2];
        let mut n = 0;
        assert_eq!(sl_spectrum_values(s, buf.as_mut_ptr(), buf.len(), &mut n), SlStatus::BufferTooSmall);
        assert_eq!(n, sl_spectrum_len(s));
        assert!(n > 2);
        assert_eq!(sl_schatten_norm(s, 0.0, ptr::null_mut(), ptr::null_mut(), ptr::null_mut()), SlStatus::InvalidParameter);
        assert_eq!(sl_spectrum_len(ptr::null()), 0);
        assert_eq!(sl_matrix_dim(ptr::null()), 0);

        sl_spectrum_free(s);
        sl_matrix_free(m);
        sl_symbol_free(g);
        sl_symbol_free(ptr::null_mut());
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(sl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/schatten_lab.h")).unwrap();
    for name in ["sl_symbol_monomial", "sl_assemble_tg", "sl_spectrum_values", "sl_last_error_message", "SL_STATUS_OK"] {
        assert!(h.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let h = concat!(env!("CARGO_MANIFEST_DIR"), "/include/schatten_lab.h");
    let st = std::process::Command::new(cc).args(["-std=c99", "-fsyntax-only", "-x", "c", h]).status().unwrap();
    assert!(st.success());
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "clang", "gcc"] {
        if std::process::Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
