use std::ffi::{CStr, CString};
use std::f64::consts::{FRAC_PI_2, PI};
use std::ptr;

use conecat_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(conecat_last_error()) }.to_string_lossy().into_owned()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    conecat_string_free(s);
    out
}

#[test]
fn octant_double_round_trip() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(conecat_surface_new_double(4.0, [FRAC_PI_2; 3].as_ptr(), &mut s), ConecatStatus::Ok);
        let (mut area, mut chi, mut nv, mut defect) = (0.0, 0i64, 0usize, 1.0);
        assert_eq!(conecat_surface_info(s, &mut area, &mut chi, &mut nv, &mut defect), ConecatStatus::Ok);
        assert!((area - PI / 4.0).abs() < 1e-12);
        assert_eq!((chi, nv), (2, 3));
        assert!(defect.abs() < 1e-9);
        let mut angle = 0.0;
        assert_eq!(conecat_surface_cone_angle(s, 0, &mut angle), ConecatStatus::Ok);
        assert!((angle - PI).abs() < 1e-12);
        assert_eq!(conecat_surface_cone_angle(s, 9, &mut angle), ConecatStatus::InvalidInput);
        let mut fiber = 0.0;
        assert_eq!(conecat_fiber_length(s, &mut fiber), ConecatStatus::Ok);
        assert!((fiber - PI / 2.0).abs() < 1e-12);
        let mut v = ConecatVerdict::Undetermined;
        let mut json = ptr::null_mut();
        assert_eq!(conecat_surface_certify(s, 0.0, &mut v, &mut json), ConecatStatus::Ok);
        assert_eq!(v, ConecatVerdict::NotCat);
        assert!(take(json).contains("NOT_CAT"));
        conecat_surface_free(s);
    }
}

#[test]
fn octahedral_cover_passes_grompi4() {
    unsafe {
        let mut s = ptr::null_mut();
        let st = conecat_surface_new_cover(4.0, [FRAC_PI_2; 3].as_ptr(), [2u32; 3].as_ptr(), &mut s);
        assert_eq!(st, ConecatStatus::Ok, "{}", last_error());
        let mut v = ConecatVerdict::Undetermined;
        assert_eq!(conecat_surface_grompi4(s, &mut v), ConecatStatus::Ok);
        assert_eq!(v, ConecatVerdict::CatConfirmed);
        conecat_surface_free(s);
    }
}

#[test]
fn bad_json_sets_error() {
    unsafe {
        let mut s = ptr::null_mut();
        let text = CString::new("{not json").unwrap();
        assert_ne!(conecat_surface_from_json(text.as_ptr(), &mut s), ConecatStatus::Ok);
        assert!(s.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(conecat_surface_from_json(ptr::null(), &mut s), ConecatStatus::NullPointer);
    }
}

#[test]
fn euclidean_triangle_is_not_spherical() {
    unsafe {
        let mut s = ptr::null_mut();
        let st = conecat_surface_new_cover(0.0, [PI / 3.0; 3].as_ptr(), [3u32; 3].as_ptr(), &mut s);
        assert_ne!(st, ConecatStatus::Ok);
        assert!(s.is_null());
    }
}

#[test]
fn arrangement_chern_and_certificate() {
    unsafe {
        let mut a = ptr::null_mut();
        let name = CString::new("A1_7").unwrap();
        assert_eq!(conecat_arrangement_named(name.as_ptr(), &mut a), ConecatStatus::Ok);
        let (mut c1, mut e3) = (ptr::null_mut(), ptr::null_mut());
        let mut my = ConecatMiyaokaYau::Violation;
        let b = [2u32];
        assert_eq!(conecat_chern_numbers(a, b.as_ptr(), 1, &mut c1, &mut e3, &mut my), ConecatStatus::Ok);
        let (c1, e3) = (take(c1), take(e3));
        assert!(!c1.is_empty() && !e3.is_empty());
        assert_ne!(my, ConecatMiyaokaYau::Violation);
        let mut v = ConecatVerdict::Undetermined;
        assert_eq!(conecat_arrangement_certify(a, b.as_ptr(), 1, &mut v, ptr::null_mut()), ConecatStatus::Ok);
        assert_eq!(v, ConecatVerdict::CatConfirmed);
        conecat_arrangement_free(a);

        let bogus = CString::new("A9").unwrap();
        assert_eq!(conecat_arrangement_named(bogus.as_ptr(), &mut a), ConecatStatus::NotNamed);
    }
}

#[test]
fn noncat_threshold() {
    assert!(conecat_noncat_test(PI / 2.0, 4));
    assert!(!conecat_noncat_test(PI / 2.0, 3));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/conecat.h")).unwrap();
    for f in [
        "conecat_last_error",
        "conecat_string_free",
        "conecat_surface_from_json",
        "conecat_surface_new_double",
        "conecat_surface_new_cover",
        "conecat_surface_free",
        "conecat_surface_info",
        "conecat_surface_cone_angle",
        "conecat_surface_certify",
        "conecat_surface_grompi4",
        "conecat_fiber_length",
        "conecat_noncat_test",
        "conecat_arrangement_named",
        "conecat_arrangement_free",
        "conecat_chern_numbers",
        "conecat_arrangement_certify",
        "typedef struct ConecatSurface ConecatSurface",
        "CONECAT_STATUS_NOT_SPHERICAL",
    ] {
        assert!(header.contains(f), "missing {f}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", "-std=c11"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include/conecat.h"))
        .output()
    else {
        eprintln!("no C compiler, skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
