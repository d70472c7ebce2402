//! C ABI over `conecat`.
//!
//! Surfaces and arrangements are opaque handles created by `conecat_*_new*`
//! functions and released with the matching `*_free`. Every fallible function
//! returns a [`ConecatStatus`]; on failure [`conecat_last_error`] describes it.
//! Strings returned through `char **` are owned by the caller and released
//! with [`conecat_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use conecat::arrangement::{chern_numbers, cporbi_certify, named_arrangement, Arrangement, MiyaokaYau, OrbifoldStructure};
use conecat::pk_cone::{fiber_length, noncat_test, QuotientSphere};
use conecat::report::to_json;
use conecat::surface::{
    double_triangle, global_cat_verdict, grompi4_certify, triangle_group_cover, ConeSurface, SearchGrid,
    SurfaceDescription,
};
use conecat::{Error, ModelKappa, TriangleShape, Verdict};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConecatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Geometry = 3,
    Gluing = 4,
    NotApplicable = 5,
    NotSpherical = 6,
    NotAdmissible = 7,
    NotNamed = 8,
    Io = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConecatVerdict {
    CatConfirmed = 0,
    NotCat = 1,
    Undetermined = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConecatMiyaokaYau {
    BallQuotientEquality = 0,
    StrictInequality = 1,
    Violation = 2,
}

/// Opaque cone surface.
pub struct ConecatSurface(ConeSurface);

/// Opaque line arrangement.
pub struct ConecatArrangement(Arrangement);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ConecatStatus {
    match e {
        Error::DegenerateTriangle(_) | Error::PerimeterTooLarge { .. } => ConecatStatus::Geometry,
        Error::EdgeLengthMismatch { .. } | Error::UnmatchedEdge(..) | Error::NonManifoldGluing(_) => {
            ConecatStatus::Gluing
        }
        Error::NotApplicable(_) | Error::InconsistentRegion(_) => ConecatStatus::NotApplicable,
        Error::NotSpherical(..) => ConecatStatus::NotSpherical,
        Error::NotAdmissible(_) => ConecatStatus::NotAdmissible,
        Error::NotNamedArrangement => ConecatStatus::NotNamed,
        Error::Io(_) => ConecatStatus::Io,
        _ => ConecatStatus::InvalidInput,
    }
}

fn verdict(v: Verdict) -> ConecatVerdict {
    match v {
        Verdict::CatConfirmed => ConecatVerdict::CatConfirmed,
        Verdict::NotCat => ConecatVerdict::NotCat,
        Verdict::Undetermined => ConecatVerdict::Undetermined,
    }
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), ConecatStatus>) -> ConecatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ConecatStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            ConecatStatus::Panic
        }
    }
}

fn fail(e: Error) -> ConecatStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> ConecatStatus {
    set_error(&format!("{what} is null"));
    ConecatStatus::NullPointer
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, ConecatStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(&format!("{what} is not UTF-8"));
        ConecatStatus::InvalidInput
    })
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), ConecatStatus> {
    if out.is_null() {
        return Ok(());
    }
    let c = CString::new(s).map_err(|_| {
        set_error("string contains NUL");
        ConecatStatus::InvalidInput
    })?;
    *out = c.into_raw();
    Ok(())
}

fn kappa(k: f64) -> Result<ModelKappa, ConecatStatus> {
    ModelKappa::new(k).map_err(fail)
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn conecat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn conecat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a surface from a JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conecat_surface_from_json(json: *const c_char, out: *mut *mut ConecatSurface) -> ConecatStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = str_arg(json, "json")?;
        let desc = SurfaceDescription::from_json(text).map_err(fail)?;
        let s = ConeSurface::from_description(&desc).map_err(fail)?;
        *out = Box::into_raw(Box::new(ConecatSurface(s)));
        Ok(())
    })
}

/// The double of the triangle with the given angles in M²_κ.
///
/// # Safety
/// `angles` must point to three doubles and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conecat_surface_new_double(
    kappa_value: f64,
    angles: *const f64,
    out: *mut *mut ConecatSurface,
) -> ConecatStatus {
    guard(|| {
        if angles.is_null() || out.is_null() {
            return Err(null("angles or out"));
        }
        let a = [*angles, *angles.add(1), *angles.add(2)];
        let t = TriangleShape::from_angles(kappa(kappa_value)?, a).map_err(fail)?;
        *out = Box::into_raw(Box::new(ConecatSurface(double_triangle(&t))));
        Ok(())
    })
}

/// The cover of the triangle's double induced by the (p, q, r) reflection group.
///
/// # Safety
/// `angles` and `mult` must point to three values each and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conecat_surface_new_cover(
    kappa_value: f64,
    angles: *const f64,
    mult: *const u32,
    out: *mut *mut ConecatSurface,
) -> ConecatStatus {
    guard(|| {
        if angles.is_null() || mult.is_null() || out.is_null() {
            return Err(null("angles, mult or out"));
        }
        let a = [*angles, *angles.add(1), *angles.add(2)];
        let m = [*mult, *mult.add(1), *mult.add(2)];
        let t = TriangleShape::from_angles(kappa(kappa_value)?, a).map_err(fail)?;
        let s = triangle_group_cover(&t, m).map_err(fail)?;
        *out = Box::into_raw(Box::new(ConecatSurface(s)));
        Ok(())
    })
}

/// # Safety
/// `s` must come from a `conecat_surface_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn conecat_surface_free(s: *mut ConecatSurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Area, Euler characteristic, vertex count and Gauss-Bonnet defect.
///
/// # Safety
/// `s` must be a live handle; output pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn conecat_surface_info(
    s: *const ConecatSurface,
    area: *mut f64,
    euler_characteristic: *mut i64,
    vertices: *mut usize,
    gauss_bonnet_defect: *mut f64,
) -> ConecatStatus {
    guard(|| {
        let s = &s.as_ref().ok_or_else(|| null("surface"))?.0;
        if !area.is_null() {
            *area = s.area();
        }
        if !euler_characteristic.is_null() {
            *euler_characteristic = s.euler_characteristic();
        }
        if !vertices.is_null() {
            *vertices = s.vertices().len();
        }
        if !gauss_bonnet_defect.is_null() {
            *gauss_bonnet_defect = s.gauss_bonnet_defect();
        }
        Ok(())
    })
}

/// Cone angle of vertex `v`.
///
/// # Safety
/// `s` must be a live handle and `angle` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conecat_surface_cone_angle(s: *const ConecatSurface, v: usize, angle: *mut f64) -> ConecatStatus {
    guard(|| {
        let s = &s.as_ref().ok_or_else(|| null("surface"))?.0;
        if angle.is_null() {
            return Err(null("angle"));
        }
        let vert = s.vertices().get(v).ok_or_else(|| {
            set_error(&format!("no vertex {v}"));
            ConecatStatus::InvalidInput
        })?;
        *angle = vert.angle;
        Ok(())
    })
}

/// Global CAT(κ) verdict at the default search density. A non-positive or NaN
/// `length_bound` selects 2π/√κ. The certificate is written as JSON to
/// `certificate_json` when it is not null.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conecat_surface_certify(
    s: *const ConecatSurface,
    length_bound: f64,
    out: *mut ConecatVerdict,
    certificate_json: *mut *mut c_char,
) -> ConecatStatus {
    guard(|| {
        let s = &s.as_ref().ok_or_else(|| null("surface"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let bound = (length_bound > 0.0).then_some(length_bound);
        let c = global_cat_verdict(s, bound, &SearchGrid::default());
        *out = verdict(c.verdict);
        write_string(certificate_json, to_json(&c).map_err(fail)?)
    })
}

/// The combinatorial large-triangle certificate alone.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conecat_surface_grompi4(s: *const ConecatSurface, out: *mut ConecatVerdict) -> ConecatStatus {
    guard(|| {
        let s = &s.as_ref().ok_or_else(|| null("surface"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = verdict(grompi4_certify(s).verdict);
        Ok(())
    })
}

/// Fiber length of a curvature-4 sphere read as a PK quotient: twice its area.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conecat_fiber_length(s: *const ConecatSurface, out: *mut f64) -> ConecatStatus {
    guard(|| {
        let s = &s.as_ref().ok_or_else(|| null("surface"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let q = QuotientSphere::new(s.clone()).map_err(fail)?;
        *out = fiber_length(&q);
        Ok(())
    })
}

/// Whether α_min·⌊n/2⌋ ≥ π.
#[no_mangle]
pub extern "C" fn conecat_noncat_test(alpha_min: f64, n: u64) -> bool {
    noncat_test(alpha_min, n)
}

/// One of the named arrangements `A1_6`, `A1_7`, `A3_0_3`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conecat_arrangement_named(name: *const c_char, out: *mut *mut ConecatArrangement) -> ConecatStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let a = named_arrangement(str_arg(name, "name")?).map_err(fail)?;
        *out = Box::into_raw(Box::new(ConecatArrangement(a)));
        Ok(())
    })
}

/// # Safety
/// `a` must come from `conecat_arrangement_named` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn conecat_arrangement_free(a: *mut ConecatArrangement) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

unsafe fn orbifold(a: *const ConecatArrangement, b: *const u32, len: usize) -> Result<OrbifoldStructure, ConecatStatus> {
    let a = &a.as_ref().ok_or_else(|| null("arrangement"))?.0;
    if b.is_null() {
        return Err(null("b"));
    }
    let b = std::slice::from_raw_parts(b, len).to_vec();
    let b = if b.len() == 1 { vec![b[0]; a.len()] } else { b };
    OrbifoldStructure::new(a.clone(), b).map_err(fail)
}

/// Orbifold Chern numbers as exact rationals `"p/q"`, and the Miyaoka-Yau verdict.
/// `b` holds one multiplicity per line, or a single value for all lines.
///
/// # Safety
/// `a` must be a live handle, `b` must hold `len` values; string outputs may be null.
#[no_mangle]
pub unsafe extern "C" fn conecat_chern_numbers(
    a: *const ConecatArrangement,
    b: *const u32,
    len: usize,
    c1_sq: *mut *mut c_char,
    three_e: *mut *mut c_char,
    out: *mut ConecatMiyaokaYau,
) -> ConecatStatus {
    guard(|| {
        let o = orbifold(a, b, len)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = chern_numbers(&o).map_err(fail)?;
        *out = match r.verdict {
            MiyaokaYau::BallQuotientEquality => ConecatMiyaokaYau::BallQuotientEquality,
            MiyaokaYau::StrictInequality => ConecatMiyaokaYau::StrictInequality,
            MiyaokaYau::Violation => ConecatMiyaokaYau::Violation,
        };
        write_string(c1_sq, r.c1_sq.to_string())?;
        write_string(three_e, r.three_e.to_string())
    })
}

/// CAT(0) certificate of an orbifold structure on a named arrangement.
///
/// # Safety
/// `a` must be a live handle, `b` must hold `len` values and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn conecat_arrangement_certify(
    a: *const ConecatArrangement,
    b: *const u32,
    len: usize,
    out: *mut ConecatVerdict,
    certificate_json: *mut *mut c_char,
) -> ConecatStatus {
    guard(|| {
        let o = orbifold(a, b, len)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = cporbi_certify(&o).map_err(fail)?;
        *out = verdict(c.verdict);
        write_string(certificate_json, to_json(&c).map_err(fail)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::NotSpherical(3, 3, 3)), ConecatStatus::NotSpherical);
        assert_eq!(status_of(&Error::UnmatchedEdge(0, 1)), ConecatStatus::Gluing);
        assert_eq!(status_of(&Error::InvalidInput("x".into())), ConecatStatus::InvalidInput);
    }

    #[test]
    fn panics_become_status() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, ConecatStatus::Panic);
    }
}
