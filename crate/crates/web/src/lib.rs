//! Browser bindings: closed forms, incidence pictures and small divisor
//! profiles. Each export wraps a plain function that the native tests call.

use skewlines::geometry::{enumerate_subspaces, ResourceGuard};
use skewlines::incidence::{build_skew_lines, incidence_between, IncidenceKind};
use skewlines::snf::{filtration_dims, p_local_elementary_divisors, profile_from_filtration};
use skewlines::theorem::closed_forms;
use skewlines::Prime;
use wasm_bindgen::prelude::*;

/// Largest family the page will enumerate.
const FAMILY_CAP: u64 = 400;
/// Largest prime for the in-browser divisor computation.
const DIVISOR_MAX_P: u64 = 3;

fn prime(p: u32) -> Result<Prime, String> {
    Prime::new(u64::from(p)).map_err(|e| e.to_string())
}

pub fn closed_forms_inner(p: u32) -> Result<String, String> {
    let cf = closed_forms(prime(p)?);
    serde_json::to_string(&cf).map_err(|e| e.to_string())
}

/// Row-major RGBA pixels, one per matrix entry, followed by nothing else.
/// The image is `cols` wide; ones are dark, zeros light.
pub fn incidence_rgba_inner(p: u32, n: u32, r: u32, s: u32, psi: bool) -> Result<Vec<u8>, String> {
    let p = prime(p)?;
    let guard = ResourceGuard {
        cap: FAMILY_CAP,
        allow_override: false,
    };
    let (n, r, s) = (n as usize, r as usize, s as usize);
    let rows = enumerate_subspaces(p, n, r, &guard).map_err(|e| e.to_string())?;
    let cols = enumerate_subspaces(p, n, s, &guard).map_err(|e| e.to_string())?;
    let kind = if psi {
        if r + 1 != n {
            return Err("the hyperplane relation needs r = n - 1".into());
        }
        IncidenceKind::HyperplaneComplement
    } else {
        IncidenceKind::Skew
    };
    let m = incidence_between(&rows, &cols, kind).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(4 * m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let px: [u8; 4] = if m.get_i64(i, j) == Some(1) {
                [24, 38, 84, 255]
            } else {
                [246, 244, 238, 255]
            };
            out.extend_from_slice(&px);
        }
    }
    Ok(out)
}

pub fn family_size_inner(p: u32, n: u32, r: u32) -> Result<u32, String> {
    let p = prime(p)?;
    let size = skewlines::gaussian_binomial(i64::from(n), i64::from(r), p.get());
    u32::try_from(size).map_err(|_| "family too large".to_string())
}

/// JSON with the p-local profile, the filtration profile and the expected
/// multiplicities of the skew-lines matrix.
pub fn divisor_profile_inner(p: u32) -> Result<String, String> {
    let pr = prime(p)?;
    if pr.get() > DIVISOR_MAX_P {
        return Err(format!(
            "the page computes divisors only for p <= {DIVISOR_MAX_P}"
        ));
    }
    let a = build_skew_lines(pr, &ResourceGuard::default()).map_err(|e| e.to_string())?;
    let local = p_local_elementary_divisors(&a, pr).map_err(|e| e.to_string())?;
    let dims = filtration_dims(&a, pr, 5).map_err(|e| e.to_string())?;
    let filtration = profile_from_filtration(pr, a.rows(), &dims);
    let v = serde_json::json!({
        "size": a.rows(),
        "expected": closed_forms(pr).e,
        "p_local": local,
        "filtration": filtration,
    });
    Ok(v.to_string())
}

#[wasm_bindgen]
pub fn closed_forms_json(p: u32) -> Result<String, JsError> {
    closed_forms_inner(p).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn incidence_rgba(p: u32, n: u32, r: u32, s: u32, psi: bool) -> Result<Vec<u8>, JsError> {
    incidence_rgba_inner(p, n, r, s, psi).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn family_size(p: u32, n: u32, r: u32) -> Result<u32, JsError> {
    family_size_inner(p, n, r).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn divisor_profile_json(p: u32) -> Result<String, JsError> {
    divisor_profile_inner(p).map_err(|e| JsError::new(&e))
}
