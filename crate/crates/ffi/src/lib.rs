//! C ABI for the certificate toolkit.
//!
//! Every fallible call returns an [`SgStatus`]; on failure a description is
//! available from [`sg_last_error_message`] on the same thread. Objects are
//! handed out as opaque pointers and must be released with the matching
//! `*_free` function. Strings returned by the library are released with
//! [`sg_string_free`].

use scenario_gne::equilibrium::EquilibriumInvariants;
use scenario_gne::scenario::{epsilon_even_split, run_certify, Certificate, CertifyOptions, SamplerSpec};
use scenario_gne::validation::{empirical_violation, grid_equilibrium_set};
use scenario_gne::{AggregativeGame, GneError, ToleranceSet};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Infeasible = 4,
    Numerical = 5,
    Panic = 6,
}

/// An assembled game.
pub struct SgGame {
    game: AggregativeGame,
}

/// A certificate together with the program it was computed for.
pub struct SgCertificate {
    cert: Certificate,
    game: AggregativeGame,
    sampler: SamplerSpec,
    inv: EquilibriumInvariants,
    combined: scenario_gne::polytope::HalfspaceSystem,
}

/// Plain-data view of a certificate.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SgCertificateSummary {
    pub k: usize,
    pub s_k: usize,
    pub v_k: usize,
    pub beta: f64,
    pub epsilon_sk: f64,
    pub epsilon_vk: f64,
    pub seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &GneError) -> SgStatus {
    match e {
        GneError::Json(_) => SgStatus::Parse,
        GneError::Infeasible(_) => SgStatus::Infeasible,
        e if e.is_numerical() => SgStatus::Numerical,
        _ => SgStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (SgStatus, String)>) -> SgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SgStatus::Panic
        }
    }
}

fn lift(e: GneError) -> (SgStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SgStatus, String)> {
    if p.is_null() {
        return Err((SgStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (SgStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn check_out<T>(out: *mut T) -> Result<(), (SgStatus, String)> {
    if out.is_null() {
        Err((SgStatus::NullPointer, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn sg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a game document (JSON) and assembles the game.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_game_from_json(json: *const c_char, out: *mut *mut SgGame) -> SgStatus {
    guard(|| {
        check_out(out)?;
        let text = read_str(json, "game document")?;
        let game = AggregativeGame::from_json_str(text, &ToleranceSet::default()).map_err(lift)?;
        *out = Box::into_raw(Box::new(SgGame { game }));
        Ok(())
    })
}

/// The built-in two-player example.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_game_two_player_example(out: *mut *mut SgGame) -> SgStatus {
    guard(|| {
        check_out(out)?;
        let game = scenario_gne::game::two_player_example();
        *out = Box::into_raw(Box::new(SgGame { game }));
        Ok(())
    })
}

/// Total strategy dimension, or zero for a null handle.
///
/// # Safety
/// `game` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_game_dim(game: *const SgGame) -> usize {
    game.as_ref().map_or(0, |g| g.game.dim())
}

/// # Safety
/// `game` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sg_game_free(game: *mut SgGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// `ε(h)` for `K` samples and confidence `β` with the budget split evenly.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_epsilon_even_split(k: usize, beta: f64, h: usize, out: *mut f64) -> SgStatus {
    guard(|| {
        check_out(out)?;
        *out = epsilon_even_split(k, beta, h).map_err(lift)?;
        Ok(())
    })
}

/// Draws `k` scenarios from `sampler_json`, solves and certifies.
///
/// # Safety
/// `game` must be a live handle, `sampler_json` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_certify(
    game: *const SgGame,
    sampler_json: *const c_char,
    k: usize,
    beta: f64,
    seed: u64,
    out: *mut *mut SgCertificate,
) -> SgStatus {
    guard(|| {
        check_out(out)?;
        let g = game
            .as_ref()
            .ok_or((SgStatus::NullPointer, "game handle is null".to_string()))?;
        let text = read_str(sampler_json, "sampler document")?;
        let sampler: SamplerSpec = serde_json::from_str(text).map_err(|e| lift(e.into()))?;
        let (prog, inv, cert) =
            run_certify(&g.game, &sampler, k, beta, seed, &CertifyOptions::default()).map_err(lift)?;
        *out = Box::into_raw(Box::new(SgCertificate {
            cert,
            game: g.game.clone(),
            sampler,
            inv,
            combined: prog.combined,
        }));
        Ok(())
    })
}

/// # Safety
/// `cert` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_certificate_summary(
    cert: *const SgCertificate,
    out: *mut SgCertificateSummary,
) -> SgStatus {
    guard(|| {
        check_out(out)?;
        let c = &cert
            .as_ref()
            .ok_or((SgStatus::NullPointer, "certificate handle is null".to_string()))?
            .cert;
        *out = SgCertificateSummary {
            k: c.k,
            s_k: c.s_k,
            v_k: c.v_k,
            beta: c.beta,
            epsilon_sk: c.epsilon_sk,
            epsilon_vk: c.epsilon_vk,
            seed: c.seed.unwrap_or(0),
        };
        Ok(())
    })
}

/// The certificate as JSON; free the result with [`sg_string_free`].
///
/// # Safety
/// `cert` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_certificate_to_json(cert: *const SgCertificate, out: *mut *mut c_char) -> SgStatus {
    guard(|| {
        check_out(out)?;
        let c = cert
            .as_ref()
            .ok_or((SgStatus::NullPointer, "certificate handle is null".to_string()))?;
        let text = serde_json::to_string(&c.cert).map_err(|e| lift(e.into()))?;
        *out = CString::new(text).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// Grids the certified equilibrium set with the given granularity and
/// returns the largest violation frequency over `n_fresh` fresh draws.
///
/// # Safety
/// `cert` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_certificate_max_violation(
    cert: *const SgCertificate,
    granularity: f64,
    n_fresh: usize,
    seed: u64,
    out: *mut f64,
) -> SgStatus {
    guard(|| {
        check_out(out)?;
        let c = cert
            .as_ref()
            .ok_or((SgStatus::NullPointer, "certificate handle is null".to_string()))?;
        let tol = ToleranceSet::default();
        let probes = grid_equilibrium_set(&c.game, &c.inv, &c.combined, granularity, &tol).map_err(lift)?;
        let report = empirical_violation(&probes, &c.sampler, n_fresh, seed, &tol).map_err(lift)?;
        *out = report.max_frequency();
        Ok(())
    })
}

/// # Safety
/// `cert` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sg_certificate_free(cert: *mut SgCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}
