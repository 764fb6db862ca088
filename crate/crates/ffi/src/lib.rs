//! C ABI for `chainpoly`.
//!
//! Chains and polynomials are opaque heap handles released with
//! [`cp_chain_free`] and [`cp_poly_free`]. Every fallible call returns a
//! [`CpStatus`]; on failure [`cp_last_error_message`] describes the error
//! for the calling thread. Results are written through out-pointers only on
//! success.
#![allow(clippy::missing_safety_doc)]

use chainpoly::{finiteform, io, montecarlo, Error, LaurentPoly, PolyChain, Variable};
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidChain = 3,
    Degenerate = 4,
    Capacity = 5,
    Conditioning = 6,
    Consistency = 7,
    Domain = 8,
    Parse = 9,
    Unsupported = 10,
    Panic = 11,
}

/// Variable of a polynomial handle.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpVariable {
    A = 0,
    T = 1,
}

/// An open or closed polygonal chain.
pub struct CpChain(PolyChain);

/// A Laurent polynomial with optional per-coefficient standard errors.
pub struct CpPoly {
    poly: LaurentPoly,
    variable: Variable,
    stderr: BTreeMap<i32, f64>,
    /// Terms by descending exponent, for indexed access.
    terms: Vec<(i32, f64)>,
}

impl CpPoly {
    fn new(poly: LaurentPoly, variable: Variable, stderr: BTreeMap<i32, f64>) -> Self {
        let terms = poly.terms().rev().collect();
        CpPoly { poly, variable, stderr, terms }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CpStatus {
    match e {
        Error::InvalidChain(_) => CpStatus::InvalidChain,
        Error::Degenerate(_) => CpStatus::Degenerate,
        Error::Capacity { .. } => CpStatus::Capacity,
        Error::Conditioning { .. } => CpStatus::Conditioning,
        Error::Consistency(_) => CpStatus::Consistency,
        Error::Domain(_) => CpStatus::Domain,
        Error::Parse { .. } => CpStatus::Parse,
        Error::Unsupported(_) => CpStatus::Unsupported,
    }
}

enum Failure {
    Status(CpStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(CpStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and the thread's
/// last-error message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            CpStatus::Ok
        }
        Ok(Err(Failure::Status(s, m))) => {
            set_last_error(&m);
            s
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic");
            CpStatus::Panic
        }
    }
}

unsafe fn chain_ref<'a>(c: *const CpChain) -> Result<&'a PolyChain, Failure> {
    c.as_ref().map(|c| &c.0).ok_or_else(|| null("chain"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn boxed_poly(p: CpPoly) -> *mut CpPoly {
    Box::into_raw(Box::new(p))
}

/// Message of the last failed call on this thread, or an empty string.
///
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a chain from `n_vertices` points stored as `xyz[3k], xyz[3k+1], xyz[3k+2]`.
#[no_mangle]
pub unsafe extern "C" fn cp_chain_new(
    xyz: *const f64,
    n_vertices: usize,
    closed: bool,
    out: *mut *mut CpChain,
) -> CpStatus {
    guard(|| {
        if xyz.is_null() {
            return Err(null("xyz"));
        }
        let coords = std::slice::from_raw_parts(xyz, 3 * n_vertices);
        let pts: Vec<[f64; 3]> = coords.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        let chain = PolyChain::from_coords(&pts, closed)?;
        write_out(out, Box::into_raw(Box::new(CpChain(chain))))
    })
}

/// Parses chain number `index` from text or JSON chain data.
#[no_mangle]
pub unsafe extern "C" fn cp_chain_parse(text: *const c_char, index: usize, out: *mut *mut CpChain) -> CpStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| Failure::Status(CpStatus::InvalidArgument, "text is not UTF-8".into()))?;
        let mut chains = io::parse_chains(text)?;
        if index >= chains.len() {
            return Err(Failure::Status(
                CpStatus::InvalidArgument,
                format!("chain index {index} out of range, {} chains", chains.len()),
            ));
        }
        write_out(out, Box::into_raw(Box::new(CpChain(chains.swap_remove(index)))))
    })
}

/// Releases a chain; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cp_chain_free(chain: *mut CpChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

#[no_mangle]
pub unsafe extern "C" fn cp_chain_num_vertices(chain: *const CpChain, out: *mut usize) -> CpStatus {
    guard(|| write_out(out, chain_ref(chain)?.num_vertices()))
}

#[no_mangle]
pub unsafe extern "C" fn cp_chain_is_closed(chain: *const CpChain, out: *mut bool) -> CpStatus {
    guard(|| write_out(out, chain_ref(chain)?.is_closed()))
}

/// Gauss linking integral of two chains.
#[no_mangle]
pub unsafe extern "C" fn cp_gauss_linking(a: *const CpChain, b: *const CpChain, out: *mut f64) -> CpStatus {
    guard(|| write_out(out, chainpoly::gauss_linking(chain_ref(a)?, chain_ref(b)?)?))
}

#[no_mangle]
pub unsafe extern "C" fn cp_writhe(chain: *const CpChain, out: *mut f64) -> CpStatus {
    guard(|| write_out(out, chainpoly::writhe(chain_ref(chain)?)))
}

#[no_mangle]
pub unsafe extern "C" fn cp_acn(chain: *const CpChain, out: *mut f64) -> CpStatus {
    guard(|| write_out(out, chainpoly::acn(chain_ref(chain)?)))
}

/// Probability that a random projection of a 4-edge open chain is the knotoid k2.1.
#[no_mangle]
pub unsafe extern "C" fn cp_p_k21(chain: *const CpChain, out: *mut f64) -> CpStatus {
    guard(|| write_out(out, finiteform::p_k21(chain_ref(chain)?)?.probability))
}

fn unsupported(what: &str) -> Failure {
    Failure::Status(CpStatus::Unsupported, format!("no closed form for this chain's {what}"))
}

/// Closed-form projection-averaged bracket in `A` (chains with at most 4 edges).
#[no_mangle]
pub unsafe extern "C" fn cp_bracket_exact(chain: *const CpChain, out: *mut *mut CpPoly) -> CpStatus {
    guard(|| {
        let p = finiteform::exact_bracket(chain_ref(chain)?).ok_or_else(|| unsupported("bracket"))??;
        write_out(out, boxed_poly(CpPoly::new(p, Variable::A, BTreeMap::new())))
    })
}

/// Closed-form Jones polynomial in `t` (open chains with at most 4 edges, any closed chain).
#[no_mangle]
pub unsafe extern "C" fn cp_jones_exact(chain: *const CpChain, seed: u64, out: *mut *mut CpPoly) -> CpStatus {
    guard(|| {
        let p = finiteform::exact_jones(chain_ref(chain)?, seed).ok_or_else(|| unsupported("Jones polynomial"))??;
        write_out(out, boxed_poly(CpPoly::new(p.substitute_t(), Variable::T, BTreeMap::new())))
    })
}

/// Monte Carlo projection-averaged bracket in `A`.
#[no_mangle]
pub unsafe extern "C" fn cp_bracket_mc(
    chain: *const CpChain,
    samples: u64,
    seed: u64,
    out: *mut *mut CpPoly,
) -> CpStatus {
    guard(|| {
        let est = montecarlo::mc_bracket(chain_ref(chain)?, samples, seed)?;
        write_out(out, boxed_poly(CpPoly::new(est.mean, Variable::A, est.stderr)))
    })
}

/// Monte Carlo Jones polynomial in `t`.
#[no_mangle]
pub unsafe extern "C" fn cp_jones_mc(chain: *const CpChain, samples: u64, seed: u64, out: *mut *mut CpPoly) -> CpStatus {
    guard(|| {
        let est = montecarlo::mc_jones(chain_ref(chain)?, samples, seed)?.substitute_t();
        write_out(out, boxed_poly(CpPoly::new(est.mean, Variable::T, est.stderr)))
    })
}

/// Releases a polynomial; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cp_poly_free(poly: *mut CpPoly) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

unsafe fn poly_ref<'a>(p: *const CpPoly) -> Result<&'a CpPoly, Failure> {
    p.as_ref().ok_or_else(|| null("polynomial"))
}

#[no_mangle]
pub unsafe extern "C" fn cp_poly_variable(poly: *const CpPoly, out: *mut CpVariable) -> CpStatus {
    guard(|| {
        let v = match poly_ref(poly)?.variable {
            Variable::A => CpVariable::A,
            Variable::T => CpVariable::T,
        };
        write_out(out, v)
    })
}

/// Number of nonzero terms.
#[no_mangle]
pub unsafe extern "C" fn cp_poly_len(poly: *const CpPoly, out: *mut usize) -> CpStatus {
    guard(|| write_out(out, poly_ref(poly)?.terms.len()))
}

/// Term `index` in descending exponent order. The exponent is in quarter
/// units (`t^(3/2)` has `quarter_exp = 6`); `stderr` is 0 for closed forms.
/// Any of the out-pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn cp_poly_term(
    poly: *const CpPoly,
    index: usize,
    quarter_exp: *mut i32,
    coeff: *mut f64,
    stderr: *mut f64,
) -> CpStatus {
    guard(|| {
        let p = poly_ref(poly)?;
        let &(e, c) = p.terms.get(index).ok_or_else(|| {
            Failure::Status(CpStatus::InvalidArgument, format!("term index {index} out of range"))
        })?;
        if !quarter_exp.is_null() {
            quarter_exp.write(e);
        }
        if !coeff.is_null() {
            coeff.write(c);
        }
        if !stderr.is_null() {
            stderr.write(p.stderr.get(&e).copied().unwrap_or(0.0));
        }
        Ok(())
    })
}

/// Value of the polynomial at `x > 0`.
#[no_mangle]
pub unsafe extern "C" fn cp_poly_eval(poly: *const CpPoly, x: f64, out: *mut f64) -> CpStatus {
    guard(|| write_out(out, poly_ref(poly)?.poly.eval(x)?))
}

/// Text rendering such as `t + t^(3/2) - t^(5/2)`; free with [`cp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cp_poly_to_string(poly: *const CpPoly, out: *mut *mut c_char) -> CpStatus {
    guard(|| {
        let p = poly_ref(poly)?;
        let s = CString::new(p.poly.display(p.variable).to_string()).expect("no interior NUL");
        write_out(out, s.into_raw())
    })
}

/// Releases a string returned by this library; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
