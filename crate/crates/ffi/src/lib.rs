//! C interface to trained HyperPINN models.
//!
//! Every fallible function returns an [`HpStatus`]. On failure a message for
//! the calling thread is available from [`hp_last_error`] until the next call
//! into this library on that thread. Models are opaque [`HpModel`] handles
//! released with [`hp_model_free`]. Panics never cross the boundary; they are
//! reported as [`HpStatus::HpErrPanic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use hyperpinn::burgers::predict_points;
use hyperpinn::experiment::load_model;
use hyperpinn::lorenz::{Dynamics, LearnedDynamics, LorenzParams};
use hyperpinn::models::{architecture, init_model, ModelKind, Problem};
use hyperpinn::nets::{ModelFile, Net, Parameterization};
use hyperpinn::Error;

/// Result codes. Codes 2 to 4 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpStatus {
    HpOk = 0,
    /// A required pointer was null, a string was not UTF-8, or a buffer was too small.
    HpErrArgument = 1,
    HpErrConfig = 2,
    HpErrData = 3,
    HpErrNumerical = 4,
    HpErrPanic = 5,
}

/// Problem a model was trained for.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpProblem {
    HpBurgers = 0,
    HpLorenz = 1,
}

/// Opaque model handle.
pub struct HpModel {
    problem: Problem,
    kind: ModelKind,
    net: Net,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HpStatus {
    match e.exit_code() {
        2 => HpStatus::HpErrConfig,
        3 => HpStatus::HpErrData,
        _ => HpStatus::HpErrNumerical,
    }
}

fn fail(status: HpStatus, msg: &str) -> HpStatus {
    set_error(msg);
    status
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), HpStatus>) -> HpStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HpStatus::HpOk,
        Ok(Err(status)) => status,
        Err(_) => fail(HpStatus::HpErrPanic, "internal panic"),
    }
}

fn lib_err(e: Error) -> HpStatus {
    fail(status_of(&e), &e.to_string())
}

fn arg(msg: &str) -> HpStatus {
    fail(HpStatus::HpErrArgument, msg)
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, HpStatus> {
    if p.is_null() {
        return Err(arg(&format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| arg(&format!("{what} is not valid UTF-8")))
}

unsafe fn model_arg<'a>(m: *const HpModel) -> Result<&'a HpModel, HpStatus> {
    m.as_ref().ok_or_else(|| arg("model handle is null"))
}

unsafe fn slice_arg<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], HpStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(arg(&format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn out_arg<'a>(p: *mut f64, n: usize, what: &str) -> Result<&'a mut [f64], HpStatus> {
    if n == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(arg(&format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, n))
}

fn boxed(problem: Problem, kind: ModelKind, net: Net, out: *mut *mut HpModel) -> Result<(), HpStatus> {
    if out.is_null() {
        return Err(arg("output handle pointer is null"));
    }
    unsafe { *out = Box::into_raw(Box::new(HpModel { problem, kind, net })) };
    Ok(())
}

/// Message describing the last failure on this thread (empty after success).
/// The pointer stays valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn hp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads an `.hpnn` file. `*out` receives a handle to release with `hp_model_free`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hp_model_load(path: *const c_char, out: *mut *mut HpModel) -> HpStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let file = ModelFile::load(Path::new(path)).map_err(lib_err)?;
        let problem: Problem = file.problem.parse().map_err(|e: Error| fail(HpStatus::HpErrData, &e.to_string()))?;
        let (kind, net) = load_model(Path::new(path), problem).map_err(lib_err)?;
        boxed(problem, kind, net, out)
    })
}

/// Creates a freshly initialized model, e.g. `("burgers", "hyperpinn", 0)`.
///
/// # Safety
/// `problem` and `model` must be NUL-terminated strings and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hp_model_init(
    problem: *const c_char,
    model: *const c_char,
    seed: u64,
    out: *mut *mut HpModel,
) -> HpStatus {
    guard(|| {
        let problem: Problem = str_arg(problem, "problem")?.parse().map_err(lib_err)?;
        let kind: ModelKind = str_arg(model, "model")?.parse().map_err(lib_err)?;
        let net = init_model(problem, kind, seed).map_err(lib_err)?;
        boxed(problem, kind, net, out)
    })
}

/// Writes the model to an `.hpnn` file.
///
/// # Safety
/// `model` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hp_model_save(model: *const HpModel, path: *const c_char) -> HpStatus {
    guard(|| {
        let m = model_arg(model)?;
        let path = str_arg(path, "path")?;
        ModelFile {
            problem: m.problem.tag().into(),
            model: m.kind.tag().into(),
            net: m.net.clone(),
        }
        .save(Path::new(path))
        .map_err(lib_err)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hp_model_free(model: *mut HpModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Problem the model was trained for.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hp_model_problem(model: *const HpModel, out: *mut HpProblem) -> HpStatus {
    guard(|| {
        let m = model_arg(model)?;
        let out = out.as_mut().ok_or_else(|| arg("output pointer is null"))?;
        *out = match m.problem {
            Problem::Burgers => HpProblem::HpBurgers,
            Problem::Lorenz => HpProblem::HpLorenz,
        };
        Ok(())
    })
}

/// Parameter counts: the network evaluated per query point and the trainable
/// total (the hypernetwork for a HyperPINN). Either pointer may be null.
///
/// # Safety
/// `model` must be a live handle; non-null outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hp_model_param_counts(
    model: *const HpModel,
    evaluated: *mut usize,
    trainable: *mut usize,
) -> HpStatus {
    guard(|| {
        let m = model_arg(model)?;
        let arch = architecture(m.problem, m.kind);
        if let Some(e) = evaluated.as_mut() {
            *e = arch.evaluated_spec().param_count();
        }
        if let Some(t) = trainable.as_mut() {
            *t = arch.trainable_count();
        }
        Ok(())
    })
}

/// Generated main-network parameters for the encoded parameterization
/// `lambda[0..lambda_len]`. `*written` receives the parameter count; the call
/// fails with `HP_ERR_ARGUMENT` if `out_len` is smaller. Only HyperPINN models.
///
/// # Safety
/// Buffers must hold the stated number of values; `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hp_generate_main(
    model: *const HpModel,
    lambda: *const f64,
    lambda_len: usize,
    out: *mut f64,
    out_len: usize,
    written: *mut usize,
) -> HpStatus {
    guard(|| {
        let m = model_arg(model)?;
        let Net::Hyper(h) = &m.net else {
            return Err(fail(HpStatus::HpErrConfig, "model is not a hypernetwork"));
        };
        let lambda = slice_arg(lambda, lambda_len, "lambda")?;
        let params = h.generate_main(&Parameterization(lambda.to_vec())).map_err(lib_err)?;
        let written = written.as_mut().ok_or_else(|| arg("written pointer is null"))?;
        *written = params.len();
        if out_len < params.len() {
            return Err(arg(&format!("output buffer holds {out_len} values, need {}", params.len())));
        }
        out_arg(out, out_len, "out")?[..params.len()].copy_from_slice(params.values());
        Ok(())
    })
}

/// Burgers prediction `u(t[i], x[i])` at viscosity `nu` for `i < n`.
///
/// # Safety
/// `t`, `x` and `out` must each hold `n` values.
#[no_mangle]
pub unsafe extern "C" fn hp_burgers_predict(
    model: *const HpModel,
    nu: f64,
    t: *const f64,
    x: *const f64,
    n: usize,
    out: *mut f64,
) -> HpStatus {
    guard(|| {
        let m = model_arg(model)?;
        if m.problem != Problem::Burgers {
            return Err(fail(HpStatus::HpErrConfig, "model was not trained for burgers"));
        }
        if !(nu > 0.0) {
            return Err(fail(HpStatus::HpErrNumerical, &format!("viscosity must be positive, got {nu}")));
        }
        let ts = slice_arg(t, n, "t")?;
        let xs = slice_arg(x, n, "x")?;
        let out = out_arg(out, n, "out")?;
        let u = predict_points(&m.net, nu, ts, xs).map_err(lib_err)?;
        out.copy_from_slice(&u);
        Ok(())
    })
}

/// Learned Lorenz time derivative at `n` states stored as `x, y, z` triples.
///
/// # Safety
/// `states` and `out` must each hold `3·n` values.
#[no_mangle]
pub unsafe extern "C" fn hp_lorenz_rhs(
    model: *const HpModel,
    sigma: f64,
    beta: f64,
    rho: f64,
    states: *const f64,
    n: usize,
    out: *mut f64,
) -> HpStatus {
    guard(|| {
        let m = model_arg(model)?;
        if m.problem != Problem::Lorenz {
            return Err(fail(HpStatus::HpErrConfig, "model was not trained for lorenz"));
        }
        let states = slice_arg(states, 3 * n, "states")?;
        let out = out_arg(out, 3 * n, "out")?;
        let mut dynamics = LearnedDynamics::new(&m.net, &LorenzParams::new(sigma, beta, rho)).map_err(lib_err)?;
        for (s, o) in states.chunks_exact(3).zip(out.chunks_exact_mut(3)) {
            o.copy_from_slice(&dynamics.eval([s[0], s[1], s[2]]));
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping_follows_exit_codes() {
        assert_eq!(status_of(&Error::config("x")), HpStatus::HpErrConfig);
        assert_eq!(status_of(&Error::load("x")), HpStatus::HpErrData);
        assert_eq!(status_of(&Error::Integrator("x".into())), HpStatus::HpErrNumerical);
    }

    #[test]
    fn panics_are_contained() {
        assert_eq!(guard(|| panic!("boom")), HpStatus::HpErrPanic);
        let msg = unsafe { CStr::from_ptr(hp_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
    }
}
