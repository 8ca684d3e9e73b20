use std::ffi::{CStr, CString};
use std::ptr;

use hyperpinn_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(hp_last_error()) }.to_string_lossy().into_owned()
}

fn init(problem: &str, model: &str) -> *mut HpModel {
    let mut m = ptr::null_mut();
    let st = unsafe { hp_model_init(cstr(problem).as_ptr(), cstr(model).as_ptr(), 3, &mut m) };
    assert_eq!(st, HpStatus::HpOk, "{}", last_error());
    m
}

#[test]
fn burgers_hyper_round_trip_through_a_file() {
    let m = init("burgers", "hyperpinn");
    let (mut evaluated, mut trainable) = (0usize, 0usize);
    assert_eq!(unsafe { hp_model_param_counts(m, &mut evaluated, &mut trainable) }, HpStatus::HpOk);
    assert_eq!((evaluated, trainable), (393, 9385));

    let t = [0.0, 0.5, 1.0];
    let x = [-0.5, 0.0, 0.5];
    let mut u = [0.0; 3];
    assert_eq!(unsafe { hp_burgers_predict(m, 0.01, t.as_ptr(), x.as_ptr(), 3, u.as_mut_ptr()) }, HpStatus::HpOk);
    assert!(u.iter().all(|v| v.is_finite()));

    let dir = tempfile::tempdir().unwrap();
    let path = cstr(dir.path().join("m.hpnn").to_str().unwrap());
    assert_eq!(unsafe { hp_model_save(m, path.as_ptr()) }, HpStatus::HpOk);
    let mut loaded = ptr::null_mut();
    assert_eq!(unsafe { hp_model_load(path.as_ptr(), &mut loaded) }, HpStatus::HpOk, "{}", last_error());
    let mut u2 = [0.0; 3];
    unsafe { hp_burgers_predict(loaded, 0.01, t.as_ptr(), x.as_ptr(), 3, u2.as_mut_ptr()) };
    assert_eq!(u, u2);

    let mut problem = HpProblem::HpLorenz;
    assert_eq!(unsafe { hp_model_problem(loaded, &mut problem) }, HpStatus::HpOk);
    assert_eq!(problem, HpProblem::HpBurgers);
    unsafe {
        hp_model_free(m);
        hp_model_free(loaded);
    }
}

#[test]
fn generate_main_reports_size_and_checks_buffer() {
    let m = init("burgers", "hyperpinn");
    let lambda = [0.5];
    let mut buf = vec![0.0; 393];
    let mut written = 0usize;
    let st = unsafe { hp_generate_main(m, lambda.as_ptr(), 1, buf.as_mut_ptr(), buf.len(), &mut written) };
    assert_eq!(st, HpStatus::HpOk);
    assert_eq!(written, 393);
    let mut small = vec![0.0; 10];
    let st = unsafe { hp_generate_main(m, lambda.as_ptr(), 1, small.as_mut_ptr(), small.len(), &mut written) };
    assert_eq!(st, HpStatus::HpErrArgument);
    assert_eq!(written, 393);
    let bad_lambda = [0.5, 0.1];
    let st = unsafe { hp_generate_main(m, bad_lambda.as_ptr(), 2, buf.as_mut_ptr(), buf.len(), &mut written) };
    assert_eq!(st, HpStatus::HpErrConfig);
    assert!(last_error().contains("parameterization"));
    unsafe { hp_model_free(m) };

    let plain = init("burgers", "small_baseline");
    let st = unsafe { hp_generate_main(plain, lambda.as_ptr(), 1, buf.as_mut_ptr(), buf.len(), &mut written) };
    assert_eq!(st, HpStatus::HpErrConfig);
    unsafe { hp_model_free(plain) };
}

#[test]
fn lorenz_rhs_and_problem_checks() {
    let m = init("lorenz", "large_baseline");
    let states = [1.0, 2.0, 3.0, -4.0, 0.5, 20.0];
    let mut out = [f64::NAN; 6];
    let st = unsafe { hp_lorenz_rhs(m, 10.0, 8.0 / 3.0, 28.0, states.as_ptr(), 2, out.as_mut_ptr()) };
    assert_eq!(st, HpStatus::HpOk);
    assert!(out.iter().all(|v| v.is_finite()));
    let mut u = [0.0];
    let st = unsafe { hp_burgers_predict(m, 0.01, [0.0].as_ptr(), [0.0].as_ptr(), 1, u.as_mut_ptr()) };
    assert_eq!(st, HpStatus::HpErrConfig);
    unsafe { hp_model_free(m) };
}

#[test]
fn bad_arguments_are_reported() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { hp_model_load(ptr::null(), &mut m) }, HpStatus::HpErrArgument);
    assert!(last_error().contains("null"));
    let missing = cstr("/nonexistent/model.hpnn");
    assert_eq!(unsafe { hp_model_load(missing.as_ptr(), &mut m) }, HpStatus::HpErrData);
    let st = unsafe { hp_model_init(cstr("heat").as_ptr(), cstr("hyperpinn").as_ptr(), 0, &mut m) };
    assert_eq!(st, HpStatus::HpErrConfig);
    assert!(m.is_null());
    assert_eq!(unsafe { hp_model_param_counts(ptr::null(), ptr::null_mut(), ptr::null_mut()) }, HpStatus::HpErrArgument);
    unsafe { hp_model_free(ptr::null_mut()) };

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("junk.hpnn");
    std::fs::write(&p, b"HPNN garbage").unwrap();
    let p = cstr(p.to_str().unwrap());
    assert_eq!(unsafe { hp_model_load(p.as_ptr(), &mut m) }, HpStatus::HpErrData);
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hyperpinn.h")).unwrap();
    for name in [
        "hp_model_load",
        "hp_model_init",
        "hp_model_free",
        "hp_burgers_predict",
        "hp_lorenz_rhs",
        "hp_generate_main",
        "hp_model_param_counts",
        "hp_last_error",
        "typedef struct HpModel HpModel",
        "HP_ERR_CONFIG = 2",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
