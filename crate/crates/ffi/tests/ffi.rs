use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use fourier_qml_ffi::*;

const RX_MODEL: &str = r#"{"n_qubits": 1, "n_features": 1,
    "layers": [{"trainable": {"kind": "fixed", "entries": [[1,0],[0,0],[0,0],[1,0]]},
                "encoding": {"kind": "pauli", "axis": "X", "qubit": 0}}],
    "final_trainable": {"kind": "ansatz", "circuit": "A", "sublayers": 1},
    "observable": {"kind": "pauli_z", "qubit": 0}}"#;

fn last_error() -> String {
    let p = fqml_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn model(json: &str) -> *mut FqmlModel {
    let json = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { fqml_model_from_json(json.as_ptr(), &mut out) }, FqmlStatus::Ok);
    out
}

#[test]
fn model_round_trip() {
    let m = model(RX_MODEL);
    let mut n = 0usize;
    unsafe {
        assert_eq!(fqml_model_param_count(m, &mut n), FqmlStatus::Ok);
        assert_eq!(n, 3);
        assert_eq!(fqml_model_n_qubits(m, &mut n), FqmlStatus::Ok);
        assert_eq!(n, 1);
        assert_eq!(fqml_model_n_features(m, &mut n), FqmlStatus::Ok);
        assert_eq!(n, 1);

        let params = [0.0; 3];
        let x = 1.3;
        let mut f = 0.0;
        assert_eq!(fqml_model_evaluate(m, params.as_ptr(), 3, &x, 1, &mut f), FqmlStatus::Ok);
        assert!((f - x.cos()).abs() < 1e-12);
        assert_eq!(fqml_model_evaluate(m, params.as_ptr(), 2, &x, 1, &mut f), FqmlStatus::InvalidInput);
        assert!(last_error().contains('3'));

        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(fqml_model_to_json(m, &mut json), FqmlStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_string();
        fqml_string_free(json);
        let again = model(&text);
        let mut g = 0.0;
        assert_eq!(fqml_model_evaluate(again, params.as_ptr(), 3, &x, 1, &mut g), FqmlStatus::Ok);
        assert_eq!(f, g);
        fqml_model_free(again);
        fqml_model_free(m);
    }
}

#[test]
fn spectra() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(fqml_spectrum_parallel_pauli(3, &mut s), FqmlStatus::Ok);
        let mut len = 0;
        let mut buf = [0.0; 7];
        assert_eq!(fqml_spectrum_frequencies(s, buf.as_mut_ptr(), 2, &mut len), FqmlStatus::BufferTooSmall);
        assert_eq!(len, 7);
        assert_eq!(fqml_spectrum_frequencies(s, buf.as_mut_ptr(), 7, &mut len), FqmlStatus::Ok);
        assert_eq!(buf, [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        let mut k = 0;
        assert_eq!(fqml_spectrum_size(s, &mut k), FqmlStatus::Ok);
        assert_eq!(k, 3);
        fqml_spectrum_free(s);

        let eig = [-0.75, -0.25, 0.75];
        assert_eq!(fqml_spectrum_from_eigenvalues(eig.as_ptr(), 3, 1, &mut s), FqmlStatus::Ok);
        let mut d = 0.0;
        assert_eq!(fqml_spectrum_degree(s, &mut d), FqmlStatus::Ok);
        assert_eq!(d, 1.5);
        let (mut w0, mut ints) = (0.0, ptr::null_mut());
        assert_eq!(fqml_spectrum_rescale(s, &mut w0, &mut ints), FqmlStatus::Ok);
        assert_eq!(w0, 0.5);
        assert_eq!(fqml_spectrum_degree(ints, &mut d), FqmlStatus::Ok);
        assert_eq!(d, 3.0);
        fqml_spectrum_free(ints);
        fqml_spectrum_free(s);

        let eig = [0.0, 1.0, std::f64::consts::PI];
        assert_eq!(fqml_spectrum_from_eigenvalues(eig.as_ptr(), 3, 1, &mut s), FqmlStatus::Ok);
        assert_eq!(fqml_spectrum_rescale(s, &mut w0, &mut ints), FqmlStatus::Incommensurable);
        fqml_spectrum_free(s);

        let mut b = 0u64;
        assert_eq!(fqml_spectrum_size_bound(2, 3, &mut b), FqmlStatus::Ok);
        assert_eq!(b, 31);
        assert_eq!(fqml_spectrum_size_bound(0, 3, &mut b), FqmlStatus::InvalidInput);

        let m = model(RX_MODEL);
        assert_eq!(fqml_spectrum_of_model(m, 0, &mut s), FqmlStatus::Ok);
        assert_eq!(fqml_spectrum_size(s, &mut k), FqmlStatus::Ok);
        assert_eq!(k, 1);
        fqml_spectrum_free(s);
        assert_eq!(fqml_spectrum_of_model(m, 1, &mut s), FqmlStatus::InvalidInput);
        fqml_model_free(m);
    }
}

#[test]
fn coefficients() {
    unsafe {
        let m = model(RX_MODEL);
        let params = [0.4, 1.2, -0.3];
        let (mut exact, mut dft) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(fqml_coefficients_exact(m, params.as_ptr(), 3, &mut exact), FqmlStatus::Ok);
        assert_eq!(fqml_coefficients_dft(m, params.as_ptr(), 3, &mut dft), FqmlStatus::Ok);
        let mut len = 0;
        assert_eq!(fqml_coefficients_len(exact, &mut len), FqmlStatus::Ok);
        assert_eq!(len, 3);
        for i in 0..len {
            let (mut w, mut re, mut im) = (0.0, 0.0, 0.0);
            assert_eq!(fqml_coefficients_entry(exact, i, &mut w, 1, &mut re, &mut im), FqmlStatus::Ok);
            let (mut re2, mut im2) = (0.0, 0.0);
            assert_eq!(fqml_coefficients_get(dft, &w, 1, &mut re2, &mut im2), FqmlStatus::Ok);
            assert!((re - re2).abs() < 1e-10 && (im - im2).abs() < 1e-10);
        }
        let mut w = 0.0;
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(fqml_coefficients_entry(exact, 3, &mut w, 1, &mut re, &mut im), FqmlStatus::InvalidInput);

        let x = 0.9;
        let (mut f, mut g) = (0.0, 0.0);
        assert_eq!(fqml_model_evaluate(m, params.as_ptr(), 3, &x, 1, &mut f), FqmlStatus::Ok);
        assert_eq!(fqml_coefficients_eval(exact, &x, 1, &mut g), FqmlStatus::Ok);
        assert!((f - g).abs() < 1e-12);

        let mut csv = ptr::null_mut();
        assert_eq!(fqml_coefficients_to_csv(exact, &mut csv), FqmlStatus::Ok);
        assert!(CStr::from_ptr(csv).to_str().unwrap().starts_with("freq,re,im\n-1,"));
        fqml_string_free(csv);
        fqml_coefficients_free(exact);
        fqml_coefficients_free(dft);
        fqml_model_free(m);
    }
}

#[test]
fn universal() {
    let target = CString::new(
        r#"{"degree": 2, "coefficients": [{"freq": 0, "c": [0.1, 0]}, {"freq": 1, "c": [0.15, -0.15]},
            {"freq": 2, "c": [-0.05, 0.02]}]}"#,
    )
    .unwrap();
    unsafe {
        let mut u = ptr::null_mut();
        assert_eq!(fqml_universal_from_target_json(target.as_ptr(), &mut u), FqmlStatus::Ok);
        let mut n = 0;
        assert_eq!(fqml_universal_n_qubits(u, &mut n), FqmlStatus::Ok);
        assert_eq!(n, 2);
        let mut err = 1.0;
        assert_eq!(fqml_universal_verify(u, 100, 3, &mut err), FqmlStatus::Ok);
        assert!(err <= 1e-8);
        let mut m = ptr::null_mut();
        assert_eq!(fqml_universal_model(u, &mut m), FqmlStatus::Ok);
        let mut c = ptr::null_mut();
        assert_eq!(fqml_coefficients_exact(m, ptr::null(), 0, &mut c), FqmlStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(fqml_coefficients_get(c, &2.0, 1, &mut re, &mut im), FqmlStatus::Ok);
        assert!((re + 0.05).abs() < 1e-10 && (im - 0.02).abs() < 1e-10);
        fqml_coefficients_free(c);
        fqml_model_free(m);
        fqml_universal_free(u);

        let bad = CString::new(r#"{"degree": 1, "coefficients": [{"freq": 0, "c": [0, 1]}]}"#).unwrap();
        assert_eq!(fqml_universal_from_target_json(bad.as_ptr(), &mut u), FqmlStatus::InvalidInput);
    }
}

#[test]
fn null_and_malformed_inputs() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(fqml_model_from_json(ptr::null(), &mut out), FqmlStatus::NullPointer);
        assert!(last_error().contains("json"));
        let json = CString::new(RX_MODEL).unwrap();
        assert_eq!(fqml_model_from_json(json.as_ptr(), ptr::null_mut()), FqmlStatus::NullPointer);
        let bad = CString::new(RX_MODEL.replace("\"X\"", "\"W\"")).unwrap();
        assert_eq!(fqml_model_from_json(bad.as_ptr(), &mut out), FqmlStatus::InvalidInput);
        assert!(last_error().contains("layers[0].encoding"));
        let mut n = 0;
        assert_eq!(fqml_model_param_count(ptr::null(), &mut n), FqmlStatus::NullPointer);
        let mut s = ptr::null_mut();
        assert_eq!(fqml_spectrum_from_eigenvalues(ptr::null(), 2, 1, &mut s), FqmlStatus::NullPointer);
        assert_eq!(fqml_spectrum_from_eigenvalues(ptr::null(), 0, 1, &mut s), FqmlStatus::InvalidInput);
        // freeing null is a no-op
        fqml_model_free(ptr::null_mut());
        fqml_spectrum_free(ptr::null_mut());
        fqml_coefficients_free(ptr::null_mut());
        fqml_universal_free(ptr::null_mut());
        fqml_string_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_thread_local() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(fqml_model_from_json(ptr::null(), &mut out), FqmlStatus::NullPointer);
    }
    let other = std::thread::spawn(|| fqml_last_error_message().is_null()).join().unwrap();
    assert!(other);
    assert!(!fqml_last_error_message().is_null());
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/fourier_qml.h")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "typedef struct FqmlModel FqmlModel;",
        "FQML_STATUS_TOO_MANY_PATHS = 4",
        "FqmlStatus fqml_model_from_json(const char *json, FqmlModel **out);",
        "const char *fqml_last_error_message(void);",
        "fqml_coefficients_exact",
        "fqml_universal_verify",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
}

/// Compiles and links a C program against the static library when a C
/// compiler is available.
#[test]
fn c_program_links_against_the_static_library() {
    let Ok(exe) = std::env::current_exe() else { return };
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libfourier_qml_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: static library or C compiler unavailable");
        return;
    }
    let dir = tempfile_dir();
    let bin = dir.join("smoke");
    let src = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
    let _ = std::fs::remove_dir_all(dir);
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fqml-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
