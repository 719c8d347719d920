//! C bindings for `fourier-qml`.
//!
//! Every function returns an [`FqmlStatus`]; results come back through out
//! pointers. Objects are opaque handles released with the matching `*_free`
//! function. After a failure, `fqml_last_error_message` describes it; the
//! message lives in thread-local storage until the next failing call on the
//! same thread.
//!
//! # Safety
//!
//! Pointer arguments must be null or valid for the access implied by their
//! type: handles must come from this library and not yet be freed, arrays
//! must hold at least the stated number of elements, and strings must be
//! NUL-terminated. Null pointers are reported as `NullPointer`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fourier_qml::document::{DocumentError, ModelSpecDocument, TargetDocument};
use fourier_qml::fourier::{self, FourierCoefficients, FourierError};
use fourier_qml::output;
use fourier_qml::simulator::{CircuitModel, SimError};
use fourier_qml::spectra::{self, EncodingHamiltonian, FrequencySpectrum, SpectrumError};
use fourier_qml::universal::{self, UniversalError, UniversalModel};

/// Status codes; the nonzero values match the exit codes of the
/// `fourier-qml` command line where both exist.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FqmlStatus {
    Ok = 0,
    Error = 1,
    InvalidInput = 2,
    Incommensurable = 3,
    TooManyPaths = 4,
    DimensionCap = 6,
    NullPointer = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

pub struct FqmlModel {
    model: CircuitModel,
}

pub struct FqmlSpectrum {
    spectrum: FrequencySpectrum,
}

pub struct FqmlCoefficients {
    coeffs: FourierCoefficients,
    /// Snapshot of `coeffs` in ascending frequency order for indexed access.
    entries: Vec<(Vec<f64>, f64, f64)>,
}

pub struct FqmlUniversal {
    built: UniversalModel,
    target: universal::TargetSeries,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(FqmlStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(FqmlStatus::NullPointer, format!("{what} is null"))
    }
    fn input(msg: impl Into<String>) -> Self {
        Failure(FqmlStatus::InvalidInput, msg.into())
    }
}

fn sim_status(e: &SimError) -> FqmlStatus {
    match e {
        SimError::TooManyQubits { .. } => FqmlStatus::DimensionCap,
        SimError::ParamCountMismatch { .. }
        | SimError::FeatureCountMismatch { .. }
        | SimError::NonFiniteInput
        | SimError::InvalidModel(_)
        | SimError::QubitOutOfRange { .. } => FqmlStatus::InvalidInput,
        _ => FqmlStatus::Error,
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        Failure(sim_status(&e), e.to_string())
    }
}

impl From<SpectrumError> for Failure {
    fn from(e: SpectrumError) -> Self {
        let status = match e {
            SpectrumError::Incommensurable { .. } => FqmlStatus::Incommensurable,
            _ => FqmlStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

impl From<FourierError> for Failure {
    fn from(e: FourierError) -> Self {
        let status = match &e {
            FourierError::TooManyPaths { .. } => FqmlStatus::TooManyPaths,
            FourierError::NonIntegerSpectrum => FqmlStatus::InvalidInput,
            FourierError::Sim(s) => sim_status(s),
            _ => FqmlStatus::Error,
        };
        Failure(status, e.to_string())
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        let status = match &e {
            DocumentError::Model(s) => sim_status(s),
            DocumentError::Target(UniversalError::DimensionCap { .. }) => FqmlStatus::DimensionCap,
            _ => FqmlStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

impl From<UniversalError> for Failure {
    fn from(e: UniversalError) -> Self {
        let status = match &e {
            UniversalError::DimensionCap { .. } => FqmlStatus::DimensionCap,
            UniversalError::InvalidTarget(_) => FqmlStatus::InvalidInput,
            UniversalError::Sim(s) => sim_status(s),
            UniversalError::Fourier(_) => FqmlStatus::Error,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FqmlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FqmlStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FqmlStatus::Panic
        }
    }
}

unsafe fn reference<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(Failure::null(what))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::input(format!("{what} is not valid UTF-8")))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message for the most recent failure on this thread, or null. Owned by the
/// library; valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fqml_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn fqml_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- models ----

/// Parses a model spec JSON document.
#[no_mangle]
pub unsafe extern "C" fn fqml_model_from_json(json: *const c_char, out: *mut *mut FqmlModel) -> FqmlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let doc = ModelSpecDocument::parse(text(json, "json")?)?;
        *out = boxed(FqmlModel { model: doc.build()? });
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fqml_model_free(model: *mut FqmlModel) {
    free(model)
}

#[no_mangle]
pub unsafe extern "C" fn fqml_model_param_count(model: *const FqmlModel, out: *mut usize) -> FqmlStatus {
    guard(|| {
        *out_ptr(out, "out")? = reference(model, "model")?.model.param_count();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fqml_model_n_qubits(model: *const FqmlModel, out: *mut usize) -> FqmlStatus {
    guard(|| {
        *out_ptr(out, "out")? = reference(model, "model")?.model.n_qubits();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fqml_model_n_features(model: *const FqmlModel, out: *mut usize) -> FqmlStatus {
    guard(|| {
        *out_ptr(out, "out")? = reference(model, "model")?.model.n_features();
        Ok(())
    })
}

/// `f(x; θ)` for one input of `n_x` features.
#[no_mangle]
pub unsafe extern "C" fn fqml_model_evaluate(
    model: *const FqmlModel,
    params: *const f64,
    n_params: usize,
    x: *const f64,
    n_x: usize,
    out: *mut f64,
) -> FqmlStatus {
    guard(|| {
        let model = reference(model, "model")?;
        let out = out_ptr(out, "out")?;
        *out = model.model.evaluate(slice(params, n_params, "params")?, slice(x, n_x, "x")?)?;
        Ok(())
    })
}

/// The model as model spec JSON; release with `fqml_string_free`.
#[no_mangle]
pub unsafe extern "C" fn fqml_model_to_json(model: *const FqmlModel, out: *mut *mut c_char) -> FqmlStatus {
    guard(|| {
        let model = reference(model, "model")?;
        let out = out_ptr(out, "out")?;
        let json = ModelSpecDocument::from_model(&model.model, None).to_json();
        *out = CString::new(json).expect("JSON has no interior NUL").into_raw();
        Ok(())
    })
}

// ---- spectra ----

/// Ω for `layers` repetitions of a generator with the given eigenvalues.
#[no_mangle]
pub unsafe extern "C" fn fqml_spectrum_from_eigenvalues(
    eigenvalues: *const f64,
    n: usize,
    layers: usize,
    out: *mut *mut FqmlSpectrum,
) -> FqmlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let h = EncodingHamiltonian::new(slice(eigenvalues, n, "eigenvalues")?.to_vec())?;
        *out = boxed(FqmlSpectrum { spectrum: spectra::frequency_spectrum(&h, layers)? });
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fqml_spectrum_parallel_pauli(r: usize, out: *mut *mut FqmlSpectrum) -> FqmlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if r > 24 {
            return Err(Failure::input(format!("{r} parallel encodings is too many to enumerate")));
        }
        *out = boxed(FqmlSpectrum { spectrum: spectra::parallel_pauli_spectrum(r)? });
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fqml_spectrum_sequential_pauli(r: usize, out: *mut *mut FqmlSpectrum) -> FqmlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(FqmlSpectrum { spectrum: spectra::sequential_pauli_spectrum(r)? });
        Ok(())
    })
}

/// Spectrum of the model's encoding for one feature.
#[no_mangle]
pub unsafe extern "C" fn fqml_spectrum_of_model(
    model: *const FqmlModel,
    feature: usize,
    out: *mut *mut FqmlSpectrum,
) -> FqmlStatus {
    guard(|| {
        let model = reference(model, "model")?;
        let out = out_ptr(out, "out")?;
        let mut spectra = model.model.feature_spectra()?;
        if feature >= spectra.len() {
            return Err(Failure::input(format!("feature {feature} out of range")));
        }
        *out = boxed(FqmlSpectrum { spectrum: spectra.swap_remove(feature) });
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fqml_spectrum_free(spectrum: *mut FqmlSpectrum) {
    free(spectrum)
}

/// Number of frequencies `|Ω|`.
#[no_mangle]
pub unsafe extern "C" fn fqml_spectrum_len(spectrum: *const FqmlSpectrum, out: *mut usize) -> FqmlStatus {
    guard(|| {
        *out_ptr(out, "out")? = reference(spectrum, "spectrum")?.spectrum.len();
        Ok(())
    })
}

/// Size `K = (|Ω| − 1)/2`.
#[no_mangle]
pub unsafe extern "C" fn fqml_spectrum_size(spectrum: *const FqmlSpectrum, out: *mut usize) -> FqmlStatus {
    guard(|| {
        *out_ptr(out, "out")? = reference(spectrum, "spectrum")?.spectrum.size();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fqml_spectrum_degree(spectrum: *const FqmlSpectrum, out: *mut f64) -> FqmlStatus {
    guard(|| {
        *out_ptr(out, "out")? = reference(spectrum, "spectrum")?.spectrum.degree();
        Ok(())
    })
}

/// Copies the ascending frequencies into `buf`. Fails with
/// `BufferTooSmall` when `cap < |Ω|`; `len` always receives `|Ω|`.
#[no_mangle]
pub unsafe extern "C" fn fqml_spectrum_frequencies(
    spectrum: *const FqmlSpectrum,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> FqmlStatus {
    guard(|| {
        let freqs = reference(spectrum, "spectrum")?.spectrum.frequencies();
        *out_ptr(len, "len")? = freqs.len();
        if cap < freqs.len() {
            return Err(Failure(FqmlStatus::BufferTooSmall, format!("need room for {} values", freqs.len())));
        }
        if !freqs.is_empty() {
            if buf.is_null() {
                return Err(Failure::null("buf"));
            }
            ptr::copy_nonoverlapping(freqs.as_ptr(), buf, freqs.len());
        }
        Ok(())
    })
}

/// Integer form `ω = n·ω₀` of a commensurable spectrum.
#[no_mangle]
pub unsafe extern "C" fn fqml_spectrum_rescale(
    spectrum: *const FqmlSpectrum,
    omega0: *mut f64,
    out: *mut *mut FqmlSpectrum,
) -> FqmlStatus {
    guard(|| {
        let spectrum = reference(spectrum, "spectrum")?;
        let omega0 = out_ptr(omega0, "omega0")?;
        let out = out_ptr(out, "out")?;
        let (base, ints) = spectra::rescale_to_integer(&spectrum.spectrum)?;
        *omega0 = base;
        *out = boxed(FqmlSpectrum { spectrum: ints });
        Ok(())
    })
}

/// `⌊d^{2L}/2⌋ − 1`.
#[no_mangle]
pub unsafe extern "C" fn fqml_spectrum_size_bound(d: u64, layers: u32, out: *mut u64) -> FqmlStatus {
    guard(|| {
        *out_ptr(out, "out")? = spectra::spectrum_size_bound(d, layers)?;
        Ok(())
    })
}

// ---- coefficients ----

fn wrap_coefficients(coeffs: FourierCoefficients) -> *mut FqmlCoefficients {
    let entries = coeffs.iter().map(|(w, c)| (w.to_vec(), c.re, c.im)).collect();
    boxed(FqmlCoefficients { coeffs, entries })
}

/// Coefficients by path expansion.
#[no_mangle]
pub unsafe extern "C" fn fqml_coefficients_exact(
    model: *const FqmlModel,
    params: *const f64,
    n_params: usize,
    out: *mut *mut FqmlCoefficients,
) -> FqmlStatus {
    guard(|| {
        let model = reference(model, "model")?;
        let out = out_ptr(out, "out")?;
        *out = wrap_coefficients(fourier::coefficients_exact(&model.model, slice(params, n_params, "params")?)?);
        Ok(())
    })
}

/// Coefficients by sampling on an equidistant grid; requires an integer spectrum.
#[no_mangle]
pub unsafe extern "C" fn fqml_coefficients_dft(
    model: *const FqmlModel,
    params: *const f64,
    n_params: usize,
    out: *mut *mut FqmlCoefficients,
) -> FqmlStatus {
    guard(|| {
        let model = reference(model, "model")?;
        let out = out_ptr(out, "out")?;
        let spectrum = fourier::dft_spectrum(&model.model)?;
        let params = slice(params, n_params, "params")?;
        *out = wrap_coefficients(fourier::coefficients_dft(&model.model, params, &spectrum)?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fqml_coefficients_free(coeffs: *mut FqmlCoefficients) {
    free(coeffs)
}

#[no_mangle]
pub unsafe extern "C" fn fqml_coefficients_len(coeffs: *const FqmlCoefficients, out: *mut usize) -> FqmlStatus {
    guard(|| {
        *out_ptr(out, "out")? = reference(coeffs, "coeffs")?.entries.len();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fqml_coefficients_n_features(coeffs: *const FqmlCoefficients, out: *mut usize) -> FqmlStatus {
    guard(|| {
        *out_ptr(out, "out")? = reference(coeffs, "coeffs")?.coeffs.n_features();
        Ok(())
    })
}

/// Entry `index` in ascending frequency order. `freq` receives
/// `n_features` values.
#[no_mangle]
pub unsafe extern "C" fn fqml_coefficients_entry(
    coeffs: *const FqmlCoefficients,
    index: usize,
    freq: *mut f64,
    freq_cap: usize,
    re: *mut f64,
    im: *mut f64,
) -> FqmlStatus {
    guard(|| {
        let coeffs = reference(coeffs, "coeffs")?;
        let (w, r, i) = coeffs
            .entries
            .get(index)
            .ok_or_else(|| Failure::input(format!("index {index} out of range")))?;
        if freq_cap < w.len() {
            return Err(Failure(FqmlStatus::BufferTooSmall, format!("need room for {} values", w.len())));
        }
        let re = out_ptr(re, "re")?;
        let im = out_ptr(im, "im")?;
        if freq.is_null() {
            return Err(Failure::null("freq"));
        }
        ptr::copy_nonoverlapping(w.as_ptr(), freq, w.len());
        *re = *r;
        *im = *i;
        Ok(())
    })
}

/// `c_ω`, zero when `ω` is not stored.
#[no_mangle]
pub unsafe extern "C" fn fqml_coefficients_get(
    coeffs: *const FqmlCoefficients,
    freq: *const f64,
    n: usize,
    re: *mut f64,
    im: *mut f64,
) -> FqmlStatus {
    guard(|| {
        let coeffs = reference(coeffs, "coeffs")?;
        let freq = slice(freq, n, "freq")?;
        if n != coeffs.coeffs.n_features() {
            return Err(Failure::input(format!("expected {} frequency components", coeffs.coeffs.n_features())));
        }
        let c = coeffs.coeffs.get(freq);
        *out_ptr(re, "re")? = c.re;
        *out_ptr(im, "im")? = c.im;
        Ok(())
    })
}

/// Evaluates the series at `x`.
#[no_mangle]
pub unsafe extern "C" fn fqml_coefficients_eval(
    coeffs: *const FqmlCoefficients,
    x: *const f64,
    n_x: usize,
    out: *mut f64,
) -> FqmlStatus {
    guard(|| {
        let coeffs = reference(coeffs, "coeffs")?;
        *out_ptr(out, "out")? = fourier::eval_series(&coeffs.coeffs, slice(x, n_x, "x")?)?;
        Ok(())
    })
}

/// CSV `freq,re,im`; release with `fqml_string_free`.
#[no_mangle]
pub unsafe extern "C" fn fqml_coefficients_to_csv(coeffs: *const FqmlCoefficients, out: *mut *mut c_char) -> FqmlStatus {
    guard(|| {
        let coeffs = reference(coeffs, "coeffs")?;
        let out = out_ptr(out, "out")?;
        *out = CString::new(output::coefficients_csv(&coeffs.coeffs)).expect("CSV has no interior NUL").into_raw();
        Ok(())
    })
}

// ---- universal construction ----

/// Builds a model realising the target series JSON exactly.
#[no_mangle]
pub unsafe extern "C" fn fqml_universal_from_target_json(
    json: *const c_char,
    out: *mut *mut FqmlUniversal,
) -> FqmlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let target = TargetDocument::parse(text(json, "json")?)?.build()?;
        let built = universal::build_universal_model(&target)?;
        *out = boxed(FqmlUniversal { built, target });
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fqml_universal_free(u: *mut FqmlUniversal) {
    free(u)
}

/// Largest `|f(x) − g(x)|` at `n_points` seeded random inputs.
#[no_mangle]
pub unsafe extern "C" fn fqml_universal_verify(
    u: *const FqmlUniversal,
    n_points: usize,
    seed: u64,
    max_error: *mut f64,
) -> FqmlStatus {
    guard(|| {
        let u = reference(u, "universal")?;
        *out_ptr(max_error, "max_error")? = universal::verify_universal(&u.built, &u.target, n_points, seed)?;
        Ok(())
    })
}

/// A copy of the constructed circuit as a model handle.
#[no_mangle]
pub unsafe extern "C" fn fqml_universal_model(u: *const FqmlUniversal, out: *mut *mut FqmlModel) -> FqmlStatus {
    guard(|| {
        let u = reference(u, "universal")?;
        *out_ptr(out, "out")? = boxed(FqmlModel { model: u.built.model.clone() });
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fqml_universal_n_qubits(u: *const FqmlUniversal, out: *mut usize) -> FqmlStatus {
    guard(|| {
        *out_ptr(out, "out")? = reference(u, "universal")?.built.model.n_qubits();
        Ok(())
    })
}
