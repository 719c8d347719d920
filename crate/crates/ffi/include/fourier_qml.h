#ifndef FOURIER_QML_H
#define FOURIER_QML_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Status codes; the nonzero values match the exit codes of the
 * `fourier-qml` command line where both exist.
 */
typedef enum {
  FQML_STATUS_OK = 0,
  FQML_STATUS_ERROR = 1,
  FQML_STATUS_INVALID_INPUT = 2,
  FQML_STATUS_INCOMMENSURABLE = 3,
  FQML_STATUS_TOO_MANY_PATHS = 4,
  FQML_STATUS_DIMENSION_CAP = 6,
  FQML_STATUS_NULL_POINTER = 7,
  FQML_STATUS_BUFFER_TOO_SMALL = 8,
  FQML_STATUS_PANIC = 9,
} FqmlStatus;

typedef struct FqmlCoefficients FqmlCoefficients;

typedef struct FqmlModel FqmlModel;

typedef struct FqmlSpectrum FqmlSpectrum;

typedef struct FqmlUniversal FqmlUniversal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. Owned by the
 * library; valid until the next failing call on the same thread.
 */
const char *fqml_last_error_message(void);

/**
 * Releases a string returned by this library.
 */
void fqml_string_free(char *s);

/**
 * Parses a model spec JSON document.
 */
FqmlStatus fqml_model_from_json(const char *json, FqmlModel **out);

void fqml_model_free(FqmlModel *model);

FqmlStatus fqml_model_param_count(const FqmlModel *model, size_t *out);

FqmlStatus fqml_model_n_qubits(const FqmlModel *model, size_t *out);

FqmlStatus fqml_model_n_features(const FqmlModel *model, size_t *out);

/**
 * `f(x; θ)` for one input of `n_x` features.
 */
FqmlStatus fqml_model_evaluate(const FqmlModel *model,
                               const double *params,
                               size_t n_params,
                               const double *x,
                               size_t n_x,
                               double *out);

/**
 * The model as model spec JSON; release with `fqml_string_free`.
 */
FqmlStatus fqml_model_to_json(const FqmlModel *model, char **out);

/**
 * Ω for `layers` repetitions of a generator with the given eigenvalues.
 */
FqmlStatus fqml_spectrum_from_eigenvalues(const double *eigenvalues,
                                          size_t n,
                                          size_t layers,
                                          FqmlSpectrum **out);

FqmlStatus fqml_spectrum_parallel_pauli(size_t r, FqmlSpectrum **out);

FqmlStatus fqml_spectrum_sequential_pauli(size_t r, FqmlSpectrum **out);

/**
 * Spectrum of the model's encoding for one feature.
 */
FqmlStatus fqml_spectrum_of_model(const FqmlModel *model, size_t feature, FqmlSpectrum **out);

void fqml_spectrum_free(FqmlSpectrum *spectrum);

/**
 * Number of frequencies `|Ω|`.
 */
FqmlStatus fqml_spectrum_len(const FqmlSpectrum *spectrum, size_t *out);

/**
 * Size `K = (|Ω| − 1)/2`.
 */
FqmlStatus fqml_spectrum_size(const FqmlSpectrum *spectrum, size_t *out);

FqmlStatus fqml_spectrum_degree(const FqmlSpectrum *spectrum, double *out);

/**
 * Copies the ascending frequencies into `buf`. Fails with
 * `BufferTooSmall` when `cap < |Ω|`; `len` always receives `|Ω|`.
 */
FqmlStatus fqml_spectrum_frequencies(const FqmlSpectrum *spectrum,
                                     double *buf,
                                     size_t cap,
                                     size_t *len);

/**
 * Integer form `ω = n·ω₀` of a commensurable spectrum.
 */
FqmlStatus fqml_spectrum_rescale(const FqmlSpectrum *spectrum, double *omega0, FqmlSpectrum **out);

/**
 * `⌊d^{2L}/2⌋ − 1`.
 */
FqmlStatus fqml_spectrum_size_bound(uint64_t d, uint32_t layers, uint64_t *out);

/**
 * Coefficients by path expansion.
 */
FqmlStatus fqml_coefficients_exact(const FqmlModel *model,
                                   const double *params,
                                   size_t n_params,
                                   FqmlCoefficients **out);

/**
 * Coefficients by sampling on an equidistant grid; requires an integer spectrum.
 */
FqmlStatus fqml_coefficients_dft(const FqmlModel *model,
                                 const double *params,
                                 size_t n_params,
                                 FqmlCoefficients **out);

void fqml_coefficients_free(FqmlCoefficients *coeffs);

FqmlStatus fqml_coefficients_len(const FqmlCoefficients *coeffs, size_t *out);

FqmlStatus fqml_coefficients_n_features(const FqmlCoefficients *coeffs, size_t *out);

/**
 * Entry `index` in ascending frequency order. `freq` receives
 * `n_features` values.
 */
FqmlStatus fqml_coefficients_entry(const FqmlCoefficients *coeffs,
                                   size_t index,
                                   double *freq,
                                   size_t freq_cap,
                                   double *re,
                                   double *im);

/**
 * `c_ω`, zero when `ω` is not stored.
 */
FqmlStatus fqml_coefficients_get(const FqmlCoefficients *coeffs,
                                 const double *freq,
                                 size_t n,
                                 double *re,
                                 double *im);

/**
 * Evaluates the series at `x`.
 */
FqmlStatus fqml_coefficients_eval(const FqmlCoefficients *coeffs,
                                  const double *x,
                                  size_t n_x,
                                  double *out);

/**
 * CSV `freq,re,im`; release with `fqml_string_free`.
 */
FqmlStatus fqml_coefficients_to_csv(const FqmlCoefficients *coeffs, char **out);

/**
 * Builds a model realising the target series JSON exactly.
 */
FqmlStatus fqml_universal_from_target_json(const char *json, FqmlUniversal **out);

void fqml_universal_free(FqmlUniversal *u);

/**
 * Largest `|f(x) − g(x)|` at `n_points` seeded random inputs.
 */
FqmlStatus fqml_universal_verify(const FqmlUniversal *u,
                                 size_t n_points,
                                 uint64_t seed,
                                 double *max_error);

/**
 * A copy of the constructed circuit as a model handle.
 */
FqmlStatus fqml_universal_model(const FqmlUniversal *u, FqmlModel **out);

FqmlStatus fqml_universal_n_qubits(const FqmlUniversal *u, size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOURIER_QML_H */
