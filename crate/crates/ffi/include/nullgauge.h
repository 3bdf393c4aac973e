#ifndef NULLGAUGE_H
#define NULLGAUGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ng_status {
  NG_OK = 0,
  NG_NULL_POINTER = 1,
  NG_INVALID_ARGUMENT = 2,
  NG_LENGTH_MISMATCH = 3,
  // The evolution or reconstruction broke down (node, vanishing B0,
  // negative radicand, non-finite value).
  NG_BREAKDOWN = 4,
  // A spinor failed an algebraic precondition.
  NG_ALGEBRA = 5,
  NG_PANIC = 6,
} ng_status;

typedef enum ng_field {
  NG_FIELD_PHI = 0,
  NG_FIELD_PHI_DOT = 1,
  NG_FIELD_B0 = 2,
  NG_FIELD_B1 = 3,
  NG_FIELD_B0_DOT = 4,
  NG_FIELD_B1_DOT = 5,
} ng_field;

typedef enum ng_representation {
  NG_REP_DIRAC = 0,
  NG_REP_MAJORANA = 1,
} ng_representation;

// Potential-only evolution with the matter field reconstructed each stage.
typedef struct ng_em_only ng_em_only;

// Complex field plus potential in the Lorenz gauge.
typedef struct ng_kgm ng_kgm;

// Real scalar plus unitary-gauge potential.
typedef struct ng_unitary ng_unitary;

typedef struct ng_grid {
  size_t n_x;
  double dx;
  double dt;
} ng_grid;

typedef struct ng_constants {
  double e;
  double m;
  // Uniform background charge density.
  double background;
} ng_constants;

typedef struct ng_packet {
  double phi0;
  double amplitude;
  double width;
  double chirp;
  double kick;
} ng_packet;

typedef struct ng_complex {
  double re;
  double im;
} ng_complex;

typedef struct ng_diagnostics {
  double t;
  double charge;
  double energy;
  // Lorenz-gauge residual for complex states, Gauss-law residual for
  // unitary states.
  double constraint_max;
  // Max current divergence (complex) or conservation residual (unitary).
  double conservation_max;
} ng_diagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or an empty string
// after a success. The pointer stays valid until the next `ng_*` call on
// the same thread.
const char *ng_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *ng_version(void);

// Localised wave packet on a uniform background. The background density it
// requires is written to `background_out` when that is non-null and stored
// in the handle, overriding `consts.background`.
//
// # Safety
// `params` may be null (defaults are used). `out` must be a valid pointer.
enum ng_status ng_kgm_packet(struct ng_grid grid,
                             struct ng_constants consts,
                             const struct ng_packet *params,
                             double *background_out,
                             struct ng_kgm **out);

// Complex state at `t = 0` from caller buffers of length `grid.n_x`.
//
// # Safety
// All pointers must be valid for the stated lengths.
enum ng_status ng_kgm_new(struct ng_grid grid,
                          struct ng_constants consts,
                          const struct ng_complex *psi,
                          const struct ng_complex *psi_dot,
                          const double *a0,
                          const double *a1,
                          const double *a0_dot,
                          const double *a1_dot,
                          struct ng_kgm **out);

// # Safety
// `h` must be null or a handle from this library, freed at most once.
void ng_kgm_free(struct ng_kgm *h);

// Advances `steps` time steps. On failure the handle keeps the last good
// slice.
//
// # Safety
// `h` must be a valid handle.
enum ng_status ng_kgm_step(struct ng_kgm *h, size_t steps);

// # Safety
// `h` and `out` must be valid.
enum ng_status ng_kgm_diagnostics(const struct ng_kgm *h, struct ng_diagnostics *out);

// Copies `|psi|` into `buf` (length must equal `n_x`).
//
// # Safety
// `h` must be valid and `buf` writable for `len` doubles.
enum ng_status ng_kgm_abs_psi(const struct ng_kgm *h, double *buf, size_t len);

// Gauge transform to the real field. `node_threshold` is relative to
// `max |psi|`. `winding_out` may be null.
//
// # Safety
// `h` and `out` must be valid.
enum ng_status ng_kgm_to_unitary(const struct ng_kgm *h,
                                 double node_threshold,
                                 int64_t *winding_out,
                                 struct ng_unitary **out);

// # Safety
// `h` must be null or a handle from this library, freed at most once.
void ng_unitary_free(struct ng_unitary *h);

// # Safety
// `h` must be a valid handle.
enum ng_status ng_unitary_step(struct ng_unitary *h, size_t steps);

// # Safety
// `h` and `out` must be valid.
enum ng_status ng_unitary_diagnostics(const struct ng_unitary *h, struct ng_diagnostics *out);

// Copies one field of the slice into `buf` (length must equal `n_x`).
//
// # Safety
// `h` must be valid and `buf` writable for `len` doubles.
enum ng_status ng_unitary_field(const struct ng_unitary *h,
                                enum ng_field which,
                                double *buf,
                                size_t len);

// Rebuilds `phi` and `phi_dot` from the potential alone, with floors scaled
// from the current slice. Either output may be null.
//
// # Safety
// `h` must be valid; non-null buffers writable for `len` doubles.
enum ng_status ng_unitary_reconstruct(const struct ng_unitary *h,
                                      double *phi,
                                      double *phi_dot,
                                      size_t len);

// Drops the matter field and keeps only the potential, with
// reconstruction floors scaled from this slice.
//
// # Safety
// `h` and `out` must be valid.
enum ng_status ng_unitary_to_em_only(const struct ng_unitary *h, struct ng_em_only **out);

// # Safety
// `h` must be null or a handle from this library, freed at most once.
void ng_em_only_free(struct ng_em_only *h);

// # Safety
// `h` must be a valid handle.
enum ng_status ng_em_only_step(struct ng_em_only *h, size_t steps);

// # Safety
// `h` and `t` must be valid.
enum ng_status ng_em_only_time(const struct ng_em_only *h, double *t);

// Copies a potential component. `NG_FIELD_PHI` and `NG_FIELD_PHI_DOT` are
// reconstructed on the fly.
//
// # Safety
// `h` must be valid and `buf` writable for `len` doubles.
enum ng_status ng_em_only_field(const struct ng_em_only *h,
                                enum ng_field which,
                                double *buf,
                                size_t len);

// Vector current `psi-bar gamma^mu psi` of a 4-spinor, written to `j[4]`.
//
// # Safety
// `psi` must point to 4 values, `j` to 4 writable doubles.
enum ng_status ng_dirac_current(enum ng_representation rep,
                                const struct ng_complex *psi,
                                double *j);

// Axial current `psi-bar gamma^mu gamma^5 psi`, written to `j[4]`.
//
// # Safety
// `psi` must point to 4 values, `j` to 4 writable doubles.
enum ng_status ng_axial_current(enum ng_representation rep,
                                const struct ng_complex *psi,
                                double *j);

// Splits `psi = e^{i theta} phi` with `phi` Majorana. Fails with
// `NG_ALGEBRA` when the axial current exceeds `axial_tolerance`.
//
// # Safety
// `psi` must point to 4 values; `theta` and `phi` (4 values) writable.
enum ng_status ng_phase_factorization(enum ng_representation rep,
                                      const struct ng_complex *psi,
                                      double axial_tolerance,
                                      double *theta,
                                      struct ng_complex *phi);

// Always returns `NG_PANIC`; lets bindings check the unwind guard.
enum ng_status ng_test_panic(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NULLGAUGE_H */
