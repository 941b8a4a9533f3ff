#ifndef DCVORTEX_H
#define DCVORTEX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DcvStatus {
  DCV_STATUS_OK = 0,
  DCV_STATUS_NULL_POINTER = 1,
  DCV_STATUS_INVALID_ARGUMENT = 2,
  DCV_STATUS_CONFIG = 3,
  // Shape, form-type, domain, constraint or resolution errors.
  DCV_STATUS_NUMERICAL = 4,
  DCV_STATUS_IO = 5,
  // Result does not fit the C representation (e.g. i64 overflow).
  DCV_STATUS_OVERFLOW = 6,
  // No report yet: run a command first.
  DCV_STATUS_NO_RESULT = 7,
  DCV_STATUS_PANIC = 99,
} DcvStatus;

// Which command a session runs.
typedef enum DcvCommand {
  DCV_COMMAND_SOLVE = 0,
  DCV_COMMAND_STABILITY = 1,
  DCV_COMMAND_VERIFY_REDUCTION = 2,
  DCV_COMMAND_VERIFY_HK = 3,
} DcvCommand;

// Opaque handle holding a parsed run configuration and the last report.
typedef struct DcvSession DcvSession;

// Ranks and degrees of a quadruplet, as passed across the ABI.
typedef struct DcvInvariants {
  uint32_t r1;
  uint32_t r2;
  int64_t d1;
  int64_t d2;
} DcvInvariants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string. Do not free.
const char *dcv_version(void);

// Copy of the last error message on this thread, or NULL if none.
// Free with [`dcv_string_free`].
char *dcv_last_error_message(void);

// # Safety
// `s` must be NULL or a string returned by this library, freed at most once.
void dcv_string_free(char *s);

// Numerical degree of O(n) on P¹ with its Fubini–Study metric.
//
// # Safety
// `out` must be valid for a write of one `double`.
enum DcvStatus dcv_deg_p1(int32_t n, double *out);

// The Fubini–Study contraction constant (real and imaginary parts).
//
// # Safety
// Both pointers must be valid for a write of one `double`.
enum DcvStatus dcv_fs_contraction_constant(double *re, double *im);

// Exact Θ_τ(sub) relative to `ambient` for τ = tau_num/tau_den, returned
// as a reduced fraction with positive denominator.
//
// # Safety
// `out_num` and `out_den` must be valid for a write of one `int64_t`.
enum DcvStatus dcv_theta_tau(struct DcvInvariants sub,
                             struct DcvInvariants ambient,
                             int64_t tau_num,
                             int64_t tau_den,
                             int64_t *out_num,
                             int64_t *out_den);

// Parse a TOML run configuration into a new session.
//
// # Safety
// `config_toml` must be a valid NUL-terminated UTF-8 string and `out`
// valid for a write of one pointer.
enum DcvStatus dcv_session_new(const char *config_toml, struct DcvSession **out);

// Run `command` and keep its report. Files are not written.
//
// # Safety
// `session` must come from [`dcv_session_new`] and not be freed.
enum DcvStatus dcv_session_run(struct DcvSession *session, enum DcvCommand command);

// Whether every check of the last report passed.
//
// # Safety
// `session` must be live; `out` valid for a write of one `bool`.
enum DcvStatus dcv_session_passed(const struct DcvSession *session, bool *out);

// The last report as JSON. Free the string with [`dcv_string_free`].
//
// # Safety
// `session` must be live; `out` valid for a write of one pointer.
enum DcvStatus dcv_session_report_json(const struct DcvSession *session, char **out);

// # Safety
// `session` must be NULL or come from [`dcv_session_new`], freed at most once.
void dcv_session_free(struct DcvSession *session);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DCVORTEX_H */
