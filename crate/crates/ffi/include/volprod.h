#ifndef VOLPROD_H
#define VOLPROD_H

/* Generated by cbindgen from the volprod-ffi sources. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VpStatus {
  VP_STATUS_OK = 0,
  VP_STATUS_NULL_POINTER = 1,
  VP_STATUS_DOMAIN = 2,
  VP_STATUS_DIVERGENCE = 3,
  VP_STATUS_OVERFLOW = 4,
  VP_STATUS_POLICY = 5,
  VP_STATUS_PANIC = 6,
} VpStatus;

typedef enum VpTailMode {
  VP_TAIL_MODE_NONE = 0,
  VP_TAIL_MODE_FIRST_ORDER = 1,
  VP_TAIL_MODE_RICHARDSON = 2,
} VpTailMode;

// Closed-form product identities at `p = 2`, indexed by `m >= 1`.
typedef enum VpIdentity {
  VP_IDENTITY_EVEN_PRODUCT = 0,
  VP_IDENTITY_ODD_PRINTED = 1,
  VP_IDENTITY_ODD_CORRECTED = 2,
  VP_IDENTITY_RATIO_PRINTED = 3,
  VP_IDENTITY_RATIO_CORRECTED = 4,
} VpIdentity;

typedef enum VpVerdict {
  VP_VERDICT_VERIFIED = 0,
  VP_VERDICT_FALSIFIED = 1,
  VP_VERDICT_DIVERGES = 2,
} VpVerdict;

// Opaque truncation policy.
typedef struct VpPolicy VpPolicy;

// Opaque product evaluation.
typedef struct VpProductEval VpProductEval;

typedef struct VpProductSummary {
  double value;
  double log_value;
  double log_bracket_lo;
  double log_bracket_hi;
  double tail_estimate;
  uint64_t terms_used;
  bool converged;
} VpProductSummary;

typedef struct VpIdentityResult {
  double lhs;
  double rhs;
  double abs_dev;
  double rel_dev;
  enum VpVerdict verdict;
  // 0 when not reported.
  uint64_t terms_used;
} VpIdentityResult;

// Last error message on this thread, or null. Valid until the next call
// into this library on the same thread.
const char *vp_last_error_message(void);

// # Safety
// `out` must be valid for writes.
enum VpStatus vp_policy_new(uint64_t max_terms,
                            double rel_tol,
                            enum VpTailMode tail,
                            struct VpPolicy **out);

// # Safety
// `out` must be valid for writes.
enum VpStatus vp_policy_default(struct VpPolicy **out);

// # Safety
// `policy` must be null or come from `vp_policy_new` / `vp_policy_default`.
void vp_policy_free(struct VpPolicy *policy);

// # Safety
// `policy` must be a live handle; out pointers must be valid for writes.
enum VpStatus vp_policy_get(const struct VpPolicy *policy,
                            uint64_t *max_terms,
                            double *rel_tol,
                            enum VpTailMode *tail);

// # Safety
// `out` must be valid for writes.
enum VpStatus vp_log_gamma(double x, double *out);

// `|B_p^n|`; pass `INFINITY` for the cube.
//
// # Safety
// `out` must be valid for writes.
enum VpStatus vp_ball_volume(uint32_t n, double p, double *out);

// # Safety
// `out` must be valid for writes.
enum VpStatus vp_mprod_gamma(uint32_t n, double p, double *out);

// `h(p) = Γ(1 + 1/p) Γ(1 + 1/q)`.
//
// # Safety
// `out` must be valid for writes.
enum VpStatus vp_h(double p, double *out);

// Gamma-free product route for `M(n, p)`. `policy` may be null.
//
// # Safety
// `policy` must be null or a live handle; `out` must be valid for writes.
enum VpStatus vp_mprod_product(uint32_t n,
                               double p,
                               const struct VpPolicy *policy,
                               struct VpProductEval **out);

// `prod k(k+x-1) / ((k-a)(k+x+a-1))`. `policy` may be null.
//
// # Safety
// `policy` must be null or a live handle; `out` must be valid for writes.
enum VpStatus vp_p_product(double x,
                           double a,
                           const struct VpPolicy *policy,
                           struct VpProductEval **out);

// `s_n`, which equals `1/n!`. `policy` may be null.
//
// # Safety
// `policy` must be null or a live handle; `out` must be valid for writes.
enum VpStatus vp_s_product(uint32_t n, const struct VpPolicy *policy, struct VpProductEval **out);

// # Safety
// `eval` must be a live handle; `out` must be valid for writes.
enum VpStatus vp_product_eval_get(const struct VpProductEval *eval, struct VpProductSummary *out);

// # Safety
// `eval` must be null or a handle returned by this library.
void vp_product_eval_free(struct VpProductEval *eval);

// Checks one identity numerically. A divergent product is reported through
// `verdict`, not as an error status. `policy` may be null.
//
// # Safety
// `policy` must be null or a live handle; `out` must be valid for writes.
enum VpStatus vp_identity_check(enum VpIdentity identity,
                                uint32_t m,
                                const struct VpPolicy *policy,
                                struct VpIdentityResult *out);

#endif  /* VOLPROD_H */
