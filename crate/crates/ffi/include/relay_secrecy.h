/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef RELAY_SECRECY_H
#define RELAY_SECRECY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum RsStatus {
  RS_STATUS_OK = 0,
  RS_STATUS_NULL_POINTER = 1,
  RS_STATUS_INVALID_INPUT = 2,
  RS_STATUS_UNSUPPORTED_DIMENSION = 3,
  RS_STATUS_PARSE = 4,
  RS_STATUS_IO = 5,
  RS_STATUS_OUT_OF_RANGE = 6,
  RS_STATUS_PANIC = 7,
} RsStatus;

typedef enum RsRateUnit {
  RS_RATE_UNIT_BITS = 0,
  RS_RATE_UNIT_NATS = 1,
} RsRateUnit;

/*
 Which receiver a single null-space scheme keeps interference-free.
 */
typedef enum RsProtected {
  RS_PROTECTED_E = 0,
  RS_PROTECTED_D = 1,
} RsProtected;

typedef enum RsScheme {
  RS_SCHEME_SINGLE_NULL_D = 0,
  RS_SCHEME_SINGLE_NULL_E = 1,
  RS_SCHEME_SINGLE_NULL_UNION = 2,
  RS_SCHEME_DOUBLE_NULL = 3,
  RS_SCHEME_TDMA = 4,
  RS_SCHEME_OUTER = 5,
} RsScheme;

/*
 Opaque channel realization.
 */
typedef struct RsChannel RsChannel;

/*
 Opaque sampled region of one scheme.
 */
typedef struct RsRegion RsRegion;

typedef struct RsComplex {
  double re;
  double im;
} RsComplex;

typedef struct RsFadingConfig {
  size_t m;
  double sigma_g;
  double sigma_h;
  double sigma_z;
  double n0;
  uint64_t seed;
} RsFadingConfig;

typedef struct RsRatePoint {
  double r_d;
  double r_e;
} RsRatePoint;

typedef struct RsRegionSample {
  double alpha;
  double r_d;
  double r_e;
  bool on_frontier;
  /*
   False for schemes without a protected receiver.
   */
  bool has_protected;
  enum RsProtected protected_;
} RsRegionSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null if none.

 The pointer stays valid until the next failing call on the same thread.
 */
const char *rs_last_error_message(void);

/*
 Release a string returned by this library. Null is ignored.
 */
void rs_string_free(char *s);

/*
 Build a channel from `m` gains to each destination and the noise variance.
 */
enum RsStatus rs_channel_new(const struct RsComplex *h,
                             const struct RsComplex *z,
                             size_t m,
                             double n0,
                             struct RsChannel **out);

/*
 Draw realization `draw_index` of the seeded Rayleigh ensemble.
 */
enum RsStatus rs_channel_sample(const struct RsFadingConfig *config,
                                uint64_t draw_index,
                                struct RsChannel **out);

enum RsStatus rs_channel_from_json(const char *json, struct RsChannel **out);

/*
 Serialize to JSON; free the result with [`rs_string_free`].
 */
enum RsStatus rs_channel_to_json(const struct RsChannel *channel, char **out);

/*
 Number of relays, or 0 for a null handle.
 */
size_t rs_channel_relays(const struct RsChannel *channel);

/*
 Copy the gains to each destination into caller buffers of length `m`.
 Either buffer may be null.
 */
enum RsStatus rs_channel_gains(const struct RsChannel *channel,
                               struct RsComplex *h_out,
                               struct RsComplex *z_out);

/*
 Capacity of the source-to-relays broadcast with source power `p_s`.
 */
enum RsStatus rs_channel_first_hop_capacity(const struct RsChannel *channel,
                                            double p_s,
                                            enum RsRateUnit unit,
                                            double *out);

void rs_channel_free(struct RsChannel *channel);

/*
 Largest generalized eigenvalue of `(n0 I + a h h^H, n0 I + b z z^H)`.
 `eigvec_out`, if not null, receives a unit-norm maximizer of length `m`.
 */
enum RsStatus rs_pencil_eigmax(const struct RsComplex *h,
                               const struct RsComplex *z,
                               size_t m,
                               double a,
                               double b,
                               double n0,
                               double *lambda_out,
                               struct RsComplex *eigvec_out);

/*
 Rates delivered by arbitrary relay weights `w` (for D) and `u` (for E).
 */
enum RsStatus rs_achievable_rates(const struct RsChannel *channel,
                                  const struct RsComplex *w,
                                  const struct RsComplex *u,
                                  enum RsRateUnit unit,
                                  struct RsRatePoint *out);

/*
 Single null-space point at power split `alpha`. `w_out`/`u_out` may be
 null; otherwise they receive `m` weights each.
 */
enum RsStatus rs_single_null_point(const struct RsChannel *channel,
                                   double p_r,
                                   double alpha,
                                   enum RsProtected protected_,
                                   enum RsRateUnit unit,
                                   struct RsRatePoint *out,
                                   struct RsComplex *w_out,
                                   struct RsComplex *u_out);

enum RsStatus rs_double_null_point(const struct RsChannel *channel,
                                   double p_r,
                                   double alpha,
                                   enum RsRateUnit unit,
                                   struct RsRatePoint *out,
                                   struct RsComplex *w_out,
                                   struct RsComplex *u_out);

/*
 Time-division point: fraction `alpha` of the time serves D alone.
 */
enum RsStatus rs_tdma_point(const struct RsChannel *channel,
                            double p_r,
                            double alpha,
                            enum RsRateUnit unit,
                            struct RsRatePoint *out);

enum RsStatus rs_outer_bound_point(const struct RsChannel *channel,
                                   double p_r,
                                   double alpha,
                                   enum RsRateUnit unit,
                                   struct RsRatePoint *out);

/*
 Sample `scheme` on a uniform grid of `alpha_points` power splits.
 */
enum RsStatus rs_region_new(const struct RsChannel *channel,
                            enum RsScheme scheme,
                            double p_r,
                            size_t alpha_points,
                            enum RsRateUnit unit,
                            struct RsRegion **out);

/*
 Clip the region in place to `r_d + r_e <= c1`.
 */
enum RsStatus rs_region_apply_first_hop_cap(struct RsRegion *region, double c1);

/*
 Number of samples, or 0 for a null handle.
 */
size_t rs_region_len(const struct RsRegion *region);

enum RsStatus rs_region_sample(const struct RsRegion *region,
                               size_t index,
                               struct RsRegionSample *out);

/*
 Render as CSV (same layout as the command-line tool); free the result
 with [`rs_string_free`].
 */
enum RsStatus rs_region_to_csv(const struct RsRegion *region, bool convex_hull, char **out);

enum RsStatus rs_region_write_csv(const struct RsRegion *region,
                                  const char *path,
                                  bool convex_hull);

void rs_region_free(struct RsRegion *region);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELAY_SECRECY_H */
