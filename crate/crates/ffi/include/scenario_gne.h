#ifndef SCENARIO_GNE_H
#define SCENARIO_GNE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum SgStatus {
  SG_STATUS_OK = 0,
  SG_STATUS_NULL_POINTER = 1,
  SG_STATUS_INVALID_ARGUMENT = 2,
  SG_STATUS_PARSE = 3,
  SG_STATUS_INFEASIBLE = 4,
  SG_STATUS_NUMERICAL = 5,
  SG_STATUS_PANIC = 6,
} SgStatus;

/**
 * A certificate together with the program it was computed for.
 */
typedef struct SgCertificate SgCertificate;

/**
 * An assembled game.
 */
typedef struct SgGame SgGame;

/**
 * Plain-data view of a certificate.
 */
typedef struct SgCertificateSummary {
  size_t k;
  size_t s_k;
  size_t v_k;
  double beta;
  double epsilon_sk;
  double epsilon_vk;
  uint64_t seed;
} SgCertificateSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *sg_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sg_version(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void sg_string_free(char *s);

/**
 * Parses a game document (JSON) and assembles the game.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum SgStatus sg_game_from_json(const char *json, struct SgGame **out);

/**
 * The built-in two-player example.
 *
 * # Safety
 * `out` must be writable.
 */
enum SgStatus sg_game_two_player_example(struct SgGame **out);

/**
 * Total strategy dimension, or zero for a null handle.
 *
 * # Safety
 * `game` must be null or a live handle.
 */
size_t sg_game_dim(const struct SgGame *game);

/**
 * # Safety
 * `game` must be null or a handle not yet freed.
 */
void sg_game_free(struct SgGame *game);

/**
 * `ε(h)` for `K` samples and confidence `β` with the budget split evenly.
 *
 * # Safety
 * `out` must be writable.
 */
enum SgStatus sg_epsilon_even_split(size_t k, double beta, size_t h, double *out);

/**
 * Draws `k` scenarios from `sampler_json`, solves and certifies.
 *
 * # Safety
 * `game` must be a live handle, `sampler_json` a NUL-terminated string and
 * `out` writable.
 */
enum SgStatus sg_certify(const struct SgGame *game,
                         const char *sampler_json,
                         size_t k,
                         double beta,
                         uint64_t seed,
                         struct SgCertificate **out);

/**
 * # Safety
 * `cert` must be a live handle and `out` writable.
 */
enum SgStatus sg_certificate_summary(const struct SgCertificate *cert,
                                     struct SgCertificateSummary *out);

/**
 * The certificate as JSON; free the result with [`sg_string_free`].
 *
 * # Safety
 * `cert` must be a live handle and `out` writable.
 */
enum SgStatus sg_certificate_to_json(const struct SgCertificate *cert, char **out);

/**
 * Grids the certified equilibrium set with the given granularity and
 * returns the largest violation frequency over `n_fresh` fresh draws.
 *
 * # Safety
 * `cert` must be a live handle and `out` writable.
 */
enum SgStatus sg_certificate_max_violation(const struct SgCertificate *cert,
                                           double granularity,
                                           size_t n_fresh,
                                           uint64_t seed,
                                           double *out);

/**
 * # Safety
 * `cert` must be null or a handle not yet freed.
 */
void sg_certificate_free(struct SgCertificate *cert);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCENARIO_GNE_H */
