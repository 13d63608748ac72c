#ifndef FORAGE_H
#define FORAGE_H

/* Generated from forage-ffi by cbindgen; edit the Rust source instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of any call across the boundary.
 */
typedef enum {
  /**
   * The call succeeded.
   */
  ForageStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  ForageStatus_NullArgument = 1,
  /**
   * A numeric argument was outside its documented domain.
   */
  ForageStatus_InvalidParam = 2,
  /**
   * The requested grid geometry cannot be built.
   */
  ForageStatus_BadGeometry = 3,
  /**
   * The episode already finished; reset or free the handle.
   */
  ForageStatus_EpisodeOver = 4,
  /**
   * The caller's buffer cannot hold the requested text.
   */
  ForageStatus_BufferTooSmall = 5,
  /**
   * Any other failure inside the library.
   */
  ForageStatus_Internal = 6,
} ForageStatus;

/**
 * A running episode. Opaque: create with [`forage_env_new`], advance with
 * [`forage_env_step`], release with [`forage_env_free`].
 */
typedef struct ForageEnv ForageEnv;

/**
 * Analytic optimum written by [`forage_mvt_solve`].
 */
typedef struct {
  /**
   * Residence steps per patch visit that maximize the long-run rate.
   */
  uint32_t optimal_steps;
  /**
   * Net intake rate achieved at that residence.
   */
  double optimal_rate;
} ForageMvt;

/**
 * Snapshot written by [`forage_env_step`].
 */
typedef struct {
  /**
   * Energy harvested by this step.
   */
  double reward;
  /**
   * Freshness cue of the occupied patch; 0 outside both patches.
   */
  double cue;
  /**
   * Cumulative episode score after this step.
   */
  double score;
  /**
   * Agent column after the move.
   */
  uint32_t x;
  /**
   * Agent row after the move.
   */
  uint32_t y;
  /**
   * Whether the agent now stands inside a patch.
   */
  bool in_patch;
  /**
   * Whether the episode has finished.
   */
  bool done;
} ForageStep;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Human-readable name for a [`ForageStatus`] value; never null.
 *
 * Takes the raw integer so that values forged on the C side still map to a
 * string instead of undefined behavior.
 */
const char *forage_status_name(uint32_t status);

/**
 * Per-visit patch yield after `steps` harvests: `peak * exp(-decay * steps)`.
 *
 * # Safety
 * `out` must point to a writable `double`.
 */
ForageStatus forage_reward_at(double peak, double decay, uint32_t steps, double *out);

/**
 * Residence steps maximizing the long-run net intake rate for one patch
 * type, scanning candidates in `1..=scan_bound`.
 *
 * # Safety
 * `out` must point to a writable [`ForageMvt`].
 */
ForageStatus forage_mvt_solve(double peak,
                              double decay,
                              double travel,
                              uint32_t scan_bound,
                              ForageMvt *out);

/**
 * Create an episode on a two-patch corridor map.
 *
 * `distance` is the travel gap between the patches, `patch_side` their
 * square side, `episode_steps` the step budget (at least 1). The handle
 * is written to `*out` and owns all episode state.
 *
 * # Safety
 * `out` must point to a writable handle pointer. The returned handle must
 * be released exactly once with [`forage_env_free`].
 */
ForageStatus forage_env_new(uint32_t distance,
                            uint32_t patch_side,
                            uint32_t view_radius,
                            uint32_t episode_steps,
                            double peak,
                            double decay,
                            uint64_t seed,
                            ForageEnv **out);

/**
 * Restart the episode from spawn with a fresh seed, zeroing score, step
 * count, and both patch counters.
 *
 * # Safety
 * `env` must be a live handle from [`forage_env_new`].
 */
ForageStatus forage_env_reset(ForageEnv *env, uint64_t seed);

/**
 * Advance the episode by one action and write the resulting snapshot.
 *
 * `action` indexes the fixed order 0 = up, 1 = down, 2 = left, 3 = right,
 * 4 = stay.
 *
 * # Safety
 * `env` must be a live handle; `out` must point to a writable
 * [`ForageStep`].
 */
ForageStatus forage_env_step(ForageEnv *env, uint32_t action, ForageStep *out);

/**
 * Read the cumulative episode score.
 *
 * # Safety
 * `env` must be a live handle; `out` must point to a writable `double`.
 */
ForageStatus forage_env_score(const ForageEnv *env, double *out);

/**
 * Read the agent's current grid position.
 *
 * # Safety
 * `env` must be a live handle; `x` and `y` must point to writable values.
 */
ForageStatus forage_env_position(const ForageEnv *env, uint32_t *x, uint32_t *y);

/**
 * Write the ASCII rendering of the grid into `buf`, NUL-terminated.
 *
 * `*written` always receives the required capacity including the
 * terminator; pass a null `buf` (or too small a `capacity`) to size a
 * buffer first.
 *
 * # Safety
 * `env` must be a live handle; `written` must point to a writable value;
 * `buf`, when non-null, must have space for `capacity` bytes.
 */
ForageStatus forage_env_render(const ForageEnv *env,
                               char *buf,
                               uintptr_t capacity,
                               uintptr_t *written);

/**
 * Release a handle from [`forage_env_new`]. Null is a no-op.
 *
 * # Safety
 * `env` must be null or a live handle, and must not be used afterwards.
 */
void forage_env_free(ForageEnv *env);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FORAGE_H */
