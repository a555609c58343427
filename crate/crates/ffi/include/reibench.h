#ifndef REIBENCH_H
#define REIBENCH_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which counting thresholds [`rei_filter_accepts`] applies.
 */
typedef enum ReiFilterRules {
  /**
   * Reference thresholds.
   */
  REI_FILTER_RULES_PRINTED = 0,
  /**
   * Middle columns of the Explicit and Implicit rows exchanged; what
   * the generator uses.
   */
  REI_FILTER_RULES_SWAPPED = 1,
} ReiFilterRules;

/**
 * Result of every fallible call.
 */
typedef enum ReiStatus {
  REI_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  REI_STATUS_NULL_POINTER = 1,
  REI_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed JSON, unknown names or an invalid scene.
   */
  REI_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The action's preconditions do not hold; the world is unchanged.
   */
  REI_STATUS_NOT_APPLICABLE = 4,
  /**
   * No plan within the search budget, or unknown scene name.
   */
  REI_STATUS_NOT_FOUND = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  REI_STATUS_INTERNAL = 6,
} ReiStatus;

/**
 * Opaque world state.
 */
typedef struct ReiWorld ReiWorld;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string. Do not free.
 */
const char *rei_version(void);

/**
 * Copy of the calling thread's last error message, or NULL when the most
 * recent call succeeded. Free with [`rei_string_free`].
 */
char *rei_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void rei_string_free(char *s);

/**
 * Loads one of the bundled scenes by name.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum ReiStatus rei_world_from_scene(const char *name, struct ReiWorld **out);

/**
 * Builds a world from a scene JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum ReiStatus rei_world_from_json(const char *json, struct ReiWorld **out);

/**
 * Independent copy of `world`.
 *
 * # Safety
 * `world` must be a live handle; `out` must be writable.
 */
enum ReiStatus rei_world_clone(const struct ReiWorld *world, struct ReiWorld **out);

/**
 * Destroys a handle. NULL is ignored.
 *
 * # Safety
 * `world` must come from this library and must not be used afterwards.
 */
void rei_world_free(struct ReiWorld *world);

/**
 * Current state as a scene JSON document.
 *
 * # Safety
 * `world` must be a live handle; `out` must be writable.
 */
enum ReiStatus rei_world_to_json(const struct ReiWorld *world, char **out);

/**
 * Number of actions applied since the scene was loaded.
 *
 * # Safety
 * `world` must be a live handle; `out` must be writable.
 */
enum ReiStatus rei_world_step_count(const struct ReiWorld *world, uint32_t *out);

/**
 * JSON array of every applicable action, e.g. `["GoTo(Fridge_1)", ...]`.
 *
 * # Safety
 * `world` must be a live handle; `out` must be writable.
 */
enum ReiStatus rei_world_available_actions(const struct ReiWorld *world, char **out);

/**
 * Applies one action such as `PickUp(Apple_1)` in place. Returns
 * `NotApplicable` and leaves the world unchanged when a precondition fails.
 *
 * # Safety
 * `world` must be a live handle; `action` a NUL-terminated string.
 */
enum ReiStatus rei_world_apply(struct ReiWorld *world, const char *action);

/**
 * Whether the goal (a task goal JSON object) holds in the current state.
 *
 * # Safety
 * `world` must be a live handle; `goal_json` a NUL-terminated string;
 * `out` must be writable.
 */
enum ReiStatus rei_world_check_goal(const struct ReiWorld *world, const char *goal_json, bool *out);

/**
 * Shortest plan reaching the goal, as a JSON array of actions. A
 * `budget` of 0 selects the default node budget.
 *
 * # Safety
 * `world` must be a live handle; `goal_json` a NUL-terminated string;
 * `out` must be writable.
 */
enum ReiStatus rei_world_solve(const struct ReiWorld *world,
                               const char *goal_json,
                               size_t budget,
                               char **out);

/**
 * Counting filter: whether an episode with these referring-expression
 * counts is kept for `level` (`explicit`, `mixed` or `implicit`).
 *
 * # Safety
 * `level` must be a NUL-terminated string; `out` must be writable.
 */
enum ReiStatus rei_filter_accepts(const char *level,
                                  enum ReiFilterRules rules,
                                  uint32_t ctx_explicit,
                                  uint32_t ctx_implicit,
                                  uint32_t ins_explicit,
                                  uint32_t ins_implicit,
                                  bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REIBENCH_H */
