#ifndef MECHLAB_H
#define MECHLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum MlStatus {
  ML_STATUS_OK = 0,
  ML_STATUS_NULL_POINTER = 1,
  ML_STATUS_INVALID_UTF8 = 2,
  ML_STATUS_INVALID_INPUT = 3,
  ML_STATUS_PARSE = 4,
  ML_STATUS_RESOURCE = 5,
  ML_STATUS_PRECONDITION = 6,
  ML_STATUS_IO = 7,
  ML_STATUS_OUT_OF_RANGE = 8,
  ML_STATUS_CALLBACK = 9,
  ML_STATUS_PANIC = 10,
} MlStatus;

// Declarations and appeals for the second chance mechanism.
typedef struct MlActions MlActions;

// Allocation, payments and utilities of one mechanism run.
typedef struct MlOutcome MlOutcome;

// Declared or true valuations of every agent.
typedef struct MlProfile MlProfile;

// Host winner determination: fill `bundles_out[0..agents]` with one bitmask
// per agent and return 0, or return non-zero to signal failure. Must be
// deterministic and safe to call from several threads at once.
typedef int32_t (*MlAllocateCallback)(void *ctx,
                                      const struct MlProfile *profile,
                                      uint32_t *bundles_out,
                                      uintptr_t agents);

// Host appeal: inspect `input`, set `*output` to a profile made with
// [`ml_profile_from_json`] (ownership passes to the library) or leave it
// null to decline, report the steps spent in `*steps`, and return 0. A
// non-zero return declines. Same threading rules as the allocator.
typedef int32_t (*MlAppealCallback)(void *ctx,
                                    const struct MlProfile *input,
                                    struct MlProfile **output,
                                    uint64_t *steps);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next call into the library on this thread.
const char *ml_last_error(void);

// Releases a string returned by the library.
//
// # Safety
// `s` must come from this library and not be freed twice.
void ml_string_free(char *s);

// Parses a profile in the JSON instance format.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum MlStatus ml_profile_from_json(const char *json, struct MlProfile **out);

// # Safety
// `p` must come from this library and not be freed twice.
void ml_profile_free(struct MlProfile *p);

// # Safety
// `p` must be a live profile and `out` writable.
enum MlStatus ml_profile_agents(const struct MlProfile *p, uintptr_t *out);

// # Safety
// `p` must be a live profile and `out` writable.
enum MlStatus ml_profile_items(const struct MlProfile *p, uintptr_t *out);

// Value of `bundle` to `agent`, in micro-units.
//
// # Safety
// `p` must be a live profile and `out` writable.
enum MlStatus ml_profile_value(const struct MlProfile *p,
                               uintptr_t agent,
                               uint32_t bundle,
                               int64_t *out);

// Total declared welfare of the allocation given as one bitmask per agent.
//
// # Safety
// `bundles` must point to `agents` readable values and `out` be writable.
enum MlStatus ml_profile_welfare(const struct MlProfile *p,
                                 const uint32_t *bundles,
                                 uintptr_t agents,
                                 int64_t *out);

// Runs a VCG-based mechanism with truthful declarations.
//
// # Safety
// Strings must be NUL-terminated, `p` live and `out` writable.
enum MlStatus ml_run_vcg(const struct MlProfile *p,
                         const char *alg,
                         const char *pivot,
                         struct MlOutcome **out);

// Runs a VCG-based mechanism whose allocation comes from a host callback.
// Pivots that need the algorithm call it on masked profiles.
//
// # Safety
// `pivot` must be NUL-terminated, `p` live, `out` writable, and the
// callback must follow [`MlAllocateCallback`]'s contract.
enum MlStatus ml_run_vcg_host(const struct MlProfile *p,
                              MlAllocateCallback allocate,
                              void *ctx,
                              const char *pivot,
                              struct MlOutcome **out);

// Parses actions in the JSON actions format for an `items`-item universe.
//
// # Safety
// `json` must be NUL-terminated and `out` writable.
enum MlStatus ml_actions_from_json(const char *json, uintptr_t items, struct MlActions **out);

// # Safety
// `a` must come from this library and not be freed twice.
void ml_actions_free(struct MlActions *a);

// Replaces one agent's appeal with a host callback.
//
// # Safety
// `a` must be live and the callback must follow [`MlAppealCallback`]'s
// contract for as long as the actions are used.
enum MlStatus ml_actions_set_host_appeal(struct MlActions *a,
                                         uintptr_t agent,
                                         MlAppealCallback appeal,
                                         void *ctx);

// Runs the second chance mechanism. `true_types` supplies utilities; the
// declarations come from `actions`. With `ir` set, the individually
// rational variant is used and `pivot` is ignored.
//
// # Safety
// Strings must be NUL-terminated (`pivot` may be null when `ir` is set),
// handles live and `out` writable.
enum MlStatus ml_run_second_chance(const struct MlProfile *true_types,
                                   const struct MlActions *actions,
                                   const char *alg,
                                   const char *pivot,
                                   uint64_t time_limit,
                                   bool ir,
                                   struct MlOutcome **out);

// # Safety
// `o` must come from this library and not be freed twice.
void ml_outcome_free(struct MlOutcome *o);

// # Safety
// `o` must be live and `out` writable.
enum MlStatus ml_outcome_agents(const struct MlOutcome *o, uintptr_t *out);

// Bundle bitmask of `agent`.
//
// # Safety
// `o` must be live and `out` writable.
enum MlStatus ml_outcome_bundle(const struct MlOutcome *o, uintptr_t agent, uint32_t *out);

// Payment to `agent` in micro-units; negative means the agent pays.
//
// # Safety
// `o` must be live and `out` writable.
enum MlStatus ml_outcome_payment(const struct MlOutcome *o, uintptr_t agent, int64_t *out);

// Utility of `agent` in micro-units, against the true types.
//
// # Safety
// `o` must be live and `out` writable.
enum MlStatus ml_outcome_utility(const struct MlOutcome *o, uintptr_t agent, int64_t *out);

// The outcome as a JSON report; release it with [`ml_string_free`].
//
// # Safety
// `o` must be live and `out` writable.
enum MlStatus ml_outcome_to_json(const struct MlOutcome *o, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MECHLAB_H */
