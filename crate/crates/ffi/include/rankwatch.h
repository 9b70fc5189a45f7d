#ifndef RANKWATCH_H
#define RANKWATCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RwMeasure {
  RW_MEASURE_PL = 0,
  RW_MEASURE_SL = 1,
  RW_MEASURE_DCG = 2,
  RW_MEASURE_PN = 3,
} RwMeasure;

typedef enum RwRegime {
  RW_REGIME_TRIVIAL = 0,
  RW_REGIME_EASY = 1,
  RW_REGIME_HARD = 2,
  RW_REGIME_HOPELESS = 3,
} RwRegime;

typedef enum RwStatus {
  RW_STATUS_OK = 0,
  RW_STATUS_NULL_POINTER = 1,
  RW_STATUS_INVALID_ARGUMENT = 2,
  RW_STATUS_OUT_OF_RANGE = 3,
  RW_STATUS_RUNTIME = 4,
  RW_STATUS_BUFFER_TOO_SMALL = 5,
  RW_STATUS_PANIC = 6,
} RwStatus;

/**
 * Explicit game: rankings in lexicographic order, outcomes as bit indices.
 */
typedef struct RwGame RwGame;

/**
 * Online learner chosen for the measure and feedback depth.
 */
typedef struct RwLearner RwLearner;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *rw_version(void);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL, or
 * 0 when there is no error.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t rw_last_error_message(char *buf, size_t len);

/**
 * Builds the explicit game. `n` is read only for `RW_MEASURE_PN`.
 *
 * # Safety
 * `out` must be a valid pointer to write the handle to.
 */
enum RwStatus rw_game_new(enum RwMeasure measure,
                          size_t n,
                          size_t m,
                          size_t k,
                          struct RwGame **out);

/**
 * # Safety
 * `game` must be null or a handle from [`rw_game_new`] not yet freed.
 */
void rw_game_free(struct RwGame *game);

/**
 * # Safety
 * `game` must be a live handle; the out pointers must be valid.
 */
enum RwStatus rw_game_shape(const struct RwGame *game,
                            size_t *actions,
                            size_t *outcomes,
                            size_t *symbols);

/**
 * Loss of ranking `action` under outcome `outcome`, as a double.
 *
 * # Safety
 * `game` must be a live handle and `out` valid.
 */
enum RwStatus rw_game_loss(const struct RwGame *game, size_t action, size_t outcome, double *out);

/**
 * Feedback symbol index for `action` under `outcome`.
 *
 * # Safety
 * `game` must be a live handle and `out` valid.
 */
enum RwStatus rw_game_feedback(const struct RwGame *game,
                               size_t action,
                               size_t outcome,
                               size_t *out);

/**
 * Writes ranking `action` (objects by rank) into `buf`, which must hold `m` entries.
 *
 * # Safety
 * `game` must be a live handle and `buf` valid for `len` entries.
 */
enum RwStatus rw_game_action(const struct RwGame *game, size_t action, size_t *buf, size_t len);

/**
 * Observability regime of the game.
 *
 * # Safety
 * `game` must be a live handle and `out` valid.
 */
enum RwStatus rw_game_classify(const struct RwGame *game, enum RwRegime *out);

/**
 * Creates the default learner for the setting: NW2 for precision@n with
 * top-1 feedback, follow-the-leader when `k == m`, explore-then-commit
 * otherwise.
 *
 * # Safety
 * `out` must be a valid pointer to write the handle to.
 */
enum RwStatus rw_learner_new(enum RwMeasure measure,
                             size_t n,
                             size_t m,
                             size_t k,
                             size_t horizon,
                             uint64_t seed,
                             struct RwLearner **out);

/**
 * # Safety
 * `learner` must be null or a handle from [`rw_learner_new`] not yet freed.
 */
void rw_learner_free(struct RwLearner *learner);

/**
 * Picks the next ranking and writes its objects by rank into `buf`.
 *
 * # Safety
 * `learner` must be a live handle and `buf` valid for `len` entries.
 */
enum RwStatus rw_learner_select(struct RwLearner *learner, size_t *buf, size_t len);

/**
 * Feeds back the relevances of the top `k` ranked objects (0 or 1 each).
 *
 * # Safety
 * `learner` must be a live handle and `bits` valid for `len` bytes.
 */
enum RwStatus rw_learner_observe(struct RwLearner *learner, const uint8_t *bits, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RANKWATCH_H */
