#ifndef WALLKIT_H
#define WALLKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WallkitStatus {
  WALLKIT_STATUS_OK = 0,
  WALLKIT_STATUS_NULL_POINTER = 1,
  WALLKIT_STATUS_INVALID_UTF8 = 2,
  WALLKIT_STATUS_INPUT = 3,
  WALLKIT_STATUS_DEGENERATE = 4,
  WALLKIT_STATUS_CONFIGURATION = 5,
  WALLKIT_STATUS_ON_WALL = 6,
  WALLKIT_STATUS_LIMIT_EXCEEDED = 7,
  WALLKIT_STATUS_PARSE = 8,
  WALLKIT_STATUS_UNKNOWN_FIXTURE = 9,
  WALLKIT_STATUS_OVERFLOW = 10,
  WALLKIT_STATUS_BUFFER_TOO_SMALL = 11,
  WALLKIT_STATUS_PANIC = 12,
} WallkitStatus;

typedef enum WallkitCondition {
  WALLKIT_CONDITION_NONE = 0,
  WALLKIT_CONDITION_MK_MINUS2 = 1,
  WALLKIT_CONDITION_MK_ISOTROPIC = 2,
  WALLKIT_CONDITION_BM_ORTH_ROOT = 3,
  WALLKIT_CONDITION_BM_ISOTROPIC = 4,
  WALLKIT_CONDITION_BM_BOUNDED_ROOT = 5,
  WALLKIT_CONDITION_BM_SUM_DECOMPOSITION = 6,
} WallkitCondition;

// Opaque handle on the lattice data for one n.
typedef struct WallkitContext WallkitContext;

// A wall type (D², div D) with ray square ray_num / ray_den.
typedef struct WallkitWallType {
  int64_t square;
  int64_t div;
  int64_t ray_num;
  int64_t ray_den;
} WallkitWallType;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or "" after a success.
// The pointer stays valid until the next wallkit call on this thread.
const char *wallkit_last_error(void);

// Creates the context for K3^[n]-type lattices, n ≥ 2.
//
// # Safety
// `out` must be a valid pointer.
enum WallkitStatus wallkit_context_new(uint64_t n, struct WallkitContext **out);

// # Safety
// `ctx` must come from `wallkit_context_new` and not be used afterwards.
void wallkit_context_free(struct WallkitContext *ctx);

// # Safety
// `ctx` must be a live context or null.
uint64_t wallkit_context_n(const struct WallkitContext *ctx);

// Rank of L_n; vectors passed to this library have this many coordinates.
//
// # Safety
// `ctx` must be a live context or null.
size_t wallkit_context_rank(const struct WallkitContext *ctx);

// Writes the candidate wall types into `out` (capacity `cap`) and their
// number into `len`. With `out` null only `len` is written; a short buffer
// yields `BufferTooSmall` with `len` set.
//
// # Safety
// `ctx` must be live, `len` valid, and `out` valid for `cap` elements.
enum WallkitStatus wallkit_wall_types(const struct WallkitContext *ctx,
                                      struct WallkitWallType *out,
                                      size_t cap,
                                      size_t *len);

// Wall test for D ∈ L_n. `condition` is `None` when no criterion fires.
//
// # Safety
// `ctx` must be live, `coords` valid for `len` elements, `condition` valid.
enum WallkitStatus wallkit_wall_test(const struct WallkitContext *ctx,
                                     const int64_t *coords,
                                     size_t len,
                                     enum WallkitCondition *condition);

// Whether v and w have equal (square, div, discriminant class).
//
// # Safety
// `ctx` must be live, `v` and `w` valid for `len` elements, `same` valid.
enum WallkitStatus wallkit_same_orbit(const struct WallkitContext *ctx,
                                      const int64_t *v,
                                      const int64_t *w,
                                      size_t len,
                                      bool *same);

// Candidate wall types as a JSON array.
//
// # Safety
// `ctx` must be live and `out` valid.
enum WallkitStatus wallkit_tabulate_json(const struct WallkitContext *ctx, char **out);

// Chamber report for a JSON query (the format accepted by `wallkit chamber`).
//
// # Safety
// `query` must be a NUL-terminated string and `out` valid.
enum WallkitStatus wallkit_chamber_json(const char *query, uint64_t bound, char **out);

// JSON report of one fixture; `n` = 0 keeps the stored n.
//
// # Safety
// `name` must be a NUL-terminated string and `out` valid.
enum WallkitStatus wallkit_verify_fixture_json(const char *name, uint64_t n, char **out);

// # Safety
// `s` must come from this library and not be used afterwards.
void wallkit_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WALLKIT_H */
