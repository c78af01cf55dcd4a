#ifndef BILATTICE_H
#define BILATTICE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which sequence of a table to read.
 */
typedef enum BlColumn {
  BL_COLUMN_A_SQ_PAINLEVE = 0,
  BL_COLUMN_B_PAINLEVE = 1,
  BL_COLUMN_A_SQ_ORACLE = 2,
  BL_COLUMN_B_ORACLE = 3,
} BlColumn;

/**
 * Result of every call.
 */
typedef enum BlStatus {
  BL_STATUS_OK = 0,
  BL_STATUS_NULL_POINTER = 1,
  BL_STATUS_INVALID_UTF8 = 2,
  BL_STATUS_PARSE = 3,
  BL_STATUS_VALIDITY = 4,
  BL_STATUS_POLE = 5,
  BL_STATUS_SINGULARITY = 6,
  BL_STATUS_RANK = 7,
  BL_STATUS_PRECISION = 8,
  BL_STATUS_DEGENERATE = 9,
  BL_STATUS_OUT_OF_RANGE = 10,
  BL_STATUS_BUFFER_TOO_SMALL = 11,
  BL_STATUS_INTERNAL = 12,
} BlStatus;

/**
 * Both pipelines' coefficients for `n = 0..=N`.
 */
typedef struct BlTable BlTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Computes the table for indices `0..=n` with the oracle at `digits` digits.
 *
 * `family` is `"charlier"` or `"meixner"`; `lattice` is `"plain"`,
 * `"shifted"` or `"bi"`. `a`, `beta`, `gamma` and `t` are decimal or `p/q`
 * strings; `gamma` is null for Charlier and `t` is null unless the lattice
 * is `"bi"` (where `"inf"` is allowed). On success `*out` owns a table to be
 * released with [`bl_table_free`].
 *
 * # Safety
 * String arguments are null or NUL-terminated; `out` is writable.
 */
enum BlStatus bl_table_compute(const char *family,
                               const char *a,
                               const char *beta,
                               const char *gamma,
                               const char *lattice,
                               const char *t,
                               size_t n,
                               uint32_t digits,
                               struct BlTable **out);

/**
 * Releases a table. Null is ignored.
 *
 * # Safety
 * `table` is null or came from [`bl_table_compute`] and was not freed before.
 */
void bl_table_free(struct BlTable *table);

/**
 * Number of rows, `N + 1`; 0 for a null table.
 *
 * # Safety
 * `table` is null or a live table.
 */
size_t bl_table_len(const struct BlTable *table);

/**
 * Digits used by the forward iteration; 0 for a null table.
 *
 * # Safety
 * `table` is null or a live table.
 */
uint32_t bl_table_painleve_digits(const struct BlTable *table);

/**
 * Last index certified by the precision-doubling rerun, or -1 if none.
 *
 * # Safety
 * `table` is null or a live table.
 */
int64_t bl_table_certified_through(const struct BlTable *table);

/**
 * Whether both pipelines agree to 1e-20 on every row and the iteration is
 * certified throughout.
 *
 * # Safety
 * `table` is null or a live table.
 */
bool bl_table_agrees(const struct BlTable *table);

/**
 * Writes entry `index` of `column` with `sig_digits` significant digits as a
 * NUL-terminated decimal string. `*needed` receives the required buffer size
 * even when the buffer is too small.
 *
 * # Safety
 * `table` is a live table; `buf` is null or valid for `buf_len` bytes;
 * `needed` is null or writable.
 */
enum BlStatus bl_table_value(const struct BlTable *table,
                             enum BlColumn column,
                             size_t index,
                             uint32_t sig_digits,
                             char *buf,
                             size_t buf_len,
                             size_t *needed);

/**
 * Copies the message of the last failure on this thread.
 *
 * # Safety
 * `buf` is null or valid for `buf_len` bytes; `needed` is null or writable.
 */
enum BlStatus bl_last_error(char *buf, size_t buf_len, size_t *needed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BILATTICE_H */
