#ifndef DESCENTS_H
#define DESCENTS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DescentsStatus {
  DESCENTS_STATUS_OK = 0,
  DESCENTS_STATUS_INVALID_ARGUMENT = 1,
  DESCENTS_STATUS_NULL_POINTER = 2,
  DESCENTS_STATUS_INTERNAL = 3,
  DESCENTS_STATUS_PANIC = 4,
} DescentsStatus;

typedef enum DescentsMeasure {
  DESCENTS_MEASURE_R = 0,
  DESCENTS_MEASURE_C = 1,
} DescentsMeasure;

typedef enum DescentsStatistic {
  DESCENTS_STATISTIC_D = 0,
  DESCENTS_STATISTIC_C = 1,
  DESCENTS_STATISTIC_PARSIMONY = 2,
} DescentsStatistic;

typedef enum DescentsMomentStatistic {
  DESCENTS_MOMENT_STATISTIC_C_UNDER_C = 0,
  DESCENTS_MOMENT_STATISTIC_D_UNDER_C = 1,
  DESCENTS_MOMENT_STATISTIC_D_UNDER_R = 2,
} DescentsMomentStatistic;

typedef enum DescentsTvStatistic {
  // k - d under C_{k,n}
  DESCENTS_TV_STATISTIC_K_MINUS_D_UNDER_C = 0,
  // k - c under C_{k,n}
  DESCENTS_TV_STATISTIC_K_MINUS_C_UNDER_C = 1,
  // k - 1 - d under R_{k,n}
  DESCENTS_TV_STATISTIC_K_MINUS1_MINUS_D_UNDER_R = 2,
} DescentsTvStatistic;

// Exact law of a statistic (opaque).
typedef struct DescentsPmf DescentsPmf;

// Seeded stream of sampled statistic values (opaque).
typedef struct DescentsSampler DescentsSampler;

// Float renderings of the exact moments.
typedef struct DescentsMoments {
  double mean;
  double second_moment;
  double variance;
} DescentsMoments;

typedef struct DescentsTvReport {
  double lambda;
  double tv_exact;
  // Certified half-width of the interval around `tv_exact`.
  double tv_width;
  double bound;
  double slack;
} DescentsTvReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or NULL. Valid until
// the next failing call on the same thread; do not free.
const char *descents_last_error(void);

// Library version as a static NUL-terminated string.
const char *descents_version(void);

// Frees a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void descents_string_free(char *s);

// Builds the exact law of `stat` under the given measure.
//
// # Safety
// `out` must be a valid pointer to writable storage for one pointer.
enum DescentsStatus descents_pmf_new(enum DescentsMeasure measure,
                                     enum DescentsStatistic stat,
                                     uint64_t k,
                                     uint32_t n,
                                     struct DescentsPmf **out);

// # Safety
// `pmf` must be NULL or a handle from [`descents_pmf_new`] not yet freed.
void descents_pmf_free(struct DescentsPmf *pmf);

// Number of support points.
//
// # Safety
// `pmf` must be a live handle; `out` must be writable.
enum DescentsStatus descents_pmf_len(const struct DescentsPmf *pmf, size_t *out);

// Support point `index` (ascending) and its mass as a double.
//
// # Safety
// `pmf` must be a live handle; `value` and `prob` must be writable.
enum DescentsStatus descents_pmf_entry(const struct DescentsPmf *pmf,
                                       size_t index,
                                       uint64_t *value,
                                       double *prob);

// Exact mass at `value` as a reduced "num/den" string; free with
// [`descents_string_free`].
//
// # Safety
// `pmf` must be a live handle; `out` must be writable.
enum DescentsStatus descents_pmf_mass(const struct DescentsPmf *pmf, uint64_t value, char **out);

// The law as a JSON object of exact strings; free with
// [`descents_string_free`].
//
// # Safety
// `pmf` must be a live handle; `out` must be writable.
enum DescentsStatus descents_pmf_to_json(const struct DescentsPmf *pmf, char **out);

// Seeded single-stream sampler of `stat` under the given measure.
//
// # Safety
// `out` must be writable.
enum DescentsStatus descents_sampler_new(enum DescentsMeasure measure,
                                         enum DescentsStatistic stat,
                                         uint64_t k,
                                         uint32_t n,
                                         uint64_t seed,
                                         struct DescentsSampler **out);

// # Safety
// `sampler` must be NULL or a handle from [`descents_sampler_new`].
void descents_sampler_free(struct DescentsSampler *sampler);

// Draws one value of the statistic.
//
// # Safety
// `sampler` must be a live handle; `out` must be writable.
enum DescentsStatus descents_sampler_next(struct DescentsSampler *sampler, uint64_t *out);

// Exact first two moments of the chosen statistic, rendered as doubles.
//
// # Safety
// `out` must be writable.
enum DescentsStatus descents_moments(enum DescentsMomentStatistic statistic,
                                     uint64_t k,
                                     uint32_t n,
                                     struct DescentsMoments *out);

// Total variation to Poisson and the Stein bound.
//
// # Safety
// `out` must be writable.
enum DescentsStatus descents_tv(enum DescentsTvStatistic statistic,
                                uint64_t k,
                                uint32_t n,
                                struct DescentsTvReport *out);

// Copies the most recent error message into a freshly allocated string,
// or returns NULL when there is none.
char *descents_last_error_copy(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DESCENTS_H */
