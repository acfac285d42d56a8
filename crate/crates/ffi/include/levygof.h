#ifndef LEVYGOF_H
#define LEVYGOF_H

#include <stddef.h>
#include <stdint.h>

typedef enum LevygofEstimator {
  LEVYGOF_ESTIMATOR_QCM = 0,
  LEVYGOF_ESTIMATOR_QCV = 1,
  LEVYGOF_ESTIMATOR_MLE = 2,
  LEVYGOF_ESTIMATOR_COV = 3,
} LevygofEstimator;

typedef enum LevygofStatistic {
  LEVYGOF_STATISTIC_VN = 0,
  LEVYGOF_STATISTIC_ON = 1,
  LEVYGOF_STATISTIC_TN = 2,
  LEVYGOF_STATISTIC_CN = 3,
  LEVYGOF_STATISTIC_RAN = 4,
  LEVYGOF_STATISTIC_DELTA_N = 5,
} LevygofStatistic;

typedef enum LevygofStatus {
  LEVYGOF_STATUS_OK = 0,
  LEVYGOF_STATUS_NULL_POINTER = 1,
  LEVYGOF_STATUS_DOMAIN = 2,
  LEVYGOF_STATUS_ESTIMATION = 3,
  LEVYGOF_STATUS_WINDOW = 4,
  LEVYGOF_STATUS_QUADRATURE = 5,
  LEVYGOF_STATUS_REPLICATE = 6,
  LEVYGOF_STATUS_PARSE = 7,
  LEVYGOF_STATUS_IO = 8,
  LEVYGOF_STATUS_PANIC = 9,
} LevygofStatus;

// Opaque handle to a simulated null distribution.
typedef struct LevygofNull LevygofNull;

// Opaque sample handle.
typedef struct LevygofSample LevygofSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy the last error message of this thread into `buf` as a
// NUL-terminated string, truncating if needed. Returns the full message
// length in bytes, excluding the terminator.
size_t levygof_last_error(char *buf, size_t len);

enum LevygofStatus levygof_levy_cdf(double x, double mu, double c, double *result);

enum LevygofStatus levygof_levy_pdf(double x, double mu, double c, double *result);

enum LevygofStatus levygof_levy_quantile(double prob, double mu, double c, double *result);

// Fill `values[0..n]` with `Lv(mu, c)` draws from stream `(seed, stream)`.
enum LevygofStatus levygof_levy_sample(double mu,
                                       double c,
                                       size_t n,
                                       uint64_t seed,
                                       uint64_t stream,
                                       double *values);

enum LevygofStatus levygof_theoretical_qcm(double a, double b, double c, double *result);

enum LevygofStatus levygof_theoretical_qcv(double a, double b, double c, double *result);

// Copy `len` observations into a new sample handle.
enum LevygofStatus levygof_sample_new(const double *values,
                                      size_t len,
                                      struct LevygofSample **sample);

void levygof_sample_free(struct LevygofSample *sample);

size_t levygof_sample_len(const struct LevygofSample *sample);

// Scale estimate. `a` and `b` give the quantile split for QCM and QCV and
// are ignored otherwise.
enum LevygofStatus levygof_estimate(const struct LevygofSample *sample,
                                    enum LevygofEstimator method,
                                    double a,
                                    double b,
                                    double *result);

// Statistic with its default splits and tuning constant.
enum LevygofStatus levygof_statistic(const struct LevygofSample *sample,
                                     enum LevygofStatistic kind,
                                     double *result);

// Simulate the null law of a statistic (default parameters) at sample size
// `n` under `Lv(1)`. `workers` does not affect the result.
enum LevygofStatus levygof_null_simulate(enum LevygofStatistic kind,
                                         size_t n,
                                         uint64_t seed,
                                         size_t replicates,
                                         size_t workers,
                                         struct LevygofNull **null);

void levygof_null_free(struct LevygofNull *null);

size_t levygof_null_len(const struct LevygofNull *null);

// Copy the sorted null draws into `values`, which must hold
// `levygof_null_len(null)` doubles.
enum LevygofStatus levygof_null_values(const struct LevygofNull *null, double *values);

enum LevygofStatus levygof_null_calibrate(const struct LevygofNull *null,
                                          double level,
                                          double *lower,
                                          double *upper);

enum LevygofStatus levygof_null_p_value(const struct LevygofNull *null,
                                        double observed,
                                        double *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEVYGOF_H */
