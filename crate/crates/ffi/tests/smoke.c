#include <math.h>
#include <stdio.h>
#include "levygof.h"

int main(void) {
    double q = 0.0;
    if (levygof_levy_quantile(0.5, 0.0, 1.0, &q) != LEVYGOF_STATUS_OK) return 1;
    if (fabs(q - 2.198109338317732) > 1e-12) return 2;

    double data[64];
    if (levygof_levy_sample(0.0, 1.0, 64, 5, 0, data) != LEVYGOF_STATUS_OK) return 3;
    LevygofSample *s = NULL;
    if (levygof_sample_new(data, 64, &s) != LEVYGOF_STATUS_OK) return 4;
    double v = 0.0;
    if (levygof_statistic(s, LEVYGOF_STATISTIC_TN, &v) != LEVYGOF_STATUS_OK) return 5;
    levygof_sample_free(s);

    LevygofNull *nd = NULL;
    if (levygof_null_simulate(LEVYGOF_STATISTIC_TN, 64, 5, 200, 0, &nd) != LEVYGOF_STATUS_OK) return 6;
    double p = 0.0;
    if (levygof_null_p_value(nd, v, &p) != LEVYGOF_STATUS_OK || !(p > 0.0 && p <= 1.0)) return 7;
    levygof_null_free(nd);

    char msg[128];
    if (levygof_levy_cdf(1.0, 0.0, 0.0, &q) != LEVYGOF_STATUS_DOMAIN) return 8;
    if (levygof_last_error(msg, sizeof msg) == 0) return 9;
    printf("ok %.6f\n", p);
    return 0;
}
