/* Minimal C consumer: estimates both bundled tables and one Monte Carlo row. */
#include <stdio.h>
#include "lensfocus.h"

static int check(LfStatus s, const char *what) {
    if (s != LF_STATUS_OK) {
        fprintf(stderr, "%s failed (%d): %s\n", what, (int)s, lf_last_error());
        return 1;
    }
    return 0;
}

int main(void) {
    for (uint32_t table = 1; table <= 2; table++) {
        LfSession *session = NULL;
        LfEstimate *est = NULL;
        double mean, sem;
        if (check(lf_session_bundled(table, &session), "bundled")) return 1;
        if (check(lf_session_estimate(session, LF_MODE_TABLE_REPRODUCTION, &est), "estimate")) return 1;
        lf_estimate_mean_f(est, &mean);
        lf_estimate_sem_f(est, &sem);
        printf("table %u: mean f = %.2f cm, sem = %.4f cm\n", table, mean, sem);

        LfNoise noise = lf_noise_default(17);
        LfUncertainty u;
        if (check(lf_session_uncertainty(session, 0, &noise, 1000, &u), "uncertainty")) return 1;
        printf("table %u row 1: %zu trials, sd f = %s\n", table, u.n, u.sd_f > 0.0 ? "positive" : "zero");

        lf_estimate_free(est);
        lf_session_free(session);
    }

    double width;
    LfStatus s = lf_width_two_position(10.0, 0.5, 0.1, 0.1, &width);
    printf("equal widths: status %d, %s\n", (int)s, lf_last_error());
    return s == LF_STATUS_DEGENERATE ? 0 : 1;
}
