/* Minimal C caller: parse a config, run it, read the final gap. */
#include <stdio.h>
#include <stdlib.h>
#include "rdgd.h"

static const char *CONF =
    "loss = least_squares\n"
    "n = 200\n"
    "p = 5\n"
    "m = 4\n"
    "t = 50\n"
    "trials = 3\n"
    "sigma2 = 0.25\n"
    "corruption = residual_greedy\n"
    "kappa = 5\n"
    "r = 0.3\n";

static void die(const char *what) {
    char msg[256];
    rdgd_last_error(msg, sizeof msg);
    fprintf(stderr, "%s: %s\n", what, msg);
    exit(1);
}

int main(void) {
    RdgdConfig *config = NULL;
    if (rdgd_config_parse(CONF, &config) != RDGD_STATUS_OK) die("parse");
    if (rdgd_config_set_seed(config, 42) != RDGD_STATUS_OK) die("seed");

    RdgdRunResult *result = NULL;
    if (rdgd_run(config, &result) != RDGD_STATUS_OK) die("run");

    size_t rounds = rdgd_result_rounds(result);
    double gap = 0.0;
    if (rdgd_result_gap_mean(result, rounds - 1, &gap) != RDGD_STATUS_OK) die("gap");
    printf("%zu rounds, %zu trials, final mean gap %.6e\n",
           rounds, rdgd_result_trials(result), gap);

    uint64_t t0 = 0;
    if (rdgd_transition_time(1.2, 0.85, 1000.0, 0.4, &t0) != RDGD_STATUS_OK) die("t0");
    printf("transition time for (M=1.2, alpha=0.85, R=1000, r=0.4): %llu\n",
           (unsigned long long)t0);

    rdgd_result_free(result);
    rdgd_config_free(config);
    return 0;
}
