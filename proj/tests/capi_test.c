/* Exercises the C interface from C. */
#include "sigma2/sigma2.h"

#include <math.h>
#include <stdio.h>
#include <string.h>

static int failures = 0;

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: check failed: %s (last error: %s)\n", __FILE__, __LINE__, #cond, \
                    s2_last_error());                                 \
            ++failures;                                               \
        }                                                             \
    } while (0)

int main(int argc, char** argv) {
    const char* out = argc > 1 ? argv[1] : "capi_out";
    const double pi = 3.14159265358979323846;

    s2_chart* c = NULL;
    CHECK(s2_chart_create("s3_join(1)", &c) == S2_OK);
    int dim = 0;
    CHECK(s2_chart_dim(c, &dim) == S2_OK && dim == 3);
    double x[3] = {0.4, 1.1, 0.7}, g[9];
    CHECK(s2_chart_metric(c, x, g) == S2_OK);
    CHECK(fabs(g[0] - cos(0.7) * cos(0.7)) < 1e-15 && fabs(g[4] - sin(0.7) * sin(0.7)) < 1e-15 && g[8] == 1.0);
    s2_chart_destroy(c);

    CHECK(s2_chart_create("no_such_chart", &c) == S2_ERR_INVALID_ARGUMENT);
    CHECK(strlen(s2_last_error()) > 0);
    CHECK(s2_chart_dim(NULL, &dim) == S2_ERR_INVALID_ARGUMENT);

    s2_map* m = NULL;
    CHECK(s2_map_create("identity(1)", NULL, &m) == S2_OK);
    s2_energy_result e;
    CHECK(s2_energy(m, 4.0, &e) == S2_OK);
    CHECK(fabs(e.e_sigma1 - 3 * pi * pi) < 1e-9 && fabs(e.e_sigma2 - 3 * pi * pi) < 1e-9);
    s2_radius_result r;
    CHECK(s2_minimize_radius(m, 4.0, &r) == S2_OK);
    CHECK(fabs(r.ratio - 1) < 1e-10 && fabs(r.r_star - 2) < 1e-10);
    double raw = 0, snapped = 0;
    CHECK(s2_degree(m, &raw, &snapped) == S2_OK && snapped == 1.0);
    double l2[3], sig[4];
    CHECK(s2_analyze_point(m, x, l2, sig) == S2_OK);
    CHECK(fabs(l2[0] - 1) < 1e-12 && fabs(sig[2] - 3) < 1e-12);
    double J[9];
    CHECK(s2_map_jacobian(m, x, J) == S2_OK && fabs(J[0] - 1) < 1e-15);
    s2_map_destroy(m);

    CHECK(s2_map_create("gamma_hopf(pi2_minus_2s,2)", NULL, &m) == S2_OK);
    double sup = 1;
    int critical = 0;
    CHECK(s2_residual(m, "fh", &sup, &critical) == S2_OK && critical && sup < 1e-6);
    CHECK(s2_hopf_invariant(m, &raw, &snapped) == S2_OK && snapped == 1.0);
    CHECK(s2_residual(m, "bogus", &sup, &critical) == S2_ERR_INVALID_ARGUMENT);
    s2_map_destroy(m);

    int code = -1;
    CHECK(s2_run("reproduce", "case = identity-ratio\n", "inline", out, 0, 0, &code) == S2_OK);
    CHECK(code == 0);
    char path[1024];
    snprintf(path, sizeof path, "%s/report.json", out);
    FILE* f = fopen(path, "r");
    CHECK(f != NULL);
    if (f) fclose(f);
    CHECK(s2_run("energy", "kappa = 4\nbogus.key = 1\n", "inline", out, 0, 0, &code) == S2_ERR_CONFIG);
    CHECK(strstr(s2_last_error(), "inline:2") != NULL);
    CHECK(strstr(s2_default_config(), "quad.order_1d = 64") != NULL);

    if (failures) {
        fprintf(stderr, "%d C API checks failed\n", failures);
        return 1;
    }
    printf("C API checks passed\n");
    return 0;
}
