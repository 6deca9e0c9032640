/* C interface of the sigma2 library. All functions return an s2_status; on failure
   s2_last_error() describes the problem (per thread, valid until the next call). */
#ifndef SIGMA2_H
#define SIGMA2_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define S2_API __declspec(dllexport)
#else
#define S2_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    S2_OK = 0,
    S2_ERR_INVALID_ARGUMENT = 1,
    S2_ERR_DOMAIN = 2,
    S2_ERR_NUMERICAL = 3,
    S2_ERR_IO = 4,
    S2_ERR_CONFIG = 5,
    S2_ERR_INTERNAL = 6
} s2_status;

typedef struct s2_chart s2_chart;
typedef struct s2_map s2_map;

S2_API const char* s2_last_error(void);
S2_API const char* s2_version(void);

/* Charts, e.g. "s3_join(1)". metric receives dim*dim entries, row major. */
S2_API s2_status s2_chart_create(const char* spec, s2_chart** out);
S2_API s2_status s2_chart_dim(const s2_chart* c, int* dim);
S2_API s2_status s2_chart_metric(const s2_chart* c, const double* x, double* g);
S2_API void s2_chart_destroy(s2_chart* c);

/* Maps, e.g. "alpha_join(arccos_cos2,2,1)"; deform may be NULL or "hopf_squash(1,1)" etc. */
S2_API s2_status s2_map_create(const char* spec, const char* deform, s2_map** out);
S2_API s2_status s2_map_dims(const s2_map* m, int* domain_dim, int* codomain_dim);
S2_API s2_status s2_map_evaluate(const s2_map* m, const double* x, double* y);
/* n x m Jacobian, row major */
S2_API s2_status s2_map_jacobian(const s2_map* m, const double* x, double* J);
S2_API void s2_map_destroy(s2_map* m);

/* Cauchy-Green spectrum at x: lambda2 gets m values (descending), sigma gets m + 1 values. */
S2_API s2_status s2_analyze_point(const s2_map* m, const double* x, double* lambda2, double* sigma);

typedef struct {
    double e_sigma1, e_sigma2, e_4, e_total, volume;
    double charge_raw, charge_snapped;
    int charge_ok;
    double bound, bound_slack;
    int bound_attained;
} s2_energy_result;

S2_API s2_status s2_energy(const s2_map* m, double kappa, s2_energy_result* out);

typedef struct {
    double r_star, e_min, ratio, ratio_total, gs_rel_err;
} s2_radius_result;

S2_API s2_status s2_minimize_radius(const s2_map* m, double kappa, s2_radius_result* out);
S2_API s2_status s2_degree(const s2_map* m, double* raw, double* snapped);
S2_API s2_status s2_hopf_invariant(const s2_map* m, double* raw, double* snapped);

/* Sup norm of the named residual system over the default grid. */
S2_API s2_status s2_residual(const s2_map* m, const char* system, double* sup, int* critical);

/* Runs a CLI command with the given config text; writes outputs under out_dir (NULL: the
   config's `out` key).
   exit_code receives 0, 2 (failed reproduce assertion) or 1/3 on errors. */
S2_API s2_status s2_run(const char* command, const char* config_text, const char* config_name,
                        const char* out_dir, uint64_t seed, int has_seed, int* exit_code);

/* Default configuration as config-file text, one commented key per line. */
S2_API const char* s2_default_config(void);

/* Human readable summary lines of the last successful s2_run on this thread, '\n' separated. */
S2_API const char* s2_last_summary(void);

#ifdef __cplusplus
}
#endif

#endif
