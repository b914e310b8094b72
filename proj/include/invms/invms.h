#ifndef INVMS_H
#define INVMS_H

/* C interface to the invms library: bivariate inverted max-stable laws,
 * conditioned-extremes normings and limit laws, sampling and fitting.
 *
 * Conventions
 *   - Every function returns an invms_status; outputs go through pointers.
 *   - On failure invms_last_error() describes the problem (thread-local,
 *     valid until the next call on the same thread).
 *   - Strings returned through char** are owned by the caller and must be
 *     released with invms_string_free.
 *   - Handles are opaque and released with their matching _free function;
 *     passing NULL to a _free function is a no-op. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(INVMS_BUILDING_LIBRARY)
#define INVMS_API __attribute__((visibility("default")))
#else
#define INVMS_API
#endif

typedef enum invms_status {
  INVMS_OK = 0,
  INVMS_E_DOMAIN = 1,      /* argument outside the parameter or function domain */
  INVMS_E_PARSE = 2,       /* malformed family descriptor or JSON */
  INVMS_E_CONVERGENCE = 3, /* iteration or quadrature did not converge */
  INVMS_E_BRACKET = 4,     /* root not bracketed */
  INVMS_E_DATA = 5,        /* malformed or insufficient data */
  INVMS_E_UNSUPPORTED = 6, /* operation not available for this family */
  INVMS_E_STATE = 7,       /* handle not in a usable state */
  INVMS_E_BOUNDARY = 8,    /* evaluation on a spectral atom ray */
  INVMS_E_NUMERIC = 9,     /* numerical failure */
  INVMS_E_INTERNAL = 10,   /* unexpected internal error */
  INVMS_E_NULL = 11        /* required pointer argument was NULL */
} invms_status;

typedef struct invms_family invms_family;
typedef struct invms_fit invms_fit;

/* ---- errors and memory ------------------------------------------------- */

INVMS_API const char* invms_last_error(void);
INVMS_API const char* invms_status_name(invms_status s);
INVMS_API const char* invms_version(void);
INVMS_API void invms_string_free(char* s);

/* ---- exponent families -------------------------------------------------- */

/* "family=smith lambda=1.3" (whitespace or comma separated). */
INVMS_API invms_status invms_family_parse(const char* desc, invms_family** out);
/* {"family_id": "smith", "params": {"lambda": 1.3}} */
INVMS_API invms_status invms_family_from_json(const char* json, invms_family** out);
INVMS_API void invms_family_free(invms_family* fam);
INVMS_API invms_status invms_family_to_json(const invms_family* fam, char** out);
INVMS_API invms_status invms_family_spec(const invms_family* fam, char** out);

/* V(x, y), dV/dx, h(w) and the end-point masses of the spectral measure. */
INVMS_API invms_status invms_v(const invms_family* fam, double x, double y, double* out);
INVMS_API invms_status invms_v1(const invms_family* fam, double x, double y, double* out);
INVMS_API invms_status invms_spectral_density(const invms_family* fam, double w, double* out);
INVMS_API invms_status invms_atom_masses(const invms_family* fam, double* lower, double* upper);
INVMS_API invms_status invms_eta(const invms_family* fam, double* out);
/* JSON report {total_mass, moment, max_violation, pass, ...}; *pass is 0/1. */
INVMS_API invms_status invms_validate(const invms_family* fam, double tolerance, char** json,
                                      int* pass);

/* ---- inverted max-stable law (unit exponential margins) ---------------- */

INVMS_API invms_status invms_joint_survivor(const invms_family* fam, double x, double y,
                                            double* out);
/* Pr(Y > y | X = x) */
INVMS_API invms_status invms_conditional_survivor(const invms_family* fam, double y, double x,
                                                  double* out);
/* y with Pr(Y <= y | X = x) = p */
INVMS_API invms_status invms_conditional_quantile(const invms_family* fam, double p, double x,
                                                  double* out);

/* ---- normings and limit laws -------------------------------------------- */

/* a(x), b(x) of the family's tail class; *kind receives a static name. */
INVMS_API invms_status invms_norming(const invms_family* fam, double x, double* a, double* b,
                                     const char** kind);
INVMS_API invms_status invms_limit_cdf(const invms_family* fam, double z, double* out);
INVMS_API invms_status invms_limit_quantile(const invms_family* fam, double p, double* out);
INVMS_API invms_status invms_limit_atom(const invms_family* fam, double* out);
/* sup_z |F_u(z) - G(z)| and its location. */
INVMS_API invms_status invms_convergence_distance(const invms_family* fam, double u,
                                                  double* distance, double* z_at_sup);

/* ---- sampling ------------------------------------------------------------ */

/* n pairs in unit exponential margins from stream `stream` of `seed`;
 * xs and ys must hold n doubles each. */
INVMS_API invms_status invms_sample(const invms_family* fam, size_t n, uint64_t seed,
                                    uint64_t stream, double* xs, double* ys);

/* CSV with header naming columns x and y. On success *xs and *ys hold *n
 * values each; release them with invms_buffer_free. */
INVMS_API invms_status invms_csv_parse(const char* text, double** xs, double** ys, size_t* n);
/* CSV with header x,y and 15 significant digits. */
INVMS_API invms_status invms_csv_format(const double* xs, const double* ys, size_t n,
                                        char** out);
INVMS_API void invms_buffer_free(double* buf);

/* ---- fitting ------------------------------------------------------------- */

/* model: "canonical", "smith" or "gamma"; threshold_quantile in (0, 1);
 * empirical_threshold != 0 takes u from the data instead of -log(1 - q). */
INVMS_API invms_status invms_fit_create(const double* xs, const double* ys, size_t n,
                                        const char* model, double threshold_quantile,
                                        int empirical_threshold, invms_fit** out);
INVMS_API void invms_fit_free(invms_fit* fit);
INVMS_API invms_status invms_fit_to_json(const invms_fit* fit, char** out);
INVMS_API invms_status invms_fit_converged(const invms_fit* fit, int* out);
INVMS_API invms_status invms_fit_threshold(const invms_fit* fit, double* out);
INVMS_API invms_status invms_fit_residual_count(const invms_fit* fit, size_t* out);
/* Exceedance pairs and residuals; each buffer holds residual_count doubles. */
INVMS_API invms_status invms_fit_residuals(const invms_fit* fit, double* x, double* y,
                                           double* residual);
/* a(x) + b(x) z_p with z_p the empirical p-quantile of the residuals. */
INVMS_API invms_status invms_fit_quantile(const invms_fit* fit, double p, double x, double* out);

/* ---- studies and verification ------------------------------------------ */

/* Replicated fit study; config JSON keys (all optional): reps, n,
 * threshold_quantile, seed, probs, x_grid, models. Result is JSON with
 * x_grid, probs, theory, iqr and per-model averaged curves. */
INVMS_API invms_status invms_quantile_study(const invms_family* fam, const char* config_json,
                                            char** out);

/* suite: one of moment, eta, lemma1, convergence, variation, sampler, fig2,
 * or "all". options_json may be NULL. *all_pass is 0/1. */
INVMS_API invms_status invms_verify(const char* suite, const char* options_json, char** json,
                                    int* all_pass);

#ifdef __cplusplus
}
#endif

#endif /* INVMS_H */
