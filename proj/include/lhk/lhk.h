#ifndef LHK_LHK_H
#define LHK_LHK_H

/*
 * C interface to the lhk library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every function returns an lhk_status; on failure the message, the typed
 * error name and (for domain errors) the offending coordinate are available
 * from lhk_last_error* until the next call on the same thread.
 *
 * Strings returned through `char**` are heap allocated and must be released
 * with lhk_string_free. Indices are 1-based wherever they appear in text or
 * JSON.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(LHK_BUILDING_LIBRARY)
#define LHK_API __attribute__((visibility("default")))
#else
#define LHK_API
#endif

typedef enum lhk_status {
  LHK_OK = 0,
  LHK_ERR_INVALID_ARGUMENT = 1, /* bad arguments, shapes, sizes */
  LHK_ERR_PARSE = 2,            /* malformed text or JSON */
  LHK_ERR_CATALOG = 3,          /* unknown algebra or system name */
  LHK_ERR_DOMAIN = 4,           /* point outside a phase-space domain */
  LHK_ERR_NUMERIC = 5,          /* step underflow, radicands, no convergence... */
  LHK_ERR_INTERNAL = 6
} lhk_status;

typedef struct lhk_algebra lhk_algebra;
typedef struct lhk_poly lhk_poly;
typedef struct lhk_system lhk_system;
typedef struct lhk_trajectory lhk_trajectory;

typedef enum lhk_method_kind { LHK_RK4 = 0, LHK_RKF45 = 1 } lhk_method_kind;

typedef struct lhk_method {
  lhk_method_kind kind;
  double h;    /* RK4 step */
  double atol; /* RKF45 tolerances */
  double rtol;
} lhk_method;

LHK_API const char* lhk_version(void);
LHK_API const char* lhk_last_error(void);
/* Typed name such as "DomainError" or "NegativeRadicandError". */
LHK_API const char* lhk_last_error_kind(void);
/* Offending coordinate name of the last domain error, or "". */
LHK_API const char* lhk_last_error_coordinate(void);
LHK_API void lhk_string_free(char* s);

/* ---- algebra ---- */

LHK_API lhk_status lhk_algebra_builtin(const char* name, lhk_algebra** out);
/* {"r": int, "c": [[a, b, g, "p/q"], ...]} */
LHK_API lhk_status lhk_algebra_from_json(const char* text, lhk_algebra** out);
LHK_API lhk_status lhk_algebra_abelian(int dim, lhk_algebra** out);
LHK_API void lhk_algebra_free(lhk_algebra* a);
LHK_API int lhk_algebra_dim(const lhk_algebra* a);
/* [{"name", "dim", "basis", "notes"}, ...] */
LHK_API lhk_status lhk_algebra_list(char** json);
LHK_API lhk_status lhk_algebra_to_json(const lhk_algebra* a, char** json);
/* {"valid": bool, "violations": [{"kind", "indices", "residual"}]} */
LHK_API lhk_status lhk_algebra_validate(const lhk_algebra* a, char** json);
/* Row-major r*r matrix M(b) of the Lie-integral flow df/dt = M f. */
LHK_API lhk_status lhk_algebra_adjoint_matrix(const lhk_algebra* a, const double* b, size_t r,
                                             double* out);
/* {"dimension": k, "basis": [["p/q", ...], ...]} */
LHK_API lhk_status lhk_algebra_center(const lhk_algebra* a, char** json);

/* ---- polynomials in S_g^(m) ---- */

/* Generators are "v<alpha>" or "v<alpha>_<copy>". m = 0 infers the copy
 * count from the text. */
LHK_API lhk_status lhk_poly_parse(const lhk_algebra* a, const char* text, int m, lhk_poly** out);
LHK_API void lhk_poly_free(lhk_poly* p);
LHK_API int lhk_poly_copies(const lhk_poly* p);
LHK_API int lhk_poly_is_zero(const lhk_poly* p);
LHK_API int lhk_poly_equal(const lhk_poly* p, const lhk_poly* q);
LHK_API lhk_status lhk_poly_to_string(const lhk_poly* p, char** text);
LHK_API lhk_status lhk_poly_add(const lhk_poly* p, const lhk_poly* q, lhk_poly** out);
LHK_API lhk_status lhk_poly_mul(const lhk_poly* p, const lhk_poly* q, lhk_poly** out);
/* factor is a rational "p/q". */
LHK_API lhk_status lhk_poly_scale(const lhk_poly* p, const char* factor, lhk_poly** out);
LHK_API lhk_status lhk_poly_bracket(const lhk_algebra* a, const lhk_poly* p, const lhk_poly* q,
                                   lhk_poly** out);
LHK_API lhk_status lhk_poly_coproduct(const lhk_poly* p, int m, lhk_poly** out);
LHK_API lhk_status lhk_poly_embed(const lhk_poly* p, int m, lhk_poly** out);
/* sigma[a-1] is the image of copy a (1-based images). */
LHK_API lhk_status lhk_poly_permute(const lhk_poly* p, const int* sigma, size_t m, lhk_poly** out);
LHK_API lhk_status lhk_casimir_check(const lhk_algebra* a, const lhk_poly* p, int* is_casimir);
/* {"dmax", "dimension", "basis": ["1", ...]} */
LHK_API lhk_status lhk_casimir_find(const lhk_algebra* a, int dmax, char** json);

/* ---- systems ---- */

/* ["ermakov", ...] */
LHK_API lhk_status lhk_system_list(char** json);
/* params_json may be NULL: {"b0": 1, "b1": "cos", ...} */
LHK_API lhk_status lhk_system_catalog(const char* name, const char* params_json, lhk_system** out);
/* {"name": ..., "params": {...}, "coefficients": [...] | {...}} */
LHK_API lhk_status lhk_system_from_json(const char* descriptor, lhk_system** out);
LHK_API void lhk_system_free(lhk_system* s);
LHK_API int lhk_system_dim(const lhk_system* s);
/* Superposition rule id, "" when the entry has none. */
LHK_API const char* lhk_system_rule(const lhk_system* s);
LHK_API lhk_status lhk_system_describe(const lhk_system* s, char** json);
LHK_API lhk_status lhk_system_vector_field(const lhk_system* s, double t, const double* x, size_t n,
                                          double* out);
/* Rejection-samples m points from the system's sampling box (copy-major,
 * n*m values). */
LHK_API lhk_status lhk_system_sample(const lhk_system* s, int m, uint64_t seed, double* out,
                                    size_t len);
/* Homomorphism check of the realization and every alternate bivector. */
LHK_API lhk_status lhk_system_homomorphism(const lhk_system* s, int samples, double tol,
                                          uint64_t seed, char** json);

/* ---- dynamics ---- */

LHK_API lhk_method lhk_method_default(void);

/* Integrates the m-fold diagonal prolongation (m = 1 for the system itself).
 * x0 holds n*m values, copy-major. */
LHK_API lhk_status lhk_integrate(const lhk_system* s, int m, const double* x0, size_t len,
                                double t0, double t1, lhk_method method, lhk_trajectory** out);
LHK_API void lhk_trajectory_free(lhk_trajectory* t);
LHK_API size_t lhk_trajectory_size(const lhk_trajectory* t);
LHK_API size_t lhk_trajectory_dim(const lhk_trajectory* t);
LHK_API lhk_status lhk_trajectory_time(const lhk_trajectory* t, size_t i, double* out);
LHK_API lhk_status lhk_trajectory_state(const lhk_trajectory* t, size_t i, double* out, size_t len);
LHK_API lhk_status lhk_trajectory_csv(const lhk_trajectory* t, char** csv);

/* Samples m initial points with `seed` (x0 may be NULL) and reports the
 * drift of every Casimir-derived invariant of the m-fold prolongation.
 * {"system", "m", "initial", "tol", "pass", "drift": {name: {...}}} */
LHK_API lhk_status lhk_verify_constants(const lhk_system* s, int m, const double* x0, size_t len,
                                       double t0, double t1, lhk_method method, double tol,
                                       uint64_t seed, char** json);

/* Solves df/dt = M(b(t)) f from f0 (sampled when NULL), integrates the
 * system from x0 (sampled when NULL) and checks sum f_a h_a is constant. */
LHK_API lhk_status lhk_lie_integral(const lhk_system* s, const double* f0, size_t r,
                                   const double* x0, size_t n, double t0, double t1,
                                   lhk_method method, double tol, uint64_t seed, char** json);

/* ---- superposition ---- */

/* options_json may be NULL: {"t0", "t1", "grid", "seed", "tol",
 * "method": {"kind": "rkf45", "atol", "rtol"} | {"kind": "rk4", "h"},
 * "initial": [[...], ...], "errors_csv_path"}. The report JSON is returned
 * in *json and the per-time error CSV in *csv (when csv is not NULL). */
LHK_API lhk_status lhk_verify_superposition(const lhk_system* s, const char* options_json,
                                           char** json, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* LHK_LHK_H */
