#ifndef CHAINPOLY_H
#define CHAINPOLY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum {
  CP_STATUS_OK = 0,
  CP_STATUS_NULL_POINTER = 1,
  CP_STATUS_INVALID_ARGUMENT = 2,
  CP_STATUS_INVALID_CHAIN = 3,
  CP_STATUS_DEGENERATE = 4,
  CP_STATUS_CAPACITY = 5,
  CP_STATUS_CONDITIONING = 6,
  CP_STATUS_CONSISTENCY = 7,
  CP_STATUS_DOMAIN = 8,
  CP_STATUS_PARSE = 9,
  CP_STATUS_UNSUPPORTED = 10,
  CP_STATUS_PANIC = 11,
} CpStatus;

// Variable of a polynomial handle.
typedef enum {
  CP_VARIABLE_A = 0,
  CP_VARIABLE_T = 1,
} CpVariable;

// An open or closed polygonal chain.
typedef struct CpChain CpChain;

// A Laurent polynomial with optional per-coefficient standard errors.
typedef struct CpPoly CpPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or an empty string.
//
// The pointer stays valid until the next call into this library on the same thread.
const char *cp_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *cp_version(void);

// Builds a chain from `n_vertices` points stored as `xyz[3k], xyz[3k+1], xyz[3k+2]`.
CpStatus cp_chain_new(const double *xyz, size_t n_vertices, bool closed, CpChain **out);

// Parses chain number `index` from text or JSON chain data.
CpStatus cp_chain_parse(const char *text, size_t index, CpChain **out);

// Releases a chain; null is ignored.
void cp_chain_free(CpChain *chain);

CpStatus cp_chain_num_vertices(const CpChain *chain, size_t *out);

CpStatus cp_chain_is_closed(const CpChain *chain, bool *out);

// Gauss linking integral of two chains.
CpStatus cp_gauss_linking(const CpChain *a, const CpChain *b, double *out);

CpStatus cp_writhe(const CpChain *chain, double *out);

CpStatus cp_acn(const CpChain *chain, double *out);

// Probability that a random projection of a 4-edge open chain is the knotoid k2.1.
CpStatus cp_p_k21(const CpChain *chain, double *out);

// Closed-form projection-averaged bracket in `A` (chains with at most 4 edges).
CpStatus cp_bracket_exact(const CpChain *chain, CpPoly **out);

// Closed-form Jones polynomial in `t` (open chains with at most 4 edges, any closed chain).
CpStatus cp_jones_exact(const CpChain *chain, uint64_t seed, CpPoly **out);

// Monte Carlo projection-averaged bracket in `A`.
CpStatus cp_bracket_mc(const CpChain *chain, uint64_t samples, uint64_t seed, CpPoly **out);

// Monte Carlo Jones polynomial in `t`.
CpStatus cp_jones_mc(const CpChain *chain, uint64_t samples, uint64_t seed, CpPoly **out);

// Releases a polynomial; null is ignored.
void cp_poly_free(CpPoly *poly);

CpStatus cp_poly_variable(const CpPoly *poly, CpVariable *out);

// Number of nonzero terms.
CpStatus cp_poly_len(const CpPoly *poly, size_t *out);

// Term `index` in descending exponent order. The exponent is in quarter
// units (`t^(3/2)` has `quarter_exp = 6`); `stderr` is 0 for closed forms.
// Any of the out-pointers may be null.
CpStatus cp_poly_term(const CpPoly *poly,
                      size_t index,
                      int32_t *quarter_exp,
                      double *coeff,
                      double *stderr);

// Value of the polynomial at `x > 0`.
CpStatus cp_poly_eval(const CpPoly *poly, double x, double *out);

// Text rendering such as `t + t^(3/2) - t^(5/2)`; free with [`cp_string_free`].
CpStatus cp_poly_to_string(const CpPoly *poly, char **out);

// Releases a string returned by this library; null is ignored.
void cp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHAINPOLY_H */
