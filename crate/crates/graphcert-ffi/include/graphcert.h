/* C interface for the graphcert library. */

#ifndef GRAPHCERT_H
#define GRAPHCERT_H

/* Generated by cbindgen from crates/graphcert-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define GC_OK 0

#define GC_ERR_PARSE 1

#define GC_NOT_COVERED 2

#define GC_ERR_INTERNAL 3

#define GC_REJECTED 4

#define GC_ERR_ARGUMENT 5

// Result of analyzing one graph. Opaque; free with `gc_analysis_free`.
typedef struct GcAnalysis GcAnalysis;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread. The pointer is
// valid until the next failing call on the same thread.
const char *gc_last_error(void);

// Library version as a static string.
const char *gc_version(void);

// Analyzes a graph given as text in the graph file format.
//
// On success writes a handle to `out` and returns 0. Returns 2 (and
// still writes a handle carrying the report) when the graph is not
// covered. Other codes leave `out` untouched.
//
// # Safety
// `graph_text` must point to a NUL-terminated string and `out` to a
// writable pointer slot.
int32_t gc_analyze_text(const char *graph_text, struct GcAnalysis **out);

// Like `gc_analyze_text`, reading the graph from a file.
//
// # Safety
// `path` must point to a NUL-terminated string and `out` to a writable
// pointer slot.
int32_t gc_analyze_file(const char *path, struct GcAnalysis **out);

// Frees an analysis handle. Passing NULL is a no-op.
//
// # Safety
// `handle` must come from an analyze call and not be freed twice.
void gc_analysis_free(struct GcAnalysis *handle);

// 1 when the analysis produced a certificate, 0 otherwise.
//
// # Safety
// `handle` must be a live analysis handle.
int32_t gc_analysis_covered(const struct GcAnalysis *handle);

// The JSON report; owned by the handle.
//
// # Safety
// `handle` must be a live analysis handle.
const char *gc_analysis_report_json(const struct GcAnalysis *handle);

// The certificate JSON, or NULL when the graph was not covered; owned
// by the handle.
//
// # Safety
// `handle` must be a live analysis handle.
const char *gc_analysis_certificate_json(const struct GcAnalysis *handle);

// The case family label ("case1" ... "case4"); owned by the handle.
//
// # Safety
// `handle` must be a live analysis handle.
const char *gc_analysis_case(const struct GcAnalysis *handle);

// Fidelity floor above which nearby states are excluded; NaN when the
// graph was not covered.
//
// # Safety
// `handle` must be a live analysis handle.
double gc_analysis_f_min(const struct GcAnalysis *handle);

// Largest excluded deviation; NaN when the graph was not covered.
//
// # Safety
// `handle` must be a live analysis handle.
double gc_analysis_delta_max(const struct GcAnalysis *handle);

// Verifies a certificate (JSON text) against a graph (format text).
// Returns 0 on acceptance, 4 with `gc_last_error` detail on rejection.
//
// # Safety
// Both pointers must be NUL-terminated strings.
int32_t gc_verify_text(const char *certificate_json, const char *graph_text);

// Verifies a certificate file against a graph file.
//
// # Safety
// Both pointers must be NUL-terminated strings.
int32_t gc_verify_files(const char *certificate_path, const char *graph_path);

// Fidelity radius for prime dimension `d` and overlap parameter
// `q_overlap`; writes delta_max and f_min through the output pointers.
//
// # Safety
// Output pointers must be writable or NULL (the value is then
// discarded).
int32_t gc_fidelity_bound(uint32_t d, uint32_t q_overlap, double *out_delta_max, double *out_f_min);

// Fidelity radius in the large-dimension limit.
//
// # Safety
// Output pointers must be writable or NULL.
int32_t gc_fidelity_bound_limit(uint32_t q_overlap, double *out_delta_max, double *out_f_min);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAPHCERT_H */
