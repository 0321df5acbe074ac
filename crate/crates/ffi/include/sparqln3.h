#ifndef SPARQLN3_H
#define SPARQLN3_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes. Non-negative values equal the CLI exit codes.
typedef enum {
  SN3_STATUS_OK = 0,
  // Differential check found a difference.
  SN3_STATUS_MISMATCH = 1,
  // Syntax, validation or usage error.
  SN3_STATUS_INVALID = 2,
  SN3_STATUS_UNSUPPORTED = 3,
  SN3_STATUS_UNSTRATIFIABLE = 4,
  SN3_STATUS_CAP_EXCEEDED = 5,
  SN3_STATUS_NULL_POINTER = -1,
  SN3_STATUS_INVALID_UTF8 = -2,
  SN3_STATUS_PANIC = -3,
} Sn3Status;

// Input syntax for [`sn3_graph_parse`].
typedef enum {
  SN3_FORMAT_N_TRIPLES = 0,
  SN3_FORMAT_TURTLE = 1,
} Sn3Format;

// An RDF graph.
typedef struct Sn3Graph Sn3Graph;

// A parsed SPARQL query.
typedef struct Sn3Query Sn3Query;

// A set of N3 rules with their prefixes.
typedef struct Sn3Rules Sn3Rules;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the
// next call on the same thread.
const char *sn3_last_error(void);

// Library version as a static string.
const char *sn3_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void sn3_string_free(char *s);

// Parses `input` as N-Triples or Turtle into a new graph.
//
// # Safety
// `input` must be a NUL-terminated string; `out` must be writable.
Sn3Status sn3_graph_parse(const char *input, Sn3Format format, Sn3Graph **out);

// Number of triples, or 0 for null.
//
// # Safety
// `g` must be null or a live graph handle.
size_t sn3_graph_len(const Sn3Graph *g);

// Writes the graph as sorted N-Triples.
//
// # Safety
// `g` must be a live graph handle; `out` must be writable.
Sn3Status sn3_graph_to_ntriples(const Sn3Graph *g, char **out);

// # Safety
// `g` must be null or a live graph handle, freed at most once.
void sn3_graph_free(Sn3Graph *g);

// Parses a SPARQL query.
//
// # Safety
// `input` must be a NUL-terminated string; `out` must be writable.
Sn3Status sn3_query_parse(const char *input, Sn3Query **out);

// # Safety
// `q` must be null or a live query handle, freed at most once.
void sn3_query_free(Sn3Query *q);

// Translates a query into an N3 rule document. `backward` selects `<=`.
//
// # Safety
// `q` must be a live query handle; `out` must be writable.
Sn3Status sn3_query_translate(const Sn3Query *q, bool backward, char **out);

// Evaluates a query with the reference evaluator: TSV for SELECT,
// N-Triples for CONSTRUCT.
//
// # Safety
// Handles must be live; `out` must be writable.
Sn3Status sn3_query_eval(const Sn3Query *q, const Sn3Graph *g, char **out);

// Runs the translated rule and the reference evaluator on the same input.
// Returns `Ok` when they agree and `Mismatch` otherwise; `diff` (optional)
// receives the difference, empty on agreement.
//
// # Safety
// Handles must be live; `diff` must be null or writable.
Sn3Status sn3_check(const Sn3Query *q, const Sn3Graph *g, char **diff);

// Parses an N3 rule document.
//
// # Safety
// `input` must be a NUL-terminated string; `out` must be writable.
Sn3Status sn3_rules_parse(const char *input, Sn3Rules **out);

// Number of rules, or 0 for null.
//
// # Safety
// `r` must be null or a live rules handle.
size_t sn3_rules_len(const Sn3Rules *r);

// # Safety
// `r` must be null or a live rules handle, freed at most once.
void sn3_rules_free(Sn3Rules *r);

// Forward-saturates `g` under `r`. `out` receives the closure (input plus
// derived plain triples); `iterations` (optional) the rounds run.
//
// # Safety
// Handles must be live; `out` must be writable; `iterations` may be null.
Sn3Status sn3_reason(const Sn3Graph *g,
                     const Sn3Rules *r,
                     size_t max_iterations,
                     Sn3Graph **out,
                     size_t *iterations);

// Answers `goal` (N3 triple patterns, prefixes of `r` in scope) by
// backward chaining. `out` receives TSV rows; `expansions` (optional) the
// search effort.
//
// # Safety
// Handles must be live; `goal` must be a NUL-terminated string; `out` must
// be writable; `expansions` may be null.
Sn3Status sn3_solve(const Sn3Graph *g,
                    const Sn3Rules *r,
                    const char *goal,
                    char **out,
                    size_t *expansions);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPARQLN3_H */
