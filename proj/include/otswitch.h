/* C interface to the otswitch transmission-switching toolkit.
 *
 * Conventions:
 *   - Every fallible call returns ots_status. On failure the out-parameters
 *     are left untouched and ots_last_error() carries a message until the
 *     next call on the same thread.
 *   - Strings returned through char** are heap-allocated; release them with
 *     ots_string_free().
 *   - Option structs must be initialized with their _init function before
 *     any field is overridden, so that new fields keep working defaults.
 */
#ifndef OTSWITCH_H
#define OTSWITCH_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define OTS_API __declspec(dllexport)
#else
#define OTS_API __attribute__((visibility("default")))
#endif

typedef enum ots_status {
  OTS_OK = 0,
  OTS_ERR_PARSE = 1,       /* malformed input text */
  OTS_ERR_UNSUPPORTED = 2, /* input uses a feature outside the modeled subset */
  OTS_ERR_VALIDATION = 3,  /* structurally invalid network or instance */
  OTS_ERR_SOLVE = 4,       /* numerical failure inside a solver */
  OTS_ERR_IO = 5,          /* file could not be read or written */
  OTS_ERR_ARGUMENT = 6,    /* argument outside the documented contract */
  OTS_ERR_INTERNAL = 7     /* unexpected failure; please report */
} ots_status;

/* Library version, e.g. "0.1.0". Static storage, do not free. */
OTS_API const char* ots_version(void);

/* Message of the last failure on the calling thread; "" when the last call
 * succeeded. Static storage, do not free. */
OTS_API const char* ots_last_error(void);

/* Releases any char* produced by this API. NULL is allowed. */
OTS_API void ots_string_free(char* s);

/* ---------------------------------------------------------------- network */

typedef struct ots_network ots_network;

typedef struct ots_parse_options {
  int linearize_cost;              /* keep the linear term of quadratic costs */
  double unlimited_flow_limit_pu;  /* stand-in limit for unrated branches */
} ots_parse_options;

OTS_API void ots_parse_options_init(ots_parse_options* opts);

/* Parse a MATPOWER case from a file or from text. opts may be NULL. */
OTS_API ots_status ots_network_parse_file(const char* path, const ots_parse_options* opts,
                                          ots_network** out);
OTS_API ots_status ots_network_parse_text(const char* text, const ots_parse_options* opts,
                                          ots_network** out);
OTS_API void ots_network_free(ots_network* net);

/* Any out-pointer may be NULL when that count is not wanted. */
OTS_API ots_status ots_network_counts(const ots_network* net, int* buses, int* generators,
                                      int* lines);

/* 16-hex-digit digest of the canonical serialized case. */
OTS_API ots_status ots_network_fingerprint(const ots_network* net, char** out);

/* Name, size, total demand, fingerprint, and parse warnings as JSON. */
OTS_API ots_status ots_network_info_json(const ots_network* net, char** out);

/* Structural diagnostics as {"ok": bool, "errors": [...], "warnings": [...]}. */
OTS_API ots_status ots_network_validate_json(const ots_network* net, char** out);

/* Write the canonical case text; reparsing it reproduces this network. */
OTS_API ots_status ots_network_write_file(const ots_network* net, const char* path);

/* ------------------------------------------------------------------ solve */

typedef struct ots_solve_options {
  int cardinality;           /* max open lines; negative means unlimited */
  double rel_gap;            /* relative optimality gap to stop at */
  double time_limit_seconds; /* 0 means no limit */
  double infeasibility_cost; /* objective price per p.u. of slack power */
  int workers;               /* worker threads; values < 1 mean 1 */
  int suppress_timing;       /* nonzero: zero wall-clock fields in data files */
  const char* dump_lp_path;  /* when set, write the model in LP text format */
} ots_solve_options;

OTS_API void ots_solve_options_init(ots_solve_options* opts);

/* Branch-and-bound solve of the switching problem on the network's nominal
 * demands and costs. When solution_path is non-NULL the dispatch document is
 * written there. *summary receives a JSON digest (status, open lines,
 * objective, gap, node and LP counts). */
OTS_API ots_status ots_solve(const ots_network* net, const ots_solve_options* opts,
                             const char* solution_path, char** summary);

/* Price one fixed topology (open_lines, ascending line ids) with a single
 * LP. Same outputs as ots_solve. */
OTS_API ots_status ots_evaluate(const ots_network* net, const ots_solve_options* opts,
                                const int* open_lines, int open_count,
                                const char* solution_path, char** summary);

/* ------------------------------------------------------------- heuristics */

typedef struct ots_training ots_training;

OTS_API ots_status ots_training_load(const char* path, ots_training** out);
OTS_API void ots_training_free(ots_training* train);

/* Fingerprint, cardinality, and entry counts as JSON. */
OTS_API ots_status ots_training_info_json(const ots_training* train, char** out);

/* Nearest-neighbor reuse of trained topologies. k >= 1; norm is "euclidean",
 * "manhattan", "infinity", or a Minkowski exponent >= 1. */
OTS_API ots_status ots_knn(const ots_network* net, const ots_training* train,
                           const ots_solve_options* opts, int k, const char* norm,
                           const char* solution_path, char** summary);

/* Greedy local search: one opening at a time while the objective improves. */
OTS_API ots_status ots_greedy(const ots_network* net, const ots_solve_options* opts,
                              const char* solution_path, char** summary);

/* -------------------------------------------------------------- instances */

typedef struct ots_generation_spec {
  int count;       /* scenarios to sample */
  int test_count;  /* held out of training, 0 <= test_count <= count */
  uint64_t seed;
  double demand_low, demand_high; /* demand scale band */
  double cost_low, cost_high;     /* cost scale band */
} ots_generation_spec;

OTS_API void ots_generation_spec_init(ots_generation_spec* spec);

typedef enum ots_side {
  OTS_SIDE_TRAIN = 0,
  OTS_SIDE_TEST = 1,
  OTS_SIDE_ALL = 2
} ots_side;

/* Sample the scenario set and write it, with its train/test split, as one
 * JSON document. The same spec and network always produce the same bytes. */
OTS_API ots_status ots_generate_file(const ots_network* net, const ots_generation_spec* spec,
                                     const ots_solve_options* opts, const char* path,
                                     char** summary);

/* Called after each finished scenario with (done, total). */
typedef void (*ots_progress_fn)(int done, int total, void* user);

/* Solve every scenario on the chosen side of the split and stream the
 * results to a JSONL training file. With resume nonzero, a file holding a
 * matching header and a complete prefix of entries is continued instead of
 * recomputed. progress may be NULL. */
OTS_API ots_status ots_train_file(const ots_network* net, const ots_generation_spec* spec,
                                  ots_side side, const ots_solve_options* opts,
                                  const char* path, int resume, ots_progress_fn progress,
                                  void* user, char** summary);

/* --------------------------------------------------------------- analysis */

/* Each analysis writes one CSV of per-observation rows and one JSON summary,
 * and returns a short JSON digest for display. */

OTS_API ots_status ots_analyze_census(const ots_training* train, const char* csv_path,
                                      const char* json_path, char** summary);

/* Objective of every distinct trained topology on every test scenario of
 * the split; test columns are benchmarked against exact solves. */
OTS_API ots_status ots_analyze_crosseval(const ots_network* net, const ots_generation_spec* spec,
                                         const ots_training* train, const ots_solve_options* opts,
                                         const char* csv_path, const char* json_path,
                                         char** summary);

/* Distance rank at which the best (or an epsilon-close) topology appears. */
OTS_API ots_status ots_analyze_cardinal(const ots_network* net, const ots_generation_spec* spec,
                                        const ots_training* train, const ots_solve_options* opts,
                                        double epsilon, const char* norm, const char* csv_path,
                                        const char* json_path, char** summary);

/* Leave-one-out gap of the k-nearest-neighbor rule over the training side. */
OTS_API ots_status ots_analyze_loocv(const ots_network* net, const ots_generation_spec* spec,
                                     const ots_training* train, const ots_solve_options* opts,
                                     int k, const char* norm, const char* csv_path,
                                     const char* json_path, char** summary);

/* Group buses by the topology a demand bump of delta_pu at that bus leads to. */
OTS_API ots_status ots_analyze_classes(const ots_network* net, const ots_solve_options* opts,
                                       double delta_pu, const char* csv_path,
                                       const char* json_path, char** summary);

/* Radius up to which random demand perturbations keep the optimal topology. */
OTS_API ots_status ots_analyze_stability(const ots_network* net, const ots_solve_options* opts,
                                         int directions, const double* radii, int radius_count,
                                         uint64_t seed, const char* csv_path,
                                         const char* json_path, char** summary);

/* Line loading of the all-closed dispatch and the gain from switching. */
OTS_API ots_status ots_analyze_congestion(const ots_network* net, const ots_solve_options* opts,
                                          const char* csv_path, const char* json_path,
                                          char** summary);

/* Run greedy (and knn when train is non-NULL) against exact solves on the
 * test side of the split. Writes benchmark.csv, benchmark.json,
 * feasibility.csv, and feasibility.json under out_dir. */
OTS_API ots_status ots_benchmark(const ots_network* net, const ots_generation_spec* spec,
                                 const ots_training* train, const ots_solve_options* opts,
                                 int k, const char* norm, const char* out_dir, char** summary);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* OTSWITCH_H */
