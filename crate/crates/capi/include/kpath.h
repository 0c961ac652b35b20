/* C interface to the kpath minimum-weight k-path / k-tree solver. */

#ifndef KPATH_H
#define KPATH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of the most recent call on this thread.
 */
typedef enum KpStatus {
  KP_STATUS_OK = 0,
  KP_STATUS_NO_SOLUTION = 1,
  KP_STATUS_INVALID = 2,
  KP_STATUS_INTERNAL = 3,
} KpStatus;

typedef struct KpGraph KpGraph;

typedef struct KpReport KpReport;

typedef struct KpTree KpTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Status of the most recent call on this thread.
 */
enum KpStatus kp_last_status(void);

/**
 * Message for the most recent failure on this thread; the pointer stays
 * valid until the next library call on the same thread.
 */
const char *kp_last_error(void);

/**
 * Parse the graph grammar (`p <directed|undirected> <n> <m>` header,
 * then `e <u> <v> <w>` lines). NULL on parse failure.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string.
 */
struct KpGraph *kp_graph_parse(const char *text);

/**
 * # Safety
 * `g` must come from `kp_graph_parse` and not be freed twice.
 */
void kp_graph_free(struct KpGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle (or NULL, which yields 0).
 */
uint32_t kp_graph_vertex_count(const struct KpGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle (or NULL, which yields 0).
 */
size_t kp_graph_edge_count(const struct KpGraph *g);

/**
 * Parse the tree grammar (`t <k>` header, then `e <a> <b>` lines).
 *
 * # Safety
 * `text` must be a valid NUL-terminated string.
 */
struct KpTree *kp_tree_parse(const char *text);

/**
 * # Safety
 * `t` must come from `kp_tree_parse` and not be freed twice.
 */
void kp_tree_free(struct KpTree *t);

/**
 * # Safety
 * `t` must be a live tree handle (or NULL, which yields 0).
 */
uint32_t kp_tree_node_count(const struct KpTree *t);

/**
 * Exact minimum-weight k-path; integer weights, negatives allowed.
 * `recover` also reconstructs the vertex order.
 *
 * # Safety
 * `g` must be a live graph handle.
 */
struct KpReport *kp_solve_exact(const struct KpGraph *g,
                                uint32_t k,
                                uint64_t seed,
                                uint32_t repetitions,
                                bool recover);

/**
 * Exact among k-paths of weight at most `cap`; nonnegative weights.
 *
 * # Safety
 * `g` must be a live graph handle.
 */
struct KpReport *kp_solve_bounded(const struct KpGraph *g,
                                  uint32_t k,
                                  double cap,
                                  uint64_t seed,
                                  uint32_t repetitions);

/**
 * (1+epsilon)-approximate minimum-weight k-path for real weights in
 * [1, M]; the report always carries the recovered path.
 *
 * # Safety
 * `g` must be a live graph handle.
 */
struct KpReport *kp_solve_approx(const struct KpGraph *g,
                                 uint32_t k,
                                 double epsilon,
                                 uint64_t seed,
                                 uint32_t repetitions);

/**
 * Exact minimum-weight copy of the tree pattern.
 *
 * # Safety
 * `g` and `t` must be live handles.
 */
struct KpReport *kp_solve_tree(const struct KpGraph *g,
                               const struct KpTree *t,
                               uint64_t seed,
                               uint32_t repetitions,
                               bool recover);

/**
 * (1+epsilon)-approximate minimum-weight tree copy.
 *
 * # Safety
 * `g` and `t` must be live handles.
 */
struct KpReport *kp_solve_tree_approx(const struct KpGraph *g,
                                      const struct KpTree *t,
                                      double epsilon,
                                      uint64_t seed,
                                      uint32_t repetitions);

/**
 * # Safety
 * `r` must be a live report handle (or NULL).
 */
bool kp_report_has_weight(const struct KpReport *r);

/**
 * The found weight; exact modes return an integral value. 0 when absent
 * (check `kp_report_has_weight`).
 *
 * # Safety
 * `r` must be a live report handle (or NULL).
 */
double kp_report_weight(const struct KpReport *r);

/**
 * Number of witness vertices (path order or embedding), 0 when the
 * witness was not recovered.
 *
 * # Safety
 * `r` must be a live report handle (or NULL).
 */
size_t kp_report_vertex_count(const struct KpReport *r);

/**
 * Copy up to `cap` witness vertices into `buf`; returns the number
 * copied. For path modes this is the vertex order; for tree modes entry
 * i is the image of tree node i+1.
 *
 * # Safety
 * `buf` must point to at least `cap` writable u32 slots.
 */
size_t kp_report_vertices(const struct KpReport *r, uint32_t *buf, size_t cap);

/**
 * The JSON report (same schema as the CLI). Free with `kp_string_free`.
 *
 * # Safety
 * `r` must be a live report handle.
 */
char *kp_report_to_json(const struct KpReport *r);

/**
 * # Safety
 * `s` must come from `kp_report_to_json` and not be freed twice.
 */
void kp_string_free(char *s);

/**
 * # Safety
 * `r` must come from a solve call and not be freed twice.
 */
void kp_report_free(struct KpReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KPATH_H */
