#ifndef NECMATCH_H
#define NECMATCH_H

/* C interface to the necmatch library. Every call that can fail returns an
 * nm_status; on failure nm_last_error() describes the problem for the calling
 * thread. Strings handed out by the library are freed with nm_string_free. */

#include <stddef.h>

#if defined(NECMATCH_BUILDING)
#define NM_API __attribute__((visibility("default")))
#else
#define NM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nm_status {
  NM_OK = 0,
  NM_E_INVALID = 1,  /* malformed input or arguments */
  NM_E_PROTOCOL = 2, /* answer violates the query model */
  NM_E_REFUSED = 3,  /* instance too large for an exhaustive routine */
  NM_E_IO = 4,
  NM_E_INTERNAL = 5,
  NM_E_NOMEM = 6
} nm_status;

typedef struct nm_instance nm_instance;
typedef struct nm_matching nm_matching;
typedef struct nm_server nm_server;

NM_API const char* nm_version(void);
NM_API const char* nm_last_error(void);
NM_API void nm_string_free(char* s);

/* Instances: JSON documents of kind "full" or "topk". */
NM_API nm_status nm_instance_parse(const char* json, nm_instance** out);
NM_API nm_status nm_instance_to_json(const nm_instance* inst, char** out);
NM_API size_t nm_instance_size(const nm_instance* inst);
NM_API void nm_instance_free(nm_instance* inst);

/* Matchings: {"assignment": {agent: object}}, resolved against inst's names. */
NM_API nm_status nm_matching_parse(const nm_instance* inst, const char* json, nm_matching** out);
NM_API nm_status nm_matching_to_json(const nm_instance* inst, const nm_matching* m, char** out);
NM_API void nm_matching_free(nm_matching* m);

/* *out is 1 when m is necessarily Pareto optimal / rank-maximal, else 0. */
NM_API nm_status nm_check_npo(const nm_instance* inst, const nm_matching* m, int* out);
NM_API nm_status nm_check_nrm(const nm_instance* inst, const nm_matching* m, int* out);

/* *out is NULL when no such matching exists. */
NM_API nm_status nm_exists_npo(const nm_instance* inst, nm_matching** out);
NM_API nm_status nm_exists_nrm(const nm_instance* inst, nm_matching** out);

/* query: {"agents": [...], "objects": [...], "forbidden": [[agent, object], ...]},
 * every field optional (default: all agents, all objects, nothing forbidden).
 * query may be NULL. Result: {"signature": [...], "assignment": {...}}. */
NM_API nm_status nm_sig_opt(const nm_instance* inst, const char* query, char** out);

/* Elicits from a full truth profile. goal: "npo" | "nrm"; strategy:
 * "threshold" | "naive". Result: {"assignment", "transcript", "profile"}. */
NM_API nm_status nm_elicit(const nm_instance* truth, const char* goal, const char* strategy, char** out);

/* Elicits against the adaptive adversary of family "npo" or "nrm" on n agents.
 * The result additionally holds "committed", the instance the answers fit. */
NM_API nm_status nm_elicit_adversary(const char* family, size_t n, const char* strategy, char** out);

/* Lower-bound instances. t holds the 1-based special offset of each block;
 * specials holds 0 (first agent of the pair) or 1 (second) per block. */
NM_API nm_status nm_gen_npo_lb(size_t n, const size_t* t, size_t t_len, nm_instance** out);
NM_API nm_status nm_gen_nrm_lb(size_t n, const unsigned char* specials, size_t len, nm_instance** out);

/* Competitive-ratio experiment. config: {"family": "random" | "npo-lb" |
 * "nrm-lb", "strategy", "goal", "sizes": [...], "instances", "adaptive",
 * "seed", "threads"}. on_record receives one JSON line per run; *summary
 * receives the summary object. */
typedef void (*nm_line_fn)(const char* line, void* user);
NM_API nm_status nm_bench(const char* config, nm_line_fn on_record, void* user, char** summary);

/* Live elicitation service. log_dir and static_dir may be NULL. */
NM_API nm_status nm_server_create(const char* log_dir, const char* static_dir, nm_server** out);
/* port 0 picks a free port; *bound_port receives the port in use. */
NM_API nm_status nm_server_bind(nm_server* s, const char* host, int port, int* bound_port);
/* Blocks until nm_server_stop. */
NM_API nm_status nm_server_run(nm_server* s);
/* Serves on a background thread. */
NM_API nm_status nm_server_start(nm_server* s);
NM_API void nm_server_stop(nm_server* s);
NM_API void nm_server_free(nm_server* s);

#ifdef __cplusplus
}
#endif

#endif
