#ifndef COBRA_COBRA_H
#define COBRA_COBRA_H

/* C interface of the deductive game library. Every handle is opaque and owned by
   the caller; strings returned through char** are released with cobra_string_free.
   Failing calls leave a message for cobra_last_error on the calling thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define COBRA_API __declspec(dllexport)
#else
#define COBRA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* The values double as the command line exit codes. */
typedef enum cobra_status {
  COBRA_OK = 0,
  COBRA_ERR_DOMAIN = 1,   /* ill-formed or unsolvable game, inconsistent answer */
  COBRA_ERR_INPUT = 2,    /* unreadable file, parse error, unknown name, bad argument */
  COBRA_ERR_LIMIT = 3,    /* depth cap or model cap reached */
  COBRA_ERR_INTERNAL = 4
} cobra_status;

typedef struct cobra_game cobra_game;
typedef struct cobra_strategy cobra_strategy;
typedef struct cobra_session cobra_session;

typedef struct cobra_game_info {
  size_t variables;
  size_t parameters;
  size_t attributes;
  size_t experiments;
} cobra_game_info;

typedef struct cobra_solve_options {
  const char* strategy; /* ranking name, "optimal-worst" or "optimal-avg"; NULL means max-models */
  const char* symmetry; /* "none", "syntactic" or "semantic"; NULL means semantic */
  uint32_t depth_cap;   /* ranking strategies only; 0 means 64 */
} cobra_solve_options;

typedef struct cobra_complexity {
  uint32_t worst;
  uint64_t avg_num;
  uint64_t avg_den;
  double avg;
  char avg_decimal[32]; /* rounded half-up to 5 decimals */
  char avg_exact[48];   /* "713/256" */
} cobra_complexity;

typedef struct cobra_round {
  size_t nodes;
  double phase1_avg;
  double phase2_avg;
} cobra_round;

typedef struct cobra_session_state {
  int solved;
  size_t models;
  size_t answered;
} cobra_session_state;

COBRA_API const char* cobra_version(void);
COBRA_API const char* cobra_status_name(cobra_status s);
COBRA_API const char* cobra_last_error(void);
COBRA_API void cobra_string_free(char* s);

/* Games. Parse failures report every diagnostic in cobra_last_error. */
COBRA_API cobra_status cobra_game_load(const char* path, cobra_game** out);
COBRA_API cobra_status cobra_game_parse(const char* text, const char* origin, cobra_game** out);
/* "ccp:N" or "mm:P:C[:col|:pos]" */
COBRA_API cobra_status cobra_game_generate(const char* spec, cobra_game** out);
COBRA_API void cobra_game_free(cobra_game* g);
COBRA_API cobra_status cobra_game_info_get(const cobra_game* g, cobra_game_info* out);
COBRA_API cobra_status cobra_game_serialize(const cobra_game* g, char** out);
COBRA_API cobra_status cobra_game_code_count(const cobra_game* g, size_t* out);
/* COBRA_OK when well-formed, COBRA_ERR_DOMAIN with the witness in report otherwise. */
COBRA_API cobra_status cobra_game_check(const cobra_game* g, const char* symmetry, char** report);

/* Strategies keep their own copy of the game. */
COBRA_API cobra_status cobra_solve(const cobra_game* g, const cobra_solve_options* opts, cobra_strategy** out);
COBRA_API void cobra_strategy_free(cobra_strategy* s);
COBRA_API cobra_status cobra_strategy_complexity(const cobra_strategy* s, cobra_complexity* out);
COBRA_API cobra_status cobra_strategy_tree_size(const cobra_strategy* s, size_t* out);
/* Per-round candidate counts; ranking strategies only, zero rounds otherwise. */
COBRA_API cobra_status cobra_strategy_round_count(const cobra_strategy* s, size_t* out);
COBRA_API cobra_status cobra_strategy_round(const cobra_strategy* s, size_t round, cobra_round* out);
COBRA_API cobra_status cobra_strategy_dot(const cobra_strategy* s, char** out);
COBRA_API cobra_status cobra_strategy_json(const cobra_strategy* s, char** out);

/* Secret codes are indexed 0..count-1 in model order. */
COBRA_API cobra_status cobra_strategy_secret_count(const cobra_strategy* s, size_t* out);
COBRA_API cobra_status cobra_strategy_secret_name(const cobra_strategy* s, size_t secret, char** out);
/* text lists the variables that are true, separated by commas or spaces. */
COBRA_API cobra_status cobra_strategy_find_secret(const cobra_strategy* s, const char* text, size_t* out);
/* One line per experiment: "t1(coin1, coin2) -> =". */
COBRA_API cobra_status cobra_strategy_simulate(const cobra_strategy* s, size_t secret, char** transcript,
                                               uint32_t* length);

/* Play sessions follow the strategy; the strategy must outlive the session. */
COBRA_API cobra_status cobra_session_new(const cobra_strategy* s, cobra_session** out);
COBRA_API void cobra_session_free(cobra_session* p);
COBRA_API cobra_status cobra_session_state_get(const cobra_session* p, cobra_session_state* out);
/* The pointers stay valid until the session changes. */
COBRA_API cobra_status cobra_session_proposal(const cobra_session* p, const char** experiment, size_t* outcomes);
COBRA_API cobra_status cobra_session_outcome_name(const cobra_session* p, size_t outcome, const char** name);
/* answer is an outcome name or its index. Answers that contradict earlier ones
   fail with COBRA_ERR_DOMAIN and change nothing. */
COBRA_API cobra_status cobra_session_answer(cobra_session* p, const char* answer);
COBRA_API cobra_status cobra_session_undo(cobra_session* p);
COBRA_API cobra_status cobra_session_secret(const cobra_session* p, char** out);

#ifdef __cplusplus
}
#endif

#endif
