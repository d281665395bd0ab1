#ifndef tsx_tsx_h
#define tsx_tsx_h

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define TSX_API __attribute__((visibility("default")))
#else
#define TSX_API
#endif

typedef enum tsx_status {
  TSX_OK = 0,
  TSX_ERR_USAGE = 1,       /* malformed input, unknown names, bad parameters */
  TSX_ERR_HYPOTHESIS = 2,  /* a mathematical precondition does not hold */
  TSX_ERR_BUDGET = 3,      /* size or budget limits exceeded */
  TSX_ERR_INTERNAL = 4,
  TSX_ERR_NULL = 5
} tsx_status;

typedef struct tsx_space tsx_space;
typedef struct tsx_vector tsx_vector;

/* message and error code of the last failure on this thread */
TSX_API const char* tsx_last_error(void);
TSX_API const char* tsx_last_error_code(void);

/* preset name or config file path */
TSX_API tsx_status tsx_space_open(const char* name_or_path, tsx_space** out);
TSX_API tsx_status tsx_space_parse(const char* config_text, tsx_space** out);
/* 0 = rational, 1 = float64 */
TSX_API tsx_status tsx_space_set_arithmetic(tsx_space* space, int float64);
TSX_API void tsx_space_free(tsx_space* space);

TSX_API tsx_status tsx_vector_parse(const char* text, int float64, tsx_vector** out);
TSX_API tsx_status tsx_vector_size(const tsx_vector* v, uint64_t* out);
TSX_API void tsx_vector_free(tsx_vector* v);

/* value rendered as p/q or a 17-digit decimal */
TSX_API tsx_status tsx_norm_value(const tsx_space* space, const tsx_vector* v, char** value);
/* {"value", "witness", "max_n_explored"} */
TSX_API tsx_status tsx_norm_json(const tsx_space* space, const tsx_vector* v, char** json);

/* generic entry point: request {"op": ..., ...}, response {"ok", "result", "text"} */
TSX_API tsx_status tsx_call(const char* request_json, char** response_json);

TSX_API void tsx_string_free(char* s);
TSX_API const char* tsx_version(void);

#ifdef __cplusplus
}
#endif

#endif
