/* C interface to the bairext library. All handles are opaque; every call
 * that can fail returns a bx_status and leaves a message for bx_last_error(). */
#ifndef BAIREXT_H
#define BAIREXT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define BX_API __declspec(dllexport)
#else
#  define BX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bx_status {
  BX_OK = 0,
  BX_ERR_CONFIG = 1,
  BX_ERR_INVALID_INPUT = 2,
  BX_ERR_NOT_COVERED = 3,
  BX_ERR_REFINEMENT = 4,
  BX_ERR_UNDECIDED = 5,
  BX_ERR_MISSING_CERTIFICATE = 6,
  BX_ERR_MISUSE = 7,
  BX_ERR_UNKNOWN_SCENARIO = 8,
  BX_ERR_IO = 9,
  BX_ERR_INTERNAL = 10
} bx_status;

typedef struct bx_config bx_config;
typedef struct bx_run_result bx_run_result;
typedef struct bx_space bx_space;

BX_API const char* bx_version(void);
/* Message of the last failed call on this thread; empty when none. */
BX_API const char* bx_last_error(void);
BX_API const char* bx_status_name(bx_status status);
BX_API void bx_string_free(char* s);

/* --- run configuration --- */
BX_API bx_status bx_config_create(bx_config** out);
BX_API void bx_config_destroy(bx_config* cfg);
/* Keys: scenario, grid, norm, mode, tol, steps, seed, out, format, d0, eps. */
BX_API bx_status bx_config_set(bx_config* cfg, const char* key, const char* value);
/* Applies the keys of a JSON object on top of the current values. */
BX_API bx_status bx_config_load_json(bx_config* cfg, const char* json_text);

/* --- runs --- */
BX_API bx_status bx_run(const bx_config* cfg, bx_run_result** out);
/* Writes manifest.json, field.csv|field.json, pipeline.jsonl to the configured directory. */
BX_API bx_status bx_run_write(const bx_config* cfg, const bx_run_result* result);
BX_API int bx_run_exit_code(const bx_run_result* result);
/* Borrowed strings, valid until the result is destroyed. */
BX_API const char* bx_run_manifest(const bx_run_result* result);
BX_API const char* bx_run_field(const bx_run_result* result);
BX_API const char* bx_run_stages(const bx_run_result* result);
BX_API size_t bx_run_report_count(const bx_run_result* result);
BX_API void bx_run_destroy(bx_run_result* result);

/* --- scenario registry; returned strings are freed with bx_string_free --- */
BX_API bx_status bx_list_scenarios(char** out);
BX_API bx_status bx_describe_scenario(const char* name, char** out);

/* --- metric spaces from JSON: {"points", "dist", "H", "mode"?, "delta"?} --- */
BX_API bx_status bx_space_load_json(const char* json_text, bx_space** out);
BX_API size_t bx_space_size(const bx_space* space);
BX_API size_t bx_space_h_size(const bx_space* space);
BX_API bx_status bx_space_dist_to_h(const bx_space* space, size_t index, double* out);
BX_API bx_status bx_space_nearest_h(const bx_space* space, size_t index, size_t* out_index, double* out_dist);
BX_API void bx_space_destroy(bx_space* space);

#ifdef __cplusplus
}
#endif

#endif
