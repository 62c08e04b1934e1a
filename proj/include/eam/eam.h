#ifndef EAM_EAM_H
#define EAM_EAM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define EAM_API __declspec(dllexport)
#else
#define EAM_API __attribute__((visibility("default")))
#endif

typedef enum eam_status {
  EAM_OK = 0,
  EAM_ERR_INVALID_ARGUMENT = 1,
  EAM_ERR_IO = 2,
  EAM_ERR_PARSE = 3,
  EAM_ERR_CONFIG = 4,
  EAM_ERR_OUT_OF_RANGE = 5,
  EAM_ERR_INTERNAL = 6
} eam_status;

typedef struct eam_config eam_config;
typedef struct eam_result eam_result;

/* Message for the last failing call on this thread; never NULL. */
EAM_API const char *eam_last_error(void);
EAM_API const char *eam_version(void);

EAM_API eam_status eam_config_load(const char *path, eam_config **out);
/* base_dir resolves relative trace paths; may be NULL. */
EAM_API eam_status eam_config_parse(const char *json_text, const char *base_dir, eam_config **out);
/* "section.key=value" */
EAM_API eam_status eam_config_set(eam_config *config, const char *assignment);
/* Builds the run configuration and reports the first validation error. */
EAM_API eam_status eam_config_validate(const eam_config *config);
EAM_API void eam_config_free(eam_config *config);

EAM_API eam_status eam_run(const eam_config *config, eam_result **out);
/* Keys as in metrics.csv, e.g. "app_exec_rate_per_h". */
EAM_API eam_status eam_result_metric(const eam_result *result, const char *key, double *value);
EAM_API eam_status eam_result_write(const eam_result *result, const char *out_dir);
/* Copies the summary into buf (NUL-terminated, truncated to len); *needed gets the full length + 1. */
EAM_API eam_status eam_result_summary(const eam_result *result, char *buf, size_t len, size_t *needed);
EAM_API void eam_result_free(eam_result *result);

/* One run per (policy, duration); writes compare.csv into out_dir.
   attack_start may be NULL for the seeded draw. */
EAM_API eam_status eam_compare(const eam_config *config, const char *const *policies, size_t policy_count,
                               const double *durations, size_t duration_count, int equal_budget,
                               const double *attack_start, const char *out_dir);

EAM_API eam_status eam_inject(const char *trace_path, double load_ohm, double start_s, double duration_s,
                              const char *out_path);

#ifdef __cplusplus
}
#endif

#endif
