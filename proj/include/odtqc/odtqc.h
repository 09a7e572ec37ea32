#ifndef ODTQC_ODTQC_H
#define ODTQC_ODTQC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ODTQC_BUILDING)
#    define ODTQC_API __declspec(dllexport)
#  else
#    define ODTQC_API __declspec(dllimport)
#  endif
#else
#  define ODTQC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum odtqc_status {
    ODTQC_OK = 0,
    ODTQC_ERR_INVALID = 1, /* bad argument, config or data */
    ODTQC_ERR_IO = 2,      /* unreadable/unwritable/corrupt file */
    ODTQC_ERR_INTERNAL = 3
} odtqc_status;

typedef struct odtqc_config odtqc_config;
typedef struct odtqc_field odtqc_field;
typedef struct odtqc_model odtqc_model;
typedef struct odtqc_volume odtqc_volume;

typedef struct odtqc_metrics {
    size_t tp, tn, fp, fn;
    double accuracy, specificity, sensitivity; /* NaN when undefined */
} odtqc_metrics;

/* Message of the last failed call on this thread; never NULL. */
ODTQC_API const char* odtqc_last_error(void);
ODTQC_API const char* odtqc_version(void);

/* Run configuration: flat key/value pairs, see README. */
ODTQC_API odtqc_status odtqc_config_create(odtqc_config** out);
ODTQC_API odtqc_status odtqc_config_merge_file(odtqc_config* cfg, const char* path);
ODTQC_API odtqc_status odtqc_config_set(odtqc_config* cfg, const char* key, const char* value);
ODTQC_API odtqc_status odtqc_config_get(const odtqc_config* cfg, const char* key, const char** value);
ODTQC_API void odtqc_config_destroy(odtqc_config* cfg);

/* Subcommands. odtqc_run returns a process exit code (0, 1 validation, 2 I/O)
   and writes progress to stdout, diagnostics to stderr. */
ODTQC_API size_t odtqc_command_count(void);
ODTQC_API const char* odtqc_command_name(size_t index);
ODTQC_API const char* odtqc_usage(void);
ODTQC_API int odtqc_run(const char* command, const odtqc_config* cfg);

/* Complex fields (OFC1). `values` is interleaved re, im, row-major. */
ODTQC_API odtqc_status odtqc_field_create(int width, int height, double pixel_pitch, const double* values,
                                         odtqc_field** out);
ODTQC_API odtqc_status odtqc_field_load(const char* path, odtqc_field** out);
ODTQC_API odtqc_status odtqc_field_save(const odtqc_field* field, const char* path);
ODTQC_API odtqc_status odtqc_field_shape(const odtqc_field* field, int* width, int* height, double* pixel_pitch);
ODTQC_API const double* odtqc_field_data(const odtqc_field* field);
/* Rule score with the rule settings of `cfg` (may be NULL for defaults). */
ODTQC_API odtqc_status odtqc_field_rule_score(const odtqc_field* field, const odtqc_config* cfg, double* score);
ODTQC_API void odtqc_field_destroy(odtqc_field* field);

/* Classifier (QCN1). input_mode: "phase", "amplitude" or "complex". */
ODTQC_API odtqc_status odtqc_model_init(uint64_t seed, const char* input_mode, odtqc_model** out);
ODTQC_API odtqc_status odtqc_model_load(const char* path, odtqc_model** out);
ODTQC_API odtqc_status odtqc_model_save(const odtqc_model* model, const char* path);
/* label: 0 clean, 1 noisy. */
ODTQC_API odtqc_status odtqc_model_classify(const odtqc_model* model, const odtqc_field* field, double threshold,
                                           double* probability, int* label);
ODTQC_API void odtqc_model_destroy(odtqc_model* model);

/* Refractive-index volumes (RIV1). */
ODTQC_API odtqc_status odtqc_volume_load(const char* path, odtqc_volume** out);
ODTQC_API odtqc_status odtqc_volume_shape(const odtqc_volume* volume, int* nx, int* ny, int* nz, double* pitch);
ODTQC_API const double* odtqc_volume_data(const odtqc_volume* volume);
/* Half-open box [x0, x1) x [y0, y1) x [z0, z1). */
ODTQC_API odtqc_status odtqc_volume_background_sd(const odtqc_volume* volume, int x0, int x1, int y0, int y1, int z0,
                                                 int z1, double* sd);
ODTQC_API void odtqc_volume_destroy(odtqc_volume* volume);

/* Labels are 0 clean, 1 noisy; noisy is the positive class. */
ODTQC_API odtqc_status odtqc_evaluate_metrics(const int* predictions, const int* truths, size_t n,
                                             odtqc_metrics* out);

#ifdef __cplusplus
}
#endif

#endif
