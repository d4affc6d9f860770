/* C interface to the age network library. All functions are thread-safe as
 * long as each handle is used from one thread at a time. Functions that can
 * fail return agenet_status; on failure agenet_last_error() describes the
 * problem for the calling thread. Strings returned through char** are
 * heap-allocated and must be released with agenet_string_free(). */

#ifndef AGENET_H
#define AGENET_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define AGENET_API __declspec(dllexport)
#else
#define AGENET_API __attribute__((visibility("default")))
#endif

typedef enum agenet_status {
  AGENET_OK = 0,
  AGENET_ERR_PARSE = 1,  /* malformed file, config, or argument */
  AGENET_ERR_COMPUTE = 2 /* training, inference, or validation failure */
} agenet_status;

#define AGENET_NUM_AGE_GROUPS 6

typedef struct agenet_dataset agenet_dataset;
typedef struct agenet_model agenet_model;

AGENET_API const char* agenet_version(void);

/* Message of the last failing call on this thread; never NULL. */
AGENET_API const char* agenet_last_error(void);

AGENET_API void agenet_string_free(char* s);

/* ---- datasets (epoch CSV) ---- */

AGENET_API agenet_status agenet_dataset_read_csv(const char* path, agenet_dataset** out);
AGENET_API agenet_status agenet_dataset_write_csv(const agenet_dataset* dataset,
                                                  const char* path);
AGENET_API void agenet_dataset_free(agenet_dataset* dataset);

/* AGENET_OK and *report = NULL when clean; AGENET_ERR_COMPUTE and a
 * newline-separated findings list otherwise. */
AGENET_API agenet_status agenet_dataset_validate(const agenet_dataset* dataset,
                                                 char** report);

AGENET_API agenet_status agenet_dataset_counts(const agenet_dataset* dataset,
                                               int64_t* recordings, int64_t* patients,
                                               int64_t* epochs, int64_t* features);

/* ---- training ----
 * config_text holds flat "key = value" lines (NULL or empty for defaults):
 *   d, k_qs, k_nonqs, mrmr_bins, seed,
 *   em_max_iters, em_tol, em_reg_eps, em_restarts,
 *   grid_search (bool), inner_folds, grid_d, grid_k_qs, grid_k_nonqs (lists) */

AGENET_API agenet_status agenet_train(const agenet_dataset* data, const char* config_text,
                                      agenet_model** out_model, char** summary);

/* ---- models ---- */

AGENET_API agenet_status agenet_model_save(const agenet_model* model, const char* path);
AGENET_API agenet_status agenet_model_load(const char* path, agenet_model** out);
AGENET_API void agenet_model_free(agenet_model* model);
AGENET_API int agenet_model_dim(const agenet_model* model);

/* ---- inference ---- */

/* Writes a per-recording JSON report to report_path (NULL skips the file). */
AGENET_API agenet_status agenet_predict(const agenet_model* model,
                                        const agenet_dataset* data,
                                        const char* report_path, char** summary);

/* Age-group posterior of one recording, by index into the dataset. */
AGENET_API agenet_status agenet_predict_recording(const agenet_model* model,
                                                  const agenet_dataset* data,
                                                  int64_t index,
                                                  double posterior[AGENET_NUM_AGE_GROUPS],
                                                  int* map_group);

/* ---- nested cross-validation ----
 * config keys: outer_folds, inner_folds, mrmr_bins, seed,
 * grid_d/grid_k_qs/grid_k_nonqs, em_*. */

AGENET_API agenet_status agenet_cross_validate(const agenet_dataset* data,
                                               const char* config_text,
                                               const char* report_path, char** summary);

/* ---- synthetic data ----
 * config keys: separation, d, k_qs, k_nonqs, model_file, noise_features,
 * recordings_per_group, patients_per_group, epochs_min, epochs_max, seed. */

AGENET_API agenet_status agenet_synth(const char* config_text, const char* out_csv,
                                      char** summary);

#ifdef __cplusplus
}
#endif

#endif /* AGENET_H */
