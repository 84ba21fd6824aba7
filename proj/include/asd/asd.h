/* Copyright 2026 The interp-asd Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

/* C interface to the anomalous sound detection library.
 *
 * Every function returns an asd_status; on failure asd_last_error() holds a
 * message for the calling thread. Handles are opaque and owned by the
 * caller, who releases them with the matching *_destroy function. Passing
 * NULL to a *_destroy function is a no-op.
 */

#ifndef ASD_ASD_H_
#define ASD_ASD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(ASD_BUILDING_LIBRARY)
#define ASD_API __declspec(dllexport)
#else
#define ASD_API __declspec(dllimport)
#endif
#else
#define ASD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum asd_status {
  ASD_OK = 0,
  ASD_ERR_INVALID_ARGUMENT = 1,
  ASD_ERR_FILE_NOT_FOUND = 2,
  ASD_ERR_MALFORMED_HEADER = 3,
  ASD_ERR_UNSUPPORTED_ENCODING = 4,
  ASD_ERR_DIMENSION_MISMATCH = 5,
  ASD_ERR_TOO_SHORT = 6,
  ASD_ERR_IO = 7,
  ASD_ERR_FORMAT = 8,
  ASD_ERR_EMPTY_DATA = 9,
  ASD_ERR_NON_FINITE = 10,
  ASD_ERR_SINGLE_CLASS = 11,
  ASD_ERR_THRESHOLD_EXCEEDED = 12,
  ASD_ERR_INTERNAL = 13
} asd_status;

typedef struct asd_config asd_config;
typedef struct asd_model asd_model;
typedef struct asd_spectrogram asd_spectrogram;

/* Receives output text one line at a time, without the trailing newline. */
typedef void (*asd_log_fn)(const char* line, void* user);

ASD_API const char* asd_version(void);
ASD_API const char* asd_status_name(asd_status status);
/* Message of the last failure on this thread; "" if none. */
ASD_API const char* asd_last_error(void);

/* Key/value settings shared by all commands. */
ASD_API asd_status asd_config_create(asd_config** out);
ASD_API void asd_config_destroy(asd_config* config);
ASD_API asd_status asd_config_set(asd_config* config, const char* key, const char* value);
/* Merges "key = value" lines; keys already set are overwritten. */
ASD_API asd_status asd_config_load_file(asd_config* config, const char* path);
/* Copies the value into buf (NUL-terminated). ASD_ERR_INVALID_ARGUMENT if
 * the key is unset or buf is too small; for a set key *needed receives the
 * required size. */
ASD_API asd_status asd_config_get(const asd_config* config, const char* key, char* buf,
                                  size_t buf_size, size_t* needed);

/* Commands. log may be NULL. */
ASD_API asd_status asd_synth(const asd_config* config, asd_log_fn log, void* user);
ASD_API asd_status asd_train(const asd_config* config, asd_log_fn log, void* user);
ASD_API asd_status asd_score(const asd_config* config, asd_log_fn log, void* user);
ASD_API asd_status asd_eval(const asd_config* config, asd_log_fn log, void* user);
ASD_API asd_status asd_gradcheck(const asd_config* config, asd_log_fn log, void* user);

typedef struct asd_model_info {
  uint32_t regime; /* 0 reconstruct, 1 interpolate, 2 predict */
  uint32_t variational;
  uint32_t n_frames;
  uint32_t n_mels;
  uint32_t input_dim;
  uint32_t output_dim;
  uint64_t parameter_count;
} asd_model_info;

ASD_API asd_status asd_model_load(const char* path, asd_model** out);
ASD_API void asd_model_destroy(asd_model* model);
ASD_API asd_status asd_model_info_get(const asd_model* model, asd_model_info* out);
/* Mean window score of a spectrogram extracted with the model's features. */
ASD_API asd_status asd_model_score(const asd_model* model, const asd_spectrogram* spec,
                                   double* out);

/* Log-Mel features using the model's feature parameters. */
ASD_API asd_status asd_spectrogram_from_wav(const asd_model* model, const char* path,
                                            asd_spectrogram** out);
ASD_API asd_status asd_spectrogram_from_samples(const asd_model* model, const float* samples,
                                                size_t count, int sample_rate,
                                                asd_spectrogram** out);
ASD_API void asd_spectrogram_destroy(asd_spectrogram* spec);
ASD_API asd_status asd_spectrogram_shape(const asd_spectrogram* spec, size_t* frames,
                                         size_t* n_mels);
/* Copies frames * n_mels values, frame-major. */
ASD_API asd_status asd_spectrogram_copy(const asd_spectrogram* spec, float* out, size_t count);

/* labels: 0 normal, 1 anomalous. */
ASD_API asd_status asd_roc_auc(const double* scores, const int* labels, size_t count,
                               double* out);

#ifdef __cplusplus
}
#endif

#endif /* ASD_ASD_H_ */
