/*
 * Copyright 2026 The obstacle-forge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OBSTACLE_FORGE_H
#define OBSTACLE_FORGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(OBSTACLE_FORGE_BUILDING)
#define OF_API __attribute__((visibility("default")))
#else
#define OF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum of_status
{
  OF_OK = 0,
  OF_ERR_USAGE = 1,
  OF_ERR_DATA = 2,
  OF_ERR_INTERNAL = 3
} of_status;

typedef struct of_config of_config;
typedef struct of_dataset of_dataset;
typedef struct of_boxes of_boxes;

typedef struct of_box
{
  int32_t frame_index;
  int64_t id;
  const char * label; /* owned by the of_boxes handle */
  double x, y, z;
  double w, h, l;
  double theta;
  double vx, vy;
  double ax, ay;
} of_box;

/* Optional metrics are NaN when undefined. */
typedef struct of_eval_summary
{
  uint64_t tp;
  uint64_t fp;
  uint64_t fn;
  double precision;
  double recall;
  double mean_long_disp;
  double mean_lat_disp;
  double mean_len_err;
  double mean_wid_err;
  double mean_hei_err;
  uint64_t id_changes;
} of_eval_summary;

/* Message of the last failed call on this thread; "" after a success. */
OF_API const char * of_last_error(void);
OF_API const char * of_version(void);

/* NULL or "" yields the default configuration. */
OF_API of_status of_config_load(const char * path, of_config ** out);
OF_API of_status of_config_parse(const char * json_text, of_config ** out);
OF_API void of_config_free(of_config * config);

OF_API of_status of_dataset_open(const char * root, of_dataset ** out);
OF_API int32_t of_dataset_frame_count(const of_dataset * dataset);
OF_API void of_dataset_free(of_dataset * dataset);

OF_API of_status of_detect_boxes(
  const of_dataset * dataset, const of_config * config, uint32_t threads, of_boxes ** out);
OF_API size_t of_boxes_count(const of_boxes * boxes);
OF_API of_status of_boxes_get(const of_boxes * boxes, size_t index, of_box * out);
OF_API of_status of_boxes_save(const of_boxes * boxes, const char * path);
OF_API void of_boxes_free(of_boxes * boxes);

/* Subcommand entry points. `config` may be NULL for defaults. */
OF_API of_status of_synth(const char * scene_path, const char * out_dir);
OF_API of_status of_detect(const char * dataset_dir, const of_config * config, const char * out_dir, uint32_t threads);
OF_API of_status of_baseline(
  const char * dataset_dir, const of_config * config, const char * out_dir, uint32_t threads, size_t * rows);
/* `predictions` NULL or "" reads <out_dir>/predictions/boxes.csv. */
OF_API of_status of_eval(
  const char * dataset_dir, const char * predictions, const char * out_dir, of_eval_summary * summary);

#ifdef __cplusplus
}
#endif

#endif /* OBSTACLE_FORGE_H */
