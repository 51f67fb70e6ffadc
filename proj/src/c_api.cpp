// Copyright 2026 The obstacle-forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "obstacle_forge/obstacle_forge.h"

#include <cmath>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "obstacle_forge/pipeline.hpp"

namespace of = obstacle_forge;

struct of_config
{
  of::PipelineConfig value;
};

struct of_dataset
{
  of::Dataset value;
};

struct of_boxes
{
  std::vector<of::Box3D> value;
};

namespace
{

thread_local std::string g_last_error;

of_status set_error(of_status status, const std::string & message)
{
  g_last_error = message;
  return status;
}

template <typename Fn>
of_status guarded(Fn && fn)
{
  try {
    fn();
    g_last_error.clear();
    return OF_OK;
  } catch (const of::Error & e) {
    return set_error(static_cast<of_status>(of::status_of(e.kind())), e.what());
  } catch (const std::bad_alloc &) {
    return set_error(OF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception & e) {
    return set_error(OF_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(OF_ERR_INTERNAL, "unknown error");
  }
}

std::string str(const char * s) { return s == nullptr ? std::string() : std::string(s); }

void require(bool ok, const char * what)
{
  if (!ok) of::fail(of::ErrorKind::kUsage, what);
}

double or_nan(const std::optional<double> & v) { return v ? *v : std::numeric_limits<double>::quiet_NaN(); }

const of::PipelineConfig & config_or_default(const of_config * config)
{
  static const of::PipelineConfig defaults;
  return config == nullptr ? defaults : config->value;
}

}  // namespace

extern "C" {

const char * of_last_error(void) { return g_last_error.c_str(); }

const char * of_version(void) { return "0.1.0"; }

of_status of_config_load(const char * path, of_config ** out)
{
  return guarded([&] {
    require(out != nullptr, "of_config_load: out is NULL");
    *out = nullptr;
    auto c = std::make_unique<of_config>();
    c->value = of::load_config(str(path));
    *out = c.release();
  });
}

of_status of_config_parse(const char * json_text, of_config ** out)
{
  return guarded([&] {
    require(out != nullptr, "of_config_parse: out is NULL");
    require(json_text != nullptr, "of_config_parse: text is NULL");
    *out = nullptr;
    auto c = std::make_unique<of_config>();
    c->value = of::config_from_json(json_text);
    *out = c.release();
  });
}

void of_config_free(of_config * config) { delete config; }

of_status of_dataset_open(const char * root, of_dataset ** out)
{
  return guarded([&] {
    require(out != nullptr, "of_dataset_open: out is NULL");
    require(root != nullptr && *root != '\0', "of_dataset_open: root is empty");
    *out = nullptr;
    auto d = std::make_unique<of_dataset>();
    d->value = of::load_dataset(root);
    *out = d.release();
  });
}

int32_t of_dataset_frame_count(const of_dataset * dataset)
{
  return dataset == nullptr ? 0 : static_cast<int32_t>(dataset->value.frame_count());
}

void of_dataset_free(of_dataset * dataset) { delete dataset; }

of_status of_detect_boxes(const of_dataset * dataset, const of_config * config, uint32_t threads, of_boxes ** out)
{
  return guarded([&] {
    require(out != nullptr, "of_detect_boxes: out is NULL");
    require(dataset != nullptr, "of_detect_boxes: dataset is NULL");
    *out = nullptr;
    auto b = std::make_unique<of_boxes>();
    b->value = of::detect(dataset->value, config_or_default(config), threads);
    *out = b.release();
  });
}

size_t of_boxes_count(const of_boxes * boxes) { return boxes == nullptr ? 0 : boxes->value.size(); }

of_status of_boxes_get(const of_boxes * boxes, size_t index, of_box * out)
{
  return guarded([&] {
    require(boxes != nullptr && out != nullptr, "of_boxes_get: NULL argument");
    if (index >= boxes->value.size()) of::fail(of::ErrorKind::kUsage, "of_boxes_get: index out of range");
    const of::Box3D & b = boxes->value[index];
    *out = of_box{b.frame_index, b.id, b.label.c_str(), b.x, b.y, b.z, b.w, b.h, b.l, b.theta,
                  b.velocity.x(), b.velocity.y(), b.acceleration.x(), b.acceleration.y()};
  });
}

of_status of_boxes_save(const of_boxes * boxes, const char * path)
{
  return guarded([&] {
    require(boxes != nullptr, "of_boxes_save: boxes is NULL");
    require(path != nullptr && *path != '\0', "of_boxes_save: path is empty");
    of::save_boxes(boxes->value, path);
  });
}

void of_boxes_free(of_boxes * boxes) { delete boxes; }

of_status of_synth(const char * scene_path, const char * out_dir)
{
  return guarded([&] {
    require(scene_path != nullptr && *scene_path != '\0', "synth: scene spec path is required");
    require(out_dir != nullptr && *out_dir != '\0', "synth: output directory is required");
    of::run_synth(scene_path, out_dir);
  });
}

of_status of_detect(const char * dataset_dir, const of_config * config, const char * out_dir, uint32_t threads)
{
  return guarded([&] {
    require(dataset_dir != nullptr && *dataset_dir != '\0', "detect: dataset directory is required");
    require(out_dir != nullptr && *out_dir != '\0', "detect: output directory is required");
    of::run_detect(dataset_dir, config_or_default(config), out_dir, threads);
  });
}

of_status of_baseline(
  const char * dataset_dir, const of_config * config, const char * out_dir, uint32_t threads, size_t * rows)
{
  return guarded([&] {
    require(dataset_dir != nullptr && *dataset_dir != '\0', "baseline: dataset directory is required");
    require(out_dir != nullptr && *out_dir != '\0', "baseline: output directory is required");
    const std::size_t n = of::run_baseline(dataset_dir, config_or_default(config), out_dir, threads);
    if (rows != nullptr) *rows = n;
  });
}

of_status of_eval(const char * dataset_dir, const char * predictions, const char * out_dir, of_eval_summary * summary)
{
  return guarded([&] {
    require(dataset_dir != nullptr && *dataset_dir != '\0', "eval: dataset directory is required");
    require(out_dir != nullptr && *out_dir != '\0', "eval: output directory is required");
    const of::EvalSummary s = of::run_eval(dataset_dir, str(predictions), out_dir);
    if (summary != nullptr) {
      *summary = of_eval_summary{s.tp, s.fp, s.fn, or_nan(s.precision), or_nan(s.recall),
                                 or_nan(s.mean_long_disp), or_nan(s.mean_lat_disp), or_nan(s.mean_len_err),
                                 or_nan(s.mean_wid_err), or_nan(s.mean_hei_err), s.id_changes};
    }
  });
}

}  // extern "C"
