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

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "obstacle_forge/obstacle_forge.h"

namespace fs = std::filesystem;

namespace
{

int g_failures = 0;

void check(bool ok, const char * what, int line)
{
  if (!ok) {
    ++g_failures;
    std::fprintf(stderr, "c_api_test:%d: check failed: %s (last error: %s)\n", line, what, of_last_error());
  }
}

}  // namespace

#define CHECK(expr) check((expr), #expr, __LINE__)

int main()
{
  CHECK(std::strlen(of_version()) > 0);

  of_config * cfg = nullptr;
  CHECK(of_config_parse("{\"dbscan\": {\"eps\": 0.7}}", &cfg) == OF_OK);
  CHECK(cfg != nullptr);
  CHECK(std::strcmp(of_last_error(), "") == 0);

  of_config * bad = nullptr;
  CHECK(of_config_parse("{\"dbscan\": {\"eps\": -1}}", &bad) == OF_ERR_DATA);
  CHECK(bad == nullptr);
  CHECK(std::strstr(of_last_error(), "dbscan.eps") != nullptr);
  CHECK(of_config_parse("{oops", &bad) == OF_ERR_DATA);
  CHECK(of_config_parse(nullptr, &bad) == OF_ERR_USAGE);
  CHECK(of_config_parse("{}", nullptr) == OF_ERR_USAGE);
  CHECK(of_config_load("/nonexistent/config.json", &bad) == OF_ERR_DATA);
  of_config * defaults = nullptr;
  CHECK(of_config_load(nullptr, &defaults) == OF_OK);
  of_config_free(defaults);

  of_dataset * missing = nullptr;
  CHECK(of_dataset_open(nullptr, &missing) == OF_ERR_USAGE);
  CHECK(of_dataset_open("/nonexistent/dataset", &missing) == OF_ERR_DATA);
  CHECK(of_synth(nullptr, "/tmp/x") == OF_ERR_USAGE);
  CHECK(of_dataset_frame_count(nullptr) == 0);
  CHECK(of_boxes_count(nullptr) == 0);

  const fs::path work = fs::temp_directory_path() / "obstacle_forge_c_api_test";
  fs::remove_all(work);
  fs::create_directories(work);
  {
    std::ofstream scene(work / "scene.json");
    scene << R"({"seed": 2, "duration": 0.8, "beam_count": 32, "azimuth_step_deg": 0.5, "azimuth_fov_deg": 120,
                 "obstacles": [{"position": [15, 0.5, 0.5], "reflectivity": 0.9}]})";
  }
  const std::string ds = (work / "ds").string();
  const std::string out = (work / "out").string();
  CHECK(of_synth((work / "scene.json").c_str(), ds.c_str()) == OF_OK);

  of_dataset * dataset = nullptr;
  CHECK(of_dataset_open(ds.c_str(), &dataset) == OF_OK);
  CHECK(of_dataset_frame_count(dataset) == 8);

  of_boxes * boxes = nullptr;
  CHECK(of_detect_boxes(dataset, cfg, 1, &boxes) == OF_OK);
  const size_t n = of_boxes_count(boxes);
  for (size_t i = 0; i < n; ++i) {
    of_box b{};
    CHECK(of_boxes_get(boxes, i, &b) == OF_OK);
    CHECK(b.frame_index >= 1 && b.frame_index <= 8);
    CHECK(b.label != nullptr);
    CHECK(std::isfinite(b.x) && b.w > 0.0);
  }
  of_box dummy{};
  CHECK(of_boxes_get(boxes, n, &dummy) == OF_ERR_USAGE);
  CHECK(of_boxes_save(boxes, (work / "boxes.csv").c_str()) == OF_OK);
  of_boxes_free(boxes);
  of_dataset_free(dataset);

  CHECK(of_detect(ds.c_str(), cfg, out.c_str(), 1) == OF_OK);
  size_t rows = 0;
  CHECK(of_baseline(ds.c_str(), nullptr, out.c_str(), 1, &rows) == OF_OK);
  CHECK(fs::exists(work / "out" / "baseline.csv"));
  of_eval_summary summary{};
  CHECK(of_eval(ds.c_str(), nullptr, out.c_str(), &summary) == OF_OK);
  CHECK(summary.tp + summary.fn == 8);
  CHECK(std::isnan(summary.mean_long_disp) == (summary.tp == 0));
  CHECK(fs::exists(work / "out" / "eval" / "summary.csv"));
  CHECK(of_eval(ds.c_str(), (work / "nope.csv").c_str(), out.c_str(), &summary) == OF_ERR_DATA);
  CHECK(of_detect("/nonexistent/dataset", nullptr, out.c_str(), 1) == OF_ERR_DATA);

  of_config_free(cfg);
  of_config_free(nullptr);
  fs::remove_all(work);

  std::printf("c_api_test: %s\n", g_failures == 0 ? "ok" : "FAILED");
  return g_failures == 0 ? 0 : 1;
}
