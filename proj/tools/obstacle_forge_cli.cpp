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

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <thread>

#include "obstacle_forge/obstacle_forge.h"

namespace
{

struct Options
{
  std::string dataset;
  std::string config;
  std::string out;
  std::string spec;
  std::string predictions;
  unsigned threads{0};
};

int report(of_status status, const char * command)
{
  if (status != OF_OK) std::fprintf(stderr, "obstacle-forge %s: %s\n", command, of_last_error());
  return static_cast<int>(status);
}

void print_metric(const char * name, double v)
{
  if (std::isnan(v)) {
    std::printf("%s=none\n", name);
  } else {
    std::printf("%s=%.6f\n", name, v);
  }
}

int with_config(const Options & o, const char * command, of_config ** config)
{
  return report(of_config_load(o.config.c_str(), config), command);
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Offline obstacle detection on lidar sequences with camera masks", "obstacle-forge"};
  app.require_subcommand(1);
  Options o;
  const unsigned hw = std::thread::hardware_concurrency();
  o.threads = hw == 0 ? 1 : hw;

  auto add_common = [&](CLI::App * sub, bool needs_dataset) {
    auto * d = sub->add_option("--dataset", o.dataset, "Dataset directory");
    if (needs_dataset) d->required();
    sub->add_option("--config", o.config, "Pipeline configuration JSON");
    sub->add_option("--out", o.out, "Output directory")->required();
    sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto * synth = app.add_subcommand("synth", "Generate a synthetic dataset from a scene spec");
  synth->add_option("--spec", o.spec, "Scene spec JSON")->required();
  add_common(synth, false);

  auto * detect = app.add_subcommand("detect", "Run the detector and write predictions/boxes.csv");
  add_common(detect, true);

  auto * baseline = app.add_subcommand("baseline", "Naive mask-depth baseline; writes baseline.csv");
  add_common(baseline, true);

  auto * eval = app.add_subcommand("eval", "Evaluate predictions against gt/boxes.csv; writes eval/");
  add_common(eval, true);
  eval->add_option("--predictions", o.predictions, "Predictions CSV (default <out>/predictions/boxes.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(OF_ERR_USAGE);
  }

  if (synth->parsed()) {
    return report(of_synth(o.spec.c_str(), o.out.c_str()), "synth");
  }

  if (eval->parsed()) {
    of_eval_summary s{};
    const int rc = report(of_eval(o.dataset.c_str(), o.predictions.c_str(), o.out.c_str(), &s), "eval");
    if (rc != 0) return rc;
    std::printf("tp=%llu fp=%llu fn=%llu\n", static_cast<unsigned long long>(s.tp),
                static_cast<unsigned long long>(s.fp), static_cast<unsigned long long>(s.fn));
    print_metric("precision", s.precision);
    print_metric("recall", s.recall);
    print_metric("mean_long_disp", s.mean_long_disp);
    print_metric("mean_lat_disp", s.mean_lat_disp);
    std::printf("id_changes=%llu\n", static_cast<unsigned long long>(s.id_changes));
    return 0;
  }

  of_config * config = nullptr;
  if (const int rc = with_config(o, detect->parsed() ? "detect" : "baseline", &config); rc != 0) return rc;
  int rc = 0;
  if (detect->parsed()) {
    rc = report(of_detect(o.dataset.c_str(), config, o.out.c_str(), o.threads), "detect");
  } else {
    std::size_t rows = 0;
    rc = report(of_baseline(o.dataset.c_str(), config, o.out.c_str(), o.threads, &rows), "baseline");
    if (rc == 0) std::printf("rows=%zu\n", rows);
  }
  of_config_free(config);
  return rc;
}
