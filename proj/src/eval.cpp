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

#include "obstacle_forge/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <tuple>

namespace obstacle_forge
{

namespace fs = std::filesystem;

namespace
{

/// Running sums per cell, turned into means (or ratios) at the end.
struct Accumulator
{
  std::array<double, HeatmapGrid::kRows * HeatmapGrid::kCols> sum{};
  std::array<std::size_t, HeatmapGrid::kRows * HeatmapGrid::kCols> count{};

  void add(double x, double y, double value)
  {
    if (const auto cell = HeatmapGrid::cell_of(x, y)) {
      const auto i = static_cast<std::size_t>(cell->first * HeatmapGrid::kCols + cell->second);
      sum[i] += value;
      ++count[i];
    }
  }

  HeatmapGrid mean() const
  {
    HeatmapGrid g;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
      if (count[i] > 0) g.values[i] = sum[i] / static_cast<double>(count[i]);
    }
    return g;
  }
};

std::vector<std::uint8_t> matched_flags(std::size_t n, const MatchResult & m, bool gt_side)
{
  std::vector<std::uint8_t> f(n, 0);
  for (const auto & [g, p] : m.tp) f[gt_side ? g : p] = 1;
  return f;
}

void write_text(const fs::path & path, const std::string & text, std::ios::openmode mode = std::ios::out)
{
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

std::string fixed6(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string opt_text(const std::optional<double> & v) { return v ? fixed6(*v) : std::string("none"); }

}  // namespace

std::optional<std::pair<int, int>> HeatmapGrid::cell_of(double x, double y)
{
  if (!std::isfinite(x) || !std::isfinite(y)) return std::nullopt;
  const double r = std::floor(x / kRowMeters);
  const double c = std::floor((y - kLateralMin) / kColMeters);
  if (r < 0 || r >= kRows || c < 0 || c >= kCols) return std::nullopt;
  return std::make_pair(static_cast<int>(r), static_cast<int>(c));
}

MatchResult match_frame(std::span<const Box3D> gt, std::span<const Box3D> pred, double threshold)
{
  struct Candidate
  {
    double d;
    std::int64_t gt_id;
    std::int64_t pred_id;
    std::size_t g;
    std::size_t p;
  };
  std::vector<Candidate> cands;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    for (std::size_t p = 0; p < pred.size(); ++p) {
      const double d = std::hypot(gt[g].x - pred[p].x, gt[g].y - pred[p].y);
      if (d < threshold) cands.push_back({d, gt[g].id, pred[p].id, g, p});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate & a, const Candidate & b) {
    return std::tie(a.d, a.gt_id, a.pred_id, a.g, a.p) < std::tie(b.d, b.gt_id, b.pred_id, b.g, b.p);
  });
  std::vector<std::uint8_t> gu(gt.size(), 0);
  std::vector<std::uint8_t> pu(pred.size(), 0);
  MatchResult m;
  for (const auto & c : cands) {
    if (gu[c.g] || pu[c.p]) continue;
    gu[c.g] = pu[c.p] = 1;
    m.tp.emplace_back(c.g, c.p);
  }
  std::sort(m.tp.begin(), m.tp.end());
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (!gu[g]) m.fn.push_back(g);
  }
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (!pu[p]) m.fp.push_back(p);
  }
  return m;
}

std::vector<FrameEvaluation> evaluate_frames(std::span<const Box3D> gt, std::span<const Box3D> pred, double threshold)
{
  std::map<int, FrameEvaluation> by_frame;
  for (const auto & b : gt) {
    auto & f = by_frame[b.frame_index];
    f.frame_index = b.frame_index;
    f.gt.push_back(b);
  }
  for (const auto & b : pred) {
    auto & f = by_frame[b.frame_index];
    f.frame_index = b.frame_index;
    f.pred.push_back(b);
  }
  std::vector<FrameEvaluation> out;
  for (auto & [frame, f] : by_frame) {
    f.match = match_frame(f.gt, f.pred, threshold);
    out.push_back(std::move(f));
  }
  return out;
}

HeatmapGrid precision_heatmap(std::span<const FrameEvaluation> frames)
{
  Accumulator acc;
  for (const auto & f : frames) {
    const auto matched = matched_flags(f.pred.size(), f.match, false);
    for (std::size_t p = 0; p < f.pred.size(); ++p) acc.add(f.pred[p].x, f.pred[p].y, matched[p] ? 1.0 : 0.0);
  }
  return acc.mean();
}

HeatmapGrid recall_heatmap(std::span<const FrameEvaluation> frames)
{
  Accumulator acc;
  for (const auto & f : frames) {
    const auto matched = matched_flags(f.gt.size(), f.match, true);
    for (std::size_t g = 0; g < f.gt.size(); ++g) acc.add(f.gt[g].x, f.gt[g].y, matched[g] ? 1.0 : 0.0);
  }
  return acc.mean();
}

std::pair<HeatmapGrid, HeatmapGrid> displacement_heatmaps(std::span<const FrameEvaluation> frames)
{
  Accumulator lon;
  Accumulator lat;
  for (const auto & f : frames) {
    for (const auto & [g, p] : f.match.tp) {
      const Box3D & a = f.gt[g];
      const Box3D & b = f.pred[p];
      lon.add(a.x, a.y, std::abs(b.x - a.x));
      lat.add(a.x, a.y, std::abs(b.y - a.y));
    }
  }
  return {lon.mean(), lat.mean()};
}

std::array<HeatmapGrid, 3> extent_heatmaps(std::span<const FrameEvaluation> frames)
{
  Accumulator len;
  Accumulator wid;
  Accumulator hei;
  for (const auto & f : frames) {
    for (const auto & [g, p] : f.match.tp) {
      const Box3D & a = f.gt[g];
      const Box3D & b = f.pred[p];
      len.add(a.x, a.y, std::abs(b.l - a.l));
      wid.add(a.x, a.y, std::abs(b.w - a.w));
      hei.add(a.x, a.y, std::abs(b.h - a.h));
    }
  }
  return {len.mean(), wid.mean(), hei.mean()};
}

HeatmapGrid track_id_change_heatmap(std::span<const FrameEvaluation> frames)
{
  struct Hit
  {
    int frame;
    std::int64_t pred_id;
    double x;
    double y;
  };
  std::map<std::int64_t, std::vector<Hit>> per_gt;
  for (const auto & f : frames) {
    for (const auto & [g, p] : f.match.tp) {
      per_gt[f.gt[g].id].push_back({f.frame_index, f.pred[p].id, f.gt[g].x, f.gt[g].y});
    }
  }
  HeatmapGrid grid;
  for (auto & v : grid.values) v = 0.0;
  for (auto & [id, hits] : per_gt) {
    std::sort(hits.begin(), hits.end(), [](const Hit & a, const Hit & b) { return a.frame < b.frame; });
    for (std::size_t i = 1; i < hits.size(); ++i) {
      if (hits[i].pred_id == hits[i - 1].pred_id) continue;
      if (const auto cell = HeatmapGrid::cell_of(hits[i].x, hits[i].y)) {
        *grid.at(cell->first, cell->second) += 1.0;
      }
    }
  }
  return grid;
}

EvalSummary summarize(std::span<const FrameEvaluation> frames, double max_forward)
{
  EvalSummary s;
  auto inside = [&](const Box3D & b) { return b.x < max_forward && HeatmapGrid::cell_of(b.x, b.y).has_value(); };
  double lon = 0.0;
  double lat = 0.0;
  double len = 0.0;
  double wid = 0.0;
  double hei = 0.0;
  for (const auto & f : frames) {
    const auto gm = matched_flags(f.gt.size(), f.match, true);
    const auto pm = matched_flags(f.pred.size(), f.match, false);
    for (std::size_t g = 0; g < f.gt.size(); ++g) {
      if (!inside(f.gt[g])) continue;
      (gm[g] ? s.tp : s.fn) += 1;
    }
    for (std::size_t p = 0; p < f.pred.size(); ++p) {
      if (!inside(f.pred[p])) continue;
      (pm[p] ? s.tp_pred : s.fp) += 1;
    }
    for (const auto & [g, p] : f.match.tp) {
      const Box3D & a = f.gt[g];
      const Box3D & b = f.pred[p];
      if (!inside(a)) continue;
      lon += std::abs(b.x - a.x);
      lat += std::abs(b.y - a.y);
      len += std::abs(b.l - a.l);
      wid += std::abs(b.w - a.w);
      hei += std::abs(b.h - a.h);
    }
  }
  if (s.tp_pred + s.fp > 0) s.precision = static_cast<double>(s.tp_pred) / static_cast<double>(s.tp_pred + s.fp);
  if (s.tp + s.fn > 0) s.recall = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
  if (s.tp > 0) {
    const double n = static_cast<double>(s.tp);
    s.mean_long_disp = lon / n;
    s.mean_lat_disp = lat / n;
    s.mean_len_err = len / n;
    s.mean_wid_err = wid / n;
    s.mean_hei_err = hei / n;
  }
  const HeatmapGrid ids = track_id_change_heatmap(frames);
  for (int r = 0; r < HeatmapGrid::kRows; ++r) {
    if (r * HeatmapGrid::kRowMeters >= max_forward) break;
    for (int c = 0; c < HeatmapGrid::kCols; ++c) s.id_changes += static_cast<std::size_t>(ids.at(r, c).value_or(0.0));
  }
  return s;
}

std::string heatmap_csv(const HeatmapGrid & grid)
{
  std::string out;
  for (int r = 0; r < HeatmapGrid::kRows; ++r) {
    for (int c = 0; c < HeatmapGrid::kCols; ++c) {
      if (c > 0) out += ',';
      out += opt_text(grid.at(r, c));
    }
    out += '\n';
  }
  return out;
}

std::vector<std::uint8_t> heatmap_pixels(const HeatmapGrid & grid)
{
  std::vector<std::uint8_t> px(grid.values.size(), 0);
  std::optional<double> lo;
  std::optional<double> hi;
  for (const auto & v : grid.values) {
    if (!v) continue;
    lo = lo ? std::min(*lo, *v) : *v;
    hi = hi ? std::max(*hi, *v) : *v;
  }
  if (!lo || !(*hi > *lo)) return px;
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (!grid.values[i]) continue;
    const double s = (*grid.values[i] - *lo) / (*hi - *lo);
    px[i] = static_cast<std::uint8_t>(std::lround(std::clamp(s, 0.0, 1.0) * 255.0));
  }
  return px;
}

void write_heatmap(const HeatmapGrid & grid, const fs::path & csv_path, const fs::path & pgm_path)
{
  write_text(csv_path, heatmap_csv(grid));
  const auto px = heatmap_pixels(grid);
  std::string pgm = "P5\n" + std::to_string(HeatmapGrid::kCols) + " " + std::to_string(HeatmapGrid::kRows) + "\n255\n";
  pgm.append(px.begin(), px.end());
  write_text(pgm_path, pgm, std::ios::out | std::ios::binary);
}

void write_summary(const EvalSummary & s, const fs::path & path)
{
  std::string out = "metric,value\n";
  out += "tp," + std::to_string(s.tp) + "\n";
  out += "fp," + std::to_string(s.fp) + "\n";
  out += "fn," + std::to_string(s.fn) + "\n";
  out += "precision," + opt_text(s.precision) + "\n";
  out += "recall," + opt_text(s.recall) + "\n";
  out += "mean_long_disp," + opt_text(s.mean_long_disp) + "\n";
  out += "mean_lat_disp," + opt_text(s.mean_lat_disp) + "\n";
  out += "mean_len_err," + opt_text(s.mean_len_err) + "\n";
  out += "mean_wid_err," + opt_text(s.mean_wid_err) + "\n";
  out += "mean_hei_err," + opt_text(s.mean_hei_err) + "\n";
  out += "id_changes," + std::to_string(s.id_changes) + "\n";
  write_text(path, out);
}

std::vector<Box3D> to_ego_frame(std::span<const Box3D> world_boxes, const std::vector<RigidTransform> & ego_from_world)
{
  std::vector<Box3D> out;
  out.reserve(world_boxes.size());
  for (const auto & b : world_boxes) {
    if (b.frame_index < 1 || static_cast<std::size_t>(b.frame_index) > ego_from_world.size()) {
      fail(ErrorKind::kValidation, "box frame_index " + std::to_string(b.frame_index) + " outside the sequence");
    }
    const RigidTransform & t = ego_from_world[static_cast<std::size_t>(b.frame_index - 1)];
    Box3D e = b;
    const Eigen::Vector3d c = t * b.center();
    e.x = c.x();
    e.y = c.y();
    e.z = c.z();
    e.theta = normalize_angle(b.theta + t.yaw());
    const Eigen::Matrix2d r = t.rotation().topLeftCorner<2, 2>();
    e.velocity = r * b.velocity;
    e.acceleration = r * b.acceleration;
    out.push_back(e);
  }
  return out;
}

}  // namespace obstacle_forge
