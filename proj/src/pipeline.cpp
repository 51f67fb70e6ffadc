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

#include "obstacle_forge/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "obstacle_forge/fuse.hpp"
#include "obstacle_forge/synthgen.hpp"

namespace obstacle_forge
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

// --- config -----------------------------------------------------------------

void check_keys(const json & j, std::initializer_list<const char *> allowed, const std::string & where)
{
  if (!j.is_object()) fail(ErrorKind::kParse, "config " + where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char * k : allowed) ok = ok || it.key() == k;
    if (!ok) {
      fail(ErrorKind::kValidation, "config: unknown key '" + (where.empty() ? "" : where + ".") + it.key() + "'");
    }
  }
}

template <typename T>
void read_key(const json & j, const char * key, T & out, const std::string & where)
{
  if (!j.contains(key)) return;
  const json & v = j.at(key);
  const std::string name = where + "." + key;
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) fail(ErrorKind::kParse, "config " + name + ": expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.get<long long>() < 0) fail(ErrorKind::kValidation, "config " + name + ": must be non-negative");
    }
  } else {
    if (!v.is_number()) fail(ErrorKind::kParse, "config " + name + ": expected a number");
  }
  out = v.get<T>();
}

// --- threading --------------------------------------------------------------

/// Runs fn(0..n-1) on `threads` workers. Results must be written by index;
/// the first failure in index order is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> & fn)
{
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto & t : pool) t.join();
  }
  for (auto & e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Re-raises an error with the stage and frame prepended.
template <typename Fn>
auto in_stage(const std::string & stage, int frame_index, Fn && fn) -> decltype(fn())
{
  try {
    return fn();
  } catch (const Error & e) {
    throw Error(e.kind(), stage + " (frame " + std::to_string(frame_index) + "): " + e.what());
  } catch (const std::exception & e) {
    throw Error(ErrorKind::kInternal, stage + " (frame " + std::to_string(frame_index) + "): " + e.what());
  }
}

class StageTimer
{
public:
  explicit StageTimer(std::vector<std::pair<std::string, double>> & out) : out_(out) {}
  void lap(const std::string & stage)
  {
    const auto now = std::chrono::steady_clock::now();
    out_.emplace_back(stage, std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }

private:
  std::vector<std::pair<std::string, double>> & out_;
  std::chrono::steady_clock::time_point last_{std::chrono::steady_clock::now()};
};

// --- per-frame stage ----------------------------------------------------------

struct FrameResult
{
  double timestamp{0.0};
  std::vector<ClusterObservation> clusters;
  std::vector<std::uint8_t> tagged;
  std::vector<Eigen::Vector3d> road_points;  // world frame
  std::size_t points{0};
  std::size_t ground{0};
  std::size_t candidates{0};
};

template <typename T>
std::vector<T> gather(std::span<const T> all, std::span<const std::size_t> idx)
{
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

FrameResult process_frame(const Dataset & ds, const PipelineConfig & cfg, int frame_index)
{
  FrameResult r;
  const double t = ds.frame_time(frame_index);
  r.timestamp = t;
  const PointCloud raw = in_stage("load", frame_index, [&] { return ds.load_point_cloud(frame_index); });
  r.points = raw.size();
  const PointCloud cloud = in_stage("motion_compensate", frame_index, [&] {
    return motion_compensate(raw, ds.poses, ds.ego_from_lidar, t);
  });
  const std::vector<Eigen::Vector3d> pts = positions(cloud);
  const GroundSplit split = in_stage("ground", frame_index, [&] { return segment_ground(pts, cfg.ground); });
  r.ground = split.ground_indices.size();
  const std::vector<Eigen::Vector3d> nonground = gather<Eigen::Vector3d>(pts, split.nonground_indices);
  const ClusterSet cs = in_stage("cluster", frame_index, [&] { return dbscan(nonground, cfg.dbscan); });
  const auto members = cs.members();

  r.clusters.resize(members.size());
  r.tagged.assign(members.size(), 0);
  std::vector<std::uint8_t> in_road(split.ground_indices.size(), 0);

  in_stage("camera", frame_index, [&] {
    for (const auto & calib : ds.cameras) {
      const CameraFrame & cf = ds.closest_camera_frame(calib.camera_id, t);
      std::vector<Eigen::Vector3d> cam_pts;
      if (cf.timestamp == t) {
        cam_pts = pts;
      } else {
        cam_pts = positions(motion_compensate(raw, ds.poses, ds.ego_from_lidar, cf.timestamp));
      }
      const auto road = ds.load_mask(MaskKind::kRoad, calib.camera_id, cf.frame_index);
      const auto inst = ds.load_mask(MaskKind::kInstance, calib.camera_id, cf.frame_index);

      const auto ng_proj = project(gather<Eigen::Vector3d>(cam_pts, split.nonground_indices), calib);
      for (const auto & p : ng_proj) {
        const int c = cs.labels[p.point_index];
        if (c < 0) continue;
        auto & obs = r.clusters[static_cast<std::size_t>(c)];
        ++obs.projected;
        if (inst) {
          const std::uint16_t id = inst->at(p.pixel_u(), p.pixel_v());
          if (id > 0) {
            const auto it = ds.instance_classes.find(id);
            if (it != ds.instance_classes.end()) ++obs.class_votes[it->second];
          }
        }
      }
      if (!road) continue;
      const auto cands = extract_obstacle_candidates(*road, cfg.maskproc);
      r.candidates += cands.size();
      const auto tagged = mask_to_clusters(cands, road->width, road->height, cs, ng_proj, cfg.overlap_frac);
      for (std::size_t c = 0; c < tagged.size(); ++c) r.tagged[c] |= tagged[c];

      const auto g_proj = project(gather<Eigen::Vector3d>(cam_pts, split.ground_indices), calib);
      for (const auto & p : g_proj) {
        if (road->at(p.pixel_u(), p.pixel_v()) == 1) in_road[p.point_index] = 1;
      }
    }
  });

  const RigidTransform world_from_ego = ds.world_from_ego(t);
  for (std::size_t c = 0; c < members.size(); ++c) {
    auto & obs = r.clusters[c];
    obs.points.reserve(members[c].size());
    for (std::size_t i : members[c]) obs.points.push_back(world_from_ego * nonground[i]);
  }
  for (std::size_t g = 0; g < split.ground_indices.size(); ++g) {
    if (in_road[g]) r.road_points.push_back(world_from_ego * pts[split.ground_indices[g]]);
  }
  return r;
}

double ego_speed_at(const Dataset & ds, int frame_index)
{
  const int n = ds.frame_count();
  if (n < 2) return 0.0;
  const int a = frame_index > 1 ? frame_index - 1 : frame_index;
  const int b = frame_index > 1 ? frame_index : frame_index + 1;
  const double ta = ds.frame_time(a);
  const double tb = ds.frame_time(b);
  if (!(tb > ta)) return 0.0;
  return (ds.world_from_ego(tb).translation() - ds.world_from_ego(ta).translation()).norm() / (tb - ta);
}

void write_text(const fs::path & path, const std::string & text)
{
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

}  // namespace

void PipelineConfig::validate() const
{
  auto need = [](bool ok, const char * key) {
    if (!ok) fail(ErrorKind::kValidation, std::string("config: invalid ") + key);
  };
  need(dbscan.eps > 0.0, "dbscan.eps");
  need(dbscan.min_pts >= 1, "dbscan.min_pts");
  need(gicp.k_neighbors >= 1, "gicp.k_neighbors");
  need(gicp.cov_epsilon > 0.0, "gicp.cov_epsilon");
  need(gicp.max_corr_dist > 0.0, "gicp.max_corr_dist");
  need(gicp.max_iterations >= 1, "gicp.max_iterations");
  need(gicp.trans_tol > 0.0, "gicp.trans_tol");
  need(gicp.rot_tol > 0.0, "gicp.rot_tol");
  need(gicp.degeneracy_ratio >= 0.0 && gicp.degeneracy_ratio < 1.0, "gicp.degeneracy_ratio");
  need(ground.tile_m > 0.0, "ground.tile_m");
  need(ground.inlier_m > 0.0, "ground.inlier_m");
  need(ground.max_tilt_deg > 0.0 && ground.max_tilt_deg < 90.0, "ground.max_tilt_deg");
  need(ground.ransac_iterations >= 1, "ground.ransac_iterations");
  need(anomaly_cell_m > 0.0, "anomaly.cell_m");
  need(anomaly.residual_threshold > 0.0, "anomaly.residual_m");
  need(anomaly.min_cells >= 1, "anomaly.min_cells");
  need(gate_m > 0.0, "track.gate_m");
  need(max_miss >= 0, "track.max_miss");
  need(min_lifetime >= 1, "track.min_lifetime");
  need(static_speed_mps >= 0.0, "track.static_speed_mps");
  need(overlap_frac > 0.0 && overlap_frac <= 1.0, "fuse.overlap_frac");
  need(merge_dist_m > 0.0, "fuse.merge_dist_m");
  need(max_extent_m > 0.0, "fuse.max_extent_m");
  need(maskproc.min_area >= 1, "maskproc.min_area_px");
  need(maskproc.max_area == 0 || maskproc.max_area >= maskproc.min_area, "maskproc.max_area_px");
}

PipelineConfig config_from_json(const std::string & text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception & e) {
    fail(ErrorKind::kParse, std::string("config: ") + e.what());
  }
  PipelineConfig c;
  check_keys(j, {"dbscan", "gicp", "ground", "anomaly", "track", "fuse", "maskproc"}, "");
  if (j.contains("dbscan")) {
    const json & s = j.at("dbscan");
    check_keys(s, {"eps", "min_pts"}, "dbscan");
    read_key(s, "eps", c.dbscan.eps, "dbscan");
    read_key(s, "min_pts", c.dbscan.min_pts, "dbscan");
  }
  if (j.contains("gicp")) {
    const json & s = j.at("gicp");
    check_keys(s, {"k_neighbors", "cov_epsilon", "max_corr_dist", "max_iterations", "trans_tol", "rot_tol", "planar", "degeneracy_ratio"}, "gicp");
    read_key(s, "k_neighbors", c.gicp.k_neighbors, "gicp");
    read_key(s, "cov_epsilon", c.gicp.cov_epsilon, "gicp");
    read_key(s, "max_corr_dist", c.gicp.max_corr_dist, "gicp");
    read_key(s, "max_iterations", c.gicp.max_iterations, "gicp");
    read_key(s, "trans_tol", c.gicp.trans_tol, "gicp");
    read_key(s, "rot_tol", c.gicp.rot_tol, "gicp");
    if (s.contains("planar")) {
      if (!s.at("planar").is_boolean()) fail(ErrorKind::kParse, "config gicp.planar: expected a boolean");
      c.gicp.planar = s.at("planar").get<bool>();
    }
    read_key(s, "degeneracy_ratio", c.gicp.degeneracy_ratio, "gicp");
  }
  if (j.contains("ground")) {
    const json & s = j.at("ground");
    check_keys(s, {"tile_m", "inlier_m", "max_tilt_deg", "ransac_iterations"}, "ground");
    read_key(s, "tile_m", c.ground.tile_m, "ground");
    read_key(s, "inlier_m", c.ground.inlier_m, "ground");
    read_key(s, "max_tilt_deg", c.ground.max_tilt_deg, "ground");
    read_key(s, "ransac_iterations", c.ground.ransac_iterations, "ground");
  }
  if (j.contains("anomaly")) {
    const json & s = j.at("anomaly");
    check_keys(s, {"cell_m", "residual_m", "min_cells"}, "anomaly");
    read_key(s, "cell_m", c.anomaly_cell_m, "anomaly");
    read_key(s, "residual_m", c.anomaly.residual_threshold, "anomaly");
    read_key(s, "min_cells", c.anomaly.min_cells, "anomaly");
  }
  if (j.contains("track")) {
    const json & s = j.at("track");
    check_keys(s, {"gate_m", "max_miss", "min_lifetime", "static_speed_mps"}, "track");
    read_key(s, "gate_m", c.gate_m, "track");
    read_key(s, "max_miss", c.max_miss, "track");
    read_key(s, "min_lifetime", c.min_lifetime, "track");
    read_key(s, "static_speed_mps", c.static_speed_mps, "track");
  }
  if (j.contains("fuse")) {
    const json & s = j.at("fuse");
    check_keys(s, {"overlap_frac", "merge_dist_m", "max_extent_m"}, "fuse");
    read_key(s, "overlap_frac", c.overlap_frac, "fuse");
    read_key(s, "merge_dist_m", c.merge_dist_m, "fuse");
    read_key(s, "max_extent_m", c.max_extent_m, "fuse");
  }
  if (j.contains("maskproc")) {
    const json & s = j.at("maskproc");
    check_keys(s, {"min_area_px", "max_area_px"}, "maskproc");
    read_key(s, "min_area_px", c.maskproc.min_area, "maskproc");
    read_key(s, "max_area_px", c.maskproc.max_area, "maskproc");
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const fs::path & path)
{
  if (path.empty()) return {};
  if (!fs::exists(path)) fail(ErrorKind::kNotFound, "missing file: " + path.string());
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const PipelineConfig & c)
{
  json j;
  j["dbscan"] = {{"eps", c.dbscan.eps}, {"min_pts", c.dbscan.min_pts}};
  j["gicp"] = {{"k_neighbors", c.gicp.k_neighbors}, {"cov_epsilon", c.gicp.cov_epsilon},
               {"max_corr_dist", c.gicp.max_corr_dist}, {"max_iterations", c.gicp.max_iterations},
               {"trans_tol", c.gicp.trans_tol}, {"rot_tol", c.gicp.rot_tol},
               {"planar", c.gicp.planar}, {"degeneracy_ratio", c.gicp.degeneracy_ratio}};
  j["ground"] = {{"tile_m", c.ground.tile_m}, {"inlier_m", c.ground.inlier_m},
                 {"max_tilt_deg", c.ground.max_tilt_deg}, {"ransac_iterations", c.ground.ransac_iterations}};
  j["anomaly"] = {{"cell_m", c.anomaly_cell_m}, {"residual_m", c.anomaly.residual_threshold},
                  {"min_cells", c.anomaly.min_cells}};
  j["track"] = {{"gate_m", c.gate_m}, {"max_miss", c.max_miss}, {"min_lifetime", c.min_lifetime},
                {"static_speed_mps", c.static_speed_mps}};
  j["fuse"] = {{"overlap_frac", c.overlap_frac}, {"merge_dist_m", c.merge_dist_m}, {"max_extent_m", c.max_extent_m}};
  j["maskproc"] = {{"min_area_px", c.maskproc.min_area}, {"max_area_px", c.maskproc.max_area}};
  return j.dump(2);
}

std::vector<Box3D> detect(const Dataset & ds, const PipelineConfig & cfg, unsigned threads, DetectReport * report)
{
  cfg.validate();
  DetectReport local;
  DetectReport & rep = report ? *report : local;
  rep = {};
  StageTimer timer(rep.timings_s);
  const int n = ds.frame_count();
  rep.frames = n;

  std::vector<FrameResult> frames(static_cast<std::size_t>(n));
  parallel_for(frames.size(), threads, [&](std::size_t i) {
    frames[i] = process_frame(ds, cfg, static_cast<int>(i) + 1);
  });
  timer.lap("per_frame");

  TrackerConfig tc;
  tc.gate_m = cfg.gate_m;
  tc.max_miss = cfg.max_miss;
  tc.static_speed_mps = cfg.static_speed_mps;
  tc.gicp = cfg.gicp;
  IdAllocator ids;
  Tracker all(DetectionSource::kInstance, tc, ids);
  Tracker masked(DetectionSource::kObstacleMask, tc, ids);
  RoadWorldModel road(cfg.anomaly_cell_m);
  for (int i = 1; i <= n; ++i) {
    FrameResult & fr = frames[static_cast<std::size_t>(i) - 1];
    rep.points += fr.points;
    rep.ground_points += fr.ground;
    rep.clusters += fr.clusters.size();
    rep.candidates += fr.candidates;
    rep.road_points += fr.road_points.size();
    const double dt = i > 1 ? fr.timestamp - frames[static_cast<std::size_t>(i) - 2].timestamp : 0.0;
    const double gate = cfg.gate_m + ego_speed_at(ds, i) * dt;
    std::vector<ClusterObservation> tagged;
    for (std::size_t c = 0; c < fr.clusters.size(); ++c) {
      if (fr.tagged[c]) tagged.push_back(fr.clusters[c]);
    }
    rep.tagged_clusters += tagged.size();
    in_stage("track", i, [&] {
      all.step(i, fr.timestamp, std::move(fr.clusters), gate);
      masked.step(i, fr.timestamp, std::move(tagged), gate);
    });
    for (const auto & p : fr.road_points) road.add_point(p, i);
    fr.road_points = {};
  }
  std::vector<Track> tracks = all.finish();
  rep.tracks_instance = tracks.size();
  for (auto & t : tracks) t.class_label = classify_track(t);
  std::vector<Track> mask_tracks = masked.finish();
  rep.tracks_obstacle_mask = mask_tracks.size();
  for (auto & t : mask_tracks) tracks.push_back(std::move(t));
  timer.lap("track");

  std::vector<double> frame_times(ds.manifest.frame_times.begin(), ds.manifest.frame_times.end());
  const auto anomalies = detect_anomalies(road, cfg.anomaly);
  auto anomaly = anomaly_tracks(anomalies, frame_times, ids);
  rep.tracks_anomaly = anomaly.size();
  for (auto & t : anomaly) tracks.push_back(std::move(t));
  timer.lap("anomaly");

  CandidateFilter filter;
  filter.min_lifetime = cfg.min_lifetime;
  filter.max_extent_m = cfg.max_extent_m;
  tracks = filter_candidates(std::move(tracks), filter, road);
  rep.tracks_filtered = tracks.size();
  tracks = resolve_entities(std::move(tracks), cfg.merge_dist_m);
  rep.tracks_resolved = tracks.size();
  timer.lap("resolve");

  auto boxes = emit_boxes(tracks);
  rep.boxes = boxes.size();
  timer.lap("emit");
  return boxes;
}

DetectReport run_detect(const fs::path & dataset, const PipelineConfig & config, const fs::path & out, unsigned threads)
{
  const Dataset ds = load_dataset(dataset);
  DetectReport rep;
  const auto boxes = detect(ds, config, threads, &rep);
  save_boxes(boxes, out / "predictions" / "boxes.csv");
  json j;
  j["sequence_id"] = ds.manifest.sequence_id;
  j["frames"] = rep.frames;
  j["counts"] = {{"points", rep.points},
                 {"ground_points", rep.ground_points},
                 {"clusters", rep.clusters},
                 {"tagged_clusters", rep.tagged_clusters},
                 {"obstacle_candidates", rep.candidates},
                 {"road_points", rep.road_points},
                 {"tracks_instance", rep.tracks_instance},
                 {"tracks_obstacle_mask", rep.tracks_obstacle_mask},
                 {"tracks_anomaly", rep.tracks_anomaly},
                 {"tracks_after_filter", rep.tracks_filtered},
                 {"tracks_after_resolve", rep.tracks_resolved},
                 {"boxes", rep.boxes}};
  json timings = json::object();
  for (const auto & [stage, s] : rep.timings_s) timings[stage] = s;
  j["timings_s"] = timings;
  j["config"] = json::parse(config_to_json(config));
  write_text(out / "report.json", j.dump(2) + "\n");
  return rep;
}

std::vector<BaselineRow> baseline(const Dataset & ds, const PipelineConfig & cfg, unsigned threads)
{
  cfg.validate();
  const int n = ds.frame_count();
  std::vector<std::vector<BaselineRow>> per_frame(static_cast<std::size_t>(n));
  parallel_for(per_frame.size(), threads, [&](std::size_t i) {
    const int frame = static_cast<int>(i) + 1;
    const double t = ds.frame_time(frame);
    const PointCloud raw = in_stage("load", frame, [&] { return ds.load_point_cloud(frame); });
    in_stage("baseline", frame, [&] {
      for (const auto & calib : ds.cameras) {
        const CameraFrame & cf = ds.closest_camera_frame(calib.camera_id, t);
        const auto road = ds.load_mask(MaskKind::kRoad, calib.camera_id, cf.frame_index);
        if (!road) continue;
        const auto cands = extract_obstacle_candidates(*road, cfg.maskproc);
        if (cands.empty()) continue;
        const PointCloud cam = motion_compensate(raw, ds.poses, ds.ego_from_lidar, cf.timestamp);
        const std::vector<Eigen::Vector3d> xyz = positions(cam);
        const GroundSplit split = segment_ground(xyz, cfg.ground);
        std::vector<Eigen::Vector3d> obstacle_points;
        obstacle_points.reserve(split.nonground_indices.size());
        for (std::size_t i : split.nonground_indices) obstacle_points.push_back(xyz[i]);
        const auto proj = project(obstacle_points, calib);
        for (std::size_t k = 0; k < cands.size(); ++k) {
          per_frame[i].push_back({frame, calib.camera_id, k, naive_depth(cands[k], proj)});
        }
      }
    });
  });
  std::vector<BaselineRow> rows;
  for (auto & v : per_frame) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

void save_baseline(std::span<const BaselineRow> rows, const fs::path & path)
{
  std::string out = "frame_index,camera_id,candidate_idx,depth,support\n";
  for (const auto & r : rows) {
    out += std::to_string(r.frame_index) + "," + std::to_string(r.camera_id) + "," + std::to_string(r.candidate_idx) +
           ",";
    if (r.estimate) {
      out += format_double(r.estimate->depth) + "," + std::to_string(r.estimate->support);
    } else {
      out += "none,0";
    }
    out += "\n";
  }
  write_text(path, out);
}

std::size_t run_baseline(const fs::path & dataset, const PipelineConfig & config, const fs::path & out, unsigned threads)
{
  const Dataset ds = load_dataset(dataset);
  const auto rows = baseline(ds, config, threads);
  save_baseline(rows, out / "baseline.csv");
  return rows.size();
}

std::vector<FrameEvaluation> evaluate_world_boxes(
  const Dataset & ds, std::span<const Box3D> gt, std::span<const Box3D> pred)
{
  std::vector<RigidTransform> ego_from_world;
  for (int i = 1; i <= ds.frame_count(); ++i) ego_from_world.push_back(ds.world_from_ego(ds.frame_time(i)).inverse());
  const auto g = to_ego_frame(gt, ego_from_world);
  const auto p = to_ego_frame(pred, ego_from_world);
  return evaluate_frames(g, p);
}

EvalSummary run_eval(const fs::path & dataset, const fs::path & predictions, const fs::path & out)
{
  const Dataset ds = load_dataset(dataset);
  const auto gt = load_boxes(dataset / "gt" / "boxes.csv");
  const auto pred = load_boxes(predictions.empty() ? out / "predictions" / "boxes.csv" : predictions);
  const auto frames = evaluate_world_boxes(ds, gt, pred);
  const fs::path dir = out / "eval";
  auto emit = [&](const HeatmapGrid & g, const char * name) {
    write_heatmap(g, dir / (std::string(name) + ".csv"), dir / (std::string(name) + ".pgm"));
  };
  emit(precision_heatmap(frames), "precision");
  emit(recall_heatmap(frames), "recall");
  const auto [lon, lat] = displacement_heatmaps(frames);
  emit(lon, "long_disp");
  emit(lat, "lat_disp");
  const auto ext = extent_heatmaps(frames);
  emit(ext[0], "len_err");
  emit(ext[1], "wid_err");
  emit(ext[2], "hei_err");
  emit(track_id_change_heatmap(frames), "id_changes");
  const EvalSummary s = summarize(frames);
  write_summary(s, dir / "summary.csv");
  return s;
}

SequenceManifest run_synth(const fs::path & scene, const fs::path & out) { return generate(load_scene(scene), out); }

int status_of(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::kUsage:
      return 1;
    case ErrorKind::kNotFound:
    case ErrorKind::kParse:
    case ErrorKind::kValidation:
    case ErrorKind::kOutOfRange:
    case ErrorKind::kIo:
      return 2;
    case ErrorKind::kInternal:
      return 3;
  }
  return 3;
}

}  // namespace obstacle_forge
