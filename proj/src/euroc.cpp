// Copyright 2026 The invio Authors
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

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "invio/dataio.hpp"
#include "invio/error.hpp"
#include "text.hpp"

namespace invio {

namespace fs = std::filesystem;

std::int64_t Dataset::to_ns(double t) const { return time_origin_ns + std::llround(t * 1e9); }

namespace {

struct CsvRow {
  long line = 0;
  std::int64_t stamp = 0;
  std::vector<double> values;
};

std::vector<CsvRow> read_csv(const fs::path& path, std::size_t min_values) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string source = path.string();
  std::vector<CsvRow> rows;
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (detail::skippable(line)) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() < 1 + min_values) {
      throw ParseError(source, number,
                       "expected at least " + std::to_string(1 + min_values) + " fields, got " +
                           std::to_string(fields.size()));
    }
    CsvRow row;
    row.line = number;
    row.stamp = detail::parse_int(fields[0], source, number);
    row.values.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) row.values.push_back(detail::parse_double(fields[i], source, number));
    if (!rows.empty() && row.stamp <= rows.back().stamp) {
      throw DataError(source + ":" + std::to_string(number) + ": timestamp " + std::to_string(row.stamp) +
                      " does not increase");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

fs::path locate(const fs::path& dir, const std::string& rel) {
  for (const fs::path& base : {dir, dir / "mav0"}) {
    if (fs::exists(base / rel)) return base / rel;
  }
  return dir / rel;
}

void write_header_and_rows(const fs::path& path, const std::string& header, const std::vector<std::string>& rows) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << header << '\n';
  for (const auto& r : rows) out << r << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

Dataset load_euroc(const fs::path& dir, bool require_ground_truth) {
  Dataset data;
  const fs::path imu_path = locate(dir, "imu0/data.csv");
  const auto imu_rows = read_csv(imu_path, 6);
  if (imu_rows.empty()) throw DataError(imu_path.string() + ": no IMU samples");
  data.time_origin_ns = imu_rows.front().stamp;
  data.imu.reserve(imu_rows.size());
  for (const auto& r : imu_rows) {
    ImuSample s;
    s.t = data.to_seconds(r.stamp);
    s.omega = Vec3(r.values[0], r.values[1], r.values[2]);
    s.accel = Vec3(r.values[3], r.values[4], r.values[5]);
    data.imu.push_back(s);
  }

  const fs::path gt_path = locate(dir, "state_groundtruth_estimate0/data.csv");
  if (!fs::exists(gt_path)) {
    if (require_ground_truth) throw IoError("missing ground truth " + gt_path.string());
    return data;
  }
  const auto gt_rows = read_csv(gt_path, 10);
  for (const auto& r : gt_rows) {
    const auto& v = r.values;
    Eigen::Quaterniond q(v[3], v[4], v[5], v[6]);
    const double norm = q.norm();
    if (!(norm > 0.5 && norm < 1.5)) throw ParseError(gt_path.string(), r.line, "quaternion is not unit length");
    q.normalize();
    GroundTruthState s;
    s.t = data.to_seconds(r.stamp);
    s.pose = ExtendedPose(q.toRotationMatrix(), Vec3(v[7], v[8], v[9]), Vec3(v[0], v[1], v[2]));
    if (v.size() >= 16) {
      s.bias.gyro = Vec3(v[10], v[11], v[12]);
      s.bias.accel = Vec3(v[13], v[14], v[15]);
    }
    data.ground_truth.push_back(s);
  }
  return data;
}

void write_euroc(const Dataset& data, const fs::path& dir) {
  using detail::format_double;
  std::vector<std::string> rows;
  rows.reserve(data.imu.size());
  for (const auto& s : data.imu) {
    std::string r = std::to_string(data.to_ns(s.t));
    for (int i = 0; i < 3; ++i) r += "," + format_double(s.omega(i));
    for (int i = 0; i < 3; ++i) r += "," + format_double(s.accel(i));
    rows.push_back(std::move(r));
  }
  write_header_and_rows(dir / "imu0" / "data.csv",
                        "#timestamp [ns],w_RS_S_x [rad s^-1],w_RS_S_y [rad s^-1],w_RS_S_z [rad s^-1],"
                        "a_RS_S_x [m s^-2],a_RS_S_y [m s^-2],a_RS_S_z [m s^-2]",
                        rows);

  rows.clear();
  for (const auto& g : data.ground_truth) {
    Eigen::Quaterniond q(g.pose.rotation());
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    std::string r = std::to_string(data.to_ns(g.t));
    for (int i = 0; i < 3; ++i) r += "," + format_double(g.pose.position()(i));
    r += "," + format_double(q.w()) + "," + format_double(q.x()) + "," + format_double(q.y()) + "," +
         format_double(q.z());
    for (int i = 0; i < 3; ++i) r += "," + format_double(g.pose.velocity()(i));
    for (int i = 0; i < 3; ++i) r += "," + format_double(g.bias.gyro(i));
    for (int i = 0; i < 3; ++i) r += "," + format_double(g.bias.accel(i));
    rows.push_back(std::move(r));
  }
  write_header_and_rows(dir / "state_groundtruth_estimate0" / "data.csv",
                        "#timestamp, p_RS_R_x [m], p_RS_R_y [m], p_RS_R_z [m], q_RS_w [], q_RS_x [], q_RS_y [], "
                        "q_RS_z [], v_RS_R_x [m s^-1], v_RS_R_y [m s^-1], v_RS_R_z [m s^-1], "
                        "b_w_RS_S_x [rad s^-1], b_w_RS_S_y [rad s^-1], b_w_RS_S_z [rad s^-1], "
                        "b_a_RS_S_x [m s^-2], b_a_RS_S_y [m s^-2], b_a_RS_S_z [m s^-2]",
                        rows);
}

std::vector<ExtendedPose> interpolate_ground_truth(std::span<const GroundTruthState> gt, std::span<const double> times) {
  if (gt.empty()) throw DataError("interpolate_ground_truth: no ground truth");
  std::vector<ExtendedPose> out;
  out.reserve(times.size());
  std::size_t j = 0;
  for (double t : times) {
    if (t < gt.front().t || t > gt.back().t) {
      throw DataError("interpolate_ground_truth: time " + std::to_string(t) + " outside ground-truth span");
    }
    if (j > 0 && gt[j].t > t) j = 0;
    while (j + 1 < gt.size() && gt[j + 1].t <= t) ++j;
    if (gt[j].t == t || j + 1 == gt.size()) {
      out.push_back(gt[j].pose);
      continue;
    }
    const auto& a = gt[j].pose;
    const auto& b = gt[j + 1].pose;
    const double s = (t - gt[j].t) / (gt[j + 1].t - gt[j].t);
    const Eigen::Quaterniond qa(a.rotation());
    const Eigen::Quaterniond qb(b.rotation());
    out.emplace_back(qa.slerp(s, qb).toRotationMatrix(), (1.0 - s) * a.velocity() + s * b.velocity(),
                     (1.0 - s) * a.position() + s * b.position());
  }
  return out;
}

Trajectory ground_truth_trajectory(const Dataset& data) {
  Trajectory out;
  out.reserve(data.ground_truth.size());
  for (const auto& g : data.ground_truth) out.push_back({g.t, g.pose.rotation(), g.pose.position()});
  return out;
}

}  // namespace invio
