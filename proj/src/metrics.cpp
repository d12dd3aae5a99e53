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
#include <cstdio>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "invio/error.hpp"
#include "invio/liegroup.hpp"
#include "invio/metrics.hpp"

namespace invio {

Alignment parse_alignment(const std::string& name) {
  if (name == "none") return Alignment::kNone;
  if (name == "se3" || name == "SE3") return Alignment::kSE3;
  if (name == "posyaw") return Alignment::kPosYaw;
  throw InvalidArgument("unknown alignment '" + name + "' (expected none, se3 or posyaw)");
}

std::string to_string(Alignment alignment) {
  switch (alignment) {
    case Alignment::kNone: return "none";
    case Alignment::kSE3: return "se3";
    case Alignment::kPosYaw: return "posyaw";
  }
  return "unknown";
}

namespace {

double median_period(const Trajectory& traj) {
  if (traj.size() < 2) return 0.0;
  std::vector<double> dt;
  dt.reserve(traj.size() - 1);
  for (std::size_t i = 1; i < traj.size(); ++i) dt.push_back(traj[i].t - traj[i - 1].t);
  auto mid = dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2);
  std::nth_element(dt.begin(), mid, dt.end());
  return *mid;
}

double rotation_angle(const Mat3& r) {
  const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
  // acos loses precision near 0; atan2 of the sine and cosine parts does not.
  const double s = 0.5 * vee(Mat3(r - r.transpose())).norm();
  return std::atan2(s, c);
}

// Quantile with linear interpolation between order statistics.
double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double f = pos - static_cast<double>(lo);
  return sorted[lo] + f * (sorted[hi] - sorted[lo]);
}

struct Pairs {
  std::vector<PoseSample> est;
  std::vector<PoseSample> gt;
};

Pairs associated(const Trajectory& est, const Trajectory& gt, double tolerance) {
  Pairs out;
  for (const auto& [i, j] : associate(est, gt, tolerance)) {
    out.est.push_back(est[i]);
    out.gt.push_back(gt[j]);
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> associate(const Trajectory& est, const Trajectory& gt,
                                                           double tolerance) {
  if (tolerance < 0.0) tolerance = 0.5 * std::max(median_period(est), median_period(gt));
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t j = 0;
  for (std::size_t i = 0; i < est.size() && !gt.empty(); ++i) {
    const double t = est[i].t;
    while (j + 1 < gt.size() && std::abs(gt[j + 1].t - t) <= std::abs(gt[j].t - t)) ++j;
    // Keep a 1 ns slack so stamps that round-tripped through text still pair.
    if (std::abs(gt[j].t - t) <= tolerance + 1e-9) out.emplace_back(i, j);
  }
  return out;
}

RigidTransform align(const std::vector<Vec3>& est, const std::vector<Vec3>& gt, Alignment alignment) {
  if (est.size() != gt.size()) throw InvalidArgument("align: size mismatch");
  RigidTransform out;
  if (alignment == Alignment::kNone || est.empty()) return out;
  const auto n = static_cast<Eigen::Index>(est.size());
  Eigen::Matrix3Xd src(3, n), dst(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    src.col(i) = est[static_cast<std::size_t>(i)];
    dst.col(i) = gt[static_cast<std::size_t>(i)];
  }
  const Vec3 mu_src = src.rowwise().mean();
  const Vec3 mu_dst = dst.rowwise().mean();
  if (alignment == Alignment::kSE3) {
    if (n < 3) {
      out.translation = mu_dst - mu_src;
      return out;
    }
    const Eigen::Matrix4d t = Eigen::umeyama(src, dst, false);
    out.rotation = t.topLeftCorner<3, 3>();
    out.translation = t.topRightCorner<3, 1>();
    return out;
  }
  // Yaw about +z: maximise sum of rotated-source · destination in the plane.
  double a = 0.0, b = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3 s = src.col(i) - mu_src;
    const Vec3 d = dst.col(i) - mu_dst;
    a += s.x() * d.x() + s.y() * d.y();
    b += s.x() * d.y() - s.y() * d.x();
  }
  const double yaw = (a == 0.0 && b == 0.0) ? 0.0 : std::atan2(b, a);
  out.rotation = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  out.translation = mu_dst - out.rotation * mu_src;
  return out;
}

AteResult ate(const Trajectory& est, const Trajectory& gt, Alignment alignment, double tolerance) {
  const Pairs p = associated(est, gt, tolerance);
  if (p.est.size() < 2) {
    throw InsufficientData("ate: " + std::to_string(p.est.size()) + " associated pose pairs, need at least 2");
  }
  std::vector<Vec3> pe, pg;
  for (std::size_t k = 0; k < p.est.size(); ++k) {
    pe.push_back(p.est[k].position);
    pg.push_back(p.gt[k].position);
  }
  const RigidTransform t = align(pe, pg, alignment);
  double trans = 0.0, rot = 0.0;
  for (std::size_t k = 0; k < pe.size(); ++k) {
    trans += (t.rotation * pe[k] + t.translation - pg[k]).squaredNorm();
    const double angle = rotation_angle(p.gt[k].rotation.transpose() * t.rotation * p.est[k].rotation);
    rot += angle * angle;
  }
  AteResult out;
  out.pairs = pe.size();
  out.translation_rmse = std::sqrt(trans / static_cast<double>(pe.size()));
  out.rotation_rmse_deg = std::sqrt(rot / static_cast<double>(pe.size())) * 180.0 / std::numbers::pi;
  return out;
}

std::vector<RelativeErrorStats> relative_error(const Trajectory& est, const Trajectory& gt,
                                               const RelativeErrorOptions& options) {
  if (options.fractions.empty()) throw InvalidArgument("relative_error: no fractions");
  for (double f : options.fractions) {
    if (!(f > 0.0) || !std::isfinite(f)) throw InvalidArgument("relative_error: fractions must be positive");
  }
  const Pairs p = associated(est, gt, options.tolerance);
  const std::size_t n = p.est.size();
  if (n < 2) throw InsufficientData("relative_error: fewer than 2 associated pose pairs");

  std::vector<double> dist(n, 0.0);  // cumulative ground-truth path length
  for (std::size_t k = 1; k < n; ++k) dist[k] = dist[k - 1] + (p.gt[k].position - p.gt[k - 1].position).norm();
  const double reference = options.reference_distance > 0.0 ? options.reference_distance : dist.back();
  if (!(reference > 0.0)) throw InsufficientData("relative_error: ground truth does not move");

  std::vector<RelativeErrorStats> out;
  bool any = false;
  for (double f : options.fractions) {
    RelativeErrorStats s;
    s.fraction = f;
    s.length = f * reference;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      j = std::max(j, i);
      while (j < n && dist[j] - dist[i] < s.length) ++j;
      if (j == n) break;
      // Align the start pose: T = T_gt,i · T_est,i⁻¹.
      const Mat3 r = p.gt[i].rotation * p.est[i].rotation.transpose();
      const Vec3 t = p.gt[i].position - r * p.est[i].position;
      s.samples.push_back((r * p.est[j].position + t - p.gt[j].position).norm());
    }
    s.missing = s.samples.empty();
    if (!s.missing) {
      any = true;
      const double m = static_cast<double>(s.samples.size());
      double sum = 0.0;
      for (double e : s.samples) sum += e;
      s.mean = sum / m;
      double var = 0.0;
      for (double e : s.samples) var += (e - s.mean) * (e - s.mean);
      s.stddev = std::sqrt(var / m);
      std::vector<double> sorted = s.samples;
      std::sort(sorted.begin(), sorted.end());
      s.median = quantile(sorted, 0.5);
      s.q1 = quantile(sorted, 0.25);
      s.q3 = quantile(sorted, 0.75);
    }
    out.push_back(std::move(s));
  }
  if (!any) {
    throw InsufficientData("relative_error: travelled distance " + std::to_string(dist.back()) +
                           " m is shorter than every sub-trajectory length");
  }
  return out;
}

MetricReport evaluate(const Trajectory& est, const Trajectory& gt, Alignment alignment,
                      const RelativeErrorOptions& options) {
  MetricReport r;
  r.ate = ate(est, gt, alignment, options.tolerance);
  try {
    r.relative = relative_error(est, gt, options);
  } catch (const InsufficientData&) {
    // A report is still useful without RE, e.g. for a hovering platform.
    for (double f : options.fractions) {
      RelativeErrorStats s;
      s.fraction = f;
      s.missing = true;
      r.relative.push_back(s);
    }
  }
  return r;
}

namespace {

nlohmann::ordered_json report_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["ate_translation_m"] = report.ate.translation_rmse;
  j["ate_rotation_deg"] = report.ate.rotation_rmse_deg;
  j["pairs"] = report.ate.pairs;
  auto& re = j["relative_error"] = nlohmann::ordered_json::array();
  for (const auto& s : report.relative) {
    nlohmann::ordered_json e;
    e["fraction"] = s.fraction;
    e["length_m"] = s.length;
    e["missing"] = s.missing;
    e["count"] = s.samples.size();
    if (!s.missing) {
      e["mean_m"] = s.mean;
      e["std_m"] = s.stddev;
      e["median_m"] = s.median;
      e["q1_m"] = s.q1;
      e["q3_m"] = s.q3;
    }
    re.push_back(std::move(e));
  }
  return j;
}

}  // namespace

std::string to_json(const MetricReport& report) { return report_json(report).dump(); }

std::string to_text(const MetricReport& report) {
  std::ostringstream os;
  os.precision(9);
  os << "ate_translation_m: " << report.ate.translation_rmse << '\n'
     << "ate_rotation_deg: " << report.ate.rotation_rmse_deg << '\n'
     << "pairs: " << report.ate.pairs << '\n';
  for (const auto& s : report.relative) {
    char pct[32];
    std::snprintf(pct, sizeof pct, "%g", s.fraction * 100.0);
    const std::string key = std::string("re_") + pct + "pct";
    if (s.missing) {
      os << key << ": missing\n";
      continue;
    }
    os << key << "_mean_m: " << s.mean << '\n'
       << key << "_std_m: " << s.stddev << '\n'
       << key << "_median_m: " << s.median << '\n'
       << key << "_count: " << s.samples.size() << '\n';
  }
  return os.str();
}

Trajectory to_trajectory(const std::vector<StampedPose>& poses) {
  Trajectory out;
  out.reserve(poses.size());
  for (const auto& p : poses) out.push_back({p.t, p.pose.rotation(), p.pose.position()});
  return out;
}

}  // namespace invio
