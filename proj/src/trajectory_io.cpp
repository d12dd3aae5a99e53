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
#include <cmath>
#include <fstream>
#include <string>

#include "invio/dataio.hpp"
#include "invio/error.hpp"
#include "text.hpp"

namespace invio {

void write_trajectory(const std::filesystem::path& path, const Trajectory& trajectory, std::int64_t time_origin_ns) {
  using detail::format_double;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& s : trajectory) {
    Eigen::Quaterniond q(s.rotation);
    q.normalize();
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    out << detail::format_ns_as_seconds(time_origin_ns + std::llround(s.t * 1e9)) << ' '
        << format_double(s.position.x()) << ' ' << format_double(s.position.y()) << ' '
        << format_double(s.position.z()) << ' ' << format_double(q.x()) << ' ' << format_double(q.y()) << ' '
        << format_double(q.z()) << ' ' << format_double(q.w()) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory " + path.string());
  const std::string source = path.string();
  Trajectory out;
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (detail::skippable(line)) continue;
    const auto f = detail::split_whitespace(line);
    if (f.size() != 8) throw ParseError(source, number, "expected 8 fields 't px py pz qx qy qz qw'");
    double v[8];
    for (int i = 0; i < 8; ++i) v[i] = detail::parse_double(f[static_cast<std::size_t>(i)], source, number);
    Eigen::Quaterniond q(v[7], v[4], v[5], v[6]);
    if (!(q.norm() > 0.5)) throw ParseError(source, number, "degenerate quaternion");
    q.normalize();
    out.push_back({v[0], q.toRotationMatrix(), Vec3(v[1], v[2], v[3])});
  }
  return out;
}

}  // namespace invio
