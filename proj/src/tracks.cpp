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

#include <algorithm>
#include <fstream>
#include <set>
#include <string>

#include "invio/dataio.hpp"
#include "invio/error.hpp"
#include "text.hpp"

namespace invio {

TrackTable load_tracks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open tracks file " + path.string());
  const std::string source = path.string();
  TrackTable table;
  std::set<std::pair<std::int64_t, long>> seen;
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (detail::skippable(line)) continue;
    const auto fields = detail::split_whitespace(line);
    if (fields.size() != 4) {
      throw ParseError(source, number, "expected 'frame_ns feature_id u v', got " + std::to_string(fields.size()) +
                                           " fields");
    }
    const std::int64_t frame = detail::parse_int(fields[0], source, number);
    const long id = static_cast<long>(detail::parse_int(fields[1], source, number));
    const Vec2 px(detail::parse_double(fields[2], source, number), detail::parse_double(fields[3], source, number));
    if (!seen.emplace(frame, id).second) {
      throw DataError(source + ":" + std::to_string(number) + ": duplicate observation of feature " +
                      std::to_string(id) + " in frame " + std::to_string(frame));
    }
    table[id].push_back({frame, px});
  }
  for (auto& [id, points] : table) {
    std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.frame_ns < b.frame_ns; });
  }
  return table;
}

std::vector<FrameObservations> frames_from_tracks(const TrackTable& tracks, std::int64_t time_origin_ns) {
  std::map<std::int64_t, FrameObservations> frames;
  for (const auto& [id, points] : tracks) {  // ids ascend, so features end up ordered by id
    for (const auto& p : points) {
      auto& f = frames[p.frame_ns];
      f.t = static_cast<double>(p.frame_ns - time_origin_ns) * 1e-9;
      f.features.emplace_back(id, p.pixel);
    }
  }
  std::vector<FrameObservations> out;
  out.reserve(frames.size());
  for (auto& [ns, f] : frames) out.push_back(std::move(f));
  return out;
}

void write_tracks(const std::filesystem::path& path, std::span<const FrameObservations> frames,
                  std::int64_t time_origin_ns) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "# frame_ns feature_id u v\n";
  for (const auto& f : frames) {
    const std::int64_t ns = time_origin_ns + std::llround(f.t * 1e9);
    for (const auto& [id, px] : f.features) {
      out << ns << ' ' << id << ' ' << detail::format_double(px.x()) << ' ' << detail::format_double(px.y()) << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace invio
