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

#pragma once

#include <filesystem>
#include <iosfwd>

#include "invio/bias_net.hpp"

namespace invio {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Little-endian binary snapshot of a BiasNet: architecture, epoch count,
/// input normalization and every parameter tensor. Layout in docs/formats.md.
void save_checkpoint(const BiasNet& net, std::ostream& out);
void save_checkpoint(const BiasNet& net, const std::filesystem::path& path);

/// Throws DataError for a bad magic, unknown version, truncated file or
/// tensor shapes that disagree with the stored architecture; IoError when
/// the file cannot be opened.
BiasNet load_checkpoint(std::istream& in);
BiasNet load_checkpoint(const std::filesystem::path& path);

}  // namespace invio
