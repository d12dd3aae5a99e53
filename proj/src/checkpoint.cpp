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

#include "invio/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "invio/error.hpp"

namespace invio {

namespace {

constexpr std::array<char, 8> kMagic = {'I', 'N', 'V', 'B', 'I', 'A', 'S', '\0'};
constexpr std::uint32_t kMaxDimension = 1u << 20;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u32(std::uint32_t v) { bytes(v, 4); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { bytes(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(const char* data, std::size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }

 private:
  void bytes(std::uint64_t v, int n) {
    char buf[8];
    for (int i = 0; i < n; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out_.write(buf, n);
  }
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(bytes(4)); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(bytes(8)); }
  void raw(char* data, std::size_t n) {
    in_.read(data, static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) throw DataError("checkpoint: truncated file");
  }

 private:
  std::uint64_t bytes(int n) {
    unsigned char buf[8];
    raw(reinterpret_cast<char*>(buf), static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
  }
  std::istream& in_;
};

}  // namespace

void save_checkpoint(const BiasNet& net, std::ostream& out) {
  Writer w(out);
  const NetArchitecture& arch = net.architecture();
  w.raw(kMagic.data(), kMagic.size());
  w.u32(kCheckpointVersion);
  w.i32(arch.window);
  w.i32(arch.in_channels);
  w.i32(arch.stem_kernel);
  w.i32(arch.kernel);
  w.u32(static_cast<std::uint32_t>(arch.widths.size()));
  for (int width : arch.widths) w.i32(width);
  w.i32(net.epochs_trained);
  for (int i = 0; i < 6; ++i) w.f64(net.normalization.mean(i));
  for (int i = 0; i < 6; ++i) w.f64(net.normalization.stddev(i));
  const auto& params = net.parameters();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    w.u32(static_cast<std::uint32_t>(p.rows()));
    w.u32(static_cast<std::uint32_t>(p.cols()));
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.cols(); ++c) w.f64(p(r, c));
    }
  }
  if (!out) throw IoError("checkpoint: write failed");
}

void save_checkpoint(const BiasNet& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("checkpoint: cannot open " + path.string() + " for writing");
  save_checkpoint(net, out);
}

BiasNet load_checkpoint(std::istream& in) {
  Reader r(in);
  std::array<char, 8> magic{};
  r.raw(magic.data(), magic.size());
  if (magic != kMagic) throw DataError("checkpoint: bad magic, not a bias-net checkpoint");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint: unsupported version " + std::to_string(version));
  }
  NetArchitecture arch;
  arch.window = r.i32();
  arch.in_channels = r.i32();
  arch.stem_kernel = r.i32();
  arch.kernel = r.i32();
  const std::uint32_t blocks = r.u32();
  if (blocks == 0 || blocks > 64) throw DataError("checkpoint: implausible block count");
  arch.widths.resize(blocks);
  for (auto& width : arch.widths) width = r.i32();
  try {
    arch.validate();
  } catch (const InvalidArgument& err) {
    throw DataError(std::string("checkpoint: ") + err.what());
  }

  BiasNet net(arch, 0);
  net.epochs_trained = r.i32();
  for (int i = 0; i < 6; ++i) net.normalization.mean(i) = r.f64();
  for (int i = 0; i < 6; ++i) net.normalization.stddev(i) = r.f64();
  if (!net.normalization.mean.allFinite() || !(net.normalization.stddev.array() > 0.0).all()) {
    throw DataError("checkpoint: invalid input normalization");
  }
  auto& params = net.parameters();
  const std::uint32_t count = r.u32();
  if (count != params.size()) {
    throw DataError("checkpoint: " + std::to_string(count) + " tensors, architecture needs " +
                    std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    if (rows > kMaxDimension || cols > kMaxDimension || rows != params[i].rows() || cols != params[i].cols()) {
      throw DataError("checkpoint: tensor " + net.parameter_names()[i] + " has shape " + std::to_string(rows) + "x" +
                      std::to_string(cols));
    }
    for (std::uint32_t a = 0; a < rows; ++a) {
      for (std::uint32_t b = 0; b < cols; ++b) params[i](a, b) = r.f64();
    }
  }
  return net;
}

BiasNet load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open " + path.string());
  return load_checkpoint(in);
}

}  // namespace invio
