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

#include "invio/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "invio/error.hpp"
#include "json.hpp"

namespace invio {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Object view that records which keys were read so leftovers can be rejected.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_ + ": " + what); }

  std::string at(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const char* key) {
    seen_.insert(key);
    const auto it = value_.find(key);
    return it == value_.end() ? nullptr : &*it;
  }

  void real(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(at(key) + ": expected a number");
      out = v->get<double>();
    }
  }

  template <typename T>
  void integer(const char* key, T& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(at(key) + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (!v->is_number_unsigned()) throw ConfigError(at(key) + ": expected a non-negative integer");
        out = static_cast<T>(v->get<std::uint64_t>());
      } else {
        out = static_cast<T>(v->get<std::int64_t>());
      }
    }
  }

  void boolean(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(at(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }

  void text(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(at(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  template <int N>
  void vector(const char* key, Eigen::Matrix<double, N, 1>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != static_cast<std::size_t>(N)) {
        throw ConfigError(at(key) + ": expected an array of " + std::to_string(N) + " numbers");
      }
      for (int i = 0; i < N; ++i) {
        const json& e = (*v)[static_cast<std::size_t>(i)];
        if (!e.is_number()) throw ConfigError(at(key) + "[" + std::to_string(i) + "]: expected a number");
        out(i) = e.get<double>();
      }
    }
  }

  // 3x3 matrix as 9 numbers, row-major.
  void matrix(const char* key, Mat3& out) {
    Eigen::Matrix<double, 9, 1> flat = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(Mat3(out.transpose()).data());
    vector<9>(key, flat);
    out = Eigen::Map<const Mat3>(flat.data()).transpose();
  }

  template <typename Fn>
  void object(const char* key, Fn&& fn) {
    if (const json* v = find(key)) {
      Node child(*v, at(key));
      fn(child);
      child.finish();
    }
  }

  void finish() const {
    for (auto it = value_.begin(); it != value_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(at(it.key().c_str()) + ": unknown key");
    }
  }

  const std::string& path() const { return path_; }

 private:
  const json& value_;
  std::string path_;
  std::set<std::string> seen_;
};

// Runs a validate() call and re-labels its failure with the section path.
template <typename Fn>
void checked(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const InvalidArgument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json parse_text(std::string_view text, const std::string& source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": invalid JSON: " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void read_noise(Node& n, NoiseParams& p) {
  n.real("sigma_g", p.sigma_g);
  n.real("sigma_bg", p.sigma_bg);
  n.real("sigma_a", p.sigma_a);
  n.real("sigma_ba", p.sigma_ba);
  n.real("sigma_v", p.sigma_v);
  n.vector<3>("gravity", p.gravity);
  checked(n.path(), [&] { p.validate(); });
}

void read_camera(Node& n, CameraModel& c) {
  n.real("fx", c.fx);
  n.real("fy", c.fy);
  n.real("cx", c.cx);
  n.real("cy", c.cy);
  n.integer("width", c.width);
  n.integer("height", c.height);
  n.matrix("body_R_cam", c.body_R_cam);
  n.vector<3>("body_p_cam", c.body_p_cam);
  n.real("pixel_sigma", c.pixel_sigma);
  checked(n.path(), [&] { c.validate(); });
}

void read_bias(Node& n, ImuBias& b) {
  n.vector<3>("gyro", b.gyro);
  n.vector<3>("accel", b.accel);
}

void read_filter(Node& n, VioConfig& f) {
  n.integer("max_clones", f.max_clones);
  n.integer("min_track_length", f.min_track_length);
  n.boolean("chi2_gating", f.chi2_gating);
  n.real("gate_probability", f.gate_probability);
  n.real("max_reprojection_rms_px", f.max_reprojection_rms_px);
  n.real("max_imu_gap", f.max_imu_gap);
  n.real("max_frame_gap", f.max_frame_gap);
  n.boolean("record_covariance", f.record_covariance);
  n.object("initial_variances", [&](Node& v) {
    double r = f.initial_variances(0), vel = f.initial_variances(3), p = f.initial_variances(6);
    v.real("rotation", r);
    v.real("velocity", vel);
    v.real("position", p);
    f.initial_variances << Vec3::Constant(r), Vec3::Constant(vel), Vec3::Constant(p);
  });
  n.object("triangulation", [&](Node& t) {
    t.integer("max_iterations", f.triangulation.max_iterations);
    t.real("step_tolerance", f.triangulation.step_tolerance);
    t.real("min_parallax_rad", f.triangulation.min_parallax_rad);
    t.real("min_depth", f.triangulation.min_depth);
  });
  if (const json* s = n.find("blackouts")) {
    const std::string path = n.at("blackouts");
    if (!s->is_array()) throw ConfigError(path + ": expected an array of [start, end] pairs");
    f.suppress.clear();
    for (std::size_t i = 0; i < s->size(); ++i) {
      const json& w = (*s)[i];
      if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
        throw ConfigError(path + "[" + std::to_string(i) + "]: expected [start, end] in seconds");
      }
      f.suppress.push_back({w[0].get<double>(), w[1].get<double>()});
    }
  }
}

void read_network(Node& n, NetArchitecture& a) {
  n.integer("window", a.window);
  n.integer("stem_kernel", a.stem_kernel);
  n.integer("kernel", a.kernel);
  if (const json* w = n.find("widths")) {
    if (!w->is_array() || w->empty()) throw ConfigError(n.at("widths") + ": expected a non-empty integer array");
    a.widths.clear();
    for (const auto& e : *w) {
      if (!e.is_number_integer()) throw ConfigError(n.at("widths") + ": expected integers");
      a.widths.push_back(e.get<int>());
    }
  }
  checked(n.path(), [&] { a.validate(); });
}

void read_training(Node& n, TrainConfig& t) {
  n.integer("epochs", t.epochs);
  n.integer("batch_size", t.batch_size);
  n.real("learning_rate", t.adam.learning_rate);
  n.real("beta1", t.adam.beta1);
  n.real("beta2", t.adam.beta2);
  n.real("epsilon", t.adam.epsilon);
  n.boolean("fit_normalization", t.fit_normalization);
  n.object("loss", [&](Node& l) {
    l.object("weights", [&](Node& w) {
      w.real("rotation", t.loss.weights.rotation);
      w.real("velocity", t.loss.weights.velocity);
      w.real("position", t.loss.weights.position);
    });
    l.real("huber_delta", t.loss.huber_delta);
    std::string mode = t.loss.huber_mode == ad::HuberMode::kNorm ? "norm" : "componentwise";
    l.text("huber_mode", mode);
    if (mode == "norm") {
      t.loss.huber_mode = ad::HuberMode::kNorm;
    } else if (mode == "componentwise") {
      t.loss.huber_mode = ad::HuberMode::kComponentwise;
    } else {
      throw ConfigError(l.at("huber_mode") + ": expected 'norm' or 'componentwise'");
    }
    std::string kind = t.loss.kind == LossKind::kAbsolute ? "absolute" : "relative";
    l.text("kind", kind);
    if (kind == "absolute") {
      t.loss.kind = LossKind::kAbsolute;
    } else if (kind == "relative") {
      t.loss.kind = LossKind::kRelative;
    } else {
      throw ConfigError(l.at("kind") + ": expected 'absolute' or 'relative'");
    }
  });
  const std::string p = n.path();
  if (t.epochs < 0) throw ConfigError(p + ".epochs: must be >= 0");
  if (t.batch_size < 1) throw ConfigError(p + ".batch_size: must be >= 1");
  if (!(t.adam.learning_rate > 0.0)) throw ConfigError(p + ".learning_rate: must be > 0");
  if (!(t.adam.beta1 >= 0.0 && t.adam.beta1 < 1.0)) throw ConfigError(p + ".beta1: must be in [0, 1)");
  if (!(t.adam.beta2 >= 0.0 && t.adam.beta2 < 1.0)) throw ConfigError(p + ".beta2: must be in [0, 1)");
  if (!(t.adam.epsilon > 0.0)) throw ConfigError(p + ".epsilon: must be > 0");
  if (!(t.loss.huber_delta > 0.0)) throw ConfigError(p + ".loss.huber_delta: must be > 0");
  const auto& w = t.loss.weights;
  if (!(w.rotation >= 0.0 && w.velocity >= 0.0 && w.position >= 0.0)) {
    throw ConfigError(p + ".loss.weights: must be non-negative");
  }
}

ojson vec_json(const Eigen::VectorXd& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ojson noise_json(const NoiseParams& p) {
  return {{"sigma_g", p.sigma_g}, {"sigma_bg", p.sigma_bg}, {"sigma_a", p.sigma_a},
          {"sigma_ba", p.sigma_ba}, {"sigma_v", p.sigma_v}, {"gravity", vec_json(p.gravity)}};
}

ojson camera_json(const CameraModel& c) {
  const Mat3 rt = c.body_R_cam.transpose();  // column-major storage of Rᵀ is R row-major
  return {{"fx", c.fx},
          {"fy", c.fy},
          {"cx", c.cx},
          {"cy", c.cy},
          {"width", c.width},
          {"height", c.height},
          {"body_R_cam", vec_json(Eigen::Map<const Eigen::Matrix<double, 9, 1>>(rt.data()))},
          {"body_p_cam", vec_json(c.body_p_cam)},
          {"pixel_sigma", c.pixel_sigma}};
}

std::string huber_mode_name(ad::HuberMode m) { return m == ad::HuberMode::kNorm ? "norm" : "componentwise"; }

}  // namespace

Primitive parse_primitive(const std::string& name) {
  if (name == "hover") return Primitive::kHover;
  if (name == "line") return Primitive::kLine;
  if (name == "circle") return Primitive::kCircle;
  if (name == "lissajous") return Primitive::kLissajous;
  if (name == "random_spline") return Primitive::kRandomSpline;
  throw ConfigError("unknown primitive '" + name + "' (expected hover, line, circle, lissajous, random_spline)");
}

BiasProfile parse_bias_profile(const std::string& name) {
  if (name == "zero") return BiasProfile::kZero;
  if (name == "constant") return BiasProfile::kConstant;
  if (name == "linear_drift") return BiasProfile::kLinearDrift;
  if (name == "random_walk") return BiasProfile::kRandomWalk;
  throw ConfigError("unknown bias profile '" + name + "' (expected zero, constant, linear_drift, random_walk)");
}

RunConfig parse_run_config(std::string_view json_text, const std::string& source) {
  const json doc = parse_text(json_text, source);
  RunConfig c;
  Node root(doc, "");
  root.integer("seed", c.seed);
  root.object("noise", [&](Node& n) { read_noise(n, c.noise); });
  root.object("camera", [&](Node& n) {
    CameraModel cam;
    read_camera(n, cam);
    c.camera = cam;
  });
  root.object("filter", [&](Node& n) { read_filter(n, c.filter); });
  root.object("network", [&](Node& n) { read_network(n, c.network); });
  root.object("training", [&](Node& n) { read_training(n, c.training); });
  root.object("inference", [&](Node& n) { n.integer("stride", c.inference_stride); });
  root.object("paths", [&](Node& n) { n.text("tracks", c.tracks_file); });
  root.finish();

  if (c.inference_stride < 1) throw ConfigError("inference.stride: must be >= 1");
  c.filter.noise = c.noise;
  c.training.seed = c.seed;
  checked("filter", [&] { c.filter.validate(); });
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_file(path), path.string());
}

TrajectorySpec parse_trajectory_spec(std::string_view json_text, const std::string& source) {
  const json doc = parse_text(json_text, source);
  TrajectorySpec s;
  Node root(doc, "");
  std::string primitive;
  root.text("primitive", primitive);
  if (!primitive.empty()) {
    try {
      s.primitive = parse_primitive(primitive);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("primitive: ") + e.what());
    }
  }
  root.real("amplitude", s.amplitude);
  root.real("angular_rate", s.angular_rate);
  root.real("height", s.height);
  root.real("duration", s.duration);
  root.real("imu_rate", s.imu_rate);
  root.real("camera_rate", s.camera_rate);
  std::string profile;
  root.text("bias_profile", profile);
  if (!profile.empty()) {
    try {
      s.bias_profile = parse_bias_profile(profile);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("bias_profile: ") + e.what());
    }
  }
  root.object("bias", [&](Node& n) { read_bias(n, s.bias); });
  root.object("bias_drift_rate", [&](Node& n) { read_bias(n, s.bias_drift_rate); });
  root.object("noise", [&](Node& n) { read_noise(n, s.noise); });
  root.real("pixel_noise", s.pixel_noise);
  root.integer("landmark_count", s.landmark_count);
  root.real("landmark_margin", s.landmark_margin);
  root.real("landmark_depth", s.landmark_depth);
  root.object("camera", [&](Node& n) { read_camera(n, s.camera); });
  root.integer("seed", s.seed);
  root.finish();
  checked("spec", [&] { s.validate(); });
  return s;
}

TrajectorySpec load_trajectory_spec(const std::filesystem::path& path) {
  return parse_trajectory_spec(read_file(path), path.string());
}

CameraModel parse_camera(std::string_view json_text, const std::string& source) {
  const json doc = parse_text(json_text, source);
  CameraModel c;
  Node root(doc, "");
  read_camera(root, c);
  root.finish();
  return c;
}

CameraModel load_camera(const std::filesystem::path& path) { return parse_camera(read_file(path), path.string()); }

std::string camera_to_json(const CameraModel& camera) { return camera_json(camera).dump(2) + "\n"; }

std::string default_run_config_json() {
  const RunConfig c;
  const VioConfig& f = c.filter;
  const TrainConfig& t = c.training;
  ojson j;
  j["seed"] = c.seed;
  j["noise"] = noise_json(c.noise);
  j["filter"] = {{"max_clones", f.max_clones},
                 {"min_track_length", f.min_track_length},
                 {"chi2_gating", f.chi2_gating},
                 {"gate_probability", f.gate_probability},
                 {"max_reprojection_rms_px", f.max_reprojection_rms_px},
                 {"max_imu_gap", f.max_imu_gap},
                 {"max_frame_gap", f.max_frame_gap},
                 {"record_covariance", f.record_covariance},
                 {"initial_variances",
                  {{"rotation", f.initial_variances(0)},
                   {"velocity", f.initial_variances(3)},
                   {"position", f.initial_variances(6)}}},
                 {"triangulation",
                  {{"max_iterations", f.triangulation.max_iterations},
                   {"step_tolerance", f.triangulation.step_tolerance},
                   {"min_parallax_rad", f.triangulation.min_parallax_rad},
                   {"min_depth", f.triangulation.min_depth}}},
                 {"blackouts", ojson::array()}};
  j["network"] = {{"window", c.network.window},
                  {"stem_kernel", c.network.stem_kernel},
                  {"kernel", c.network.kernel},
                  {"widths", c.network.widths}};
  j["training"] = {{"epochs", t.epochs},
                   {"batch_size", t.batch_size},
                   {"learning_rate", t.adam.learning_rate},
                   {"beta1", t.adam.beta1},
                   {"beta2", t.adam.beta2},
                   {"epsilon", t.adam.epsilon},
                   {"fit_normalization", t.fit_normalization},
                   {"loss",
                    {{"weights",
                      {{"rotation", t.loss.weights.rotation},
                       {"velocity", t.loss.weights.velocity},
                       {"position", t.loss.weights.position}}},
                     {"huber_delta", t.loss.huber_delta},
                     {"huber_mode", huber_mode_name(t.loss.huber_mode)},
                     {"kind", t.loss.kind == LossKind::kAbsolute ? "absolute" : "relative"}}}};
  j["inference"] = {{"stride", c.inference_stride}};
  j["paths"] = {{"tracks", c.tracks_file}};
  return j.dump(2) + "\n";
}

}  // namespace invio
