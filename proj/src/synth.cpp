// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include "moma/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>

#include "moma/error.hpp"
#include "moma/parallel.hpp"

namespace moma {

SceneSpec tabletop_scene(int width, int height) {
  SceneSpec spec;
  spec.camera.width = width;
  spec.camera.height = height;
  spec.camera.fx = spec.camera.fy = 300.0 * width / 320.0;
  spec.camera.cx = width / 2.0;
  spec.camera.cy = height / 2.0;
  // 0.8 y + z = 1.6, normalized.
  const double len = std::sqrt(0.8 * 0.8 + 1.0);
  spec.plane = Plane{{0.0, 0.8 / len, 1.0 / len}, 1.6 / len};
  spec.boxes = {
      {{0.00, 0.06, 1.50}, {0.08, 0.06, 0.08}},
      {{-0.30, 0.00, 1.65}, {0.06, 0.12, 0.06}},
      {{0.25, -0.05, 1.80}, {0.10, 0.10, 0.05}},
  };
  return spec;
}

namespace {

double intersect_plane(const Plane& plane, const Vec3& dir) {
  const double denom = plane.normal[0] * dir[0] + plane.normal[1] * dir[1] +
                       plane.normal[2] * dir[2];
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  const double t = plane.offset / denom;
  return t > 0.0 ? t : std::numeric_limits<double>::infinity();
}

// Slab test; returns the entry parameter of the ray from the origin.
double intersect_box(const Box& box, const Vec3& dir) {
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double lo = box.center[k] - box.half_extents[k];
    const double hi = box.center[k] + box.half_extents[k];
    if (dir[k] == 0.0) {
      if (lo > 0.0 || hi < 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    double t0 = lo / dir[k];
    double t1 = hi / dir[k];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
  }
  if (t_enter > t_exit || t_enter <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return t_enter;
}

}  // namespace

DepthMap render_scene(const SceneSpec& spec) {
  const PinholeCamera& cam = spec.camera;
  if (cam.width < 1 || cam.height < 1 || !(cam.fx > 0.0) || !(cam.fy > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "render_scene: invalid camera");
  }
  if (!spec.plane && spec.boxes.empty()) {
    fail(ErrorCode::kEmptyScene, "render_scene: scene has no surfaces");
  }
  std::vector<double> depth(static_cast<std::size_t>(cam.width) * cam.height);
  parallel_rows(cam.height, [&](int v0, int v1) {
    for (int v = v0; v < v1; ++v) {
      for (int u = 0; u < cam.width; ++u) {
        // Unit z component: the ray parameter is the z-depth.
        const Vec3 dir{(u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0};
        double t = spec.plane ? intersect_plane(*spec.plane, dir)
                              : std::numeric_limits<double>::infinity();
        for (const Box& b : spec.boxes) t = std::min(t, intersect_box(b, dir));
        depth[static_cast<std::size_t>(v) * cam.width + u] =
            std::isfinite(t) ? t : kInvalidDepth;
      }
    }
  });
  DepthMap map(cam.width, cam.height, std::move(depth));
  if (map.valid_count() == 0) {
    fail(ErrorCode::kEmptyScene, "render_scene: no surface is visible");
  }
  return map;
}

double ssra_gain(double u, double v, const ThetaParams& p) {
  if (p.fp == 0.0) fail(ErrorCode::kZeroFocal, "ssra_gain: zero focal length");
  return p.s * (-std::sin(p.phi) * (u - p.cxp) / p.fp +
                std::sin(p.theta) * std::cos(p.phi) * (v - p.cyp) / p.fp +
                std::cos(p.theta) * std::cos(p.phi));
}

Perturbed perturb(const DepthMap& gt, const PerturbationSpec& pspec,
                  std::uint64_t seed) {
  const ThetaParams& th = pspec.theta_star;
  if (pspec.gt_noise_sigma < 0.0 || pspec.pred_noise_sigma < 0.0) {
    fail(ErrorCode::kInvalidArgument, "perturb: noise sigma must be >= 0");
  }
  const int w = gt.width();
  const int h = gt.height();
  const auto z = gt.data();
  std::vector<double> pred(z.size(), kInvalidDepth);
  std::vector<double> paired(z.begin(), z.end());

  // Independent streams so enabling one noise source leaves the other intact.
  std::mt19937_64 pred_rng(seed);
  std::mt19937_64 gt_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> unit(0.0, 1.0);

  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * w + u;
      if (!is_valid(z[i])) continue;
      const double g = ssra_gain(u, v, th);
      if (!(std::abs(g) > 1e-9)) {
        fail(ErrorCode::kDegenerateG,
             "perturb: forward-model gain vanishes at pixel (" +
                 std::to_string(u) + ", " + std::to_string(v) + ")");
      }
      double zp = (z[i] - th.t3) / g;
      if (pspec.pred_noise_sigma > 0.0) zp += pspec.pred_noise_sigma * unit(pred_rng);
      pred[i] = pspec.jitter_a * zp + pspec.jitter_b;
      if (pspec.gt_noise_sigma > 0.0) paired[i] += pspec.gt_noise_sigma * unit(gt_rng);
    }
  }
  return {DepthMap(w, h, std::move(pred)), DepthMap(w, h, std::move(paired))};
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class KeyValues {
 public:
  explicit KeyValues(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      const std::string t = trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        fail(ErrorCode::kParse,
             "synth config line " + std::to_string(lineno) + ": expected key = value");
      }
      const std::string key = trim(std::string_view(t).substr(0, eq));
      if (key.empty()) {
        fail(ErrorCode::kParse,
             "synth config line " + std::to_string(lineno) + ": empty key");
      }
      values_[key] = trim(std::string_view(t).substr(eq + 1));
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  const std::string& raw(const std::string& key) const {
    used_.insert(key);
    return values_.at(key);
  }

  std::vector<double> numbers(const std::string& key) const {
    std::istringstream in(raw(key));
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        fail(ErrorCode::kParse, "synth config: bad number '" + tok + "' for " + key);
      }
    }
    return out;
  }

  template <typename T>
  void read(const std::string& key, T& target) const {
    if (!has(key)) return;
    const auto v = numbers(key);
    if (v.size() != 1) fail(ErrorCode::kParse, "synth config: " + key + " takes one value");
    target = static_cast<T>(v[0]);
    if constexpr (std::is_integral_v<T>) {
      if (static_cast<double>(target) != v[0]) {
        fail(ErrorCode::kParse, "synth config: " + key + " must be an integer");
      }
    }
  }

  void read_vec3(const std::string& key, Vec3& target) const {
    if (!has(key)) return;
    const auto v = numbers(key);
    if (v.size() != 3) fail(ErrorCode::kParse, "synth config: " + key + " takes three values");
    target = {v[0], v[1], v[2]};
  }

  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) {
      if (!used_.count(k)) out.push_back(k);
    }
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace

SynthConfig parse_synth_config(std::string_view text) {
  const KeyValues kv(text);
  SynthConfig cfg;
  PinholeCamera& cam = cfg.scene.camera;

  kv.read("camera.width", cam.width);
  kv.read("camera.height", cam.height);
  if (kv.has("preset")) {
    if (kv.raw("preset") != "tabletop") {
      fail(ErrorCode::kParse, "synth config: unknown preset '" + kv.raw("preset") + "'");
    }
    cfg.scene = tabletop_scene(cam.width, cam.height);
  } else {
    cam.cx = cam.width / 2.0;
    cam.cy = cam.height / 2.0;
  }
  kv.read("camera.fx", cam.fx);
  kv.read("camera.fy", cam.fy);
  kv.read("camera.cx", cam.cx);
  kv.read("camera.cy", cam.cy);

  if (kv.has("plane.normal") || kv.has("plane.offset")) {
    Plane plane = cfg.scene.plane.value_or(Plane{});
    kv.read_vec3("plane.normal", plane.normal);
    kv.read("plane.offset", plane.offset);
    const double len = std::hypot(plane.normal[0], plane.normal[1], plane.normal[2]);
    if (!(len > 0.0)) fail(ErrorCode::kParse, "synth config: zero plane normal");
    for (double& c : plane.normal) c /= len;
    plane.offset /= len;
    cfg.scene.plane = plane;
  }

  std::vector<Box> boxes;
  for (int i = 0; kv.has("box." + std::to_string(i) + ".center"); ++i) {
    const std::string prefix = "box." + std::to_string(i);
    Box b;
    kv.read_vec3(prefix + ".center", b.center);
    if (!kv.has(prefix + ".half_extents")) {
      fail(ErrorCode::kParse, "synth config: " + prefix + ".half_extents missing");
    }
    kv.read_vec3(prefix + ".half_extents", b.half_extents);
    boxes.push_back(b);
  }
  if (!boxes.empty()) cfg.scene.boxes = std::move(boxes);

  ThetaParams& th = cfg.perturbation.theta_star;
  th.cxp = cam.width / 2.0;
  th.cyp = cam.height / 2.0;
  th.fp = std::max(cam.width, cam.height);
  kv.read("theta.s", th.s);
  kv.read("theta.theta", th.theta);
  kv.read("theta.phi", th.phi);
  kv.read("theta.t3", th.t3);
  kv.read("theta.cxp", th.cxp);
  kv.read("theta.cyp", th.cyp);
  kv.read("theta.fp", th.fp);
  kv.read("perturb.gt_noise_sigma", cfg.perturbation.gt_noise_sigma);
  kv.read("perturb.pred_noise_sigma", cfg.perturbation.pred_noise_sigma);
  kv.read("perturb.jitter_a", cfg.perturbation.jitter_a);
  kv.read("perturb.jitter_b", cfg.perturbation.jitter_b);

  if (const auto extra = kv.unused(); !extra.empty()) {
    fail(ErrorCode::kParse, "synth config: unknown key '" + extra.front() + "'");
  }
  return cfg;
}

SynthConfig load_synth_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_synth_config(ss.str());
}

std::string to_config_text(const SynthConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  const PinholeCamera& cam = cfg.scene.camera;
  out << "camera.width = " << cam.width << "\n"
      << "camera.height = " << cam.height << "\n"
      << "camera.fx = " << cam.fx << "\n"
      << "camera.fy = " << cam.fy << "\n"
      << "camera.cx = " << cam.cx << "\n"
      << "camera.cy = " << cam.cy << "\n";
  if (cfg.scene.plane) {
    const Plane& p = *cfg.scene.plane;
    out << "plane.normal = " << p.normal[0] << " " << p.normal[1] << " "
        << p.normal[2] << "\n"
        << "plane.offset = " << p.offset << "\n";
  }
  for (std::size_t i = 0; i < cfg.scene.boxes.size(); ++i) {
    const Box& b = cfg.scene.boxes[i];
    out << "box." << i << ".center = " << b.center[0] << " " << b.center[1]
        << " " << b.center[2] << "\n"
        << "box." << i << ".half_extents = " << b.half_extents[0] << " "
        << b.half_extents[1] << " " << b.half_extents[2] << "\n";
  }
  const ThetaParams& th = cfg.perturbation.theta_star;
  out << "theta.s = " << th.s << "\n"
      << "theta.theta = " << th.theta << "\n"
      << "theta.phi = " << th.phi << "\n"
      << "theta.t3 = " << th.t3 << "\n"
      << "theta.cxp = " << th.cxp << "\n"
      << "theta.cyp = " << th.cyp << "\n"
      << "theta.fp = " << th.fp << "\n"
      << "perturb.gt_noise_sigma = " << cfg.perturbation.gt_noise_sigma << "\n"
      << "perturb.pred_noise_sigma = " << cfg.perturbation.pred_noise_sigma << "\n"
      << "perturb.jitter_a = " << cfg.perturbation.jitter_a << "\n"
      << "perturb.jitter_b = " << cfg.perturbation.jitter_b << "\n";
  return out.str();
}

}  // namespace moma
