// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include "moma/align_ssra.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "moma/align_linear.hpp"
#include "moma/error.hpp"
#include "moma/parallel.hpp"

namespace moma {

namespace {

constexpr std::size_t kN = ThetaParams::kCount;
using Vec = Eigen::Matrix<double, kN, 1>;
using Mat = Eigen::Matrix<double, kN, kN>;

void check_focal(double fp) {
  if (fp == 0.0 || !std::isfinite(fp)) {
    fail(ErrorCode::kZeroFocal, "pseudo focal length must be finite and nonzero");
  }
}

// Trig terms are evaluated once per parameter vector. forward_model and
// apply_ssra share this kernel so both produce identical bits.
struct Kernel {
  explicit Kernel(const ThetaParams& p)
      : s(p.s),
        t3(p.t3),
        cxp(p.cxp),
        cyp(p.cyp),
        fp(p.fp),
        r31(-std::sin(p.phi)),
        r32(std::sin(p.theta) * std::cos(p.phi)),
        r33(std::cos(p.theta) * std::cos(p.phi)) {}

  double operator()(double u, double v, double z) const {
    const double x = z * (u - cxp) / fp;
    const double y = z * (v - cyp) / fp;
    return s * (r31 * x + r32 * y + r33 * z) + t3;
  }

  double s, t3, cxp, cyp, fp;
  double r31, r32, r33;
};

Vec to_vec(const ThetaParams& p) {
  const auto a = p.to_array();
  return Vec(a.data());
}

ThetaParams from_vec(const Vec& v) {
  std::array<double, kN> a{};
  for (std::size_t i = 0; i < kN; ++i) a[i] = v[static_cast<Eigen::Index>(i)];
  return ThetaParams::from_array(a);
}

}  // namespace

double wrap_angle(double a) {
  constexpr double kPi = std::numbers::pi;
  if (a > -kPi && a <= kPi) return a;
  double w = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

PseudoPoint3D back_project(double u, double v, double z_p, double cxp,
                           double cyp, double fp) {
  check_focal(fp);
  return {z_p * (u - cxp) / fp, z_p * (v - cyp) / fp, z_p};
}

double forward_model(double u, double v, double z_p, const ThetaParams& theta) {
  check_focal(theta.fp);
  return Kernel(theta)(u, v, z_p);
}

std::array<double, kN> forward_jacobian(double u, double v, double z_p,
                                        const ThetaParams& p) {
  check_focal(p.fp);
  const double st = std::sin(p.theta), ct = std::cos(p.theta);
  const double sp = std::sin(p.phi), cp = std::cos(p.phi);
  const double a = (u - p.cxp) / p.fp;
  const double b = (v - p.cyp) / p.fp;
  const double g = -sp * a + st * cp * b + ct * cp;
  const double sz = p.s * z_p;
  std::array<double, kN> j{};
  j[kScale] = z_p * g;
  j[kTheta] = sz * (ct * cp * b - st * cp);
  j[kPhi] = sz * (-cp * a - st * sp * b - ct * sp);
  j[kT3] = 1.0;
  j[kCxp] = sz * sp / p.fp;
  j[kCyp] = -sz * st * cp / p.fp;
  j[kFp] = sz * (sp * a - st * cp * b) / p.fp;
  return j;
}

double ssra_cost(const SampleSet& samples, const ThetaParams& theta) {
  check_focal(theta.fp);
  const Kernel f(theta);
  double sum = 0.0;
  for (const SamplePoint& q : samples.points()) {
    const double r = q.z_c - f(q.u, q.v, q.z_p);
    sum += r * r;
  }
  return sum / static_cast<double>(samples.size());
}

SsraFit fit_ssra(const SampleSet& samples, const SolverConfig& cfg, Dims dims) {
  if (dims.width < 1 || dims.height < 1) {
    fail(ErrorCode::kInvalidArgument, "fit_ssra: calibration dimensions required");
  }
  if (!samples.all_paired()) {
    fail(ErrorCode::kInvalidArgument, "fit_ssra: samples are not paired");
  }
  const GlobalScaleShift lin = fit_gssa(samples);
  ThetaParams init;
  init.s = lin.s;
  init.t3 = lin.t;
  init.cxp = dims.width / 2.0;
  init.cyp = dims.height / 2.0;
  init.fp = std::max(dims.width, dims.height);
  return fit_ssra_from(samples, cfg, init);
}

SsraFit fit_ssra_from(const SampleSet& samples, const SolverConfig& cfg,
                      const ThetaParams& init) {
  if (cfg.max_iter < 1 || !(cfg.cost_tol > 0.0) || !(cfg.step_tol > 0.0) ||
      !(cfg.init_damping > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "fit_ssra: invalid solver configuration");
  }
  if (!samples.all_paired()) {
    fail(ErrorCode::kInvalidArgument, "fit_ssra: samples are not paired");
  }
  if (samples.size() < 2) {
    fail(ErrorCode::kDegenerateDesign, "fit_ssra: need at least 2 samples");
  }
  check_focal(init.fp);

  SsraFit fit;
  SolverReport& rep = fit.report;
  Vec params = to_vec(init);
  double cost = ssra_cost(samples, init);
  if (!std::isfinite(cost)) {
    fail(ErrorCode::kNonFinite, "fit_ssra: residuals are not finite");
  }
  rep.init_cost = cost;
  rep.cost_history.push_back(cost);

  const double n = static_cast<double>(samples.size());
  double damping = cfg.init_damping;
  constexpr double kMinDamping = 1e-15;
  constexpr double kMaxDamping = 1e16;

  auto small_step = [&](const Vec& step) {
    return step.norm() < cfg.step_tol * (params.norm() + cfg.step_tol);
  };

  bool done = cost == 0.0;
  rep.converged = done;
  while (!done && rep.iterations < cfg.max_iter) {
    ++rep.iterations;

    const ThetaParams current = from_vec(params);
    const Kernel f(current);
    Mat normal = Mat::Zero();
    Vec gradient = Vec::Zero();
    for (const SamplePoint& q : samples.points()) {
      const auto jac = forward_jacobian(q.u, q.v, q.z_p, current);
      const Vec j(jac.data());
      const double r = q.z_c - f(q.u, q.v, q.z_p);
      normal.noalias() += j * j.transpose();
      gradient.noalias() += j * r;
    }
    normal /= n;
    gradient /= n;

    double max_diag = 0.0;
    for (std::size_t i = 0; i < kN; ++i) {
      if (!cfg.frozen[i]) max_diag = std::max(max_diag, normal(i, i));
    }
    for (std::size_t i = 0; i < kN; ++i) {
      if (!cfg.frozen[i]) continue;
      normal.row(i).setZero();
      normal.col(i).setZero();
      normal(i, i) = 1.0;
      gradient[i] = 0.0;
    }
    if (max_diag == 0.0 || gradient.lpNorm<Eigen::Infinity>() == 0.0) {
      rep.converged = true;
      break;
    }

    // Marquardt scaling with a floor keeps columns that vanish at the current
    // point (pseudo intrinsics at zero rotation) damped rather than singular.
    Vec scale;
    for (std::size_t i = 0; i < kN; ++i) {
      scale[i] = cfg.frozen[i] ? 0.0 : std::max(normal(i, i), 1e-12 * max_diag);
    }

    bool accepted = false;
    while (!accepted) {
      Mat damped = normal;
      damped.diagonal() += damping * scale;
      const Vec step = damped.ldlt().solve(gradient);
      const Vec trial = params + step;
      double trial_cost = std::numeric_limits<double>::infinity();
      if (step.allFinite() && trial[kFp] != 0.0) {
        trial_cost = ssra_cost(samples, from_vec(trial));
      }
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        const double rel = (cost - trial_cost) / cost;
        const bool tiny = small_step(step);
        params = trial;
        cost = trial_cost;
        rep.cost_history.push_back(cost);
        damping = std::max(damping * 0.3, kMinDamping);
        accepted = true;
        if (cost == 0.0 || rel < cfg.cost_tol || tiny) {
          rep.converged = true;
          done = true;
        }
      } else {
        damping *= 3.0;
        if (damping > kMaxDamping || (step.allFinite() && small_step(step))) {
          // No descent direction left at machine precision.
          rep.converged = true;
          done = true;
          break;
        }
      }
    }
  }

  fit.theta = from_vec(params);
  fit.theta.theta = wrap_angle(fit.theta.theta);
  fit.theta.phi = wrap_angle(fit.theta.phi);
  rep.final_cost = cost;
  return fit;
}

DepthMap apply_ssra(const DepthMap& pred_norm, const ThetaParams& theta) {
  check_focal(theta.fp);
  const Kernel f(theta);
  const auto in = pred_norm.data();
  std::vector<double> out(in.size());
  const int w = pred_norm.width();
  parallel_rows(pred_norm.height(), [&](int v0, int v1) {
    for (int v = v0; v < v1; ++v) {
      const std::size_t row = static_cast<std::size_t>(v) * w;
      for (int u = 0; u < w; ++u) {
        const double z = in[row + u];
        out[row + u] = is_valid(z) ? f(u, v, z) : kInvalidDepth;
      }
    }
  });
  return DepthMap(pred_norm.width(), pred_norm.height(), std::move(out));
}

}  // namespace moma
