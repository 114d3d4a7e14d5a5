#pragma once

#include <cstdint>
#include <span>

#include "anomattr/core.hpp"
#include "anomattr/gradest.hpp"
#include "anomattr/model.hpp"

namespace anomattr {

struct LcConfig {
  double lambda = 0.0;       // l2 strength
  double nu = 0.0;           // l1 strength
  double kappa0 = 0.1;       // initial learning rate
  double kappa_decay = 0.98; // geometric shrink per completed iteration
  double kappa_floor = 1e-4;
  int max_iter = 500;
  double tol = 1e-6;         // on max |delta_new - delta_old|
  double init_scale = 1e-3;  // delta_0 ~ U[-init_scale, init_scale]^M
  double divergence_limit = 1e12;
  std::uint64_t seed = 0;    // delta initialization and gradient streams
  GradientConfig grad{};

  void validate() const;
};

struct LcResult {
  Vector delta;
  int iterations = 0;
  // Objective at the initial delta, then after every iteration.
  Vector objective_trace;
  // Step tolerance reached and the trace is non-increasing after the first
  // kTransientIterations iterations.
  bool converged = false;
};

inline constexpr int kTransientIterations = 5;

// (1/N) sum_t (y_t - f(x_t + delta))^2 / (2 sigma2_t) + lambda/2 |delta|^2 + nu |delta|_1
double lc_objective(const Vector& delta, const TestSet& ts, std::span<const double> sigma2,
                    const ModelHandle& f, const LcConfig& cfg);

// Proximal map of kappa_nu |.|_1, applied per coordinate.
Vector soft_threshold_step(const Vector& phi, double kappa_nu);

// phi = (1 - kappa lambda) delta_old
//       + kappa (1/N) sum_t (y_t - f(x_t + delta_old)) / sigma2_t * <df/dx>(x_t + delta_old)
// Gradients come from smooth_gradient with cfg.grad (sample t uses a stream
// derived from cfg.grad.seed and t).
Vector phi_update(const Vector& delta_old, const TestSet& ts, std::span<const double> sigma2,
                  const ModelHandle& f, double kappa, const LcConfig& cfg);

// Proximal-gradient iteration delta <- soft_threshold(phi(delta), kappa nu)
// with a geometrically shrinking kappa. Throws ConvergenceError if the
// objective exceeds cfg.divergence_limit.
LcResult solve_lc(const TestSet& ts, std::span<const double> sigma2, const ModelHandle& f,
                  const LcConfig& cfg);

// Packs an LcResult as an attribution vector named after ts's features.
AttributionVector lc_attribution(const LcResult& r, const TestSet& ts, const LcConfig& cfg);

}  // namespace anomattr
