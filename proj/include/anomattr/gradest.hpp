#pragma once

#include <cstdint>

#include "anomattr/core.hpp"
#include "anomattr/model.hpp"

namespace anomattr {

enum class GradientScheme { kSlopeMean, kGaussianSmoothing };

struct GradientConfig {
  int ns = 10;         // perturbations per coordinate
  double eta = 1.0;    // perturbation scale
  GradientScheme scheme = GradientScheme::kSlopeMean;
  std::uint64_t seed = 0;

  void validate() const;
};

// Smoothed gradient of a black-box f at x.
//
// Slope-mean:   g_i = mean_n [f(x + h_n e_i) - f(x)] / h_n
// Smoothing:    g_i = mean_n h_n / eta^2 [f(x + h_n e_i) - fbar_i]
//
// with h_n ~ N(0, eta^2), drawn independently per coordinate from a stream
// derived from (seed, i). Draws that vanish numerically (x_i + h == x_i)
// are redrawn, so exactly ns terms enter each mean. The applied step is
// the representable difference (x_i + h) - x_i.
Vector smooth_gradient(const ModelHandle& f, const Vector& x, const GradientConfig& cfg);

// Per-coordinate sample variance of the ns terms averaged by the configured
// scheme. Needs ns >= 2.
Vector slope_variance(const ModelHandle& f, const Vector& x, const GradientConfig& cfg);

}  // namespace anomattr
