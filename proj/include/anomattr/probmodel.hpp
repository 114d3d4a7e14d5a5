#pragma once

#include <optional>
#include <span>

#include "anomattr/core.hpp"
#include "anomattr/model.hpp"

namespace anomattr {

// Locally weighted variance estimation. The defaults assume
// standardized inputs (bandwidth 1, kernel floor 5).
struct VarianceConfig {
  double w0 = 5.0;
  double eta0 = 1.0;
  std::optional<double> fallback_sigma2;

  void validate() const;
};

// p(y | x) = N(y | f(x), sigma2) at one test point.
struct GaussianPredictive {
  ModelHandle model;
  double sigma2;

  GaussianPredictive(ModelHandle f, double variance);
};

inline constexpr double kMinVariance = 1e-12;

// w_n = w0 + exp(-|x_n - xt|^2 / (2 eta0^2)).
Vector kernel_weights(const Vector& xt, const ReferenceSet& ho, const VarianceConfig& cfg);

// Weighted mean of squared held-out residuals. `ho` must not contain the
// test sample itself. Values below kMinVariance are replaced by the fallback
// or raise DataError.
double estimate_variance(const Vector& xt, const ReferenceSet& ho, const ModelHandle& f,
                         const VarianceConfig& cfg);

// Held-out set made of every test sample except `skip` (leave-one-out).
ReferenceSet leave_one_out(const TestSet& ts, std::size_t skip);

// -ln N(y | f(x), sigma2).
double anomaly_score(const Sample& s, const GaussianPredictive& gp);
double gaussian_nll(double residual, double sigma2);

// Mean of the per-sample scores.
double collective_anomaly_score(const TestSet& ts, std::span<const GaussianPredictive> gps);

}  // namespace anomattr
