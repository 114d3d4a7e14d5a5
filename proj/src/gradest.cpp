#include "anomattr/gradest.hpp"

#include <cmath>

#include "anomattr/errors.hpp"
#include "anomattr/rng.hpp"

namespace anomattr {

void GradientConfig::validate() const {
  if (ns < 1) throw UsageError("gradient ns must be >= 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw UsageError("gradient eta must be positive");
}

namespace {

constexpr int kMaxRedraws = 1000;

// terms[i][n]: the n-th summand of the estimator for coordinate i.
std::vector<Vector> estimator_terms(const ModelHandle& f, const Vector& x, const GradientConfig& cfg) {
  cfg.validate();
  const std::size_t m = x.size();
  const auto ns = static_cast<std::size_t>(cfg.ns);

  std::vector<Vector> steps(m, Vector(ns));
  std::vector<Vector> points;
  points.reserve(1 + m * ns);
  points.push_back(x);
  for (std::size_t i = 0; i < m; ++i) {
    Rng rng = make_rng(cfg.seed, {i});
    std::normal_distribution<double> draw(0.0, cfg.eta);
    for (std::size_t n = 0; n < ns; ++n) {
      double h = 0.0;
      for (int tries = 0; h == 0.0; ++tries) {
        if (tries == kMaxRedraws) {
          throw UsageError("gradient eta is too small to perturb x_" + std::to_string(i + 1) +
                           " at its magnitude");
        }
        h = (x[i] + draw(rng)) - x[i];
      }
      steps[i][n] = h;
      Vector p = x;
      p[i] += h;
      points.push_back(std::move(p));
    }
  }
  const Vector fx = f.eval(points);
  const double f0 = fx[0];

  std::vector<Vector> terms(m, Vector(ns));
  for (std::size_t i = 0; i < m; ++i) {
    const double* fi = fx.data() + 1 + i * ns;
    if (cfg.scheme == GradientScheme::kSlopeMean) {
      for (std::size_t n = 0; n < ns; ++n) terms[i][n] = (fi[n] - f0) / steps[i][n];
    } else {
      double fbar = 0.0;
      for (std::size_t n = 0; n < ns; ++n) fbar += fi[n];
      fbar /= static_cast<double>(ns);
      const double inv_eta2 = 1.0 / (cfg.eta * cfg.eta);
      for (std::size_t n = 0; n < ns; ++n) terms[i][n] = steps[i][n] * inv_eta2 * (fi[n] - fbar);
    }
  }
  return terms;
}

}  // namespace

Vector smooth_gradient(const ModelHandle& f, const Vector& x, const GradientConfig& cfg) {
  const auto terms = estimator_terms(f, x, cfg);
  Vector g(terms.size(), 0.0);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (double t : terms[i]) g[i] += t;
    g[i] /= static_cast<double>(cfg.ns);
  }
  return g;
}

Vector slope_variance(const ModelHandle& f, const Vector& x, const GradientConfig& cfg) {
  if (cfg.ns < 2) throw UsageError("slope variance needs ns >= 2");
  const auto terms = estimator_terms(f, x, cfg);
  Vector var(terms.size(), 0.0);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    double mean = 0.0;
    for (double t : terms[i]) mean += t;
    mean /= static_cast<double>(cfg.ns);
    for (double t : terms[i]) var[i] += (t - mean) * (t - mean);
    var[i] /= static_cast<double>(cfg.ns - 1);
  }
  return var;
}

}  // namespace anomattr
