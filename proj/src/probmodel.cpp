#include "anomattr/probmodel.hpp"

#include <cmath>
#include <numbers>

#include "anomattr/errors.hpp"

namespace anomattr {

void VarianceConfig::validate() const {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw UsageError("eta0 must be positive");
  if (!(w0 >= 0.0) || !std::isfinite(w0)) throw UsageError("w0 must be non-negative");
  if (fallback_sigma2 && !(*fallback_sigma2 > 0.0 && std::isfinite(*fallback_sigma2))) {
    throw UsageError("fallback sigma2 must be positive");
  }
}

GaussianPredictive::GaussianPredictive(ModelHandle f, double variance)
    : model(std::move(f)), sigma2(variance) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw DataError("predictive variance must be positive and finite");
  }
}

Vector kernel_weights(const Vector& xt, const ReferenceSet& ho, const VarianceConfig& cfg) {
  cfg.validate();
  if (ho.dim() != xt.size()) throw DataError("held-out set dimension does not match test point");
  Vector w;
  w.reserve(ho.size());
  const double denom = 2.0 * cfg.eta0 * cfg.eta0;
  for (const auto& p : ho.points()) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < xt.size(); ++i) {
      const double d = p.x[i] - xt[i];
      d2 += d * d;
    }
    w.push_back(cfg.w0 + std::exp(-d2 / denom));
  }
  return w;
}

double estimate_variance(const Vector& xt, const ReferenceSet& ho, const ModelHandle& f,
                         const VarianceConfig& cfg) {
  if (ho.role() != RefRole::kHeldOut || !ho.has_targets()) {
    throw DataError("variance estimation needs a held-out set with targets");
  }
  const Vector w = kernel_weights(xt, ho, cfg);
  std::vector<Vector> xs;
  xs.reserve(ho.size());
  for (const auto& p : ho.points()) xs.push_back(p.x);
  const Vector fx = f.eval(xs);

  double wsum = 0.0;
  for (double v : w) wsum += v;
  double s2 = 0.0;
  if (wsum > 0.0) {
    for (std::size_t n = 0; n < ho.size(); ++n) {
      const double r = *ho[n].y - fx[n];
      s2 += (w[n] / wsum) * r * r;
    }
  }
  if (!(s2 >= kMinVariance)) {
    if (cfg.fallback_sigma2) return *cfg.fallback_sigma2;
    throw DataError("held-out residuals are all (near) zero; supply a fallback variance");
  }
  return s2;
}

ReferenceSet leave_one_out(const TestSet& ts, std::size_t skip) {
  if (ts.size() < 2) throw DataError("leave-one-out needs at least 2 test samples");
  std::vector<RefPoint> pts;
  pts.reserve(ts.size() - 1);
  for (std::size_t t = 0; t < ts.size(); ++t) {
    if (t != skip) pts.push_back({ts[t].x, ts[t].y});
  }
  return ReferenceSet(std::move(pts), RefRole::kHeldOut);
}

double gaussian_nll(double residual, double sigma2) {
  return 0.5 * std::log(2.0 * std::numbers::pi * sigma2) + residual * residual / (2.0 * sigma2);
}

double anomaly_score(const Sample& s, const GaussianPredictive& gp) {
  return gaussian_nll(s.y - gp.model.eval_one(s.x), gp.sigma2);
}

double collective_anomaly_score(const TestSet& ts, std::span<const GaussianPredictive> gps) {
  if (gps.size() != ts.size()) throw DataError("need one predictive distribution per test sample");
  double sum = 0.0;
  for (std::size_t t = 0; t < ts.size(); ++t) sum += anomaly_score(ts[t], gps[t]);
  return sum / static_cast<double>(ts.size());
}

}  // namespace anomattr
