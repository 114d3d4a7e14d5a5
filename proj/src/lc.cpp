#include "anomattr/lc.hpp"

#include <algorithm>
#include <cmath>

#include "anomattr/errors.hpp"
#include "anomattr/rng.hpp"

namespace anomattr {

void LcConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw UsageError("lambda must be non-negative");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw UsageError("nu must be non-negative");
  if (!(kappa0 > 0.0) || !std::isfinite(kappa0)) throw UsageError("kappa must be positive");
  if (!(kappa_decay > 0.0 && kappa_decay <= 1.0)) throw UsageError("kappa decay must be in (0, 1]");
  if (!(kappa_floor > 0.0)) throw UsageError("kappa floor must be positive");
  if (max_iter < 1) throw UsageError("max_iter must be >= 1");
  if (!(tol > 0.0)) throw UsageError("tol must be positive");
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) throw UsageError("init_scale must be >= 0");
  if (kappa0 * lambda >= 1.0) throw UsageError("kappa * lambda must be < 1");
  grad.validate();
}

namespace {

void check_inputs(const Vector& delta, const TestSet& ts, std::span<const double> sigma2,
                  const ModelHandle& f) {
  if (sigma2.size() != ts.size()) throw DataError("need one variance per test sample");
  for (double s : sigma2) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DataError("test-point variances must be positive");
  }
  if (delta.size() != ts.dim() || f.dim() != ts.dim()) {
    throw DataError("delta, test set and model disagree on dimension");
  }
}

std::vector<Vector> shifted_inputs(const Vector& delta, const TestSet& ts) {
  std::vector<Vector> xs;
  xs.reserve(ts.size());
  for (const auto& s : ts.samples()) {
    Vector x = s.x;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += delta[i];
    xs.push_back(std::move(x));
  }
  return xs;
}

}  // namespace

double lc_objective(const Vector& delta, const TestSet& ts, std::span<const double> sigma2,
                    const ModelHandle& f, const LcConfig& cfg) {
  check_inputs(delta, ts, sigma2, f);
  const Vector fx = f.eval(shifted_inputs(delta, ts));
  double fit = 0.0;
  for (std::size_t t = 0; t < ts.size(); ++t) {
    const double r = ts[t].y - fx[t];
    fit += r * r / (2.0 * sigma2[t]);
  }
  fit /= static_cast<double>(ts.size());
  double l2 = 0.0;
  double l1 = 0.0;
  for (double d : delta) {
    l2 += d * d;
    l1 += std::abs(d);
  }
  return fit + 0.5 * cfg.lambda * l2 + cfg.nu * l1;
}

Vector soft_threshold_step(const Vector& phi, double kappa_nu) {
  if (!(kappa_nu >= 0.0)) throw UsageError("soft threshold must be non-negative");
  Vector out(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double p = phi[i];
    if (p > kappa_nu) {
      out[i] = p - kappa_nu;
    } else if (p < -kappa_nu) {
      out[i] = p + kappa_nu;
    } else {
      out[i] = 0.0;
    }
  }
  return out;
}

Vector phi_update(const Vector& delta_old, const TestSet& ts, std::span<const double> sigma2,
                  const ModelHandle& f, double kappa, const LcConfig& cfg) {
  check_inputs(delta_old, ts, sigma2, f);
  if (!(kappa >= 0.0)) throw UsageError("kappa must be non-negative");
  if (kappa * cfg.lambda >= 1.0) throw UsageError("kappa * lambda must be < 1");

  const std::size_t m = ts.dim();
  const auto xs = shifted_inputs(delta_old, ts);
  const Vector fx = f.eval(xs);
  Vector g(m, 0.0);
  const double inv_n = 1.0 / static_cast<double>(ts.size());
  for (std::size_t t = 0; t < ts.size(); ++t) {
    const double weight = (ts[t].y - fx[t]) * inv_n / sigma2[t];
    if (weight == 0.0) continue;
    GradientConfig gcfg = cfg.grad;
    gcfg.seed = derive_seed(cfg.grad.seed, {t});
    const Vector grad = smooth_gradient(f, xs[t], gcfg);
    for (std::size_t i = 0; i < m; ++i) g[i] += weight * grad[i];
  }
  Vector phi(m);
  for (std::size_t i = 0; i < m; ++i) phi[i] = (1.0 - kappa * cfg.lambda) * delta_old[i] + kappa * g[i];
  return phi;
}

LcResult solve_lc(const TestSet& ts, std::span<const double> sigma2, const ModelHandle& f,
                  const LcConfig& cfg) {
  cfg.validate();
  const std::size_t m = ts.dim();
  LcResult res;
  res.delta.assign(m, 0.0);
  check_inputs(res.delta, ts, sigma2, f);

  if (cfg.init_scale > 0.0) {
    Rng rng = make_rng(cfg.seed, {0});
    std::uniform_real_distribution<double> init(-cfg.init_scale, cfg.init_scale);
    for (double& d : res.delta) d = init(rng);
  }

  auto record = [&](double obj) {
    if (!std::isfinite(obj) || obj > cfg.divergence_limit) {
      throw ConvergenceError("LC objective diverged (" + std::to_string(obj) + ") after " +
                             std::to_string(res.iterations) + " iterations");
    }
    res.objective_trace.push_back(obj);
  };
  record(lc_objective(res.delta, ts, sigma2, f, cfg));

  const double floor = std::min(cfg.kappa_floor, cfg.kappa0);
  double kappa = cfg.kappa0;
  bool step_small = false;
  for (int k = 0; k < cfg.max_iter; ++k) {
    LcConfig iter_cfg = cfg;
    iter_cfg.grad.seed = derive_seed(cfg.grad.seed, {cfg.seed, static_cast<std::uint64_t>(k)});
    const Vector phi = phi_update(res.delta, ts, sigma2, f, kappa, iter_cfg);
    Vector next = soft_threshold_step(phi, kappa * cfg.nu);

    double step = 0.0;
    for (std::size_t i = 0; i < m; ++i) step = std::max(step, std::abs(next[i] - res.delta[i]));
    res.delta = std::move(next);
    res.iterations = k + 1;
    record(lc_objective(res.delta, ts, sigma2, f, cfg));

    kappa = std::max(kappa * cfg.kappa_decay, floor);
    if (step < cfg.tol) {
      step_small = true;
      break;
    }
  }

  bool monotone = true;
  const auto& tr = res.objective_trace;
  for (std::size_t j = kTransientIterations + 1; j < tr.size(); ++j) {
    const double slack = 1e-12 * std::max(1.0, std::abs(tr[j - 1]));
    if (tr[j] > tr[j - 1] + slack) {
      monotone = false;
      break;
    }
  }
  res.converged = step_small && monotone;
  return res;
}

AttributionVector lc_attribution(const LcResult& r, const TestSet& ts, const LcConfig& cfg) {
  AttributionVector a;
  a.method = Method::kLC;
  a.names = ts.names();
  a.scores = r.delta;
  a.iterations = r.iterations;
  a.objective = r.objective_trace.empty() ? 0.0 : r.objective_trace.back();
  a.converged = r.converged;
  a.meta = {{"lambda", cfg.lambda},    {"nu", cfg.nu},           {"kappa0", cfg.kappa0},
            {"kappa_decay", cfg.kappa_decay}, {"ns", static_cast<double>(cfg.grad.ns)},
            {"eta", cfg.grad.eta}};
  check_finite(a);
  return a;
}

}  // namespace anomattr
