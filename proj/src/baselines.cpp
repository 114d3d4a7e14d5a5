#include "anomattr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anomattr/errors.hpp"
#include "anomattr/rng.hpp"

namespace anomattr {

void IgConfig::validate() const {
  if (intervals < 2) throw UsageError("IG needs at least 2 intervals");
  for (double v : baseline) {
    if (!std::isfinite(v)) throw UsageError("IG baseline must be finite");
  }
  grad.validate();
}

void SvConfig::validate() const {
  if (mc_samples < 1) throw UsageError("SV needs mc_samples >= 1");
}

namespace {

void require_dim(const Sample& s, const ModelHandle& f) {
  if (s.x.size() != f.dim()) throw DataError("sample and model disagree on dimension");
}

void require_ref(const Sample& s, const ReferenceSet& ref) {
  if (ref.dim() != s.x.size()) throw DataError("reference set and sample disagree on dimension");
}

// Trapezoid-rule IG along x0 -> x. `stream` selects the gradient RNG stream
// so that EIG's k-th baseline and IG with the same baseline coincide.
Vector integrate_path(const ModelHandle& f, const Vector& x, const Vector& x0, const IgConfig& cfg,
                      std::uint64_t stream) {
  const std::size_t m = x.size();
  const int K = cfg.intervals;
  Vector avg(m, 0.0);
  bool moves = false;
  for (std::size_t i = 0; i < m; ++i) moves = moves || x[i] != x0[i];
  if (!moves) return avg;

  for (int k = 0; k <= K; ++k) {
    const double alpha = static_cast<double>(k) / K;
    Vector p(m);
    for (std::size_t i = 0; i < m; ++i) p[i] = x0[i] + alpha * (x[i] - x0[i]);
    GradientConfig g = cfg.grad;
    g.seed = derive_seed(cfg.grad.seed, {stream, static_cast<std::uint64_t>(k)});
    const Vector grad = smooth_gradient(f, p, g);
    const double w = (k == 0 || k == K) ? 0.5 : 1.0;
    for (std::size_t i = 0; i < m; ++i) avg[i] += w * grad[i];
  }
  Vector ig(m);
  for (std::size_t i = 0; i < m; ++i) ig[i] = (x[i] - x0[i]) * avg[i] / K;
  return ig;
}

struct MeanAndError {
  Vector mean;
  Vector stderr_;
};

// Column means and standard errors of the mean over rows.
MeanAndError summarize(const std::vector<Vector>& rows) {
  const std::size_t n = rows.size();
  const std::size_t m = rows.front().size();
  MeanAndError out{Vector(m, 0.0), Vector(m, 0.0)};
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < m; ++i) out.mean[i] += r[i];
  }
  for (double& v : out.mean) v /= static_cast<double>(n);
  if (n < 2) return out;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < m; ++i) {
      const double d = r[i] - out.mean[i];
      out.stderr_[i] += d * d;
    }
  }
  for (double& v : out.stderr_) {
    v = std::sqrt(v / static_cast<double>(n - 1) / static_cast<double>(n));
  }
  return out;
}

double stderr_of_sums(const std::vector<Vector>& rows) {
  std::vector<Vector> sums;
  sums.reserve(rows.size());
  for (const auto& r : rows) sums.push_back({std::accumulate(r.begin(), r.end(), 0.0)});
  return summarize(sums).stderr_.front();
}

}  // namespace

AttributionVector ig_attribute(const Sample& s, const ModelHandle& f, const IgConfig& cfg) {
  cfg.validate();
  require_dim(s, f);
  if (cfg.baseline.size() != s.x.size()) throw UsageError("IG baseline length must equal M");
  AttributionVector a;
  a.method = Method::kIG;
  a.names = default_feature_names(s.x.size());
  a.scores = integrate_path(f, s.x, cfg.baseline, cfg, 0);
  a.meta = {{"intervals", static_cast<double>(cfg.intervals)},
            {"eta", cfg.grad.eta},
            {"ns", static_cast<double>(cfg.grad.ns)}};
  check_finite(a);
  return a;
}

AttributionVector eig_attribute(const Sample& s, const ModelHandle& f, const ReferenceSet& ref,
                                const IgConfig& cfg) {
  cfg.validate();
  require_dim(s, f);
  require_ref(s, ref);
  std::vector<Vector> per_baseline;
  per_baseline.reserve(ref.size());
  for (std::size_t r = 0; r < ref.size(); ++r) {
    per_baseline.push_back(integrate_path(f, s.x, ref[r].x, cfg, r));
  }
  const MeanAndError stats = summarize(per_baseline);
  AttributionVector a;
  a.method = Method::kEIG;
  a.names = default_feature_names(s.x.size());
  a.scores = stats.mean;
  a.std_errors = stats.stderr_;
  a.meta = {{"intervals", static_cast<double>(cfg.intervals)},
            {"eta", cfg.grad.eta},
            {"ns", static_cast<double>(cfg.grad.ns)},
            {"baselines", static_cast<double>(ref.size())},
            {"sum_stderr", stderr_of_sums(per_baseline)}};
  check_finite(a);
  return a;
}

AttributionVector sv_attribute(const Sample& s, const ModelHandle& f, const ReferenceSet& ref,
                               const SvConfig& cfg) {
  cfg.validate();
  require_dim(s, f);
  require_ref(s, ref);
  const std::size_t m = s.x.size();
  const auto draws = static_cast<std::size_t>(cfg.mc_samples);

  Rng rng = make_rng(cfg.seed, {});
  std::vector<std::size_t> epoch(ref.size());
  std::iota(epoch.begin(), epoch.end(), 0);
  std::vector<std::vector<std::size_t>> perms(draws, std::vector<std::size_t>(m));
  std::vector<Vector> points;
  points.reserve(draws * (m + 1));
  for (std::size_t d = 0; d < draws; ++d) {
    const std::size_t slot = d % ref.size();
    if (slot == 0) std::shuffle(epoch.begin(), epoch.end(), rng);
    auto& perm = perms[d];
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    Vector cur = ref[epoch[slot]].x;
    points.push_back(cur);
    for (std::size_t j : perm) {
      cur[j] = s.x[j];
      points.push_back(cur);
    }
  }
  const Vector fx = f.eval(points);

  std::vector<Vector> contrib(draws, Vector(m, 0.0));
  for (std::size_t d = 0; d < draws; ++d) {
    const double* v = fx.data() + d * (m + 1);
    for (std::size_t k = 0; k < m; ++k) contrib[d][perms[d][k]] = v[k + 1] - v[k];
  }
  const MeanAndError stats = summarize(contrib);
  AttributionVector a;
  a.method = Method::kSV;
  a.names = default_feature_names(m);
  a.scores = stats.mean;
  a.std_errors = stats.stderr_;
  a.meta = {{"mc_samples", static_cast<double>(draws)}, {"sum_stderr", stderr_of_sums(contrib)}};
  check_finite(a);
  return a;
}

AttributionVector zscore_attribute(const Sample& s, const ReferenceSet& ref) {
  require_ref(s, ref);
  const std::size_t m = s.x.size();
  const ScalingRecord rec = ScalingRecord::fit(ref, default_feature_names(m));
  AttributionVector a;
  a.method = Method::kZScore;
  a.names = default_feature_names(m);
  a.scores = rec.to_standard(s.x);
  check_finite(a);
  return a;
}

namespace {

const ReferenceSet& need_ref(Method method, const ReferenceSet* ref) {
  if (ref == nullptr) {
    throw UsageError("method '" + std::string(method_name(method)) + "' needs a reference set");
  }
  return *ref;
}

}  // namespace

AttributionVector baseline_attribute(Method method, const Sample& s, const ModelHandle& f,
                                     const BaselineConfigs& cfg, const ReferenceSet* ref) {
  switch (method) {
    case Method::kLIME:
      return lime_attribute(s, f, cfg.lime);
    case Method::kIG:
      return ig_attribute(s, f, cfg.ig);
    case Method::kEIG:
      return eig_attribute(s, f, need_ref(method, ref), cfg.ig);
    case Method::kSV:
      return sv_attribute(s, f, need_ref(method, ref), cfg.sv);
    case Method::kZScore:
      return zscore_attribute(s, need_ref(method, ref));
    default:
      throw UsageError("method '" + std::string(method_name(method)) + "' is not a baseline");
  }
}

AttributionVector deviation_wrap(Method method, const Sample& s, const ModelHandle& f,
                                 const BaselineConfigs& cfg, const ReferenceSet* ref) {
  switch (method) {
    case Method::kLIME:
      return lime_attribute(s, f, cfg.lime);
    case Method::kIG:
      return ig_attribute(s, deviation_model(f, s.y), cfg.ig);
    case Method::kEIG:
      return eig_attribute(s, deviation_model(f, s.y), need_ref(method, ref), cfg.ig);
    case Method::kSV:
      return sv_attribute(s, deviation_model(f, s.y), need_ref(method, ref), cfg.sv);
    default:
      throw UsageError("deviation_wrap supports lime, ig, eig and sv only");
  }
}

}  // namespace anomattr
