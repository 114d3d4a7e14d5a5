#include "anomattr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "anomattr/errors.hpp"
#include "anomattr/rng.hpp"

namespace anomattr {

namespace {

void require_pair(const Vector& a, const Vector& b, std::size_t min_len) {
  if (a.size() != b.size()) throw DataError("score vectors differ in length");
  if (a.size() < min_len) {
    throw DataError("score vectors need at least " + std::to_string(min_len) + " entries");
  }
}

Vector absolute(const Vector& v) {
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::abs(x); });
  return out;
}

// Sorts `idx` by key[idx] with a bottom-up merge sort and returns the number
// of inversions (pairs moved past each other).
std::int64_t sort_counting_swaps(std::vector<std::size_t>& idx, const Vector& key) {
  const std::size_t n = idx.size();
  std::vector<std::size_t> buf(n);
  std::int64_t swaps = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo;
      std::size_t j = mid;
      std::size_t k = lo;
      while (i < mid && j < hi) {
        if (key[idx[j]] < key[idx[i]]) {
          swaps += static_cast<std::int64_t>(mid - i);
          buf[k++] = idx[j++];
        } else {
          buf[k++] = idx[i++];
        }
      }
      while (i < mid) buf[k++] = idx[i++];
      while (j < hi) buf[k++] = idx[j++];
    }
    std::swap(idx, buf);
  }
  return swaps;
}

// Sum over runs of equal keys (in sorted order) of t(t-1)/2.
template <class Eq>
std::int64_t tied_pairs(const std::vector<std::size_t>& sorted, Eq&& same) {
  std::int64_t total = 0;
  std::int64_t run = 1;
  for (std::size_t k = 1; k <= sorted.size(); ++k) {
    if (k < sorted.size() && same(sorted[k - 1], sorted[k])) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

Vector average_ranks(const Vector& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  Vector rank(n);
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start + 1;
    while (end < n && v[order[end]] == v[order[start]]) ++end;
    const double r = 0.5 * static_cast<double>(start + end - 1) + 1.0;
    for (std::size_t k = start; k < end; ++k) rank[order[k]] = r;
    start = end;
  }
  return rank;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

double kendall_tau(const Vector& a_raw, const Vector& b_raw) {
  require_pair(a_raw, b_raw, 2);
  const Vector a = absolute(a_raw);
  const Vector b = absolute(b_raw);
  const std::size_t n = a.size();

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    return a[i] != a[j] ? a[i] < a[j] : b[i] < b[j];
  });
  const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t n1 = tied_pairs(idx, [&](std::size_t i, std::size_t j) { return a[i] == a[j]; });
  const std::int64_t n3 = tied_pairs(idx, [&](std::size_t i, std::size_t j) {
    return a[i] == a[j] && b[i] == b[j];
  });
  const std::int64_t swaps = sort_counting_swaps(idx, b);
  const std::int64_t n2 = tied_pairs(idx, [&](std::size_t i, std::size_t j) { return b[i] == b[j]; });

  const std::int64_t s = n0 - n1 - n2 + n3 - 2 * swaps;
  if (n0 == n1 || n0 == n2) return 0.0;
  return static_cast<double>(s) /
         std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
}

double spearman_rho(const Vector& a_raw, const Vector& b_raw) {
  require_pair(a_raw, b_raw, 2);
  const Vector ra = average_ranks(absolute(a_raw));
  const Vector rb = average_ranks(absolute(b_raw));
  const double mean = 0.5 * static_cast<double>(ra.size() + 1);
  double cov = 0.0;
  double va = 0.0;
  double vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

double sign_match_ratio(const Vector& r, const Vector& u) {
  require_pair(r, u, 1);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (sign_of(r[i]) * sign_of(u[i]) == -1) ++mismatches;
  }
  return 1.0 - static_cast<double>(mismatches) / static_cast<double>(r.size());
}

std::vector<std::size_t> top_quarter(const Vector& v) {
  const std::size_t k = (v.size() + 3) / 4;
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t i, std::size_t j) { return std::abs(v[i]) > std::abs(v[j]); });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

double hit25(const Vector& r, const Vector& u) {
  require_pair(r, u, 1);
  const auto tr = top_quarter(r);
  const auto tu = top_quarter(u);
  std::vector<std::size_t> common;
  std::set_intersection(tr.begin(), tr.end(), tu.begin(), tu.end(), std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(tr.size());
}

ConsistencyReport consistency(const Vector& reference, const Vector& other) {
  return {kendall_tau(reference, other), spearman_rho(reference, other),
          sign_match_ratio(reference, other), hit25(reference, other)};
}

Vector ScoreDistribution::feature_values(std::size_t i) const {
  Vector out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.at(i));
  return out;
}

double kde_density(const Vector& values, double bandwidth, double query) {
  if (values.empty()) throw DataError("KDE needs at least one value");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw UsageError("KDE bandwidth must be positive");
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * bandwidth * bandwidth);
  double sum = 0.0;
  for (double v : values) {
    const double z = (query - v) / bandwidth;
    sum += norm * std::exp(-0.5 * z * z);
  }
  return sum / static_cast<double>(values.size());
}

double default_bandwidth(const Vector& values) {
  if (values.empty()) throw DataError("bandwidth needs at least one value");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return std::max(0.04 * (*hi - *lo), 1e-6);
}

KdeCurve kde_curve(const Vector& values, double bandwidth, int points) {
  if (points < 2) throw UsageError("KDE grid needs at least 2 points");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double start = *lo - 3.0 * bandwidth;
  const double stop = *hi + 3.0 * bandwidth;
  KdeCurve c;
  c.grid.reserve(points);
  c.density.reserve(points);
  for (int k = 0; k < points; ++k) {
    const double q = start + (stop - start) * k / (points - 1);
    c.grid.push_back(q);
    c.density.push_back(kde_density(values, bandwidth, q));
  }
  return c;
}

ScoreDistribution bootstrap_variability(Method method, const Sample& s, const ModelHandle& f,
                                        const ReferenceSet& ref, int B, int Nb, std::uint64_t seed,
                                        const BaselineConfigs& cfg) {
  if (B < 1 || Nb < 1) throw UsageError("bootstrap needs B >= 1 and Nb >= 1");
  if (method == Method::kLC) throw UsageError("bootstrap variability does not apply to lc");
  ScoreDistribution dist;
  dist.names = default_feature_names(s.x.size());
  for (int b = 0; b < B; ++b) {
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(b)});
    std::uniform_int_distribution<std::size_t> pick(0, ref.size() - 1);
    std::vector<RefPoint> pts;
    pts.reserve(static_cast<std::size_t>(Nb));
    for (int n = 0; n < Nb; ++n) pts.push_back(ref[pick(rng)]);
    const ReferenceSet boot(std::move(pts), ref.role());
    AttributionVector a = baseline_attribute(method, s, f, cfg, &boot);
    dist.rounds.push_back(std::move(a.scores));
  }
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    dist.bandwidth.push_back(default_bandwidth(dist.feature_values(i)));
  }
  return dist;
}

namespace {

double max_abs_diff(const Vector& a, const Vector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double sum(const Vector& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

std::vector<OracleCheck> property_oracle_suite(const std::vector<OracleFixture>& fixtures,
                                              const OracleSuiteConfig& cfg) {
  std::vector<OracleCheck> out;
  auto add = [&](const std::string& fixture, const std::string& property, double residual,
                 double tolerance) {
    out.push_back({fixture, property, residual, tolerance, residual <= tolerance});
  };

  for (const auto& fx : fixtures) {
    std::vector<Vector> ref_x;
    for (const auto& p : fx.ref.points()) ref_x.push_back(p.x);
    const Vector f_ref = fx.model.eval(ref_x);
    const double f_mean = sum(f_ref) / static_cast<double>(f_ref.size());

    for (std::size_t k = 0; k < fx.points.size(); ++k) {
      const Sample& s = fx.points[k];
      const std::string tag = fx.name + "#" + std::to_string(k);
      const double fx_t = fx.model.eval_one(s.x);
      Sample shifted = s;
      shifted.y += cfg.y_shift;

      IgConfig ig_cfg = cfg.methods.ig;
      ig_cfg.baseline = fx.ig_baseline;
      BaselineConfigs wrap_cfg = cfg.methods;
      wrap_cfg.ig.baseline = fx.ig_baseline;

      const AttributionVector ig = ig_attribute(s, fx.model, ig_cfg);
      const AttributionVector eig = eig_attribute(s, fx.model, fx.ref, ig_cfg);
      const AttributionVector sv = sv_attribute(s, fx.model, fx.ref, cfg.methods.sv);

      if (fx.smooth) {
        add(tag, "ig-sum-rule",
            std::abs(sum(ig.scores) - (fx_t - fx.model.eval_one(fx.ig_baseline))), cfg.ig_sum_tol);
        add(tag, "eig-sum-rule", std::abs(sum(eig.scores) - (fx_t - f_mean)),
            cfg.mc_sigmas * eig.meta.at("sum_stderr") + cfg.ig_sum_tol);
      }
      add(tag, "sv-efficiency", std::abs(sum(sv.scores) - (fx_t - f_mean)),
          cfg.mc_sigmas * sv.meta.at("sum_stderr") + 1e-9);

      if (fx.quadratic) {
        double worst = 0.0;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          const double se = std::hypot(sv.std_errors[i], eig.std_errors[i]);
          const double d = std::abs(sv.scores[i] - eig.scores[i]);
          worst = std::max(worst, se > 0.0 ? d / se : (d > 1e-9 ? INFINITY : 0.0));
        }
        add(tag, "sv-equals-eig (sigmas)", worst, cfg.mc_sigmas);
      }

      if (fx.smooth) {
        GradientConfig g = cfg.gradient_probe;
        const Vector grad = smooth_gradient(fx.model, s.x, g);
        const AttributionVector lime = lime_attribute(s, fx.model, cfg.lime_probe);
        add(tag, "lime-matches-gradient", max_abs_diff(lime.scores, grad), cfg.lime_gradient_tol);
      }

      add(tag, "ig-deviation-agnostic",
          max_abs_diff(deviation_wrap(Method::kIG, s, fx.model, wrap_cfg).scores, ig.scores), cfg.deviation_tol);
      add(tag, "ig-deviation-agnostic-shifted-y",
          max_abs_diff(deviation_wrap(Method::kIG, shifted, fx.model, wrap_cfg).scores, ig.scores),
          cfg.deviation_tol);
      add(tag, "eig-deviation-agnostic",
          max_abs_diff(deviation_wrap(Method::kEIG, s, fx.model, wrap_cfg, &fx.ref).scores, eig.scores),
          cfg.deviation_tol);
      add(tag, "sv-deviation-agnostic",
          max_abs_diff(deviation_wrap(Method::kSV, s, fx.model, wrap_cfg, &fx.ref).scores, sv.scores),
          cfg.deviation_tol);
      add(tag, "sv-deviation-agnostic-shifted-y",
          max_abs_diff(deviation_wrap(Method::kSV, shifted, fx.model, wrap_cfg, &fx.ref).scores, sv.scores),
          cfg.deviation_tol);
      add(tag, "lime-deviation-agnostic",
          max_abs_diff(deviation_wrap(Method::kLIME, shifted, fx.model, wrap_cfg).scores,
                       deviation_wrap(Method::kLIME, s, fx.model, wrap_cfg).scores),
          cfg.deviation_tol);
    }
  }
  return out;
}

}  // namespace anomattr
