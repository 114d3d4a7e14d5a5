#include "anomattr/core.hpp"

#include <cmath>
#include <set>

#include "anomattr/errors.hpp"

namespace anomattr {

namespace {

bool all_finite(const Vector& v) {
  for (double d : v) {
    if (!std::isfinite(d)) return false;
  }
  return true;
}

}  // namespace

TestSet::TestSet(std::vector<Sample> samples, std::vector<std::string> names)
    : samples_(std::move(samples)), names_(std::move(names)) {
  if (samples_.empty()) throw DataError("test set is empty");
  if (names_.empty()) throw DataError("test set has no features");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw DataError("duplicate feature name '" + n + "'");
  }
  for (std::size_t t = 0; t < samples_.size(); ++t) {
    const auto& s = samples_[t];
    if (s.x.size() != names_.size()) {
      throw DataError("sample " + std::to_string(t) + " has " + std::to_string(s.x.size()) +
                      " features, expected " + std::to_string(names_.size()));
    }
    if (!all_finite(s.x) || !std::isfinite(s.y)) {
      throw DataError("sample " + std::to_string(t) + " has a non-finite entry");
    }
  }
}

ReferenceSet::ReferenceSet(std::vector<RefPoint> points, RefRole role)
    : points_(std::move(points)), role_(role) {
  if (points_.empty()) throw DataError("reference set is empty");
  const std::size_t m = points_.front().x.size();
  if (m == 0) throw DataError("reference set has no features");
  for (std::size_t n = 0; n < points_.size(); ++n) {
    const auto& p = points_[n];
    if (p.x.size() != m) {
      throw DataError("reference point " + std::to_string(n) + " has " +
                      std::to_string(p.x.size()) + " features, expected " + std::to_string(m));
    }
    if (!all_finite(p.x) || (p.y && !std::isfinite(*p.y))) {
      throw DataError("reference point " + std::to_string(n) + " has a non-finite entry");
    }
  }
}

bool ReferenceSet::has_targets() const noexcept {
  for (const auto& p : points_) {
    if (!p.y) return false;
  }
  return true;
}

ReferenceSet ReferenceSet::from_inputs(const std::vector<Vector>& xs) {
  std::vector<RefPoint> pts;
  pts.reserve(xs.size());
  for (const auto& x : xs) pts.push_back({x, std::nullopt});
  return ReferenceSet(std::move(pts), RefRole::kBaseline);
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kLC: return "lc";
    case Method::kLIME: return "lime";
    case Method::kIG: return "ig";
    case Method::kEIG: return "eig";
    case Method::kSV: return "sv";
    case Method::kZScore: return "zscore";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kLC, Method::kLIME, Method::kIG, Method::kEIG, Method::kSV,
                   Method::kZScore}) {
    if (method_name(m) == name) return m;
  }
  throw UsageError("unknown method '" + std::string(name) + "'");
}

ScoreKind score_kind(Method m) {
  switch (m) {
    case Method::kLC: return ScoreKind::kShift;
    case Method::kLIME: return ScoreKind::kGradient;
    default: return ScoreKind::kIncrement;
  }
}

std::vector<std::string> default_feature_names(std::size_t m) {
  std::vector<std::string> names;
  names.reserve(m);
  for (std::size_t i = 0; i < m; ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

void check_finite(const AttributionVector& a) {
  if (!all_finite(a.scores) || !all_finite(a.std_errors)) {
    throw DataError("attribution (" + std::string(method_name(a.method)) +
                    ") contains a non-finite score");
  }
}

AttributionVector with_names(AttributionVector a, const std::vector<std::string>& names) {
  if (names.size() != a.scores.size()) {
    throw DataError("feature name count does not match attribution length");
  }
  a.names = names;
  return a;
}

Vector ScalingRecord::to_standard(const Vector& x) const {
  if (x.size() != dim()) throw DataError("scaling record dimension mismatch");
  Vector u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = (x[i] - mean[i]) / sd[i];
  return u;
}

Vector ScalingRecord::to_original(const Vector& u) const {
  if (u.size() != dim()) throw DataError("scaling record dimension mismatch");
  Vector x(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) x[i] = mean[i] + sd[i] * u[i];
  return x;
}

ScalingRecord ScalingRecord::identity(std::size_t m) {
  return {Vector(m, 0.0), Vector(m, 1.0)};
}

ScalingRecord ScalingRecord::fit(const ReferenceSet& ref, const std::vector<std::string>& names) {
  const std::size_t m = ref.dim();
  if (names.size() != m) throw DataError("reference set and feature names disagree on dimension");
  if (ref.size() < 2) throw DataError("standardization needs at least 2 reference points");
  ScalingRecord rec{Vector(m, 0.0), Vector(m, 0.0)};
  const double n = static_cast<double>(ref.size());
  for (const auto& p : ref.points()) {
    for (std::size_t i = 0; i < m; ++i) rec.mean[i] += p.x[i];
  }
  for (auto& v : rec.mean) v /= n;
  for (const auto& p : ref.points()) {
    for (std::size_t i = 0; i < m; ++i) {
      const double d = p.x[i] - rec.mean[i];
      rec.sd[i] += d * d;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    rec.sd[i] = std::sqrt(rec.sd[i] / n);
    if (!(rec.sd[i] > 0.0)) throw DataError("feature '" + names[i] + "' has zero variance");
  }
  return rec;
}

TestSet apply_scaling(const TestSet& ts, const ScalingRecord& rec) {
  std::vector<Sample> out;
  out.reserve(ts.size());
  for (const auto& s : ts.samples()) out.push_back({rec.to_standard(s.x), s.y});
  return TestSet(std::move(out), ts.names());
}

ReferenceSet apply_scaling(const ReferenceSet& ref, const ScalingRecord& rec) {
  std::vector<RefPoint> out;
  out.reserve(ref.size());
  for (const auto& p : ref.points()) out.push_back({rec.to_standard(p.x), p.y});
  return ReferenceSet(std::move(out), ref.role());
}

Standardized standardize(const TestSet& ts, const ReferenceSet& ref) {
  if (ref.dim() != ts.dim()) throw DataError("reference set and test set disagree on dimension");
  ScalingRecord rec = ScalingRecord::fit(ref, ts.names());
  return {apply_scaling(ts, rec), apply_scaling(ref, rec), std::move(rec)};
}

AttributionVector unscale_attribution(AttributionVector a, const ScalingRecord& rec) {
  if (a.scores.size() != rec.dim()) throw DataError("scaling record dimension mismatch");
  const ScoreKind kind = score_kind(a.method);
  if (kind == ScoreKind::kIncrement) return a;
  auto rescale = [&](Vector& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = kind == ScoreKind::kShift ? v[i] * rec.sd[i] : v[i] / rec.sd[i];
    }
  };
  rescale(a.scores);
  if (!a.std_errors.empty()) rescale(a.std_errors);
  return a;
}

}  // namespace anomattr
