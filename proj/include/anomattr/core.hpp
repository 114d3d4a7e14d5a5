#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anomattr {

using Vector = std::vector<double>;

// One observation (x, y).
struct Sample {
  Vector x;
  double y = 0.0;
};

// Ordered, non-empty collection of samples sharing one feature layout.
class TestSet {
 public:
  TestSet(std::vector<Sample> samples, std::vector<std::string> names);

  std::size_t size() const noexcept { return samples_.size(); }
  std::size_t dim() const noexcept { return names_.size(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  const std::vector<Sample>& samples() const noexcept { return samples_; }
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::vector<Sample> samples_;
  std::vector<std::string> names_;
};

enum class RefRole { kBaseline, kHeldOut };

struct RefPoint {
  Vector x;
  std::optional<double> y;
};

// Empirical stand-in for P(x) (baseline role) or the held-out residual set
// used for variance estimation (held-out role).
class ReferenceSet {
 public:
  ReferenceSet(std::vector<RefPoint> points, RefRole role);

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dim() const noexcept { return points_.front().x.size(); }
  RefRole role() const noexcept { return role_; }
  const RefPoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<RefPoint>& points() const noexcept { return points_; }
  bool has_targets() const noexcept;

  // Baseline-role copy built from bare input vectors.
  static ReferenceSet from_inputs(const std::vector<Vector>& xs);

 private:
  std::vector<RefPoint> points_;
  RefRole role_;
};

enum class Method { kLC, kLIME, kIG, kEIG, kSV, kZScore };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

// How a score transforms when the inputs are rescaled x = mean + sd * u.
enum class ScoreKind {
  kShift,      // lives in input units (LC): multiply by sd
  kGradient,   // df/dx (LIME): divide by sd
  kIncrement,  // lives in output units (IG, EIG, SV) or is unitless (Z)
};

ScoreKind score_kind(Method m);

struct AttributionVector {
  Method method = Method::kLC;
  std::vector<std::string> names;
  Vector scores;
  // Per-feature Monte-Carlo standard errors; empty for deterministic methods.
  Vector std_errors;
  std::map<std::string, double> meta;
  std::optional<int> iterations;
  std::optional<double> objective;
  bool converged = true;
};

std::vector<std::string> default_feature_names(std::size_t m);

// Throws DataError if any score or standard error is not finite.
void check_finite(const AttributionVector& a);

// Replaces the generated feature labels with `names`.
AttributionVector with_names(AttributionVector a, const std::vector<std::string>& names);

// Per-feature affine map x = mean + sd * u.
struct ScalingRecord {
  Vector mean;
  Vector sd;

  std::size_t dim() const noexcept { return mean.size(); }
  Vector to_standard(const Vector& x) const;
  Vector to_original(const Vector& u) const;

  static ScalingRecord identity(std::size_t m);
  // Population mean and sd of the reference inputs. Throws DataError naming
  // the first zero-variance feature.
  static ScalingRecord fit(const ReferenceSet& ref, const std::vector<std::string>& names);
};

struct Standardized {
  TestSet test;
  ReferenceSet ref;
  ScalingRecord scaling;
};

Standardized standardize(const TestSet& ts, const ReferenceSet& ref);
TestSet apply_scaling(const TestSet& ts, const ScalingRecord& rec);
ReferenceSet apply_scaling(const ReferenceSet& ref, const ScalingRecord& rec);

AttributionVector unscale_attribution(AttributionVector a, const ScalingRecord& rec);

}  // namespace anomattr
