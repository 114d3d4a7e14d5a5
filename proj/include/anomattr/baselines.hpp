#pragma once

#include <cstdint>

#include "anomattr/core.hpp"
#include "anomattr/gradest.hpp"
#include "anomattr/model.hpp"

namespace anomattr {

// Local linear surrogate: Gaussian samples around x^t, lasso fit of
// z = f(x) - y^t with an unpenalized intercept.
struct LimeConfig {
  int ns = 1000;
  double sigma_local = 0.3;
  double nu = 1e-3;
  std::uint64_t seed = 0;
  int max_sweeps = 10000;
  double tol = 1e-8;

  void validate(std::size_t m) const;
};

struct IgConfig {
  Vector baseline;  // x^0; unused by EIG
  int intervals = 100;
  GradientConfig grad{10, 1e-3, GradientScheme::kSlopeMean, 0};  // small eta: close to the true path gradient

  void validate() const;
};

struct SvConfig {
  int mc_samples = 2000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct BaselineConfigs {
  LimeConfig lime;
  IgConfig ig;
  SvConfig sv;
};

// Minimizes (1/N) sum_n (z_n - b0 - beta.x_n)^2 + nu |beta|_1 by cyclic
// coordinate descent. With nu == 0 and a rank-deficient design, returns the
// minimum-norm least-squares solution and sets meta["rank_deficient"] = 1.
AttributionVector lime_attribute(const Sample& s, const ModelHandle& f, const LimeConfig& cfg);

// (x_i - x0_i) * trapezoid over alpha of <df/dx_i>(x0 + alpha (x - x0)).
AttributionVector ig_attribute(const Sample& s, const ModelHandle& f, const IgConfig& cfg);

// Mean of IG over baselines x0 taken from every reference point. Standard
// errors are the spread across baselines over sqrt(|ref|);
// meta["sum_stderr"] is the same for sum_i IG_i.
AttributionVector eig_attribute(const Sample& s, const ModelHandle& f, const ReferenceSet& ref,
                                const IgConfig& cfg);

// Sampled Shapley values. Each draw pairs a random feature permutation with a
// reference point z (reference points are consumed in shuffled epochs) and
// walks the permutation switching coordinates from z to x^t; the successive
// increments are the marginal contributions. meta["sum_stderr"] is the
// standard error of sum_i SV_i.
AttributionVector sv_attribute(const Sample& s, const ModelHandle& f, const ReferenceSet& ref,
                               const SvConfig& cfg);

// (x_i - m_i) / sd_i with reference mean and population sd.
AttributionVector zscore_attribute(const Sample& s, const ReferenceSet& ref);

// Dispatches to one of the methods above on f itself; none of them reads
// s.y. EIG, SV and Z-score need `ref`.
AttributionVector baseline_attribute(Method method, const Sample& s, const ModelHandle& f,
                                     const BaselineConfigs& cfg, const ReferenceSet* ref = nullptr);

// Runs LIME, IG, EIG or SV on the deviation F(x) = f(x) - y^t. LIME already
// fits f - y^t; the others run on deviation_model(f, y).
AttributionVector deviation_wrap(Method method, const Sample& s, const ModelHandle& f,
                                 const BaselineConfigs& cfg, const ReferenceSet* ref = nullptr);

}  // namespace anomattr
