#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anomattr/baselines.hpp"
#include "anomattr/core.hpp"
#include "anomattr/model.hpp"

namespace anomattr {

// Rank correlations on absolute scores. Kendall's tau is the tie-corrected
// tau-b; Spearman's rho uses average ranks. Both return 0 when either
// vector's absolute values are all tied (the coefficient is undefined).
double kendall_tau(const Vector& a, const Vector& b);
double spearman_rho(const Vector& a, const Vector& b);

// 1 - (1/M) #{i : sign(r_i) sign(u_i) = -1}, with sign(0) = 0.
double sign_match_ratio(const Vector& r, const Vector& u);

// Indices of the ceil(M/4) largest |v_i|, ties broken by lower index.
std::vector<std::size_t> top_quarter(const Vector& v);

// |top(r) & top(u)| / |top(r)|.
double hit25(const Vector& r, const Vector& u);

struct ConsistencyReport {
  double tau = 0.0;
  double rho = 0.0;
  double sign_match = 0.0;
  double hit25 = 0.0;
};

ConsistencyReport consistency(const Vector& reference, const Vector& other);

struct ScoreDistribution {
  std::vector<std::string> names;
  std::vector<Vector> rounds;  // rounds[b][i]
  Vector bandwidth;            // per feature

  Vector feature_values(std::size_t i) const;
};

// Gaussian KDE: (1/N) sum_l N(query | values_l, bandwidth^2).
double kde_density(const Vector& values, double bandwidth, double query);

// 4% of the value range, floored at 1e-6.
double default_bandwidth(const Vector& values);

struct KdeCurve {
  Vector grid;
  Vector density;
};

// Density on `points` equally spaced queries spanning the values +/- 3 bandwidths.
KdeCurve kde_curve(const Vector& values, double bandwidth, int points = 200);

// B runs of `method`, each against Nb points drawn with replacement from ref.
// Method configs (and thus gradient/MC seeds) are shared across rounds, so
// only the resampling differs between rounds.
ScoreDistribution bootstrap_variability(Method method, const Sample& s, const ModelHandle& f,
                                        const ReferenceSet& ref, int B, int Nb, std::uint64_t seed,
                                        const BaselineConfigs& cfg);

// ---------------------------------------------------------------------------
// Executable property checks.

struct OracleFixture {
  std::string name;
  ModelHandle model;
  std::vector<Sample> points;
  ReferenceSet ref;
  Vector ig_baseline;
  bool smooth = true;      // sum rules / LIME-gradient checks apply
  bool quadratic = false;  // SV == EIG exactly (no third derivatives)
};

struct OracleCheck {
  std::string fixture;
  std::string property;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct OracleSuiteConfig {
  BaselineConfigs methods;
  double ig_sum_tol = 1e-3;
  double deviation_tol = 1e-9;
  double lime_gradient_tol = 0.05;
  double mc_sigmas = 3.0;
  double y_shift = 10.0;  // deviation-agnosticism probe: y vs y + shift
  GradientConfig gradient_probe{1000, 0.01, GradientScheme::kSlopeMean, 0};
  LimeConfig lime_probe{1000, 0.01, 1e-8, 0, 10000, 1e-8};
};

// Sum rules, efficiency, SV/EIG equivalence, LIME as the local gradient and
// deviation-agnosticism of IG, EIG, SV and LIME, per fixture and point.
std::vector<OracleCheck> property_oracle_suite(const std::vector<OracleFixture>& fixtures,
                                              const OracleSuiteConfig& cfg);

}  // namespace anomattr
