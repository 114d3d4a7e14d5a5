#include <Eigen/Dense>
#include <cmath>

#include "anomattr/baselines.hpp"
#include "anomattr/errors.hpp"
#include "anomattr/rng.hpp"

namespace anomattr {

void LimeConfig::validate(std::size_t m) const {
  if (ns < static_cast<int>(m) + 2) throw UsageError("LIME needs ns >= M + 2");
  if (!(sigma_local >= 0.0) || !std::isfinite(sigma_local)) {
    throw UsageError("LIME sigma_local must be non-negative");
  }
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw UsageError("LIME nu must be non-negative");
  if (max_sweeps < 1 || !(tol > 0.0)) throw UsageError("bad LIME solver settings");
}

namespace {

double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

AttributionVector lime_attribute(const Sample& s, const ModelHandle& f, const LimeConfig& cfg) {
  const std::size_t m = s.x.size();
  cfg.validate(m);
  const auto n = static_cast<std::size_t>(cfg.ns);

  Rng rng = make_rng(cfg.seed, {});
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Vector> xs(n, s.x);
  for (auto& x : xs) {
    for (double& v : x) v += cfg.sigma_local * noise(rng);
  }
  const Vector fx = f.eval(xs);

  // Centering removes the unpenalized intercept from the problem. The target
  // is z = f - y^t, but y^t only moves the intercept, so it is left out of
  // the centered target; beta is then bitwise independent of y^t.
  Eigen::MatrixXd D(n, m);
  Eigen::VectorXd z(n);
  for (std::size_t r = 0; r < n; ++r) {
    z(r) = fx[r];
    for (std::size_t i = 0; i < m; ++i) D(r, i) = xs[r][i];
  }
  const Eigen::RowVectorXd xbar = D.colwise().mean();
  D.rowwise() -= xbar;
  const double fbar = z.mean();
  z.array() -= fbar;

  AttributionVector a;
  a.method = Method::kLIME;
  a.names = default_feature_names(m);
  a.meta = {{"ns", static_cast<double>(cfg.ns)},
            {"sigma_local", cfg.sigma_local},
            {"nu", cfg.nu}};

  const double inv_n = 1.0 / static_cast<double>(n);
  if (cfg.nu == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
    if (qr.rank() < static_cast<Eigen::Index>(m)) {
      const Eigen::VectorXd beta = D.completeOrthogonalDecomposition().solve(z);
      a.scores.assign(beta.data(), beta.data() + m);
      a.meta["rank_deficient"] = 1.0;
      a.meta["sweeps"] = 0.0;
      a.meta["intercept"] = fbar - s.y - xbar.dot(beta);
      check_finite(a);
      return a;
    }
  }

  const Eigen::VectorXd col_sq = D.colwise().squaredNorm().transpose() * inv_n;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  Eigen::VectorXd resid = z;
  const double threshold = 0.5 * cfg.nu;
  int sweep = 0;
  for (; sweep < cfg.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(m); ++j) {
      if (col_sq(j) == 0.0) continue;
      const double old = beta(j);
      const double rho = D.col(j).dot(resid) * inv_n + col_sq(j) * old;
      const double updated = soft(rho, threshold) / col_sq(j);
      if (updated != old) {
        resid -= (updated - old) * D.col(j);
        beta(j) = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    if (max_change < cfg.tol) {
      ++sweep;
      break;
    }
  }
  a.scores.assign(beta.data(), beta.data() + m);
  a.meta["sweeps"] = static_cast<double>(sweep);
  a.meta["intercept"] = fbar - s.y - xbar.dot(beta);
  check_finite(a);
  return a;
}

}  // namespace anomattr
