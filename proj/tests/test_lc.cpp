#include <doctest.h>

#include <cmath>

#include "anomattr/errors.hpp"
#include "anomattr/lc.hpp"
#include "anomattr/synth.hpp"

using namespace anomattr;

namespace {

LcResult solve_one(const Sample& s, const ModelHandle& f, const LcConfig& cfg, double sigma2 = 1.0) {
  const TestSet ts({s}, default_feature_names(s.x.size()));
  const Vector s2 = {sigma2};
  return solve_lc(ts, s2, f, cfg);
}

}  // namespace

TEST_CASE("objective") {
  const auto f = parse_model_spec("linear:a=1,0");
  LcConfig cfg;
  const Vector one = {1.0};
  CHECK(lc_objective({0.0, 0.0}, TestSet({{{2.0, 3.0}, 2.0}}, {"a", "b"}), one, f, cfg) == 0.0);
  CHECK(lc_objective({0.0, 0.0}, TestSet({{{2.0, 3.0}, 3.0}}, {"a", "b"}), one, f, cfg) == 0.5);
  cfg.lambda = 2.0;
  cfg.nu = 3.0;
  CHECK(lc_objective({1.0, 0.0}, TestSet({{{0.0, 0.0}, 1.0}}, {"a", "b"}), one, f, cfg) == 4.0);
}

TEST_CASE("soft threshold branches") {
  const Vector out = soft_threshold_step({0.5, 0.1, -0.5, -0.2, 0.2}, 0.2);
  CHECK(out[0] == doctest::Approx(0.3));
  CHECK(out[1] == 0.0);
  CHECK(out[2] == doctest::Approx(-0.3));
  CHECK(out[3] == 0.0);
  CHECK(out[4] == 0.0);
  CHECK_FALSE(std::signbit(out[1]));
  CHECK_THROWS_AS(soft_threshold_step({1.0}, -1.0), UsageError);
}

TEST_CASE("phi update") {
  const Vector one = {1.0};
  SUBCASE("zero residual leaves only the l2 shrink") {
    const auto f = parse_model_spec("constant:c=2;m=2");
    LcConfig cfg;
    cfg.lambda = 0.5;
    const Vector phi = phi_update({0.4, -0.2}, TestSet({{{0.0, 0.0}, 2.0}}, {"a", "b"}), one, f, 0.1, cfg);
    CHECK(phi[0] == doctest::Approx(0.4 * 0.95));
    CHECK(phi[1] == doctest::Approx(-0.2 * 0.95));
  }
  SUBCASE("affine f, unit step") {
    const auto f = parse_model_spec("linear:a=2,-1;b=1");
    LcConfig cfg;
    const Sample s{{1.0, 1.0}, 5.0};  // f(x) = 2, residual 3
    const Vector phi = phi_update({0.0, 0.0}, TestSet({s}, {"a", "b"}), one, f, 1.0, cfg);
    CHECK(phi[0] == doctest::Approx(6.0));
    CHECK(phi[1] == doctest::Approx(-3.0));
  }
  SUBCASE("kappa 0 freezes delta") {
    const auto f = parse_model_spec("sinusoidal2d");
    const Vector phi = phi_update({0.3, 0.7}, TestSet({{{0.1, 0.2}, 5.0}}, {"a", "b"}), one, f, 0.0, {});
    CHECK(phi == Vector{0.3, 0.7});
  }
  SUBCASE("kappa lambda must stay below 1") {
    const auto f = parse_model_spec("linear:a=1");
    LcConfig cfg;
    cfg.lambda = 10.0;
    CHECK_THROWS_AS(phi_update({0.0}, TestSet({{{0.0}, 1.0}}, {"a"}), one, f, 0.1, cfg), UsageError);
  }
}

TEST_CASE("closed-form stationary points on f(x) = x") {
  const auto f = parse_model_spec("linear:a=1");
  for (double lambda : {0.0, 0.25, 0.5}) {
    for (double nu : {0.0, 0.25, 0.5}) {
      LcConfig cfg;
      cfg.lambda = lambda;
      cfg.nu = nu;
      cfg.kappa_decay = 1.0;
      const LcResult r = solve_one({{0.0}, 1.0}, f, cfg);
      CAPTURE(lambda);
      CAPTURE(nu);
      CHECK(std::abs(r.delta[0] - (1.0 - nu) / (1.0 + lambda)) < 1e-3);
      CHECK(r.converged);
    }
  }
}

TEST_CASE("zero residual gives exactly zero") {
  const auto f = parse_model_spec("sinusoidal2d");
  const Sample s{{0.3, 0.7}, f.eval_one({0.3, 0.7})};
  LcConfig cfg;
  cfg.init_scale = 0.0;
  const LcResult r = solve_one(s, f, cfg);
  CHECK(r.delta == Vector{0.0, 0.0});
  CHECK(r.iterations == 1);

  // With a random start, the l1 threshold snaps the tiny init to zero.
  LcConfig l1;
  l1.nu = 0.1;
  CHECK(solve_one(s, f, l1).delta == Vector{0.0, 0.0});
}

TEST_CASE("deviation sensitivity on a monotone fixture") {
  const auto f = parse_model_spec("linear:a=2;b=0.5");
  const double fx = f.eval_one({0.3});
  const LcResult up = solve_one({{0.3}, fx + 1.0}, f, {});
  const LcResult down = solve_one({{0.3}, fx - 1.0}, f, {});
  CHECK(up.delta[0] > 0.0);
  CHECK(down.delta[0] < 0.0);
}

TEST_CASE("l1 zeroes irrelevant features exactly") {
  const TestSet data = generate("boston-like", 1, 3);
  const auto f = parse_model_spec(find_generator("boston-like").model_spec);
  Sample s = data[0];
  s.y += 3.0;
  LcConfig cfg;
  cfg.nu = 0.1;
  const LcResult r = solve_one(s, f, cfg);
  // a_i = 0 for features 4, 5, 7, 10 and 12
  for (std::size_t i : {3u, 4u, 6u, 9u, 11u}) CHECK(r.delta[i] == 0.0);
  int nonzero = 0;
  for (double d : r.delta) nonzero += d != 0.0;
  CHECK(nonzero > 0);
}

TEST_CASE("collective mode averages over samples") {
  // Two samples with residuals +1 and -1 on the same affine f pull in
  // opposite directions and cancel.
  const auto f = parse_model_spec("linear:a=1");
  const TestSet ts({{{0.0}, 1.0}, {{0.0}, -1.0}}, {"x"});
  LcConfig cfg;
  cfg.init_scale = 0.0;
  const LcResult r = solve_lc(ts, Vector{1.0, 1.0}, f, cfg);
  CHECK(std::abs(r.delta[0]) < 1e-12);

  const TestSet same({{{0.0}, 1.0}, {{0.0}, 1.0}}, {"x"});
  cfg.kappa_decay = 1.0;
  CHECK(std::abs(solve_lc(same, Vector{1.0, 1.0}, f, cfg).delta[0] - 1.0) < 1e-3);
}

TEST_CASE("trace, convergence flag and determinism") {
  const auto f = parse_model_spec("sinusoidal2d");
  const Sample s{{0.2, 0.3}, 1.5};
  LcConfig cfg;
  cfg.seed = 4;
  const LcResult a = solve_one(s, f, cfg);
  const LcResult b = solve_one(s, f, cfg);
  CHECK(a.delta == b.delta);
  CHECK(a.objective_trace == b.objective_trace);
  CHECK(a.objective_trace.size() == static_cast<std::size_t>(a.iterations) + 1);
  CHECK(a.converged);
  CHECK(a.objective_trace.back() < a.objective_trace.front());

  cfg.max_iter = 2;
  const LcResult capped = solve_one(s, f, cfg);
  CHECK(capped.iterations == 2);
  CHECK_FALSE(capped.converged);
}

TEST_CASE("divergence guard") {
  const auto f = parse_model_spec("linear:a=1000");
  CHECK_THROWS_AS(solve_one({{0.0}, 1.0}, f, {}), ConvergenceError);
}

TEST_CASE("config and input validation") {
  LcConfig cfg;
  cfg.lambda = 10.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.kappa_decay = 1.5;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.nu = -1.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);

  const auto f = parse_model_spec("linear:a=1");
  const TestSet ts({{{0.0}, 1.0}}, {"x"});
  CHECK_THROWS_AS(solve_lc(ts, Vector{0.0}, f, {}), DataError);
  CHECK_THROWS_AS(solve_lc(ts, Vector{1.0, 1.0}, f, {}), DataError);
}

TEST_CASE("attribution packaging") {
  const auto f = parse_model_spec("linear:a=1");
  LcConfig cfg;
  cfg.lambda = 0.5;
  const TestSet ts({{{0.0}, 1.0}}, {"temp"});
  const LcResult r = solve_lc(ts, Vector{1.0}, f, cfg);
  const AttributionVector a = lc_attribution(r, ts, cfg);
  CHECK(a.method == Method::kLC);
  CHECK(a.names == std::vector<std::string>{"temp"});
  CHECK(a.scores == r.delta);
  CHECK(*a.iterations == r.iterations);
  CHECK(a.meta.at("lambda") == 0.5);
}
