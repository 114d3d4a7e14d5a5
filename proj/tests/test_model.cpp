#include <doctest.h>

#include <cmath>
#include <numbers>
#include <thread>

#include "anomattr/errors.hpp"
#include "anomattr/model.hpp"

using namespace anomattr;

TEST_CASE("builtin values") {
  const double pi = std::numbers::pi;
  const auto sin2d = parse_model_spec("sinusoidal2d");
  CHECK(sin2d.dim() == 2);
  CHECK(sin2d.eval_one({0.25, 0.5}) == doctest::Approx(2.0 * std::cos(pi / 4)));
  CHECK(sin2d.eval_one({0.5, 0.0}) == doctest::Approx(0.0));

  const auto lin = parse_model_spec("linear:a=1,-2;b=0.5");
  CHECK(lin.eval_one({3.0, 1.0}) == doctest::Approx(1.5));

  // x'Ax + b.x + c with A = [[1,2],[0,3]]
  const auto quad = parse_model_spec("quadratic:A=1,2,0,3;b=1,0;c=-1");
  CHECK(quad.eval_one({1.0, 2.0}) == doctest::Approx(1.0 + 4.0 + 12.0 + 1.0 - 1.0));

  const auto cst = parse_model_spec("constant:c=4;m=3");
  CHECK(cst.dim() == 3);
  CHECK(cst.eval_one({1.0, 2.0, 3.0}) == 4.0);

  const auto add = parse_model_spec("additive-sine:a=2,1");
  CHECK(add.eval_one({pi / 2, pi / 6}) == doctest::Approx(2.5));

  const auto step = parse_model_spec("piecewise-step:a=1,-3;t=0,1");
  CHECK(step.eval_one({0.5, 0.5}) == 1.0);
  CHECK(step.eval_one({0.5, 1.5}) == -2.0);
  CHECK(step.eval_one({0.0, 1.0}) == 0.0);
}

TEST_CASE("builtin parameter validation") {
  CHECK_THROWS_AS(parse_model_spec("nope"), UsageError);
  CHECK_THROWS_AS(parse_model_spec("linear"), UsageError);
  CHECK_THROWS_AS(parse_model_spec("linear:a=1;q=2"), UsageError);
  CHECK_THROWS_AS(parse_model_spec("linear:a=1;b=1,2"), UsageError);
  CHECK_THROWS_AS(parse_model_spec("quadratic:A=1,2,3"), UsageError);
  CHECK_THROWS_AS(parse_model_spec("piecewise-step:a=1,2;t=0"), UsageError);
  CHECK_THROWS_AS(parse_model_spec("linear:a=1,x"), UsageError);
  CHECK_THROWS_AS(parse_model_spec("constant:c=1;m=0"), UsageError);
}

TEST_CASE("eval checks inputs and names the batch index") {
  const auto lin = parse_model_spec("linear:a=1,1");
  try {
    lin.eval(std::vector<Vector>{{1.0, 2.0}, {1.0, 2.0}, {1.0}});
    FAIL("expected QueryError");
  } catch (const QueryError& e) {
    CHECK(e.batch_index() == 2);
  }
  try {
    lin.eval(std::vector<Vector>{{1.0, NAN}});
    FAIL("expected QueryError");
  } catch (const QueryError& e) {
    CHECK(e.batch_index() == 0);
  }
}

TEST_CASE("cache dedupes exact repeats") {
  const auto cached = parse_model_spec("linear:a=1,1", true);
  const std::vector<Vector> xs = {{1.0, 2.0}, {3.0, 4.0}, {1.0, 2.0}};
  const Vector y1 = cached.eval(xs);
  CHECK(y1 == Vector{3.0, 7.0, 3.0});
  CHECK(cached.query_count() == 2);
  cached.eval(xs);
  CHECK(cached.query_count() == 2);

  const auto plain = parse_model_spec("linear:a=1,1", false);
  plain.eval(xs);
  CHECK(plain.query_count() == 3);
  CHECK_FALSE(plain.caching());
}

TEST_CASE("concurrent eval through one handle") {
  const auto f = parse_model_spec("linear:a=1,2");
  std::vector<std::thread> pool;
  std::vector<Vector> results(8);
  for (int w = 0; w < 8; ++w) {
    pool.emplace_back([&, w] {
      std::vector<Vector> xs;
      for (int k = 0; k < 200; ++k) xs.push_back({static_cast<double>(k % 17), static_cast<double>(w)});
      results[w] = f.eval(xs);
    });
  }
  for (auto& t : pool) t.join();
  for (int w = 0; w < 8; ++w) {
    for (int k = 0; k < 200; ++k) CHECK(results[w][k] == (k % 17) + 2.0 * w);
  }
}

TEST_CASE("deviation and standardized wrappers") {
  const auto f = parse_model_spec("linear:a=2,1;b=1");
  const auto F = deviation_model(f, 5.0);
  CHECK(F.eval_one({1.0, 1.0}) == doctest::Approx(-1.0));
  CHECK(F.dim() == 2);

  const ScalingRecord rec{{1.0, -1.0}, {2.0, 0.5}};
  const auto g = standardized_model(f, rec);
  // u = (1, 2) maps to x = (3, 0)
  CHECK(g.eval_one({1.0, 2.0}) == doctest::Approx(7.0));
}
