#include "anomattr/synth.hpp"

#include "anomattr/errors.hpp"
#include "anomattr/model.hpp"
#include "anomattr/rng.hpp"

namespace anomattr {

namespace {

enum class InputDist { kUniform, kGaussian };

struct GeneratorDef {
  Generator info;
  std::size_t m;
  InputDist dist;
  double lo;  // uniform bounds; gaussian uses N(0, 1)
  double hi;
};

const std::vector<GeneratorDef>& defs() {
  static const std::vector<GeneratorDef> d = {
      {{"sinusoidal2d-uniform", "sinusoidal2d", "U[-4,4]^2"}, 2, InputDist::kUniform, -4.0, 4.0},
      {{"linear-gaussian", "linear:a=1,-2,0.5;b=0.3", "N(0,I_3)"}, 3, InputDist::kGaussian, 0, 0},
      {{"quadratic-gaussian", "quadratic:A=1,0.2,0,0.2,0.5,0,0,0,-0.3;b=0.1,0,0.2;c=0",
        "N(0,I_3)"},
       3, InputDist::kGaussian, 0, 0},
      {{"additive-sine-uniform", "additive-sine:a=1,0.5,-1", "U[-2,2]^3"}, 3, InputDist::kUniform,
       -2.0, 2.0},
      {{"piecewise-step-uniform", "piecewise-step:a=1,-1;t=0,0.2", "U[-1,1]^2"}, 2,
       InputDist::kUniform, -1.0, 1.0},
      // 13 inputs, five of which the response ignores.
      {{"boston-like", "additive-sine:a=1.5,-1,0.8,0,0,1.2,0,-0.6,0.4,0,0.9,0,-1.1", "N(0,I_13)"},
       13, InputDist::kGaussian, 0, 0},
  };
  return d;
}

const GeneratorDef& find_def(std::string_view name) {
  for (const auto& d : defs()) {
    if (d.info.name == name) return d;
  }
  throw UsageError("unknown generator '" + std::string(name) + "'");
}

}  // namespace

const std::vector<Generator>& generators() {
  static const std::vector<Generator> g = [] {
    std::vector<Generator> out;
    for (const auto& d : defs()) out.push_back(d.info);
    return out;
  }();
  return g;
}

const Generator& find_generator(std::string_view name) {
  for (const auto& g : generators()) {
    if (g.name == name) return g;
  }
  throw UsageError("unknown generator '" + std::string(name) + "'");
}

TestSet generate(std::string_view name, std::size_t n, std::uint64_t seed, double noise_sd) {
  const GeneratorDef& def = find_def(name);
  if (n == 0) throw UsageError("generator needs n >= 1");
  if (!(noise_sd >= 0.0)) throw UsageError("noise sd must be non-negative");
  const ModelHandle f = parse_model_spec(def.info.model_spec, false);

  Rng rng = make_rng(seed, {});
  std::uniform_real_distribution<double> uni(def.lo, def.hi);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vector> xs(n, Vector(def.m));
  for (auto& x : xs) {
    for (double& v : x) v = def.dist == InputDist::kUniform ? uni(rng) : gauss(rng);
  }
  const Vector fx = f.eval(xs);
  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double eps = noise_sd > 0.0 ? noise_sd * gauss(rng) : 0.0;
    samples.push_back({std::move(xs[t]), fx[t] + eps});
  }
  return TestSet(std::move(samples), default_feature_names(def.m));
}

}  // namespace anomattr
