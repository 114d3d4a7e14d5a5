#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "anomattr/core.hpp"

namespace anomattr {

struct Generator {
  std::string name;
  std::string model_spec;  // builtin spec producing y (parse_model_spec)
  std::string inputs;      // human-readable input distribution
};

const std::vector<Generator>& generators();
const Generator& find_generator(std::string_view name);

// n rows drawn from the generator's input distribution with
// y = f(x) + N(0, noise_sd^2). Deterministic in (name, n, seed, noise_sd).
TestSet generate(std::string_view name, std::size_t n, std::uint64_t seed, double noise_sd = 0.0);

}  // namespace anomattr
