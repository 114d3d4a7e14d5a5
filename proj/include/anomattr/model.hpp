#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "anomattr/core.hpp"

namespace anomattr {

// A black-box regression function f: R^M -> R. Implementations must be
// deterministic; thread safety is provided by ModelHandle's caller contract
// (builtins are stateless, the external client serializes internally).
class Model {
 public:
  virtual ~Model() = default;
  virtual std::size_t dim() const = 0;
  virtual Vector predict(std::span<const Vector> xs) = 0;
  virtual std::string describe() const = 0;
};

using ModelParams = std::map<std::string, Vector, std::less<>>;

class QueryCache;

// Shared, cached access point to a Model. Copies share the backend, the
// cache and the query counter. This is the only path through which f is
// evaluated.
class ModelHandle {
 public:
  explicit ModelHandle(std::shared_ptr<Model> backend, bool caching = true);

  std::size_t dim() const { return backend_->dim(); }
  std::string describe() const { return backend_->describe(); }

  // Order-preserving batch evaluation. Throws QueryError naming the offending
  // batch index on dimension mismatch, non-finite input or backend failure.
  Vector eval(std::span<const Vector> xs) const;
  double eval_one(const Vector& x) const;

  // Number of points forwarded to the backend (cache misses).
  std::uint64_t query_count() const { return counter_->load(); }
  bool caching() const { return cache_ != nullptr; }

 private:
  std::shared_ptr<Model> backend_;
  std::shared_ptr<QueryCache> cache_;
  std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

// Builtin closed-form functions:
//   sinusoidal2d              f = 2 cos(pi x1) sin(pi x2)
//   linear        a, [b]      f = a.x + b
//   quadratic     A, [b], [c] f = x'Ax + b.x + c   (A row-major M*M)
//   constant      c, [m]      f = c on R^m (m defaults to 1)
//   additive-sine a           f = sum_i a_i sin(x_i)
//   piecewise-step a, t       f = sum_i a_i [x_i > t_i]
ModelHandle register_builtin(std::string_view name, const ModelParams& params, bool caching = true);

// Parses "name" or "name:key=v1,v2;key2=v" into a builtin handle.
ModelHandle parse_model_spec(std::string_view spec, bool caching = true);

// Spawns `cmd` through /bin/sh and speaks the newline-delimited JSON
// protocol on its stdin/stdout. When expected_dim is set, the handshake
// must report the same dimension.
ModelHandle connect_external(const std::string& cmd, std::chrono::milliseconds timeout,
                             std::optional<std::size_t> expected_dim = std::nullopt,
                             bool caching = true);

// F(x) = f(x) - y. Used to apply attribution methods to the deviation.
ModelHandle deviation_model(const ModelHandle& f, double y);

// g(u) = f(mean + sd * u): f seen from standardized coordinates.
ModelHandle standardized_model(const ModelHandle& f, const ScalingRecord& rec);

}  // namespace anomattr
