#include "anomattr/model.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include "anomattr/errors.hpp"

namespace anomattr {

// Keyed on the exact bit pattern of x.
class QueryCache {
 public:
  static std::string key(const Vector& x) {
    std::string k(x.size() * sizeof(double), '\0');
    std::memcpy(k.data(), x.data(), k.size());
    return k;
  }

  std::optional<double> find(const std::string& k) const {
    std::lock_guard lock(mu_);
    auto it = map_.find(k);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  void insert(std::string k, double y) {
    std::lock_guard lock(mu_);
    map_.emplace(std::move(k), y);
  }

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, double> map_;
};

ModelHandle::ModelHandle(std::shared_ptr<Model> backend, bool caching)
    : backend_(std::move(backend)),
      cache_(caching ? std::make_shared<QueryCache>() : nullptr),
      counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (!backend_) throw UsageError("model handle needs a backend");
}

Vector ModelHandle::eval(std::span<const Vector> xs) const {
  const std::size_t m = dim();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].size() != m) {
      throw QueryError(i, "input has " + std::to_string(xs[i].size()) + " features, model expects " +
                              std::to_string(m));
    }
    for (double v : xs[i]) {
      if (!std::isfinite(v)) throw QueryError(i, "non-finite input");
    }
  }

  // Misses are forwarded once per distinct point; slot[j] is the batch
  // position answering miss j.
  Vector ys(xs.size(), 0.0);
  std::vector<std::size_t> miss_idx;
  std::vector<std::size_t> slot;
  std::vector<std::string> batch_keys;
  std::vector<Vector> batch;
  if (cache_) {
    std::unordered_map<std::string, std::size_t> pending;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      std::string k = QueryCache::key(xs[i]);
      if (auto hit = cache_->find(k)) {
        ys[i] = *hit;
        continue;
      }
      miss_idx.push_back(i);
      const auto [it, fresh] = pending.emplace(k, batch.size());
      slot.push_back(it->second);
      if (fresh) {
        batch.push_back(xs[i]);
        batch_keys.push_back(std::move(k));
      }
    }
  } else {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      miss_idx.push_back(i);
      slot.push_back(i);
    }
    batch.assign(xs.begin(), xs.end());
  }
  if (batch.empty()) return ys;

  Vector out = backend_->predict(batch);
  if (out.size() != batch.size()) {
    throw QueryError(std::min(out.size(), batch.size()),
                     "model returned " + std::to_string(out.size()) + " values for " +
                         std::to_string(batch.size()) + " inputs");
  }
  *counter_ += batch.size();
  for (std::size_t j = 0; j < miss_idx.size(); ++j) {
    const double y = out[slot[j]];
    if (!std::isfinite(y)) throw QueryError(miss_idx[j], "model returned a non-finite value");
    ys[miss_idx[j]] = y;
  }
  if (cache_) {
    for (std::size_t b = 0; b < batch.size(); ++b) cache_->insert(std::move(batch_keys[b]), out[b]);
  }
  return ys;
}

double ModelHandle::eval_one(const Vector& x) const {
  return eval(std::span<const Vector>(&x, 1)).front();
}

namespace {

class ClosedForm : public Model {
 public:
  ClosedForm(std::string desc, std::size_t m) : desc_(std::move(desc)), m_(m) {}
  std::size_t dim() const override { return m_; }
  std::string describe() const override { return desc_; }
  Vector predict(std::span<const Vector> xs) override {
    Vector ys;
    ys.reserve(xs.size());
    for (const auto& x : xs) ys.push_back(value(x));
    return ys;
  }

 protected:
  virtual double value(const Vector& x) const = 0;

 private:
  std::string desc_;
  std::size_t m_;
};

class Sinusoidal2d final : public ClosedForm {
 public:
  Sinusoidal2d() : ClosedForm("sinusoidal2d", 2) {}

 protected:
  double value(const Vector& x) const override {
    using std::numbers::pi;
    return 2.0 * std::cos(pi * x[0]) * std::sin(pi * x[1]);
  }
};

class Linear final : public ClosedForm {
 public:
  Linear(Vector a, double b) : ClosedForm("linear", a.size()), a_(std::move(a)), b_(b) {}

 protected:
  double value(const Vector& x) const override {
    double s = b_;
    for (std::size_t i = 0; i < a_.size(); ++i) s += a_[i] * x[i];
    return s;
  }

 private:
  Vector a_;
  double b_;
};

class Quadratic final : public ClosedForm {
 public:
  Quadratic(Vector A, Vector b, double c, std::size_t m)
      : ClosedForm("quadratic", m), A_(std::move(A)), b_(std::move(b)), c_(c), m_(m) {}

 protected:
  double value(const Vector& x) const override {
    double s = c_;
    for (std::size_t i = 0; i < m_; ++i) {
      double row = 0.0;
      for (std::size_t k = 0; k < m_; ++k) row += A_[i * m_ + k] * x[k];
      s += x[i] * row + b_[i] * x[i];
    }
    return s;
  }

 private:
  Vector A_;
  Vector b_;
  double c_;
  std::size_t m_;
};

class Constant final : public ClosedForm {
 public:
  Constant(double c, std::size_t m) : ClosedForm("constant", m), c_(c) {}

 protected:
  double value(const Vector&) const override { return c_; }

 private:
  double c_;
};

class AdditiveSine final : public ClosedForm {
 public:
  explicit AdditiveSine(Vector a) : ClosedForm("additive-sine", a.size()), a_(std::move(a)) {}

 protected:
  double value(const Vector& x) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) s += a_[i] * std::sin(x[i]);
    return s;
  }

 private:
  Vector a_;
};

class PiecewiseStep final : public ClosedForm {
 public:
  PiecewiseStep(Vector a, Vector t)
      : ClosedForm("piecewise-step", a.size()), a_(std::move(a)), t_(std::move(t)) {}

 protected:
  double value(const Vector& x) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) s += x[i] > t_[i] ? a_[i] : 0.0;
    return s;
  }

 private:
  Vector a_;
  Vector t_;
};

class Deviation final : public Model {
 public:
  Deviation(ModelHandle f, double y) : f_(std::move(f)), y_(y) {}
  std::size_t dim() const override { return f_.dim(); }
  std::string describe() const override { return f_.describe() + " - y"; }
  Vector predict(std::span<const Vector> xs) override {
    Vector ys = f_.eval(xs);
    for (double& v : ys) v -= y_;
    return ys;
  }

 private:
  ModelHandle f_;
  double y_;
};

class StandardizedInputs final : public Model {
 public:
  StandardizedInputs(ModelHandle f, ScalingRecord rec) : f_(std::move(f)), rec_(std::move(rec)) {}
  std::size_t dim() const override { return f_.dim(); }
  std::string describe() const override { return f_.describe() + " (standardized inputs)"; }
  Vector predict(std::span<const Vector> us) override {
    std::vector<Vector> xs;
    xs.reserve(us.size());
    for (const auto& u : us) xs.push_back(rec_.to_original(u));
    return f_.eval(xs);
  }

 private:
  ModelHandle f_;
  ScalingRecord rec_;
};

const Vector& require(const ModelParams& p, std::string_view name, std::string_view model) {
  auto it = p.find(name);
  if (it == p.end()) {
    throw UsageError("model '" + std::string(model) + "' needs parameter '" + std::string(name) + "'");
  }
  if (it->second.empty()) {
    throw UsageError("parameter '" + std::string(name) + "' of '" + std::string(model) + "' is empty");
  }
  return it->second;
}

double scalar_or(const ModelParams& p, std::string_view name, double fallback, std::string_view model) {
  auto it = p.find(name);
  if (it == p.end()) return fallback;
  if (it->second.size() != 1) {
    throw UsageError("parameter '" + std::string(name) + "' of '" + std::string(model) +
                     "' must be a scalar");
  }
  return it->second.front();
}

void allow_only(const ModelParams& p, std::initializer_list<std::string_view> keys, std::string_view model) {
  for (const auto& [k, v] : p) {
    bool ok = false;
    for (auto allowed : keys) ok = ok || k == allowed;
    if (!ok) {
      throw UsageError("model '" + std::string(model) + "' does not take parameter '" + k + "'");
    }
  }
}

void expect_len(const Vector& v, std::size_t n, std::string_view name, std::string_view model) {
  if (v.size() != n) {
    throw UsageError("parameter '" + std::string(name) + "' of '" + std::string(model) + "' has " +
                     std::to_string(v.size()) + " entries, expected " + std::to_string(n));
  }
}

std::shared_ptr<Model> make_builtin(std::string_view name, const ModelParams& p) {
  if (name == "sinusoidal2d") {
    allow_only(p, {}, name);
    return std::make_shared<Sinusoidal2d>();
  }
  if (name == "linear") {
    allow_only(p, {"a", "b"}, name);
    return std::make_shared<Linear>(require(p, "a", name), scalar_or(p, "b", 0.0, name));
  }
  if (name == "quadratic") {
    allow_only(p, {"A", "b", "c"}, name);
    const Vector& A = require(p, "A", name);
    const auto m = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(A.size()))));
    if (m * m != A.size()) throw UsageError("parameter 'A' of 'quadratic' must have M*M entries");
    Vector b(m, 0.0);
    if (auto it = p.find("b"); it != p.end()) {
      expect_len(it->second, m, "b", name);
      b = it->second;
    }
    return std::make_shared<Quadratic>(A, std::move(b), scalar_or(p, "c", 0.0, name), m);
  }
  if (name == "constant") {
    allow_only(p, {"c", "m"}, name);
    const double c = scalar_or(p, "c", std::nan(""), name);
    if (std::isnan(c)) throw UsageError("model 'constant' needs parameter 'c'");
    const double m = scalar_or(p, "m", 1.0, name);
    if (m < 1.0 || m != std::floor(m)) throw UsageError("parameter 'm' of 'constant' must be a positive integer");
    return std::make_shared<Constant>(c, static_cast<std::size_t>(m));
  }
  if (name == "additive-sine") {
    allow_only(p, {"a"}, name);
    return std::make_shared<AdditiveSine>(require(p, "a", name));
  }
  if (name == "piecewise-step") {
    allow_only(p, {"a", "t"}, name);
    const Vector& a = require(p, "a", name);
    const Vector& t = require(p, "t", name);
    expect_len(t, a.size(), "t", name);
    return std::make_shared<PiecewiseStep>(a, t);
  }
  throw UsageError("unknown builtin model '" + std::string(name) + "'");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view tok, std::string_view what) {
  tok = trim(tok);
  std::string s(tok);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw UsageError("bad number '" + s + "' in " + std::string(what));
  }
  return v;
}

}  // namespace

ModelHandle register_builtin(std::string_view name, const ModelParams& params, bool caching) {
  return ModelHandle(make_builtin(name, params), caching);
}

ModelHandle parse_model_spec(std::string_view spec, bool caching) {
  spec = trim(spec);
  const auto colon = spec.find(':');
  const std::string_view name = trim(spec.substr(0, colon));
  ModelParams params;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto semi = rest.find(';');
      std::string_view item = trim(rest.substr(0, semi));
      rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw UsageError("model parameter '" + std::string(item) + "' is not key=value");
      }
      const std::string key(trim(item.substr(0, eq)));
      Vector values;
      std::string_view vals = item.substr(eq + 1);
      while (true) {
        const auto comma = vals.find(',');
        values.push_back(parse_double(vals.substr(0, comma), "model spec"));
        if (comma == std::string_view::npos) break;
        vals.remove_prefix(comma + 1);
      }
      params[key] = std::move(values);
    }
  }
  return register_builtin(name, params, caching);
}

ModelHandle deviation_model(const ModelHandle& f, double y) {
  return ModelHandle(std::make_shared<Deviation>(f, y), false);
}

ModelHandle standardized_model(const ModelHandle& f, const ScalingRecord& rec) {
  if (rec.dim() != f.dim()) throw DataError("scaling record dimension does not match the model");
  return ModelHandle(std::make_shared<StandardizedInputs>(f, rec), false);
}

}  // namespace anomattr
