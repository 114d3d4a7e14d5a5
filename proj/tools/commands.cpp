#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anomattr/analysis.hpp"
#include "anomattr/baselines.hpp"
#include "anomattr/errors.hpp"
#include "anomattr/lc.hpp"
#include "anomattr/model.hpp"
#include "anomattr/parallel.hpp"
#include "anomattr/probmodel.hpp"
#include "anomattr/synth.hpp"
#include "table.hpp"

namespace anomattr::cli {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Output

struct Output {
  std::string dir = ".";
  std::string format = "csv";

  void add(CLI::App* app) {
    app->add_option("--out", dir, "output directory (created if missing)");
    app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }

  // Writes <dir>/<stem>.csv, or a JSON array of row objects for --format json.
  void emit(const std::string& stem, const CsvTable& t) const {
    fs::create_directories(dir);
    const fs::path base = fs::path(dir) / stem;
    if (format == "csv") {
      write_csv(base.string() + ".csv", t);
      return;
    }
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t c = 0; c < t.header.size(); ++c) {
        const std::string& cell = r[c];
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (cell.empty()) {
          obj[t.header[c]] = nullptr;
        } else if (ec == std::errc() && ptr == cell.data() + cell.size()) {
          obj[t.header[c]] = v;
        } else {
          obj[t.header[c]] = cell;
        }
      }
      rows.push_back(std::move(obj));
    }
    const std::string path = base.string() + ".json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << rows.dump(2) << '\n';
  }
};

// ---------------------------------------------------------------------------
// Model and data

struct ModelFlags {
  std::string spec;
  std::string cmd;
  int timeout_ms = 30000;
  std::size_t jobs = 1;

  void add(CLI::App* app) {
    app->add_option("--model", spec, "builtin model, e.g. 'sinusoidal2d' or 'linear:a=1,2;b=0'");
    app->add_option("--external-cmd", cmd, "shell command speaking the model protocol");
    app->add_option("--timeout-ms", timeout_ms, "per-reply timeout for external models")
        ->check(CLI::PositiveNumber);
    app->add_option("--jobs", jobs, "worker threads over test rows")->check(CLI::PositiveNumber);
  }

  ModelHandle connect(std::size_t dim) const {
    if (spec.empty() == cmd.empty()) throw UsageError("give exactly one of --model or --external-cmd");
    if (!cmd.empty()) return connect_external(cmd, std::chrono::milliseconds(timeout_ms), dim);
    ModelHandle f = parse_model_spec(spec);
    if (f.dim() != dim) {
      throw DataError("model '" + spec + "' takes " + std::to_string(f.dim()) +
                      " inputs but the data has " + std::to_string(dim) + " features");
    }
    return f;
  }
};

TestSet load_test(const std::string& path) { return to_test_set(read_csv(path), "test file"); }

std::optional<ReferenceSet> load_ref(const std::string& path, const TestSet& ts, RefRole role,
                                     const std::string& what) {
  if (path.empty()) return std::nullopt;
  return to_reference_set(read_csv(path), ts.names(), role, what);
}

// ---------------------------------------------------------------------------
// Variance

struct VarianceFlags {
  VarianceConfig cfg;
  std::string heldout;
  CLI::Option* fixed_opt = nullptr;
  CLI::Option* fallback_opt = nullptr;
  double fixed = 1.0;
  double fallback = 1.0;

  void add(CLI::App* app) {
    app->add_option("--heldout", heldout,
                    "held-out CSV with targets for variance estimation (default: leave-one-out over "
                    "the test rows)");
    app->add_option("--w0", cfg.w0, "kernel weight floor");
    app->add_option("--eta0", cfg.eta0, "kernel bandwidth");
    fallback_opt = app->add_option("--fallback-sigma2", fallback,
                                   "variance used when the estimate underflows");
    fixed_opt = app->add_option("--sigma2", fixed, "fixed predictive variance, skips estimation");
  }

  void finish() {
    if (*fallback_opt) cfg.fallback_sigma2 = fallback;
    cfg.validate();
    if (*fixed_opt && !(fixed > 0.0)) throw UsageError("--sigma2 must be positive");
  }

  // Per-row predictive variances.
  Vector estimate(const TestSet& ts, const ModelHandle& f, const std::optional<ReferenceSet>& ho,
                  std::size_t jobs) const {
    Vector out(ts.size());
    if (*fixed_opt) {
      std::fill(out.begin(), out.end(), fixed);
      return out;
    }
    if (!ho && ts.size() < 2) {
      throw UsageError("variance estimation needs --heldout, --sigma2 or at least two test rows");
    }
    parallel_for(ts.size(), jobs, [&](std::size_t t) {
      out[t] = ho ? estimate_variance(ts[t].x, *ho, f, cfg)
                  : estimate_variance(ts[t].x, leave_one_out(ts, t), f, cfg);
    });
    return out;
  }
};

// ---------------------------------------------------------------------------
// Method hyperparameters

struct MethodFlags {
  std::string method;
  std::vector<double> baseline;
  std::uint64_t seed = 0;
  double nu = 0.0;
  int ns = 10;
  double eta = 1.0;
  CLI::Option* nu_opt = nullptr;
  CLI::Option* ns_opt = nullptr;
  CLI::Option* eta_opt = nullptr;
  LcConfig lc;
  BaselineConfigs base;

  void add(CLI::App* app, bool with_lc) {
    app->add_option("--method", method, "lc, lime, ig, eig, sv or zscore")->required();
    app->add_option("--baseline", baseline, "IG baseline x0 as comma-separated values")->delimiter(',');
    app->add_option("--seed", seed, "seed for every random stream");
    nu_opt = app->add_option("--nu", nu, "l1 strength (LC and LIME)");
    ns_opt = app->add_option("--ns", ns, "gradient perturbations per coordinate (LC and IG)");
    eta_opt = app->add_option("--eta", eta, "gradient perturbation scale (LC and IG)");
    if (with_lc) {
      app->add_option("--lambda", lc.lambda, "LC l2 strength");
      app->add_option("--kappa", lc.kappa0, "LC initial learning rate");
      app->add_option("--kappa-decay", lc.kappa_decay, "LC learning-rate decay per iteration");
      app->add_option("--max-iter", lc.max_iter, "LC iteration cap");
      app->add_option("--tol", lc.tol, "LC step tolerance");
      app->add_option("--init-scale", lc.init_scale, "LC initialization half-width");
    }
    app->add_option("--lime-ns", base.lime.ns, "LIME sample count");
    app->add_option("--sigma-local", base.lime.sigma_local, "LIME sampling scale");
    app->add_option("--intervals", base.ig.intervals, "IG trapezoid intervals");
    app->add_option("--mc", base.sv.mc_samples, "SV Monte-Carlo draws");
  }

  Method finish(std::size_t dim) {
    const Method m = parse_method(method);
    if (*nu_opt) lc.nu = base.lime.nu = nu;
    if (*ns_opt) lc.grad.ns = base.ig.grad.ns = ns;
    if (*eta_opt) lc.grad.eta = base.ig.grad.eta = eta;
    lc.seed = lc.grad.seed = base.lime.seed = base.sv.seed = base.ig.grad.seed = seed;
    if (!baseline.empty()) {
      base.ig.baseline = baseline;
      if (base.ig.baseline.size() != dim) {
        throw UsageError("--baseline has " + std::to_string(base.ig.baseline.size()) +
                         " values, data has " + std::to_string(dim) + " features");
      }
    }
    switch (m) {
      case Method::kLC: lc.validate(); break;
      case Method::kLIME: base.lime.validate(dim); break;
      case Method::kIG:
        if (base.ig.baseline.empty()) throw UsageError("method ig needs --baseline");
        base.ig.validate();
        break;
      case Method::kEIG: base.ig.validate(); break;
      case Method::kSV: base.sv.validate(); break;
      case Method::kZScore: break;
    }
    return m;
  }
};

bool needs_ref(Method m) { return m == Method::kEIG || m == Method::kSV || m == Method::kZScore; }

void require_ref_for(Method m, const std::optional<ReferenceSet>& ref) {
  if (needs_ref(m) && !ref) {
    throw UsageError("method " + std::string(method_name(m)) +
                     " needs a reference set for P(x); pass --ref");
  }
}

std::vector<std::string> with_prefix(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

// ---------------------------------------------------------------------------
// score

struct ScoreCmd {
  std::string test;
  ModelFlags model;
  VarianceFlags var;
  Output out;

  void add(CLI::App* app) {
    app->add_option("--test", test, "test CSV (feature columns plus y)")->required();
    model.add(app);
    var.add(app);
    out.add(app);
  }

  int run(std::ostream& log) {
    var.finish();
    const TestSet ts = load_test(test);
    const ModelHandle f = model.connect(ts.dim());
    const auto ho = load_ref(var.heldout, ts, RefRole::kHeldOut, "held-out file");
    const Vector s2 = var.estimate(ts, f, ho, model.jobs);

    std::vector<GaussianPredictive> gps;
    for (double v : s2) gps.emplace_back(f, v);
    Vector fx(ts.size());
    for (std::size_t t = 0; t < ts.size(); ++t) fx[t] = f.eval_one(ts[t].x);

    CsvTable t;
    t.header = {"index", "f", "sigma2", "score"};
    for (std::size_t i = 0; i < ts.size(); ++i) {
      t.rows.push_back({std::to_string(i), format_double(fx[i]), format_double(s2[i]),
                        format_double(gaussian_nll(ts[i].y - fx[i], s2[i]))});
    }
    t.rows.push_back({"collective", "", "", format_double(collective_anomaly_score(ts, gps))});
    out.emit("scores", t);
    log << "scored " << ts.size() << " rows\n";
    return 0;
  }
};

// ---------------------------------------------------------------------------
// attribute

struct RowResult {
  std::string row;
  AttributionVector a;
  std::optional<double> sigma2;
};

struct AttributeCmd {
  std::string test;
  std::string ref_path;
  bool collective = false;
  bool standardize = false;
  ModelFlags model;
  VarianceFlags var;
  MethodFlags meth;
  Output out;

  void add(CLI::App* app) {
    app->add_option("--test", test, "test CSV (feature columns plus y)")->required();
    app->add_option("--ref", ref_path, "reference CSV standing in for P(x)");
    app->add_flag("--collective", collective, "one LC attribution for the whole test set");
    app->add_flag("--standardize", standardize,
                  "attribute in coordinates standardized by the reference set; scores are mapped "
                  "back to original units");
    model.add(app);
    var.add(app);
    meth.add(app, true);
    out.add(app);
  }

  int run(std::ostream& log) {
    var.finish();
    TestSet ts = load_test(test);
    const Method m = meth.finish(ts.dim());
    ModelHandle f = model.connect(ts.dim());
    std::optional<ReferenceSet> ref = load_ref(ref_path, ts, RefRole::kBaseline, "reference file");
    std::optional<ReferenceSet> ho = load_ref(var.heldout, ts, RefRole::kHeldOut, "held-out file");
    require_ref_for(m, ref);
    if (collective && m != Method::kLC) throw UsageError("--collective applies to method lc only");

    std::optional<ScalingRecord> scaling;
    if (standardize) {
      if (!ref) throw UsageError("--standardize needs --ref to fit the scaling");
      scaling = ScalingRecord::fit(*ref, ts.names());
      ts = apply_scaling(ts, *scaling);
      ref = apply_scaling(*ref, *scaling);
      if (ho) ho = apply_scaling(*ho, *scaling);
      if (!meth.base.ig.baseline.empty()) {
        meth.base.ig.baseline = scaling->to_standard(meth.base.ig.baseline);
      }
      f = standardized_model(f, *scaling);
    }

    std::vector<RowResult> results;
    if (m == Method::kLC) {
      const Vector s2 = var.estimate(ts, f, ho, model.jobs);
      if (collective) {
        const LcResult r = solve_lc(ts, s2, f, meth.lc);
        results.push_back({"all", lc_attribution(r, ts, meth.lc), std::nullopt});
      } else {
        results.resize(ts.size());
        parallel_for(ts.size(), model.jobs, [&](std::size_t t) {
          const TestSet one({ts[t]}, ts.names());
          const LcResult r = solve_lc(one, std::span<const double>(&s2[t], 1), f, meth.lc);
          results[t] = {std::to_string(t), lc_attribution(r, one, meth.lc), s2[t]};
        });
      }
    } else {
      results.resize(ts.size());
      parallel_for(ts.size(), model.jobs, [&](std::size_t t) {
        AttributionVector a = baseline_attribute(m, ts[t], f, meth.base, ref ? &*ref : nullptr);
        results[t] = {std::to_string(t), with_names(std::move(a), ts.names()), std::nullopt};
      });
    }
    if (scaling && m != Method::kZScore) {
      for (auto& r : results) r.a = unscale_attribution(std::move(r.a), *scaling);
    }

    CsvTable scores;
    scores.header = with_prefix({"row", "method"}, ts.names());
    CsvTable diag;
    diag.header = {"row", "method", "key", "value"};
    std::size_t unconverged = 0;
    for (const auto& r : results) {
      const std::string name(method_name(r.a.method));
      std::vector<std::string> cells = {r.row, name};
      for (double v : r.a.scores) cells.push_back(format_double(v));
      scores.rows.push_back(std::move(cells));

      auto put = [&](const std::string& key, double v) {
        diag.rows.push_back({r.row, name, key, format_double(v)});
      };
      if (m == Method::kLC) put("converged", r.a.converged ? 1.0 : 0.0);
      if (r.a.iterations) put("iterations", *r.a.iterations);
      if (r.a.objective) put("objective", *r.a.objective);
      if (r.sigma2) put("sigma2", *r.sigma2);
      for (const auto& [k, v] : r.a.meta) put(k, v);
      for (std::size_t i = 0; i < r.a.std_errors.size(); ++i) put("stderr_" + ts.names()[i], r.a.std_errors[i]);
      if (!r.a.converged) ++unconverged;
    }
    out.emit("attributions", scores);
    out.emit("diagnostics", diag);
    log << "attributed " << results.size() << " row(s) with " << method_name(m) << "\n";
    if (unconverged > 0) {
      throw ConvergenceError(std::to_string(unconverged) +
                             " LC run(s) did not converge; results written, see diagnostics");
    }
    return 0;
  }
};

// ---------------------------------------------------------------------------
// compare

struct AttributionGroup {
  std::string source;
  std::string method;
  std::vector<std::string> names;
  std::vector<std::string> rows;
  std::vector<Vector> scores;
};

std::vector<AttributionGroup> load_attributions(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (t.header.size() < 3 || t.header[0] != "row" || t.header[1] != "method") {
    throw DataError("'" + path + "' is not an attributions file (expected row,method,<features>)");
  }
  const std::vector<std::string> names(t.header.begin() + 2, t.header.end());
  std::vector<AttributionGroup> groups;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string& method = t.rows[r][1];
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const AttributionGroup& g) { return g.method == method; });
    if (it == groups.end()) {
      groups.push_back({path, method, names, {}, {}});
      it = std::prev(groups.end());
    }
    Vector v;
    for (std::size_t c = 2; c < t.header.size(); ++c) v.push_back(parse_cell(t, r, c));
    it->rows.push_back(t.rows[r][0]);
    it->scores.push_back(std::move(v));
  }
  return groups;
}

struct CompareCmd {
  std::vector<std::string> files;
  std::string reference = "lc";
  Output out;

  void add(CLI::App* app) {
    app->add_option("files", files, "attributions.csv files")->required();
    app->add_option("--reference", reference, "method whose scores serve as the reference");
    out.add(app);
  }

  int run(std::ostream& log) {
    if (files.size() < 2) throw UsageError("compare needs at least two attribution files");
    std::vector<AttributionGroup> groups;
    for (const auto& f : files) {
      auto g = load_attributions(f);
      groups.insert(groups.end(), g.begin(), g.end());
    }
    for (const auto& g : groups) {
      if (g.names != groups.front().names) {
        throw DataError("feature mismatch between '" + groups.front().source + "' and '" + g.source + "'");
      }
    }
    const auto ref_it = std::find_if(groups.begin(), groups.end(),
                                     [&](const AttributionGroup& g) { return g.method == reference; });
    if (ref_it == groups.end()) throw UsageError("no attributions for reference method '" + reference + "'");
    const AttributionGroup ref = *ref_it;
    groups.erase(ref_it);
    if (groups.empty()) throw UsageError("nothing to compare against the reference");

    CsvTable t;
    t.header = {"method", "source", "row", "tau", "rho", "sign_match", "hit25"};
    for (const auto& g : groups) {
      std::vector<std::array<double, 4>> per_row;
      for (std::size_t r = 0; r < ref.rows.size(); ++r) {
        const auto pos = std::find(g.rows.begin(), g.rows.end(), ref.rows[r]);
        if (pos == g.rows.end()) {
          throw DataError("row " + ref.rows[r] + " missing from " + g.method + " in '" + g.source + "'");
        }
        const ConsistencyReport c = consistency(ref.scores[r], g.scores[pos - g.rows.begin()]);
        per_row.push_back({c.tau, c.rho, c.sign_match, c.hit25});
        t.rows.push_back({g.method, g.source, ref.rows[r], format_double(c.tau), format_double(c.rho),
                          format_double(c.sign_match), format_double(c.hit25)});
      }
      std::array<double, 4> mean{}, sd{};
      for (const auto& p : per_row) {
        for (int k = 0; k < 4; ++k) mean[k] += p[k];
      }
      for (double& v : mean) v /= static_cast<double>(per_row.size());
      if (per_row.size() > 1) {
        for (const auto& p : per_row) {
          for (int k = 0; k < 4; ++k) sd[k] += (p[k] - mean[k]) * (p[k] - mean[k]);
        }
        for (double& v : sd) v = std::sqrt(v / static_cast<double>(per_row.size() - 1));
      }
      for (const auto& [label, vals] : {std::pair{"mean", mean}, std::pair{"sd", sd}}) {
        std::vector<std::string> cells = {g.method, g.source, label};
        for (double v : vals) cells.push_back(format_double(v));
        t.rows.push_back(std::move(cells));
      }
    }
    out.emit("consistency", t);
    log << "compared " << groups.size() << " attribution set(s) against " << reference << "\n";
    return 0;
  }
};

// ---------------------------------------------------------------------------
// variability

struct VariabilityCmd {
  std::string test;
  std::string ref_path;
  int bootstrap = 10;
  int nb = 100;
  double bandwidth = 0.0;
  CLI::Option* bw_opt = nullptr;
  ModelFlags model;
  MethodFlags meth;
  Output out;

  void add(CLI::App* app) {
    app->add_option("--test", test, "test CSV (feature columns plus y)")->required();
    app->add_option("--ref", ref_path, "reference CSV to resample")->required();
    app->add_option("--bootstrap", bootstrap, "bootstrap rounds B")->check(CLI::PositiveNumber);
    app->add_option("--nb", nb, "points per bootstrap round")->check(CLI::PositiveNumber);
    bw_opt = app->add_option("--bandwidth", bandwidth, "KDE bandwidth (default: 4% of the range)")
                 ->check(CLI::PositiveNumber);
    model.add(app);
    meth.add(app, false);
    out.add(app);
  }

  int run(std::ostream& log) {
    const TestSet ts = load_test(test);
    const Method m = meth.finish(ts.dim());
    if (m == Method::kLC) throw UsageError("variability does not apply to lc (it uses no reference set)");
    const ModelHandle f = model.connect(ts.dim());
    const ReferenceSet ref = *load_ref(ref_path, ts, RefRole::kBaseline, "reference file");

    std::vector<ScoreDistribution> dists(ts.size());
    parallel_for(ts.size(), model.jobs, [&](std::size_t t) {
      dists[t] = bootstrap_variability(m, ts[t], f, ref, bootstrap, nb, meth.seed, meth.base);
    });

    CsvTable dist;
    dist.header = with_prefix({"row", "round"}, ts.names());
    CsvTable kde;
    kde.header = {"row", "feature", "value", "density"};
    for (std::size_t t = 0; t < ts.size(); ++t) {
      const ScoreDistribution& d = dists[t];
      for (std::size_t b = 0; b < d.rounds.size(); ++b) {
        std::vector<std::string> cells = {std::to_string(t), std::to_string(b)};
        for (double v : d.rounds[b]) cells.push_back(format_double(v));
        dist.rows.push_back(std::move(cells));
      }
      for (std::size_t i = 0; i < ts.dim(); ++i) {
        const double bw = *bw_opt ? bandwidth : d.bandwidth[i];
        const KdeCurve c = kde_curve(d.feature_values(i), bw);
        for (std::size_t k = 0; k < c.grid.size(); ++k) {
          kde.rows.push_back({std::to_string(t), ts.names()[i], format_double(c.grid[k]),
                              format_double(c.density[k])});
        }
      }
    }
    out.emit("distribution", dist);
    out.emit("kde", kde);
    log << bootstrap << " bootstrap rounds for " << ts.size() << " row(s)\n";
    return 0;
  }
};

// ---------------------------------------------------------------------------
// gen-synth

struct GenSynthCmd {
  std::string name;
  std::size_t n = 100;
  std::uint64_t seed = 0;
  double noise = 0.0;
  bool list = false;
  Output out;

  void add(CLI::App* app) {
    app->add_option("--name", name, "generator name");
    app->add_option("--n", n, "rows")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "random seed");
    app->add_option("--noise", noise, "sd of Gaussian noise added to y")->check(CLI::NonNegativeNumber);
    app->add_flag("--list", list, "print the available generators");
    out.add(app);
  }

  int run(std::ostream& log) {
    if (list) {
      for (const auto& g : generators()) log << g.name << "  " << g.inputs << "  " << g.model_spec << "\n";
      return 0;
    }
    if (name.empty()) throw UsageError("gen-synth needs --name (see --list)");
    out.emit("data", from_test_set(generate(name, n, seed, noise)));
    log << "generated " << n << " rows from " << name << "\n";
    return 0;
  }
};

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const ModelError*>(&e)) return 4;
  if (dynamic_cast<const ConvergenceError*>(&e)) return 5;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return 2;
  return 1;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Anomaly attribution for black-box regression models"};
  app.name("anomattr");
  app.require_subcommand(1);
  app.set_config("--config", "", "INI file with one [command] section of key=value lines; flags take precedence");

  ScoreCmd score;
  AttributeCmd attribute;
  CompareCmd compare;
  VariabilityCmd variability;
  GenSynthCmd gen;

  auto sub = [&](const char* name, const char* help, auto& cmd) {
    CLI::App* s = app.add_subcommand(name, help);
    cmd.add(s);
    return s;
  };
  CLI::App* s_score = sub("score", "per-sample anomaly scores", score);
  CLI::App* s_attr = sub("attribute", "attribution scores per test row", attribute);
  CLI::App* s_cmp = sub("compare", "consistency metrics against a reference method", compare);
  CLI::App* s_var = sub("variability", "bootstrap distribution of attribution scores", variability);
  CLI::App* s_gen = sub("gen-synth", "synthetic data sets", gen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*s_score) return score.run(err);
    if (*s_attr) return attribute.run(err);
    if (*s_cmp) return compare.run(err);
    if (*s_var) return variability.run(err);
    if (*s_gen) return gen.run(out);
  } catch (const std::exception& e) {
    err << "anomattr: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 2;
}

}  // namespace anomattr::cli
