// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "anomattr/analysis.hpp"
#include "anomattr/baselines.hpp"
#include "anomattr/gradest.hpp"
#include "anomattr/lc.hpp"
#include "anomattr/synth.hpp"
#include "oracles.hpp"
#include "table.hpp"

using namespace anomattr;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double total(const Vector& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double max_abs_diff(const Vector& a, const Vector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

std::vector<Vector> uniform_points(std::size_t n, std::size_t m, double half, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-half, half);
  std::vector<Vector> xs(n, Vector(m));
  for (auto& x : xs) {
    for (double& v : x) v = u(rng);
  }
  return xs;
}

std::vector<Vector> gaussian_points(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vector> xs(n, Vector(m));
  for (auto& x : xs) {
    for (double& v : x) v = g(rng);
  }
  return xs;
}

const char* kQuad3 = "quadratic:A=1,0.4,-0.2,0.4,-0.5,0.3,-0.2,0.3,0.8;b=0.5,-1,0.25;c=2";

std::vector<std::string> smooth_specs() {
  return {"sinusoidal2d", "additive-sine:a=1,0.5,-1", kQuad3, "linear:a=2,-1,0.5,3;b=1",
          find_generator("boston-like").model_spec};
}

// Random symmetric 5x5 quadratic.
std::string random_quadratic(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const int m = 5;
  std::vector<double> a(m * m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) a[i * m + j] = a[j * m + i] = 0.5 * g(rng);
  }
  auto join = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + cli::format_double(v[k]);
    return s;
  };
  std::vector<double> b(m);
  for (double& v : b) v = g(rng);
  return "quadratic:A=" + join(a) + ";b=" + join(b) + ";c=" + cli::format_double(g(rng));
}

// ---------------------------------------------------------------------------

Outcome sinusoid_deviation_sensitivity() {
  const auto t0 = Clock::now();
  const auto f = parse_model_spec("sinusoidal2d");
  const Sample a{{0.5, 0.0}, 1.0};
  const Sample b{{0.5, 0.0}, -1.0};
  const std::uint64_t seed = 6;

  LcConfig lc;
  lc.seed = lc.grad.seed = seed;
  const Vector one = {1.0};
  const LcResult ra = solve_lc(TestSet({a}, {"x1", "x2"}), one, f, lc);
  const LcResult rb = solve_lc(TestSet({b}, {"x1", "x2"}), one, f, lc);
  const bool lc_ok = sgn(ra.delta[0]) != 0 && sgn(ra.delta[0]) == -sgn(rb.delta[0]);

  const TestSet drawn = generate("sinusoidal2d-uniform", 50, 1);
  std::vector<Vector> ref_x;
  for (const auto& s : drawn.samples()) ref_x.push_back(s.x);
  const auto ref = ReferenceSet::from_inputs(ref_x);

  BaselineConfigs cfg;
  cfg.lime.seed = cfg.sv.seed = cfg.ig.grad.seed = seed;
  bool exact_ok = true;
  for (Method m : {Method::kLIME, Method::kZScore}) {
    exact_ok &= baseline_attribute(m, a, f, cfg, &ref).scores == baseline_attribute(m, b, f, cfg, &ref).scores;
  }
  for (const Vector& x0 : {Vector{0.0, 0.0}, Vector{0.0, 1.0}}) {
    cfg.ig.baseline = x0;
    exact_ok &= ig_attribute(a, f, cfg.ig).scores == ig_attribute(b, f, cfg.ig).scores;
  }
  double worst_sigma = 0.0;
  for (Method m : {Method::kEIG, Method::kSV}) {
    const auto ea = baseline_attribute(m, a, f, cfg, &ref);
    const auto eb = baseline_attribute(m, b, f, cfg, &ref);
    for (std::size_t i = 0; i < 2; ++i) {
      const double d = std::abs(ea.scores[i] - eb.scores[i]);
      const double se = std::hypot(ea.std_errors[i], eb.std_errors[i]);
      worst_sigma = std::max(worst_sigma, se > 0.0 ? d / se : (d > 0.0 ? INFINITY : 0.0));
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = lc_ok && exact_ok && worst_sigma <= 3.0 && secs < 120.0;
  return {pass, "LC seed 6: d1(A)=" + fmt(ra.delta[0]) + " d1(B)=" + fmt(rb.delta[0]) +
                    "; LIME/IG(0,0)/IG(0,1)/Z identical=" + (exact_ok ? "yes" : "no") +
                    "; EIG/SV max |A-B| = " + fmt(worst_sigma) + " SE; " + fmt(secs) + " s"};
}

Outcome lc_closed_form() {
  const auto t0 = Clock::now();
  const auto f = parse_model_spec("linear:a=1");
  const Vector one = {1.0};
  double worst = 0.0, worst_default = 0.0;
  bool zero_exact = true;
  for (double lambda : {0.0, 0.25, 0.5}) {
    for (double nu : {0.0, 0.25, 0.5}) {
      LcConfig cfg;
      cfg.lambda = lambda;
      cfg.nu = nu;
      const double target = (1.0 - nu) / (1.0 + lambda);
      worst_default = std::max(worst_default, std::abs(solve_lc(TestSet({{{0.0}, 1.0}}, {"x"}), one, f, cfg).delta[0] - target));
      cfg.kappa_decay = 1.0;
      worst = std::max(worst, std::abs(solve_lc(TestSet({{{0.0}, 1.0}}, {"x"}), one, f, cfg).delta[0] - target));

      // Zero residual: from a zero start, or from the random start when the
      // l1 threshold is active.
      LcConfig z = cfg;
      z.init_scale = 0.0;
      zero_exact &= solve_lc(TestSet({{{0.0}, 0.0}}, {"x"}), one, f, z).delta[0] == 0.0;
      if (nu > 0.0) zero_exact &= solve_lc(TestSet({{{0.0}, 0.0}}, {"x"}), one, f, cfg).delta[0] == 0.0;
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-3 && zero_exact && secs < 30.0,
          "constant learning rate: max |d - (1-nu)/(1+lambda)| = " + fmt(worst) +
              " (0.98 decay stops at " + fmt(worst_default) + "); zero residual exact=" +
              (zero_exact ? "yes" : "no") + "; " + fmt(secs) + " s"};
}

Outcome sum_rules() {
  std::mt19937_64 rng(21);
  double ig_worst = 0.0, eig_sigma = 0.0, sv_sigma = 0.0, sv_worst = 0.0;
  for (const auto& spec : smooth_specs()) {
    const auto f = parse_model_spec(spec);
    const std::size_t m = f.dim();
    const auto ref_x = uniform_points(50, m, 1.0, rng);
    const auto ref = ReferenceSet::from_inputs(ref_x);
    const Vector f_ref = f.eval(ref_x);
    const double f_mean = total(f_ref) / static_cast<double>(f_ref.size());
    const auto xs = uniform_points(10, m, 1.0, rng);
    const auto x0s = uniform_points(10, m, 1.0, rng);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const Sample s{xs[k], 0.0};
      const double ft = f.eval_one(xs[k]);
      IgConfig ig;
      ig.baseline = x0s[k];
      ig.grad.seed = k;
      ig_worst = std::max(ig_worst, std::abs(total(ig_attribute(s, f, ig).scores) - (ft - f.eval_one(x0s[k]))));

      const auto eig = eig_attribute(s, f, ref, ig);
      const double eig_d = std::abs(total(eig.scores) - (ft - f_mean));
      eig_sigma = std::max(eig_sigma, eig_d / std::max(eig.meta.at("sum_stderr"), 1e-300));

      const auto sv = sv_attribute(s, f, ref, {2000, k});
      const double sv_d = std::abs(total(sv.scores) - (ft - f_mean));
      sv_worst = std::max(sv_worst, sv_d);
      // The draws telescope, so the residual is pure rounding; compare in SE
      // units only above that floor.
      sv_sigma = std::max(sv_sigma, sv_d <= 1e-12 ? 0.0 : sv_d / sv.meta.at("sum_stderr"));
    }
  }
  return {ig_worst <= 1e-3 && eig_sigma <= 3.0 && sv_sigma <= 3.0,
          "IG max residual " + fmt(ig_worst) + " (tol 1e-3, 100 intervals, paths in [-1,1]^M); EIG max " +
              fmt(eig_sigma) + " SE; SV max " + fmt(sv_sigma) + " SE; 5 smooth fixtures x 10 points"};
}

Outcome quadratic_sv_equals_eig() {
  std::mt19937_64 rng(404);
  const auto f = parse_model_spec(random_quadratic(rng));
  const auto ref = ReferenceSet::from_inputs(gaussian_points(50, 5, rng));
  const auto xs = gaussian_points(20, 5, rng);
  double worst = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const Sample s{xs[k], 0.0};
    IgConfig ig;
    ig.grad.seed = k;
    const auto eig = eig_attribute(s, f, ref, ig);
    const auto sv = sv_attribute(s, f, ref, {2000, k});
    for (std::size_t i = 0; i < 5; ++i) {
      const double se = std::hypot(sv.std_errors[i], eig.std_errors[i]);
      worst = std::max(worst, std::abs(sv.scores[i] - eig.scores[i]) / se);
    }
  }
  return {worst <= 3.0, "max_i |SV_i - EIG_i| = " + fmt(worst) + " combined SE over 20 points (random 5-feature quadratic)"};
}

Outcome lime_matches_gradient() {
  std::mt19937_64 rng(55);
  const OracleSuiteConfig probes;
  double worst = 0.0;
  int points = 0;
  for (const auto& spec : smooth_specs()) {
    const auto f = parse_model_spec(spec);
    for (const auto& x : uniform_points(5, f.dim(), 1.0, rng)) {
      const Vector g = smooth_gradient(f, x, probes.gradient_probe);
      const Vector beta = lime_attribute({x, 0.0}, f, probes.lime_probe).scores;
      worst = std::max(worst, max_abs_diff(beta, g));
      ++points;
    }
  }
  return {worst <= 0.05, "nu=1e-8, sigma_local=0.01: max |beta_i - grad_i| = " + fmt(worst) + " over " +
                             std::to_string(points) + " points"};
}

Outcome deviation_agnosticism() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 2.0);
  std::vector<OracleFixture> fixtures;
  auto add = [&](const std::string& name, const std::string& spec, bool smooth, std::vector<Sample> extra = {}) {
    const auto f = parse_model_spec(spec);
    std::vector<Sample> pts = std::move(extra);
    for (const auto& x : uniform_points(3, f.dim(), 1.0, rng)) pts.push_back({x, f.eval_one(x) + g(rng)});
    fixtures.push_back({name, f, pts, ReferenceSet::from_inputs(uniform_points(50, f.dim(), 1.0, rng)),
                        uniform_points(1, f.dim(), 1.0, rng)[0], smooth, false});
  };
  add("sinusoidal2d", "sinusoidal2d", true, {{{0.5, 0.0}, 1.0}, {{0.5, 0.0}, -1.0}});
  add("additive-sine", "additive-sine:a=1,0.5,-1", true);
  add("quadratic", kQuad3, true);
  add("linear", "linear:a=2,-1,0.5,3;b=1", true);
  add("piecewise-step", "piecewise-step:a=1,-1;t=0,0.2", false);
  add("boston-like", find_generator("boston-like").model_spec, true);

  int n = 0, failed = 0;
  double worst = 0.0;
  for (const auto& c : property_oracle_suite(fixtures, {})) {
    if (c.property.find("deviation-agnostic") == std::string::npos) continue;
    ++n;
    failed += !c.passed;
    worst = std::max(worst, c.residual);
  }
  return {n > 0 && failed == 0, std::to_string(n - failed) + "/" + std::to_string(n) +
                                    " IG/EIG/SV/LIME checks on 6 fixtures, worst residual " + fmt(worst) +
                                    " (tol 1e-9)"};
}

Outcome metric_oracles() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> len(2, 40);
  std::uniform_int_distribution<int> small(-3, 3);
  std::normal_distribution<double> wide(0.0, 1.0);
  std::bernoulli_distribution coarse(0.5);
  int mismatches = 0, out_of_range = 0;
  const int cases = 10000;
  for (int c = 0; c < cases; ++c) {
    const int m = len(rng);
    Vector a(m), b(m);
    const bool tied = coarse(rng);
    for (int i = 0; i < m; ++i) {
      a[i] = tied ? small(rng) : wide(rng);
      b[i] = tied ? small(rng) : wide(rng);
    }
    const double tau = kendall_tau(a, b), rho = spearman_rho(a, b);
    mismatches += tau != oracle::kendall_tau_b(a, b);
    mismatches += rho != oracle::spearman(a, b);
    const double sm = sign_match_ratio(a, b), h = hit25(a, b);
    out_of_range += std::abs(tau) > 1.0 || std::abs(rho) > 1.0 || sm < 0.0 || sm > 1.0 || h < 0.0 || h > 1.0;
  }

  const Vector r = {0.3, -1.2, 2.5, 0.05, -0.7, 1.1, -0.2, 0.9};
  Vector neg = r;
  for (double& v : neg) v = -v;
  int edge_fail = 0;
  edge_fail += sign_match_ratio(r, r) != 1.0;
  edge_fail += sign_match_ratio(r, neg) != 0.0;
  edge_fail += sign_match_ratio(Vector(8, 0.0), r) != 1.0;
  edge_fail += hit25(r, r) != 1.0;
  edge_fail += hit25(r, {9.0, 0.0, 0.0, 0.0, 0.0, 0.0, 8.0, 0.0}) != 0.0;  // top(r) = {1, 2}
  edge_fail += hit25(r, {0.0, 0.0, 9.0, 0.0, 0.0, 0.0, 8.0, 0.0}) != 0.5;

  return {mismatches == 0 && out_of_range == 0 && edge_fail == 0,
          std::to_string(cases) + " fuzz cases: " + std::to_string(mismatches) + " mismatches vs brute force, " +
              std::to_string(out_of_range) + " out of range; " + std::to_string(6 - edge_fail) +
              "/6 sign_match/hit25 edge cases"};
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / ("anomattr_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string bin = ANOMATTR_BIN;

  auto sh = [&](const std::string& args) {
    return std::system((quote(bin) + " " + args + " >/dev/null 2>&1").c_str());
  };
  // data.csv is produced once and then shared by every other command.
  if (sh("gen-synth --name additive-sine-uniform --n 20 --seed 3 --noise 0.5 --out " + quote((root / "data").string())) !=
      0) {
    return {false, "gen-synth failed"};
  }
  const std::string data = quote((root / "data/data.csv").string());
  const std::string model = "--model additive-sine:a=1,0.5,-1";

  struct Cmd {
    std::string name;
    std::function<std::string(const std::string&)> args;  // out dir -> arguments
  };
  std::vector<Cmd> cmds = {
      {"gen-synth", [](const std::string& o) { return "gen-synth --name boston-like --n 30 --seed 9 --noise 0.5 --out " + o; }},
      {"score", [&](const std::string& o) { return "score " + model + " --test " + data + " --out " + o; }},
      {"score-json", [&](const std::string& o) { return "score " + model + " --test " + data + " --format json --out " + o; }},
  };
  for (const char* m : {"lc", "lime", "ig", "eig", "sv", "zscore"}) {
    cmds.push_back({std::string("attribute-") + m, [&, m](const std::string& o) {
                      return "attribute " + model + " --test " + data + " --ref " + data + " --method " + m +
                             " --baseline 0,0,0 --seed 11 --mc 200 --out " + o;
                    }});
  }
  cmds.push_back({"attribute-collective", [&](const std::string& o) {
                    return "attribute " + model + " --test " + data + " --method lc --collective --seed 11 --out " + o;
                  }});
  cmds.push_back({"variability", [&](const std::string& o) {
                    return "variability " + model + " --test " + data + " --ref " + data +
                           " --method sv --mc 100 --seed 11 --out " + o;
                  }});

  int files = 0, unconverged_runs = 0;
  std::vector<std::string> problems;
  auto check_pair = [&](const std::string& name, const fs::path& a, const fs::path& b) {
    std::vector<fs::path> got;
    for (const auto& e : fs::directory_iterator(a)) got.push_back(e.path().filename());
    if (got.empty()) problems.push_back(name + ": no output");
    for (const auto& f : got) {
      ++files;
      if (slurp(a / f) != slurp(b / f)) problems.push_back(name + "/" + f.string() + " differs");
    }
  };
  for (const auto& c : cmds) {
    const fs::path a = root / (c.name + "-1"), b = root / (c.name + "-2");
    // Exit status 5 (some LC row did not converge) still writes every file.
    const int ca = sh(c.args(quote(a.string()))), cb = sh(c.args(quote(b.string())));
    const bool ok = ca == cb && (WEXITSTATUS(ca) == 0 || WEXITSTATUS(ca) == 5) && WIFEXITED(ca);
    if (!ok) {
      problems.push_back(c.name + ": exit statuses " + std::to_string(ca) + " and " + std::to_string(cb));
    } else {
      unconverged_runs += WEXITSTATUS(ca) == 5;
      check_pair(c.name, a, b);
    }
  }

  // compare over two attribution files from above
  const std::string lc = quote((root / "attribute-lc-1/attributions.csv").string());
  const std::string sv = quote((root / "attribute-sv-1/attributions.csv").string());
  const fs::path ca = root / "compare-1", cb = root / "compare-2";
  if (sh("compare " + lc + " " + sv + " --out " + quote(ca.string())) != 0 ||
      sh("compare " + lc + " " + sv + " --out " + quote(cb.string())) != 0) {
    problems.push_back("compare: nonzero exit");
  } else {
    check_pair("compare", ca, cb);
  }

  fs::remove_all(root);
  std::string detail = std::to_string(cmds.size() + 1) + " command runs, " + std::to_string(files) +
                       " output files byte-identical across two runs (" + std::to_string(unconverged_runs) +
                       " with unconverged LC rows)";
  if (!problems.empty()) detail = problems.front() + " (" + std::to_string(problems.size()) + " problem(s))";
  return {problems.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"deviation sensitivity on the sinusoid (A/B)", sinusoid_deviation_sensitivity},
      {"LC closed-form stationary points", lc_closed_form},
      {"sum rules and efficiency", sum_rules},
      {"SV equals EIG on a quadratic", quadratic_sv_equals_eig},
      {"LIME matches the local gradient", lime_matches_gradient},
      {"deviation-agnosticism suite", deviation_agnosticism},
      {"metric oracles", metric_oracles},
      {"CLI determinism", cli_determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS  " : "FAIL  ") << name << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
