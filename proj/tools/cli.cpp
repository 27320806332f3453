#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "arlab/arfamily.hpp"
#include "arlab/armap.hpp"
#include "arlab/certify.hpp"
#include "arlab/explore.hpp"
#include "arlab/fibers.hpp"
#include "arlab/poly.hpp"
#include "arlab/quadric.hpp"

namespace arlab {

namespace {

using nlohmann::json;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::string format = "json";
  std::string output;
  int verbose = 0;
};

struct SampleOpts {
  double t = 0.0;
  int n = 3;
  int count = 10;
  std::uint64_t seed = 0;
};

struct CertifyOpts {
  double epsilon = std::sqrt(2.0) * 1e-3;
  bool optimize = false;
  bool strict = false;
};

struct ScanOpts {
  std::string kind;
  double t = 0.0;
  std::string t_grid;
  int samples = 256;
  int starts = 64;
  int max_evals = 2000;
  std::string optimizer = "nelder-mead";
  std::uint64_t seed = 0;
  int workers = 1;
  std::string q;
  double resolution = 1e-4;
};

struct FiberOpts {
  std::string w;
};

struct PolyOpts {
  std::string op;
  std::string q;
  int samples = 2000;
  std::uint64_t seed = 0;
};

json header(const std::string& command, json config) {
  return {{"tool", "arlab"}, {"version", ARLAB_VERSION}, {"command", command}, {"config", std::move(config)}};
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json map_json(const MapValue& v) {
  json a = json::array();
  for (const auto& c : v) a.push_back(complex_json(c));
  return a;
}

Vec4c parse_point(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError("--w: malformed number '" + item + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw UsageError("--w: malformed number '" + item + "'");
    vals.push_back(v);
  }
  Vec4c w{};
  if (vals.size() == 4) {
    for (std::size_t i = 0; i < 4; ++i) w[i] = vals[i];
  } else if (vals.size() == 8) {
    for (std::size_t i = 0; i < 4; ++i) w[i] = Complex{vals[2 * i], vals[2 * i + 1]};
  } else {
    throw UsageError("--w expects 4 reals or 8 values re1,im1,...,re4,im4");
  }
  return w;
}

std::string kv_csv(const json& flat) {
  std::ostringstream os;
  os << "key,value\n";
  for (const auto& [k, v] : flat.items()) os << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  return os.str();
}

std::string run_sample(const SampleOpts& o, const Common& c) {
  const auto pts = sample_mt(o.n, o.t, o.count, o.seed);
  if (c.format == "csv") return points_to_csv(pts);
  double max_res = 0.0;
  for (const auto& p : pts) max_res = std::max(max_res, p.quadric_residual());
  json rep = header("sample", {{"t", o.t}, {"n", o.n}, {"count", o.count}, {"seed", o.seed}});
  rep["seed"] = o.seed;
  rep["max_quadric_residual"] = max_res;
  rep["points"] = points_to_json(pts);
  return rep.dump(2) + "\n";
}

std::string run_certify(const CertifyOpts& o, const Common& c) {
  const MarginMode mode = o.strict ? MarginMode::Strict : MarginMode::Full;
  json cfg{{"epsilon", o.epsilon}, {"optimize", o.optimize}, {"mode", to_string(mode)}};
  json rep = header("certify", cfg);
  json flat;
  if (o.optimize) {
    const EpsilonOptimum opt = optimize_epsilon();
    rep["optimum"] = {{"epsilon_star", opt.epsilon_star},
                      {"t_lower_star", opt.t_lower_star},
                      {"t_lower_star_minus_one", opt.t_lower_star - 1.0}};
    rep["certificate"] = to_json(certify(opt.epsilon_star, mode));
    flat["epsilon_star"] = opt.epsilon_star;
    flat["t_lower_star"] = opt.t_lower_star;
  } else {
    rep["certificate"] = to_json(certify(o.epsilon, mode));
  }
  if (c.format == "csv") {
    for (const auto& [k, v] : rep["certificate"].items()) flat[k] = v;
    return kv_csv(flat);
  }
  return rep.dump(2) + "\n";
}

Optimizer parse_optimizer(const std::string& s) {
  if (s == "nelder-mead") return Optimizer::NelderMeadOnChart;
  return Optimizer::ProjectedGradient;
}

std::string run_scan(const ScanOpts& o, const Common& c, std::ostream& err) {
  ScanConfig cfg;
  if (!o.t_grid.empty()) {
    cfg.t_grid = parse_grid(o.t_grid);
  } else if (o.t != 0.0) {
    cfg.t_grid = {o.t};
  } else if (o.kind == "t0") {
    cfg.t_grid = make_grid(1.01, 1.20, 0.01);
  } else {
    throw UsageError("scan needs --t or --t-grid");
  }
  cfg.samples_per_t = o.samples;
  cfg.multistart_count = o.starts;
  cfg.max_evals = o.max_evals;
  cfg.optimizer = parse_optimizer(o.optimizer);
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  if (!o.q.empty()) {
    if (o.kind != "arfamily") throw UsageError("--q applies to 'scan arfamily' only");
    cfg.arfamily_q = parse_poly(o.q);
  }
  cfg.validate();

  const auto start = std::chrono::steady_clock::now();
  ScanReport rep;
  if (o.kind == "degeneracy") {
    rep = run_degeneracy_grid(cfg);
  } else if (o.kind == "injectivity") {
    rep = run_injectivity_grid(cfg);
  } else if (o.kind == "t0") {
    rep = empirical_t0(cfg, o.resolution);
  } else {
    rep = arfamily_scan(cfg);
  }
  if (c.verbose > 0) {
    err << "scan " << o.kind << ": " << rep.records.size() << " records in "
        << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s\n";
  }
  if (c.format == "csv") return rep.to_csv();
  json j = rep.to_json();
  json out = header("scan", j["config"]);
  out["seed"] = cfg.seed;
  for (const auto& [k, v] : j.items()) {
    if (k != "config") out[k] = v;
  }
  return out.dump(2) + "\n";
}

std::string run_fiber(const FiberOpts& o, const Common& c) {
  const Vec4c w = parse_point(o.w);
  const double res = quadric_residual(w);
  if (res > 1e-8) {
    std::ostringstream os;
    os << "point is not on the quadric w1 w2 + w3 w4 = 1 (residual " << res << ")";
    throw UsageError(os.str());
  }
  const FiberSet fs = fiber(w);
  std::vector<Vec4c> points{w};
  for (const auto& p : fs.partners) points.push_back(p.point);
  if (c.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "role,re(w1),im(w1),re(w2),im(w2),re(w3),im(w3),re(w4),im(w4),half_norm_sum\n";
    for (std::size_t k = 0; k < points.size(); ++k) {
      os << (k == 0 ? "base" : "partner");
      for (const auto& z : points[k]) os << ',' << z.real() << ',' << z.imag();
      os << ',' << norm_sum(points[k]) / 2.0 << '\n';
    }
    return os.str();
  }
  json rep = header("fiber", {{"w", to_json(w)}});
  rep["fiber"] = to_json(fs);
  json images = json::array();
  for (const auto& p : points) images.push_back(map_json(eval_F(p)));
  rep["images"] = images;
  rep["half_norm_sum"] = norm_sum(w) / 2.0;
  return rep.dump(2) + "\n";
}

json poly_json(const HarmonicPoly& p) { return {{"text", p.to_string()}, {"terms", to_json(p)}}; }

std::string run_poly(const PolyOpts& o, const Common& c) {
  if (c.format == "csv") throw UsageError("csv output is not available for poly");
  const HarmonicPoly q = parse_poly(o.q);
  json rep = header("poly", {{"op", o.op}, {"q", o.q}, {"samples", o.samples}, {"seed", o.seed}});
  rep["input"] = poly_json(q);
  if (o.op == "laplacian") {
    const HarmonicPoly l = laplacian(q);
    rep["result"] = poly_json(l);
    rep["is_zero"] = l.is_zero();
  } else if (o.op == "ar-op") {
    rep["result"] = poly_json(ar_operator(q));
  } else if (o.op == "polarize") {
    const HolomorphicPoly p = polarize(q);
    rep["result"] = {{"text", p.to_string()}, {"terms", to_json(p)}};
  } else {
    rep["is_harmonic"] = is_harmonic(q);
    json parts = json::array();
    for (const auto& [deg, part] : bidegree_parts(q)) {
      parts.push_back({{"bidegree", {deg.first, deg.second}}, {"part", part.to_string()}});
    }
    rep["bidegree_parts"] = parts;
    try {
      rep["ar_operator"] = poly_json(ar_operator(q));
    } catch (const ArFamilyError& e) {
      rep["ar_operator"] = {{"error", e.what()}};
    }
    try {
      rep["divisibility"] = divisibility_check(q);
    } catch (const ArFamilyError& e) {
      rep["divisibility"] = {{"error", e.what()}};
    }
    const NonvanishingResult nv = q_nonvanishing_check(q, o.samples, o.seed);
    rep["nonvanishing"] = {{"min_abs", nv.min_abs},
                           {"z", complex_json(nv.z)},
                           {"w", complex_json(nv.w)},
                           {"method", "heuristic: sampling plus local descent on S^3"}};
    rep["seed"] = o.seed;
  }
  return rep.dump(2) + "\n";
}

std::string run_thresholds(const Common& c) {
  const double eps = std::sqrt(2.0) * 1e-3;
  const Certificate cert = certify(eps);
  json items = json::array(
      {{{"name", "degeneracy_threshold"},
        {"value", degeneracy_threshold()},
        {"closed_form", "sqrt((2+sqrt(2))/3)"},
        {"source", "zero set of the restricted Jacobian on M_t^3 (armap)"}},
       {{"name", "double_root_threshold"},
        {"value", 2.0 / std::sqrt(3.0)},
        {"closed_form", "2/sqrt(3)"},
        {"source", "zero set of the fiber discriminant (fibers)"}},
       {{"name", "certified_lower_bound"},
        {"value", cert.t_lower},
        {"closed_form", "1 + 1e-6"},
        {"source", "certify --epsilon 1.4142135e-3 (valid=" + std::string(cert.valid ? "true" : "false") + ")"}}});
  if (c.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "name,value,closed_form,source\n";
    for (const auto& it : items) {
      os << it["name"].get<std::string>() << ',' << it["value"].get<double>() << ','
         << it["closed_form"].get<std::string>() << ",\"" << it["source"].get<std::string>() << "\"\n";
    }
    return os.str();
  }
  json rep = header("thresholds", json::object());
  rep["thresholds"] = items;
  return rep.dump(2) + "\n";
}

int default_workers() {
  if (const char* env = std::getenv("ARLAB_WORKERS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      return 1;
    }
  }
  return 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical and symbolic explorations of the Ahern-Rudin map on M_t^3", "arlab"};
  app.set_version_flag("--version", ARLAB_VERSION);
  app.set_config("--config", "", "Config file (TOML/INI, same keys as the flags)");
  app.allow_config_extras(false);
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--format", common.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("-o,--output", common.output, "Write the report to this file");
  app.add_flag("-v,--verbose", common.verbose, "Timing and progress on stderr");

  SampleOpts sample;
  auto* sub_sample = app.add_subcommand("sample", "Random points of M_t^n");
  sub_sample->add_option("--t", sample.t, "Orbit parameter t > 1")->required();
  sub_sample->add_option("--n", sample.n, "Dimension n")->capture_default_str();
  sub_sample->add_option("--count", sample.count, "Number of points")->capture_default_str();
  sub_sample->add_option("--seed", sample.seed, "Random seed")->capture_default_str();

  CertifyOpts cert;
  auto* sub_cert = app.add_subcommand("certify", "Closed-form injectivity certificate near S^3");
  sub_cert->add_option("--epsilon", cert.epsilon, "Neighbourhood radius eps")->capture_default_str();
  sub_cert->add_flag("--optimize", cert.optimize, "Largest eps with a valid certificate");
  sub_cert->add_flag("--strict", cert.strict, "Use the weaker right-hand side 1 instead of the full margin");

  ScanOpts scan;
  scan.workers = default_workers();
  auto* sub_scan = app.add_subcommand("scan", "Multistart scans over M_t^3");
  sub_scan->add_option("kind", scan.kind, "degeneracy | injectivity | t0 | arfamily")
      ->required()
      ->check(CLI::IsMember({"degeneracy", "injectivity", "t0", "arfamily"}));
  auto* opt_t = sub_scan->add_option("--t", scan.t, "Single t value");
  auto* opt_grid = sub_scan->add_option("--t-grid", scan.t_grid, "Grid start:stop:step (inclusive)");
  opt_t->excludes(opt_grid);
  sub_scan->add_option("--samples", scan.samples, "Random samples per t")->capture_default_str();
  sub_scan->add_option("--starts", scan.starts, "Multistart count per t")->capture_default_str();
  sub_scan->add_option("--max-evals", scan.max_evals, "Evaluation budget per start")->capture_default_str();
  sub_scan->add_option("--optimizer", scan.optimizer, "Local optimizer")
      ->check(CLI::IsMember({"nelder-mead", "projected-gradient"}))
      ->capture_default_str();
  sub_scan->add_option("--seed", scan.seed, "Random seed")->capture_default_str();
  sub_scan->add_option("--workers", scan.workers, "Worker threads (default: $ARLAB_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  sub_scan->add_option("--q", scan.q, "Generating polynomial for 'scan arfamily'");
  sub_scan->add_option("--resolution", scan.resolution, "Bisection resolution for 'scan t0'")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  FiberOpts fib;
  auto* sub_fiber = app.add_subcommand("fiber", "Complete fiber of F~ through a point of Q^3");
  sub_fiber->add_option("--w", fib.w, "w1..w4 as 4 reals or 8 values re,im,...")->required();

  PolyOpts poly;
  auto* sub_poly = app.add_subcommand("poly", "Exact polynomial operations");
  sub_poly->add_option("op", poly.op, "laplacian | ar-op | polarize | check")
      ->required()
      ->check(CLI::IsMember({"laplacian", "ar-op", "polarize", "check"}));
  sub_poly->add_option("--q", poly.q, "Polynomial in z, zb, w, wb")->required();
  sub_poly->add_option("--samples", poly.samples, "Samples for the nonvanishing check")->capture_default_str();
  sub_poly->add_option("--seed", poly.seed, "Seed for the nonvanishing check")->capture_default_str();

  auto* sub_thr = app.add_subcommand("thresholds", "Closed-form thresholds");

  for (auto* s : {sub_sample, sub_cert, sub_scan, sub_fiber, sub_poly, sub_thr}) s->allow_config_extras(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    std::string report;
    if (*sub_sample) {
      report = run_sample(sample, common);
    } else if (*sub_cert) {
      report = run_certify(cert, common);
    } else if (*sub_scan) {
      report = run_scan(scan, common, err);
    } else if (*sub_fiber) {
      report = run_fiber(fib, common);
    } else if (*sub_poly) {
      report = run_poly(poly, common);
    } else {
      report = run_thresholds(common);
    }
    if (common.output.empty()) {
      out << report;
    } else {
      std::ofstream f(common.output);
      if (!f) throw UsageError("cannot write " + common.output);
      f << report;
    }
    return kExitOk;
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace arlab
