// xct: approximate model counting and analysis frontend.
//
// Exit codes: 0 ok, 1 selftest failure, 2 usage/parse error, 3 oracle
// failure or counting abort, 4 resource cap exceeded.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "xct/cnf.hpp"
#include "xct/counter.hpp"
#include "xct/fourier.hpp"
#include "xct/hash.hpp"
#include "xct/rng.hpp"
#include "xct/selftest.hpp"
#include "xct/solver.hpp"

namespace {

using json = nlohmann::json;
using namespace xct;

Cnf read_input(const std::string& path) {
  if (path == "-") return parse_dimacs(std::cin);
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open input file: " + path);
  return parse_dimacs(in);
}

uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<uint64_t>(rd()) << 32) ^ rd();
}

OracleFactory make_factory(const std::string& solver, double timeout) {
  if (solver.empty() || solver == "internal") return internal_oracle();
  return external_oracle(solver, timeout);
}

std::string default_solver() {
  const char* env = std::getenv("XCT_SOLVER");
  return env ? env : "internal";
}

CountMode parse_mode(const std::string& mode) {
  std::string m = mode;
  for (auto& c : m)
    if (c == '_') c = '-';
  if (m == "bernoulli") return CountMode::bernoulli;
  if (m == "fixed-k") return CountMode::fixed_k;
  if (m == "hybrid") return CountMode::hybrid;
  throw ConfigError("unknown mode '" + mode + "' (expected bernoulli, fixed-k, or hybrid)");
}

// ---------------------------------------------------------------- count

struct CountArgs {
  std::string input = "-";
  std::string mode = "bernoulli";
  int k = 0;
  double delta = 0.25;
  int reps_multiplier = 1;
  int workers = 1;
  std::optional<uint64_t> seed;
  std::string solver = default_solver();
  double timeout = 60.0;
};

int cmd_count(const CountArgs& a) {
  Cnf f = read_input(a.input);
  AcountConfig cfg;
  cfg.mode = parse_mode(a.mode);
  cfg.k = a.k;
  cfg.delta = a.delta;
  cfg.reps_multiplier = a.reps_multiplier;
  cfg.workers = a.workers;
  cfg.seed = a.seed ? *a.seed : entropy_seed();
  OracleFactory factory = make_factory(a.solver, a.timeout);
  CountEstimate est;
  switch (cfg.mode) {
    case CountMode::bernoulli: est = acount(f, cfg, factory); break;
    case CountMode::fixed_k: est = acount_constant(f, cfg, factory); break;
    case CountMode::hybrid: est = hybrid_count(f, cfg, factory); break;
  }
  std::cout << to_json_string(est, true) << "\n";
  return est.aborted ? 3 : 0;
}

// ---------------------------------------------------------------- exact

int cmd_exact(const std::string& input, int budget_bits) {
  Cnf f = read_input(input);
  uint64_t s = exact_count(f, budget_bits);
  json rec;
  rec["exact"] = s;
  rec["n"] = f.var_count();
  std::cout << rec.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------- encode

struct EncodeArgs {
  std::string input = "-";
  int m = 1;
  std::string family = "bernoulli";
  int k = 0;
  std::optional<uint64_t> seed;
};

int cmd_encode(const EncodeArgs& a) {
  Cnf f = read_input(a.input);
  if (a.m < 0) throw ConfigError("row count must be nonnegative");
  if (a.m == 0) {
    // zero rows: the output is the input formula, untouched
    emit_dimacs(f, std::cout);
    return 0;
  }
  int n = f.var_count();
  CountMode fam = parse_mode(a.family);
  if (fam == CountMode::hybrid) throw ConfigError("encode takes family bernoulli or fixed-k");
  int k = a.k;
  RowSampler rows;
  if (fam == CountMode::bernoulli) {
    if (k == 0) k = default_k(n);
    if (k < 1 || k > n) throw ConfigError("width budget k must lie in [1, n]");
    rows = bernoulli_rows(bernoulli_p(n, k));
  } else {
    if (k == 0) k = std::min(5, n);
    if (k < 1 || k > n) throw ConfigError("row width k must lie in [1, n]");
    rows = fixed_k_rows(k);
  }
  uint64_t seed = a.seed ? *a.seed : entropy_seed();
  HashFunction h = build_hash(n, a.m, rows, Rng(seed));
  std::cout << "c seed " << seed << "\n";
  for (const XorConstraint& row : h.rows) {
    std::cout << "c xor " << (row.target ? 1 : 0);
    for (int v : row.support) std::cout << " " << v;
    std::cout << " 0\n";
  }
  emit_dimacs(conjoin(f, encode_hash(h)), std::cout);
  return 0;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string checker;
  int n = 8;
  int trials = 100;
  std::optional<uint64_t> seed;
  double p = 0.25;
  double alpha = 1.0 / 9.0;
  double delta = 0.5;
  double zeta = 0.5;
  double eta = 0.5;
  double eps = 0.5;
  int k = 4;
  int m = 1;
  int t = -1; // support-size exponent; -1 = derive per checker
  std::string grid = "20x20";
};

void emit_record(const std::string& checker, json params, double lhs, double rhs,
                 bool holds) {
  json rec;
  rec["checker"] = checker;
  rec["params"] = std::move(params);
  rec["lhs"] = lhs;
  rec["rhs"] = rhs;
  rec["margin"] = rhs - lhs;
  rec["holds"] = holds;
  std::cout << rec.dump() << "\n";
}

void require_cap(int n, int cap, const std::string& what) {
  if (n > cap)
    throw ResourceError(what + " supports n up to " + std::to_string(cap) + ", got n=" +
                        std::to_string(n));
  if (n < 1) throw ConfigError("n must be positive");
}

std::vector<uint32_t> draw_support(int n, int t, Rng& r) {
  std::vector<uint32_t> out;
  uint64_t space = uint64_t{1} << n;
  uint64_t count = uint64_t{1} << t;
  std::vector<bool> seen(space, false);
  out.reserve(count);
  for (uint64_t j = space - count; j < space; ++j) {
    auto x = static_cast<uint32_t>(r.next_below(j + 1));
    if (seen[x]) x = static_cast<uint32_t>(j);
    seen[x] = true;
    out.push_back(x);
  }
  return out;
}

HypercubeDistribution draw_flat(int n, int t, Rng& r) {
  return HypercubeDistribution::flat(n, draw_support(n, t, r));
}

SignedFunction draw_signed(int n, Rng& r) {
  std::vector<double> v(size_t{1} << n);
  for (auto& x : v) x = static_cast<double>(static_cast<int>(r.next_below(3)) - 1);
  return SignedFunction(n, v);
}

int cmd_analyze(const AnalyzeArgs& a) {
  std::string name = a.checker;
  for (auto& c : name) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '_') c = '-';
  }
  uint64_t seed = a.seed ? *a.seed : entropy_seed();
  Rng root(seed);
  json base;
  base["seed"] = seed;

  if (name == "identity") {
    require_cap(a.n, kMaxFourierDim, "identity");
    for (int i = 0; i < a.trials; ++i) {
      Rng r = root.split(1, i);
      std::vector<double> v(size_t{1} << a.n);
      long double sum = 0.0L;
      for (auto& x : v) {
        double u = r.next_double();
        x = u * u;
        sum += x;
      }
      for (auto& x : v) x = static_cast<double>(x / sum);
      HypercubeDistribution f(a.n, v);
      auto mask = static_cast<uint32_t>(r.next_below(uint64_t{1} << a.n));
      double lhs = normalized_coefficient(f, mask);
      double rhs = std::ldexp(fourier_coefficient(f, mask), a.n - 1);
      json params = base;
      params["case"] = i;
      params["n"] = a.n;
      params["S"] = mask;
      emit_record(name, params, lhs, rhs, std::fabs(lhs - rhs) <= 1e-12);
    }
    return 0;
  }
  if (name == "contractive") {
    require_cap(a.n, 12, "contractive");
    double a_value = A_of(a.alpha, a.p);
    for (int i = 0; i < a.trials; ++i) {
      Rng r = root.split(2, i);
      SignedFunction f = draw_signed(a.n, r);
      SignedFunction g = (i % 4 == 0) ? f : draw_signed(a.n, r);
      BoundCheck c = check_contractive(f, g, a.p, a.alpha, a_value);
      json params = base;
      params["case"] = i;
      params["n"] = a.n;
      params["p"] = a.p;
      params["alpha"] = a.alpha;
      emit_record(name, params, c.lhs, c.rhs, c.holds);
    }
    return 0;
  }
  if (name == "a-bound" || name == "abound") {
    int gw = 20, gh = 20;
    if (std::sscanf(a.grid.c_str(), "%dx%d", &gw, &gh) != 2 || gw < 1 || gh < 1)
      throw ConfigError("grid must look like 20x20");
    const double alpha_lo = 0.01, alpha_hi = 1.0 / 9.0, p_lo = 0.05, p_hi = 0.5;
    for (int i = 0; i < gw; ++i) {
      double fa = gw == 1 ? 0.0 : static_cast<double>(i) / (gw - 1);
      double alpha = std::exp(std::log(alpha_lo) + fa * (std::log(alpha_hi) - std::log(alpha_lo)));
      alpha = std::min(alpha, alpha_hi);
      for (int j = 0; j < gh; ++j) {
        double fp = gh == 1 ? 0.0 : static_cast<double>(j) / (gh - 1);
        double p = p_lo + fp * (p_hi - p_lo);
        double value = A_of(alpha, p);
        double cap = a_closed_form_cap(alpha, p);
        json params = base;
        params["alpha"] = alpha;
        params["p"] = p;
        emit_record(name, params, value, cap, value <= cap + 1e-9 && value >= 1.0 - 1e-9);
      }
    }
    return 0;
  }
  if (name == "mu-p" || name == "fixed-k") {
    bool mu = name == "mu-p";
    require_cap(a.n, 14, name);
    if (!mu && (a.k < 1 || a.k > a.n)) throw ConfigError("row width k must lie in [1, n]");
    for (int i = 0; i < a.trials; ++i) {
      Rng r = root.split(3, i);
      int t = a.t >= 0 ? a.t : static_cast<int>(r.next_below(a.n + 1));
      if (t > a.n) throw ConfigError("support exponent t must be at most n");
      HypercubeDistribution f = draw_flat(a.n, t, r);
      double lhs, rhs;
      if (mu) {
        lhs = expected_abs_coeff_mu_p(f, a.p).value;
        rhs = mu_p_abs_coeff_bound(a.n, a.p, static_cast<double>(t) / a.n);
      } else {
        lhs = expected_abs_coeff_fixed_k(f, a.k).value;
        rhs = fixed_k_abs_coeff_bound(a.n, a.k, t, a.zeta);
      }
      json params = base;
      params["case"] = i;
      params["n"] = a.n;
      params["t"] = t;
      if (mu) params["p"] = a.p;
      else {
        params["k"] = a.k;
        params["zeta"] = a.zeta;
      }
      emit_record(name, params, lhs, rhs, lhs <= rhs + 1e-9);
    }
    return 0;
  }
  if (name == "kkl") {
    require_cap(a.n, 12, "kkl");
    for (int i = 0; i < a.trials; ++i) {
      Rng r = root.split(4, i);
      SignedFunction f = draw_signed(a.n, r);
      BoundCheck c = check_kkl_bound(f, a.delta);
      json params = base;
      params["case"] = i;
      params["n"] = a.n;
      params["delta"] = a.delta;
      emit_record(name, params, c.lhs, c.rhs, c.holds);
    }
    return 0;
  }
  if (name == "chain") {
    require_cap(a.n, 16, "chain");
    if (a.m < 1) throw ConfigError("m must be positive");
    for (int i = 0; i < a.trials; ++i) {
      Rng r = root.split(5, i);
      int t = a.t >= 0 ? a.t : a.n - 2;
      if (t > a.n) throw ConfigError("support exponent t must be at most n");
      HypercubeDistribution f = draw_flat(a.n, t, r);
      Rng hr = r.split(1, 0);
      HashFunction h = build_hash(a.n, a.m, bernoulli_rows(0.5), hr);
      std::vector<uint8_t> y(a.m);
      for (auto& b : y) b = r.next_bool(0.5) ? 1 : 0;
      ChainReport rep = check_conditioning_chain(f, h, y, a.eta);
      json params = base;
      params["case"] = i;
      params["n"] = a.n;
      params["m"] = a.m;
      params["t"] = t;
      params["eta"] = a.eta;
      params["applicable"] = rep.condition_holds;
      bool holds = !rep.condition_holds || (rep.sandwich_holds && rep.final_gap_holds);
      emit_record(name, params, rep.final_gap, rep.final_gap_bound, holds);
    }
    return 0;
  }
  if (name == "extraction") {
    require_cap(a.n, 24, "extraction");
    ExtractionParams params;
    params.n = a.n;
    params.m = a.m;
    params.eps = a.eps;
    params.trials = a.trials;
    int t = a.t >= 0 ? a.t : a.n;
    if (t > a.n) throw ConfigError("support exponent t must be at most n");
    std::vector<uint32_t> support;
    if (t == a.n) params.full_cube = true;
    else {
      Rng sr = root.split(6, 0);
      support = draw_support(a.n, t, sr);
    }
    if (a.k > 0) {
      params.family = HashFamily::fixed_k;
      params.k = a.k;
      params.zeta = a.zeta;
    } else {
      params.family = HashFamily::bernoulli;
      params.p = a.p;
    }
    ExtractionResult r = extraction_estimate(support, params, root.split(7, 0));
    json jp = base;
    jp["n"] = a.n;
    jp["m"] = a.m;
    jp["t"] = t;
    jp["eps"] = a.eps;
    jp["trials"] = a.trials;
    jp["family"] = a.k > 0 ? "fixed-k" : "bernoulli";
    if (a.k > 0) {
      jp["k"] = a.k;
      jp["zeta"] = a.zeta;
    } else
      jp["p"] = a.p;
    jp["applicable"] = r.analytic_applicable;
    jp["std_error"] = r.std_error;
    if (!r.note.empty()) jp["note"] = r.note;
    bool holds =
        !r.analytic_applicable || r.empirical >= r.analytic_bound - 3.0 * r.std_error - 1e-12;
    emit_record(name, jp, r.empirical, r.analytic_applicable ? r.analytic_bound : 0.0, holds);
    return 0;
  }
  std::cerr << "error: unknown checker '" << a.checker
            << "'. Valid names: identity, contractive, a-bound, mu-p, fixed-k, kkl, "
               "chain, extraction\n";
  return 2;
}

// ---------------------------------------------------------------- selftest

int cmd_selftest(double scale, bool fast, std::optional<uint64_t> seed) {
  SelftestOptions opt;
  opt.scale = scale;
  opt.fast = fast;
  if (seed) opt.seed = *seed;
  int failures = run_acceptance(opt, std::cerr);
  std::cerr << (failures == 0 ? "selftest: all criteria passed\n"
                              : "selftest: " + std::to_string(failures) + " criteria failed\n");
  return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"hashing-based approximate model counter and bound-checking toolkit"};
  app.require_subcommand(1);

  CountArgs count_args;
  CLI::App* count = app.add_subcommand("count", "approximate the model count of a DIMACS CNF");
  count->add_option("input", count_args.input, "input file, or - for stdin");
  count->add_option("--mode", count_args.mode, "bernoulli | fixed-k | hybrid")
      ->capture_default_str();
  count->add_option("--k", count_args.k, "row width budget (0 = derive from n)")
      ->capture_default_str();
  count->add_option("--delta", count_args.delta, "hybrid cap exponent, cap = floor(2^(delta n))")
      ->capture_default_str();
  count->add_option("--reps-multiplier", count_args.reps_multiplier,
                    "scales trials and threshold together")
      ->capture_default_str();
  count->add_option("--workers", count_args.workers, "parallel trial threads")
      ->capture_default_str();
  count->add_option("--seed", count_args.seed, "master seed (default: fresh entropy, echoed)");
  count->add_option("--solver", count_args.solver,
                    "internal, or a path to a DIMACS solver (env XCT_SOLVER)")
      ->capture_default_str();
  count->add_option("--timeout", count_args.timeout, "external solver timeout, seconds")
      ->capture_default_str();

  std::string exact_input = "-";
  int exact_budget = 26;
  CLI::App* exact = app.add_subcommand("exact", "exact model count by enumeration");
  exact->add_option("input", exact_input, "input file, or - for stdin");
  exact->add_option("--budget-bits", exact_budget, "refuse formulas with more variables")
      ->capture_default_str();

  EncodeArgs encode_args;
  CLI::App* encode =
      app.add_subcommand("encode", "conjoin a sampled parity hash onto a DIMACS CNF");
  encode->add_option("input", encode_args.input, "input file, or - for stdin");
  encode->add_option("--m", encode_args.m, "number of parity rows")->capture_default_str();
  encode->add_option("--family", encode_args.family, "bernoulli | fixed-k")
      ->capture_default_str();
  encode->add_option("--k", encode_args.k, "width budget / row width (0 = derive)")
      ->capture_default_str();
  encode->add_option("--seed", encode_args.seed, "master seed (default: fresh entropy, echoed)");

  AnalyzeArgs an;
  CLI::App* analyze =
      app.add_subcommand("analyze", "numeric bound checkers, one JSON object per line");
  analyze->add_option("--checker", an.checker,
                      "identity | contractive | a-bound | mu-p | fixed-k | kkl | chain | "
                      "extraction")
      ->required();
  analyze->add_option("--n", an.n, "dimension")->capture_default_str();
  analyze->add_option("--trials", an.trials, "instances (or samples for extraction)")
      ->capture_default_str();
  analyze->add_option("--seed", an.seed, "master seed (default: fresh entropy, echoed)");
  analyze->add_option("--p", an.p, "row inclusion bias")->capture_default_str();
  analyze->add_option("--alpha", an.alpha, "norm exponent parameter")->capture_default_str();
  analyze->add_option("--delta", an.delta, "spectral weight for kkl")->capture_default_str();
  analyze->add_option("--zeta", an.zeta, "fixed-k bound exponent")->capture_default_str();
  analyze->add_option("--eta", an.eta, "chain balance tolerance")->capture_default_str();
  analyze->add_option("--eps", an.eps, "extraction accuracy")->capture_default_str();
  analyze->add_option("--k", an.k, "row width (fixed-k and extraction)")->capture_default_str();
  analyze->add_option("--m", an.m, "rows (chain and extraction)")->capture_default_str();
  analyze->add_option("--t", an.t, "support-size exponent (-1 = per-checker default)")
      ->capture_default_str();
  analyze->add_option("--grid", an.grid, "a-bound grid, e.g. 20x20")->capture_default_str();

  double st_scale = 0.25;
  bool st_fast = false;
  std::optional<uint64_t> st_seed;
  CLI::App* selftest = app.add_subcommand("selftest", "run the acceptance criteria");
  selftest->add_option("--scale", st_scale, "case-count multiplier (1.0 = full acceptance run)")
      ->capture_default_str();
  selftest->add_flag("--fast", st_fast, "quick subset, about half a minute");
  selftest->add_option("--seed", st_seed, "suite seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(count)) return cmd_count(count_args);
    if (app.got_subcommand(exact)) return cmd_exact(exact_input, exact_budget);
    if (app.got_subcommand(encode)) return cmd_encode(encode_args);
    if (app.got_subcommand(analyze)) return cmd_analyze(an);
    if (app.got_subcommand(selftest)) return cmd_selftest(st_scale, st_fast, st_seed);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return 4;
  } catch (const CountingError& e) {
    std::cerr << "oracle failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 70;
  }
  return 2;
}
