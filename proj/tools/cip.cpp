// cip: command-line front end.
//
//   cip <bounds|region|compare|verify|qubit|lattice> [--input FILE] [flags]
//
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "cip/bounds.hpp"
#include "cip/error.hpp"
#include "cip/instance_io.hpp"
#include "cip/measures.hpp"
#include "cip/parallel.hpp"
#include "cip/regions.hpp"

namespace {

using nlohmann::json;

struct RunConfig {
  std::uint64_t seed = 42;
  int grid = 200;
  double tol_gap = 1e-8;
  double tol_feas = 1e-8;
  int parallel = 1;
  std::string out;
  std::string input;
  int post = 0;

  // region
  std::string f = "renyi:1";
  std::vector<std::string> g;
  bool force_sdp = false;
  bool additive_constant = false;
  bool swapped = false;

  // bounds
  bool certificates = false;
  std::string dump_sdp;

  // compare
  bool with_spectrum = false;

  // verify
  int samples = 1000;

  // qubit
  double lambda = 0.25;
  std::string theta = "pi/3";

  // lattice
  std::string op;
  std::string x;
  std::string y;
};

cip::BoundOptions bound_options(const RunConfig& cfg) {
  cip::BoundOptions opt;
  opt.sdp.tol_gap = cfg.tol_gap;
  opt.sdp.tol_feas = cfg.tol_feas;
  opt.parallel = cfg.parallel;
  opt.keep_certificates = cfg.certificates;
  return opt;
}

cip::RegionOptions region_options(const RunConfig& cfg) {
  cip::RegionOptions opt;
  opt.bounds = bound_options(cfg);
  opt.force_sdp = cfg.force_sdp;
  opt.parallel = cfg.parallel;
  return opt;
}

cip::Instance require_instance(const RunConfig& cfg) {
  if (cfg.input.empty()) throw cip::InputError("--input FILE is required for this command");
  return cip::load_instance(cfg.input);
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw cip::InputError("cannot write '" + cfg.out + "'");
  f << text;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw cip::InputError(flag + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw cip::InputError(flag + " must be a comma-separated list of numbers");
  return out;
}

// Accepts a plain number or a multiple of pi such as "pi/3", "2*pi/5", "pi".
double parse_angle(const std::string& text) {
  const auto pos = text.find("pi");
  if (pos == std::string::npos) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) throw cip::InputError("--theta: cannot parse '" + text + "'");
    return v;
  }
  double factor = 1.0;
  std::string head = text.substr(0, pos);
  if (!head.empty()) {
    if (head.back() != '*') throw cip::InputError("--theta: cannot parse '" + text + "'");
    factor = parse_list(head.substr(0, head.size() - 1), "--theta").at(0);
  }
  double divisor = 1.0;
  std::string tail = text.substr(pos + 2);
  if (!tail.empty()) {
    if (tail.front() != '/') throw cip::InputError("--theta: cannot parse '" + text + "'");
    divisor = parse_list(tail.substr(1), "--theta").at(0);
  }
  return factor * std::numbers::pi / divisor;
}

std::vector<cip::MeasureSpec> post_measures(const RunConfig& cfg, std::size_t count) {
  std::vector<std::string> names = cfg.g.empty() ? std::vector<std::string>{"renyi:1"} : cfg.g;
  if (names.size() == 1) names.resize(count, names.front());
  if (names.size() != count) {
    throw cip::InputError("--g must be given once or once per post-measurement (" +
                          std::to_string(count) + ")");
  }
  std::vector<cip::MeasureSpec> out;
  for (const auto& n : names) out.push_back(cip::MeasureSpec::parse(n));
  return out;
}

// ---------------------------------------------------------------------------

void cmd_bounds(const RunConfig& cfg) {
  const auto inst = require_instance(cfg);
  const auto& p = inst.require_p();
  const auto& n = inst.post(static_cast<std::size_t>(cfg.post));

  if (!cfg.dump_sdp.empty()) {
    const cip::FeasibleSetSpec spec(inst.m, p);
    const auto red = cip::reduce_support(spec);
    json problems = json::array();
    for (int k = 1; k < inst.dimension; ++k) {
      for (const auto& s : cip::sdp::k_subsets(inst.dimension, k)) {
        json subset = json::array();
        for (int i : s) subset.push_back(i + 1);
        problems.push_back(
            {{"kind", "max_expectation"},
             {"k", k},
             {"subset", subset},
             {"problem",
              cip::sdp::to_json(cip::sdp::build_max_expectation(red, cip::projector_partial_sum(n, s)))}});
      }
      problems.push_back(
          {{"kind", "min_max_gamma"},
           {"k", k},
           {"problem", cip::sdp::to_json(cip::sdp::build_min_max_gamma(
                           red, n, cip::sdp::k_subsets(inst.dimension, k)))}});
    }
    std::ofstream f(cfg.dump_sdp, std::ios::binary);
    if (!f) throw cip::InputError("cannot write '" + cfg.dump_sdp + "'");
    f << cip::serialize({{"problems", problems}});
  }

  const auto b = cip::bounds(inst.m, p, n, bound_options(cfg));
  json out = {{"command", "bounds"}, {"instance", inst.name}, {"post", n.label()}};
  out.update(cip::to_json(b));
  emit(cfg, cip::serialize(out));
}

void cmd_region(const RunConfig& cfg) {
  if (cfg.grid < 1) throw cip::InputError("--grid must be at least 1");
  const auto inst = require_instance(cfg);
  const auto f = cip::MeasureSpec::parse(cfg.f);
  const cip::SimplexGrid grid{inst.dimension, cfg.grid, true};
  const auto opt = region_options(cfg);

  if (cfg.additive_constant) {
    const auto gs = post_measures(cfg, inst.posts.size());
    const auto best = cip::multi_additive_constant(inst.m, inst.posts, f, gs, grid, opt);
    json gnames = json::array();
    for (const auto& g : gs) gnames.push_back(g.to_string());
    json posts = json::array();
    for (const auto& b : inst.posts) posts.push_back(b.label());
    emit(cfg, cip::serialize({{"command", "region"},
                              {"instance", inst.name},
                              {"f", f.to_string()},
                              {"g", gnames},
                              {"posts", posts},
                              {"grid", cfg.grid},
                              {"constant", cip::round12(best.value)},
                              {"grid_constant", cip::round12(best.grid_value)},
                              {"witness_p", cip::to_json_rounded(best.argument)}}));
    return;
  }

  const auto g = post_measures(cfg, 1).front();
  const auto& n = inst.post(static_cast<std::size_t>(cfg.post));
  const auto samples = cfg.swapped ? cip::sweep_region(n, inst.m, g, f, grid, opt)
                                   : cip::sweep_region(inst.m, n, f, g, grid, opt);
  std::size_t failures = 0;
  for (const auto& s : samples) {
    if (!s.ok) {
      ++failures;
      std::cerr << "warning: sweep point failed: " << s.error << "\n";
    }
  }
  if (failures == samples.size()) throw cip::NumericalError("every sweep point failed");
  std::ostringstream csv;
  cip::write_region_csv(csv, samples, inst.dimension);
  emit(cfg, csv.str());
}

void cmd_compare(const RunConfig& cfg) {
  const auto inst = require_instance(cfg);
  const auto& p = inst.require_p();
  const auto& n = inst.post(static_cast<std::size_t>(cfg.post));
  std::optional<std::vector<double>> spectrum;
  if (cfg.with_spectrum) {
    spectrum = inst.known_spectrum();
    if (!spectrum) {
      throw cip::InputError("--with-spectrum needs the field 'spectrum' or 'rho' in the instance");
    }
  }

  const auto b = cip::bounds(inst.m, p, n, bound_options(cfg));
  const auto base = spectrum ? cip::baseline_bounds(inst.m, n, std::span<const double>(*spectrum))
                             : cip::baseline_bounds(inst.m, n);
  const auto dim = static_cast<std::size_t>(inst.dimension);
  const auto u = cip::ProbVector::uniform(dim);
  const auto l = cip::ProbVector::point_mass(dim);

  const auto uu = cip::direct_sum(u, u);
  const auto pr = cip::direct_sum(p, b.r);
  const auto pt = cip::direct_sum(p, b.t);
  const auto ll = cip::direct_sum(l, l);
  const auto ux = cip::direct_product(u, u);
  const auto px_r = cip::direct_product(p, b.r);
  const auto px_t = cip::direct_product(p, b.t);
  const auto lx = cip::direct_product(l, l);

  json chain = json::array();
  auto verdict = [&](const char* lhs, const char* rhs, std::span<const double> a,
                     std::span<const double> c) {
    chain.push_back({{"lhs", lhs}, {"rhs", rhs}, {"holds", cip::majorized_by(a, c, 1e-8)}});
  };
  verdict("u+u", "p+r", uu, pr);
  verdict("p+r", "p+t", pr, pt);
  verdict("p+t", "w_plus", pt, base.w_plus);
  verdict("w_plus", "l+l", base.w_plus, ll);
  if (base.w_plus_rho) {
    verdict("p+t", "w_plus_rho", pt, *base.w_plus_rho);
    verdict("w_plus_rho", "w_plus", *base.w_plus_rho, base.w_plus);
  }
  verdict("uxu", "pxr", ux.entries(), px_r.entries());
  verdict("pxr", "pxt", px_r.entries(), px_t.entries());
  verdict("pxt", "w_times", px_t.entries(), base.w_times.entries());
  verdict("w_times", "lxl", base.w_times.entries(), lx.entries());

  bool all = true;
  for (const auto& c : chain) all = all && c["holds"].get<bool>();

  json out = {{"command", "compare"},
              {"instance", inst.name},
              {"p", cip::to_json_rounded(p)},
              {"r", cip::to_json_rounded(b.r)},
              {"t", cip::to_json_rounded(b.t)},
              {"mu_constant", cip::round12(base.mu_constant)},
              {"joint_norms", cip::to_json_rounded(cip::joint_norms(inst.m, n))},
              {"w_plus", cip::to_json_rounded(base.w_plus)},
              {"w_times", cip::to_json_rounded(base.w_times)},
              {"p_plus_r", cip::to_json_rounded(pr)},
              {"p_plus_t", cip::to_json_rounded(pt)},
              {"p_times_t", cip::to_json_rounded(px_t)},
              {"chain", chain},
              {"all_hold", all}};
  if (base.w_plus_rho) out["w_plus_rho"] = cip::to_json_rounded(*base.w_plus_rho);
  emit(cfg, cip::serialize(out));
}

void cmd_verify(const RunConfig& cfg) {
  if (cfg.samples < 1) throw cip::InputError("--samples must be at least 1");
  const auto inst = require_instance(cfg);
  const auto& p = inst.require_p();
  const auto& n = inst.post(static_cast<std::size_t>(cfg.post));
  const auto b = cip::bounds(inst.m, p, n, bound_options(cfg));
  const cip::FeasibleSetSpec spec(inst.m, p);
  constexpr double kTol = 1e-8;

  const auto count = static_cast<std::size_t>(cfg.samples);
  std::vector<double> lower(count), upper(count);
  const auto cr = cip::cumulative(b.r).values;
  const auto ct = cip::cumulative(b.t).values;
  cip::parallel_for(count, cfg.parallel, [&](std::size_t i) {
    const auto rho = cip::sample_feasible_state(spec, cfg.seed + 0x9E3779B97F4A7C15ULL * (i + 1));
    const auto cq = cip::cumulative(cip::born_probabilities(rho, n)).values;
    double lo = 1.0, hi = 1.0;
    // k = n is an equality of totals and carries no information.
    for (std::size_t k = 1; k + 1 < cq.size(); ++k) {
      lo = std::min(lo, cq[k] - cr[k]);
      hi = std::min(hi, ct[k] - cq[k]);
    }
    lower[i] = lo;
    upper[i] = hi;
  });

  int lower_violations = 0, upper_violations = 0, violations = 0;
  double worst_lower = 1.0, worst_upper = 1.0;
  for (std::size_t i = 0; i < count; ++i) {
    lower_violations += lower[i] < -kTol;
    upper_violations += upper[i] < -kTol;
    violations += lower[i] < -kTol || upper[i] < -kTol;
    worst_lower = std::min(worst_lower, lower[i]);
    worst_upper = std::min(worst_upper, upper[i]);
  }
  emit(cfg, cip::serialize({{"command", "verify"},
                            {"instance", inst.name},
                            {"seed", cfg.seed},
                            {"samples", cfg.samples},
                            {"tolerance", kTol},
                            {"r", cip::to_json_rounded(b.r)},
                            {"t", cip::to_json_rounded(b.t)},
                            {"violations", violations},
                            {"lower_violations", lower_violations},
                            {"upper_violations", upper_violations},
                            {"worst_lower_slack", cip::round12(worst_lower)},
                            {"worst_upper_slack", cip::round12(worst_upper)}}));
}

void cmd_qubit(const RunConfig& cfg) {
  const double theta = parse_angle(cfg.theta);
  const auto cf = cip::qubit_closed_form(cfg.lambda, theta);
  const auto m = cip::MeasurementBasis::computational(2);
  const auto n = cip::MeasurementBasis::qubit_rotation(theta);
  const cip::ProbVector p({cfg.lambda, 1.0 - cfg.lambda});
  const auto b = cip::bounds(m, p, n, bound_options(cfg));
  const double sdp_s1 = b.s_raw.front();
  const double sdp_r1 = b.r[0];
  emit(cfg, cip::serialize({{"command", "qubit"},
                            {"lambda", cip::round12(cfg.lambda)},
                            {"theta", cip::round12(theta)},
                            {"closed_form", {{"r1", cip::round12(cf.r1)}, {"s1", cip::round12(cf.s1)}}},
                            {"sdp", {{"r1", cip::round12(sdp_r1)}, {"s1", cip::round12(sdp_s1)}}},
                            {"abs_diff",
                             {{"r1", cip::round12(std::abs(cf.r1 - sdp_r1))},
                              {"s1", cip::round12(std::abs(cf.s1 - sdp_s1))}}},
                            {"solver", cip::to_json(b.stats)}}));
}

void cmd_lattice(const RunConfig& cfg) {
  if (cfg.op.empty()) throw cip::InputError("--op is required (meet, join, flatten, majorized_by)");
  if (cfg.x.empty()) throw cip::InputError("--x is required");
  const auto xv = parse_list(cfg.x, "--x");
  json out = {{"command", "lattice"}, {"op", cfg.op}, {"x", cip::to_json_rounded(xv)}};
  if (cfg.op == "flatten") {
    out["result"] = cip::to_json_rounded(cip::flatten(xv));
  } else if (cfg.op == "cumulative") {
    out["result"] = cip::to_json_rounded(cip::cumulative(cip::ProbVector(xv)).values);
  } else {
    if (cfg.y.empty()) throw cip::InputError("--y is required for --op " + cfg.op);
    const auto yv = parse_list(cfg.y, "--y");
    if (xv.size() != yv.size()) throw cip::InputError("--x and --y differ in length");
    const cip::ProbVector x(xv), y(yv);
    out["y"] = cip::to_json_rounded(yv);
    if (cfg.op == "meet") {
      out["result"] = cip::to_json_rounded(cip::meet(x, y));
    } else if (cfg.op == "join") {
      out["result"] = cip::to_json_rounded(cip::join(x, y));
    } else if (cfg.op == "majorized_by") {
      out["result"] = cip::majorized_by(x, y);
    } else {
      throw cip::InputError("unknown --op '" + cfg.op + "'");
    }
  }
  emit(cfg, cip::serialize(out));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Majorization bounds on post-measurement statistics"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;

  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--grid", cfg.grid, "Simplex grid resolution")->capture_default_str();
  app.add_option("--tol-gap", cfg.tol_gap, "Relative duality-gap tolerance")->capture_default_str();
  app.add_option("--tol-feas", cfg.tol_feas, "Relative feasibility tolerance")->capture_default_str();
  app.add_option("--parallel", cfg.parallel, "Worker threads")->capture_default_str();
  app.add_option("--out", cfg.out, "Output file (default stdout)");
  app.add_option("--input", cfg.input, "Instance JSON file");
  app.add_option("--post", cfg.post, "Index into N_list")->capture_default_str();

  auto* bounds = app.add_subcommand("bounds", "Lower bound r, raw upper s and optimal upper t");
  bounds->add_flag("--certificates", cfg.certificates, "Include optimizer states");
  bounds->add_option("--dump-sdp", cfg.dump_sdp, "Write the SDPs as JSON to this file");

  auto* region = app.add_subcommand("region", "Sweep p over the simplex (CSV)");
  region->add_option("--f", cfg.f, "Measure on p")->capture_default_str();
  region->add_option("--g", cfg.g, "Measure on q (repeat once per post-measurement)");
  region->add_flag("--force-sdp", cfg.force_sdp, "Use the SDP path for qubits");
  region->add_flag("--additive-constant", cfg.additive_constant,
                   "Report min f(p) + sum g_i(t_i) over all post-measurements (JSON)");
  region->add_flag("--swapped", cfg.swapped, "Sweep q with the roles of M and N exchanged");

  auto* compare = app.add_subcommand("compare", "Compare with the baseline bounds (JSON)");
  compare->add_flag("--with-spectrum", cfg.with_spectrum, "Include the spectrum variant");

  auto* verify = app.add_subcommand("verify", "Monte-Carlo check of r < q < t (JSON)");
  verify->add_option("--samples", cfg.samples, "Feasible states to sample")->capture_default_str();

  auto* qubit = app.add_subcommand("qubit", "Qubit closed form against the SDPs (JSON)");
  qubit->add_option("--lambda", cfg.lambda, "p = (lambda, 1 - lambda)")->capture_default_str();
  qubit->add_option("--theta", cfg.theta, "Rotation angle, number or e.g. pi/3")->capture_default_str();

  auto* lattice = app.add_subcommand("lattice", "Lattice operations on raw vectors (JSON)");
  lattice->add_option("--op", cfg.op, "meet, join, flatten, cumulative or majorized_by");
  lattice->add_option("--x", cfg.x, "Comma-separated vector");
  lattice->add_option("--y", cfg.y, "Comma-separated vector");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cfg.parallel < 1) throw cip::InputError("--parallel must be at least 1");
    if (*bounds) cmd_bounds(cfg);
    if (*region) cmd_region(cfg);
    if (*compare) cmd_compare(cfg);
    if (*verify) cmd_verify(cfg);
    if (*qubit) cmd_qubit(cfg);
    if (*lattice) cmd_lattice(cfg);
  } catch (const cip::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
