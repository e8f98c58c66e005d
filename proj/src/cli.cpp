#include "qexcl/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qexcl/errors.hpp"
#include "qexcl/problem_io.hpp"
#include "qexcl/radii.hpp"
#include "qexcl/verify.hpp"

namespace qexcl {

namespace {

using nlohmann::json;

struct Output {
  std::string format = "json";
  bool quiet = false;
};

/// Usage problems detected after CLI11 parsing (wrong file kind, bad index, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  std::ostringstream os;
  if (v.is_number_float()) {
    os << std::setprecision(17) << v.get<double>();
    return os.str();
  }
  return v.dump();
}

/// Prints a flat result object. --quiet keeps only `primary`.
void emit(std::ostream& out, const Output& opt, const json& result, const std::string& primary = "value") {
  if (opt.quiet) {
    out << scalar_text(result.at(primary)) << '\n';
    return;
  }
  if (opt.format == "json") {
    out << result.dump(2) << '\n';
    return;
  }
  std::string header, row;
  for (auto it = result.begin(); it != result.end(); ++it) {
    if (it.value().is_structured()) continue;
    if (!header.empty()) {
      header += ',';
      row += ',';
    }
    header += it.key();
    row += scalar_text(it.value());
  }
  out << header << '\n' << row << '\n';
}

json weights_json(const std::optional<SimplexWeights>& w) {
  return w ? json(w->values()) : json(nullptr);
}

json radius_json(const RadiusResult& r) {
  return {{"value", json_number(r.value.value())},
          {"lower_bound", json_number(r.lower_bound)},
          {"gap", json_number(r.gap)},
          {"stalled", r.stalled},
          {"weights", weights_json(r.weights)},
          {"center", r.center ? matrix_to_json(r.center->matrix()) : json(nullptr)}};
}

const StateEnsemble& need_states(const Ensemble& e, const std::string& command) {
  if (const auto* s = std::get_if<StateEnsemble>(&e)) return *s;
  throw UsageError(command + ": expected a \"states\" problem file");
}

const ChannelEnsemble& need_channels(const Ensemble& e, const std::string& command) {
  if (const auto* c = std::get_if<ChannelEnsemble>(&e)) return *c;
  throw UsageError(command + ": expected a \"channels\" problem file");
}

json divergence_command(const Ensemble& problem, const std::string& kind, double alpha, std::size_t first,
                        std::size_t second) {
  json result{{"command", "divergence"}, {"kind", kind}, {"alpha", alpha}, {"first", first}, {"second", second}};
  ExtendedReal value;
  if (const auto* s = std::get_if<StateEnsemble>(&problem)) {
    if (first >= s->size() || second >= s->size()) throw UsageError("divergence: --first/--second out of range");
    const DensityOperator& rho = s->states()[first];
    const HermitianOperator& sigma = s->states()[second].op();
    if (kind == "umegaki") {
      value = umegaki(rho, sigma);
    } else if (kind == "sandwiched") {
      value = sandwiched(rho, sigma, alpha);
    } else if (kind == "extended") {
      value = sandwiched_extended(TraceOneHermitian(rho), sigma, alpha);
    } else if (kind == "geometric") {
      value = geometric(rho, sigma, alpha);
    } else {
      value = belavkin_staszewski(rho, sigma);
    }
  } else {
    const auto& c = std::get<ChannelEnsemble>(problem);
    if (first >= c.size() || second >= c.size()) throw UsageError("divergence: --first/--second out of range");
    if (kind == "geometric") {
      value = geometric_channel_divergence(c.channels()[first], c.channels()[second], alpha);
    } else if (kind == "bs") {
      value = bs_channel_divergence(c.channels()[first], c.channels()[second]);
    } else {
      throw UsageError("divergence: channel files support --kind geometric|bs");
    }
  }
  result["value"] = json_number(value.value());
  return result;
}

json pexcl_command(const Ensemble& problem, double gap_tol, int restarts, std::uint64_t seed) {
  if (const auto* s = std::get_if<StateEnsemble>(&problem)) {
    const ExclusionSolution sol = min_error_exclusion(*s, gap_tol);
    json effects = json::array();
    for (const auto& e : sol.povm.effects()) effects.push_back(matrix_to_json(e.matrix()));
    return {{"command", "pexcl"},        {"value", sol.value},         {"duality_gap", sol.duality_gap},
            {"stalled", sol.stalled},    {"iterations", sol.iterations}, {"povm", effects},
            {"dual_certificate", matrix_to_json(sol.dual_certificate.matrix())}};
  }
  const ChannelExclusionResult res = channel_exclusion_oneshot(std::get<ChannelEnsemble>(problem), restarts, seed);
  json effects = json::array();
  for (const auto& e : res.povm.effects()) effects.push_back(matrix_to_json(e.matrix()));
  json input = json::array();
  for (Index i = 0; i < res.input.size(); ++i) input.push_back(json::array({res.input(i).real(), res.input(i).imag()}));
  return {{"command", "pexcl"}, {"value", res.value},   {"restarts_used", res.restarts_used},
          {"note", res.note},   {"input", input},       {"povm", effects}};
}

json exponent_command(const StateEnsemble& ensemble, int n_max, double gap_tol) {
  json entries = json::array();
  for (const auto& e : empirical_exponent(ensemble, n_max, gap_tol))
    entries.push_back({{"n", e.n}, {"error", e.error}, {"exponent", json_number(e.exponent.value())}});
  json result{{"command", "exponent"}, {"n_max", n_max}, {"entries", entries}};
  result["value"] = entries.back()["exponent"];
  return result;
}

void write_report_file(const VerificationReport& report, const Output& opt, const std::string& body,
                       std::uint64_t seed) {
  const char* dir = std::getenv("REPORT_DIR");
  if (!dir || !*dir) return;
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) /
                    (report.suite + "-seed" + std::to_string(seed) + (opt.format == "csv" ? ".csv" : ".json"));
  std::ofstream file(path);
  if (!file) throw Error("cannot write report to " + path.string());
  file << body;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum hypothesis exclusion: error probabilities, divergences and converse bounds", "qexcl"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kToolVersion));

  Output opt;
  app.add_option("--out", opt.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--quiet", opt.quiet, "Print only the headline number");

  std::function<int()> action;
  std::string file;

  auto* div = app.add_subcommand("divergence", "Divergence between two entries of a problem file");
  std::string div_kind = "umegaki";
  double div_alpha = 2.0;
  std::size_t first = 0, second = 1;
  div->add_option("--file", file, "Problem file")->required();
  div->add_option("--kind", div_kind)->check(CLI::IsMember({"umegaki", "sandwiched", "extended", "geometric", "bs"}));
  div->add_option("--alpha", div_alpha);
  div->add_option("--first", first, "Index of the first argument");
  div->add_option("--second", second, "Index of the second argument");
  div->callback([&] {
    action = [&] { emit(out, opt, divergence_command(parse_problem(file), div_kind, div_alpha, first, second)); return 0; };
  });

  auto* pexcl = app.add_subcommand("pexcl", "Optimal one-shot exclusion error");
  double gap_tol = 1e-7;
  int restarts = 8;
  std::uint64_t seed = 0;
  pexcl->add_option("--file", file)->required();
  pexcl->add_option("--gap-tol", gap_tol);
  pexcl->add_option("--restarts", restarts, "See-saw restarts (channel files)");
  pexcl->add_option("--seed", seed);
  pexcl->callback([&] {
    action = [&] { emit(out, opt, pexcl_command(parse_problem(file), gap_tol, restarts, seed)); return 0; };
  });

  auto* exponent = app.add_subcommand("exponent", "Empirical n-copy exclusion exponents");
  int n_max = 3;
  exponent->add_option("--file", file)->required();
  exponent->add_option("--n-max", n_max)->check(CLI::Range(1, 16));
  exponent->add_option("--gap-tol", gap_tol);
  exponent->callback([&] {
    action = [&] {
      const Ensemble problem = parse_problem(file);
      emit(out, opt, exponent_command(need_states(problem, "exponent"), n_max, gap_tol));
      return 0;
    };
  });

  auto* chernoff = app.add_subcommand("chernoff", "Multivariate log-Euclidean Chernoff quantity");
  chernoff->add_option("--file", file)->required();
  chernoff->callback([&] {
    action = [&] {
      const Ensemble problem = parse_problem(file);
      const auto& e = need_states(problem, "chernoff");
      const RadiusResult r = log_euclidean_chernoff(e.states());
      json result = radius_json(r);
      result["command"] = "chernoff";
      result["schedule_values"] = json::array();
      for (double v : r.schedule_values) result["schedule_values"].push_back(json_number(v));
      emit(out, opt, result);
      return 0;
    };
  });

  auto* radius = app.add_subcommand("radius", "Divergence radius of the states in a problem file");
  std::string radius_kind = "umegaki";
  double radius_alpha = 2.0;
  double radius_tol = 1e-7;
  radius->add_option("--file", file)->required();
  radius->add_option("--kind", radius_kind)->check(CLI::IsMember({"umegaki", "sandwiched", "bs"}));
  radius->add_option("--alpha", radius_alpha);
  radius->add_option("--tol", radius_tol);
  radius->callback([&] {
    action = [&] {
      const Ensemble problem = parse_problem(file);
      const auto& e = need_states(problem, "radius");
      json result;
      if (radius_kind == "umegaki") {
        result = radius_json(umegaki_radius(e.states(), radius_tol));
      } else if (radius_kind == "sandwiched") {
        result = radius_json(sandwiched_radius_affine(e.states(), radius_alpha, radius_tol));
        result["alpha"] = radius_alpha;
        result["converse_bound"] = json_number(oneshot_converse_bound(e, radius_alpha).value());
      } else {
        result = radius_json(bs_state_radius(e.states()));
      }
      result["command"] = "radius";
      result["kind"] = radius_kind;
      emit(out, opt, result);
      return 0;
    };
  });

  auto* bound = app.add_subcommand("channel-bound", "Belavkin-Staszewski channel radius (exponent converse)");
  int bound_restarts = 3;
  double bound_tol = 1e-7;
  bound->add_option("--file", file)->required();
  bound->add_option("--restarts", bound_restarts)->check(CLI::PositiveNumber);
  bound->add_option("--seed", seed);
  bound->add_option("--tol", bound_tol);
  bound->callback([&] {
    action = [&] {
      const Ensemble problem = parse_problem(file);
      const auto& e = need_channels(problem, "channel-bound");
      const ChannelRadiusResult r = channel_bs_radius(e.channels(), bound_tol, bound_restarts, seed);
      emit(out, opt,
           json{{"command", "channel-bound"},
            {"value", json_number(r.value.value())},
            {"restarts_used", r.restarts_used},
            {"stalled", r.stalled},
            {"weights", weights_json(r.weights)},
            {"choi", r.channel ? matrix_to_json(choi_of(*r.channel).op.matrix()) : json(nullptr)}});
      return 0;
    };
  });

  auto* verify = app.add_subcommand("verify", "Randomized inequality sweeps with a report");
  std::string suite = "oneshot";
  VerifyConfig config;
  std::optional<double> verify_tol;
  verify->add_option("--suite", suite)->check(CLI::IsMember({"oneshot", "asymptotic", "channel"}));
  verify->add_option("--trials", config.trials)->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", config.seed);
  verify->add_option("--tol", verify_tol, "Default 1e-6 (oneshot), 1e-5 (asymptotic), 1e-4 (channel)");
  verify->add_option("--threads", config.threads)->check(CLI::PositiveNumber);
  verify->add_option("--alpha", config.alpha_grid, "Alpha grid (oneshot)");
  verify->add_option("--n-max", config.n_max)->check(CLI::Range(1, 6));
  verify->add_option("--dim", config.dim)->check(CLI::Range(2, 4));
  verify->callback([&] {
    action = [&] {
      if (suite == "oneshot")
        for (double a : config.alpha_grid)
          if (!(a > 1.0)) throw UsageError("verify: every --alpha must exceed 1");
      config.tol = verify_tol.value_or(suite == "oneshot" ? 1e-6 : suite == "asymptotic" ? 1e-5 : 1e-4);
      VerificationReport report = suite == "oneshot"      ? verify_oneshot(config)
                                  : suite == "asymptotic" ? verify_asymptotic_state(config)
                                                          : verify_channel(config);
      report.timestamp = utc_timestamp();
      const std::string body = opt.format == "csv" ? report_csv(report) : report_json(report).dump(2) + "\n";
      write_report_file(report, opt, body, config.seed);
      if (opt.quiet) {
        out << "failures=" << report.failures << " hash=" << report_hash(report) << '\n';
      } else {
        out << body;
      }
      return report.failures == 0 ? 0 : 1;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    return action();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace qexcl
