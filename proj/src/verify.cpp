#include "qexcl/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ctime>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include "qexcl/exclusion.hpp"
#include "qexcl/radii.hpp"
#include "qexcl/random.hpp"

namespace qexcl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using TrialFn = std::function<std::vector<TrialRecord>(int trial, std::uint64_t seed)>;

/// Runs trials on a small pool; records are gathered in trial order so the
/// report does not depend on scheduling.
std::vector<TrialRecord> run_trials(const VerifyConfig& config, const TrialFn& fn) {
  const int trials = std::max(config.trials, 0);
  std::vector<std::vector<TrialRecord>> per_trial(static_cast<std::size_t>(trials));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < trials; t = next++) {
      const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(t));
      try {
        per_trial[static_cast<std::size_t>(t)] = fn(t, seed);
      } catch (const std::exception& e) {
        per_trial[static_cast<std::size_t>(t)] = {
            TrialRecord{t, seed, "", "error", 0.0, 0.0, -kInf, false, e.what()}};
      }
    }
  };
  const int threads = std::clamp(config.threads, 1, std::max(trials, 1));
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<TrialRecord> records;
  for (auto& chunk : per_trial)
    for (auto& rec : chunk) records.push_back(std::move(rec));
  return records;
}

TrialRecord make_record(int trial, std::uint64_t seed, std::string instance, std::string check, double lhs, double rhs,
                        double tol, std::string note = "") {
  double margin;
  if (rhs == kInf) {
    margin = kInf;
    if (note.empty()) note = "rhs infinite: auto-pass";
  } else if (lhs == kInf) {
    margin = -kInf;
  } else {
    margin = rhs - lhs;
  }
  return {trial, seed, std::move(instance), std::move(check), lhs, rhs, margin, margin >= -tol, std::move(note)};
}

std::string describe(const StateEnsemble& e) {
  std::ostringstream os;
  os << "r=" << e.size() << " d=" << e.dim() << " pmin=" << std::setprecision(6) << e.min_prior();
  return os.str();
}

std::string alpha_label(double alpha) {
  std::ostringstream os;
  os << "alpha=" << alpha;
  return os.str();
}

double neg_log(double p) { return p <= kErrorFloor ? kInf : -std::log(p); }

bool all_identical(const StateEnsemble& e) {
  for (const auto& rho : e.states())
    if ((rho.matrix() - e.states().front().matrix()).cwiseAbs().maxCoeff() > 1e-12) return false;
  return true;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

nlohmann::json base_document(const VerificationReport& report) {
  nlohmann::json doc;
  doc["suite"] = report.suite;
  doc["tool_version"] = report.tool_version;
  doc["config"] = report.config;
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : report.records) {
    records.push_back({{"trial", r.trial},
                       {"seed", r.seed},
                       {"instance", r.instance},
                       {"check", r.check},
                       {"lhs", json_number(r.lhs)},
                       {"rhs", json_number(r.rhs)},
                       {"margin", json_number(r.margin)},
                       {"pass", r.pass},
                       {"note", r.note}});
  }
  doc["records"] = std::move(records);
  doc["aggregate"] = {{"trials", report.config.value("trials", 0)},
                      {"records", report.records.size()},
                      {"failures", report.failures},
                      {"min_margin", json_number(report.min_margin)}};
  return doc;
}

std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::json common_config(const std::string& suite, const VerifyConfig& config) {
  return {{"suite", suite}, {"trials", config.trials}, {"seed", config.seed}, {"tol", config.tol}, {"dim", config.dim}};
}

}  // namespace

nlohmann::json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

void finalize(VerificationReport& report, double tol) {
  report.failures = 0;
  report.min_margin = kInf;
  for (auto& r : report.records) {
    if (r.check != "error") r.pass = r.margin >= -tol;
    if (!r.pass) ++report.failures;
    report.min_margin = std::min(report.min_margin, r.margin);
  }
}

VerificationReport verify_oneshot(const VerifyConfig& config) {
  VerificationReport report;
  report.suite = "oneshot";
  report.config = common_config(report.suite, config);
  report.config["alpha_grid"] = config.alpha_grid;
  report.records = run_trials(config, [&](int t, std::uint64_t seed) {
    const StateEnsemble e = random_ensemble(seed, 2 + t % 3, config.dim);
    const double lhs = neg_log(min_error_exclusion(e).value);
    std::vector<TrialRecord> out;
    for (double alpha : config.alpha_grid)
      out.push_back(make_record(t, seed, describe(e), alpha_label(alpha), lhs,
                                oneshot_converse_bound(e, alpha).value(), config.tol));
    return out;
  });
  finalize(report, config.tol);
  return report;
}

VerificationReport verify_asymptotic_state(const VerifyConfig& config) {
  VerificationReport report;
  report.suite = "asymptotic";
  report.config = common_config(report.suite, config);
  report.config["n_max"] = config.n_max;
  report.records = run_trials(config, [&](int t, std::uint64_t seed) {
    const StateEnsemble e = random_ensemble(seed, 3, config.dim);
    const double chernoff = log_euclidean_chernoff(e.states()).value.value();
    const bool exempt = all_identical(e);
    std::vector<TrialRecord> out;
    for (const auto& entry : empirical_exponent(e, config.n_max)) {
      double rhs = chernoff;
      std::string note;
      if (exempt) {
        rhs += std::log(1.0 / e.min_prior()) / entry.n;
        note = "EXEMPT: identical states, compared against C + (1/n) ln(1/p_min)";
      }
      out.push_back(make_record(t, seed, describe(e), "n=" + std::to_string(entry.n), entry.exponent.value(), rhs,
                                config.tol, note));
    }
    return out;
  });
  finalize(report, config.tol);
  return report;
}

VerificationReport verify_channel(const VerifyConfig& config) {
  VerificationReport report;
  report.suite = "channel";
  report.config = common_config(report.suite, config);
  report.records = run_trials(config, [&](int t, std::uint64_t seed) {
    const int r = 2 + t % 2;
    const Index d = config.dim;
    const ChannelEnsemble ens = random_channel_ensemble(seed, r, d);
    std::ostringstream summary;
    summary << "r=" << r << " d=" << d << " qubit channels";
    std::vector<TrialRecord> out;

    const ChannelRadiusResult radius = channel_bs_radius(ens.channels(), 1e-7, 2, seed);
    out.push_back(make_record(t, seed, summary.str(), "radius >= 0", 0.0, radius.value.value(), config.tol));

    const ChannelRadiusResult same = channel_bs_radius({ens.channels()[0], ens.channels()[0]}, 1e-7, 1, seed);
    out.push_back(make_record(t, seed, summary.str(), "identical pair radius = 0", std::abs(same.value.value()), 0.0,
                              config.tol));

    std::vector<DensityOperator> sigmas;
    std::vector<QuantumChannel> replacers;
    for (int x = 0; x < r; ++x) {
      Rng rng = make_rng(seed, 1000 + static_cast<std::uint64_t>(x));
      sigmas.push_back(random_state(rng, d));
      replacers.push_back(QuantumChannel::replacer(sigmas.back(), d));
    }
    const double channel_side = channel_bs_radius(replacers, 1e-7, 2, seed).value.value();
    const double state_side = bs_state_radius(sigmas).value.value();
    out.push_back(make_record(t, seed, summary.str(), "replacer radius = state radius",
                              std::abs(channel_side - state_side), 0.0, config.tol));

    const double channel_error = channel_exclusion_oneshot(ChannelEnsemble(ens.priors(), replacers), 2, seed).value;
    const double state_error = min_error_exclusion(StateEnsemble(ens.priors(), sigmas)).value;
    out.push_back(make_record(t, seed, summary.str(), "replacer exclusion = state exclusion",
                              std::abs(channel_error - state_error), 0.0, config.tol));
    return out;
  });
  finalize(report, config.tol);
  return report;
}

nlohmann::json report_json(const VerificationReport& report) {
  nlohmann::json doc = base_document(report);
  doc["timestamp"] = report.timestamp;
  doc["report_hash"] = report_hash(report);
  return doc;
}

std::string report_hash(const VerificationReport& report) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(base_document(report).dump());
  return os.str();
}

std::string report_csv(const VerificationReport& report) {
  std::ostringstream os;
  os << "trial,seed,instance,check,lhs,rhs,margin,pass,note\n";
  for (const auto& r : report.records)
    os << r.trial << ',' << r.seed << ',' << csv_field(r.instance) << ',' << csv_field(r.check) << ','
       << csv_number(r.lhs) << ',' << csv_number(r.rhs) << ',' << csv_number(r.margin) << ','
       << (r.pass ? "pass" : "fail") << ',' << csv_field(r.note) << '\n';
  return os.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace qexcl
