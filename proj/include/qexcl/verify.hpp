#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace qexcl {

inline constexpr const char* kToolVersion = "qexcl 0.1.0";

/// One checked inequality LHS <= RHS; margin = RHS - LHS (+inf when RHS is +inf).
struct TrialRecord {
  int trial;
  std::uint64_t seed;
  std::string instance;  // short instance summary
  std::string check;     // which inequality
  double lhs;
  double rhs;
  double margin;
  bool pass;
  std::string note;
};

struct VerificationReport {
  std::string suite;
  std::vector<TrialRecord> records;
  int failures = 0;
  double min_margin = 0.0;
  std::string tool_version = kToolVersion;
  nlohmann::json config = nlohmann::json::object();
  std::string timestamp;  // excluded from the hash
};

struct VerifyConfig {
  int trials = 20;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  std::vector<double> alpha_grid{1.1, 1.5, 2.0, 3.0};
  int n_max = 3;
  int dim = 2;
  int threads = 1;  // not echoed: results are independent of it
};

/// -ln P_err <= sandwiched affine radius + (alpha/(alpha-1)) ln(1/p_min) on
/// random full-rank ensembles (r cycles through 2, 3, 4). One record per (trial, alpha).
VerificationReport verify_oneshot(const VerifyConfig& config);

/// -(1/n) ln P_err(n) <= C for n = 1..n_max on random full-rank qubit triples.
/// Identical-state instances are compared against C + (1/n) ln(1/p_min) instead.
VerificationReport verify_asymptotic_state(const VerifyConfig& config);

/// Channel radius checks on random qubit channel ensembles (r in {2, 3}):
/// radius >= 0, radius of an identical pair is 0, replacer radius equals the
/// state-side radius, replacer channel exclusion equals state exclusion.
VerificationReport verify_channel(const VerifyConfig& config);

/// Fills failures/min_margin from the records.
void finalize(VerificationReport& report, double tol);

/// Report as JSON; +inf numbers are written as the string "inf". The
/// report_hash field is FNV-1a (hex) over the document without timestamp.
nlohmann::json report_json(const VerificationReport& report);
std::string report_hash(const VerificationReport& report);
std::string report_csv(const VerificationReport& report);

/// Current UTC time, ISO 8601.
std::string utc_timestamp();

/// JSON number or, for infinities, the strings "inf" / "-inf".
nlohmann::json json_number(double v);

}  // namespace qexcl
