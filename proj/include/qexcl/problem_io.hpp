#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qexcl/exclusion.hpp"

namespace qexcl {

enum class ProblemKind { States, Channels };

/// Problem file after syntactic parsing, before domain validation.
///
///   {"kind": "states",   "priors": [...], "matrices": [rho_0, rho_1, ...], "metadata": {...}}
///   {"kind": "channels", "priors": [...], "kraus": [[K_0, K_1, ...], ...], "metadata": {...}}
///
/// Every matrix is a list of rows; every entry is an [re, im] pair.
struct RawProblem {
  ProblemKind kind = ProblemKind::States;
  std::vector<double> priors;
  std::vector<Matrix> matrices;             // states
  std::vector<std::vector<Matrix>> kraus;   // channels
  nlohmann::json metadata = nlohmann::json::object();
};

using Ensemble = std::variant<StateEnsemble, ChannelEnsemble>;

/// Throws ParseError (with line and column for malformed JSON, the field path otherwise).
RawProblem parse_problem_text(const std::string& text);
RawProblem read_problem_file(const std::filesystem::path& path);

/// Throws ValidationError naming the offending field (non-Hermitian entry,
/// trace, positivity, boundary prior, ...).
Ensemble validate_problem(const RawProblem& raw);

/// read_problem_file followed by validate_problem.
Ensemble parse_problem(const std::filesystem::path& path);

/// Hermiticity tolerance applied to file matrices.
inline constexpr double kFileHermitianTol = 1e-10;

nlohmann::json matrix_to_json(const Matrix& m);
nlohmann::json to_json(const RawProblem& raw);
RawProblem raw_of(const StateEnsemble& ensemble);
RawProblem raw_of(const ChannelEnsemble& ensemble);

/// Pretty-printed JSON; doubles are written with 17 significant digits so the
/// round trip through parse_problem_text is exact.
std::string serialize_problem(const RawProblem& raw);

}  // namespace qexcl
