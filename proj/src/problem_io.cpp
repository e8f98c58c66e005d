#include "qexcl/problem_io.hpp"

#include <fstream>
#include <sstream>

#include "qexcl/errors.hpp"

namespace qexcl {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& field, const std::string& what) {
  throw ParseError(field + ": " + what);
}

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw ValidationError(field + ": " + what);
}

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

double read_number(const json& node, const std::string& field) {
  if (!node.is_number()) parse_fail(field, "expected a number");
  return node.get<double>();
}

Matrix read_matrix(const json& node, const std::string& field) {
  if (!node.is_array() || node.empty()) parse_fail(field, "expected a non-empty list of rows");
  const std::size_t rows = node.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_field = index_path(field, i);
    if (!node[i].is_array() || node[i].empty()) parse_fail(row_field, "expected a non-empty row");
    if (i == 0) cols = node[i].size();
    if (node[i].size() != cols) parse_fail(row_field, "row length differs from row 0");
  }
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const std::string entry = index_path(index_path(field, i), j);
      const json& pair = node[i][j];
      if (!pair.is_array() || pair.size() != 2) parse_fail(entry, "expected an [re, im] pair");
      m(static_cast<Index>(i), static_cast<Index>(j)) = Complex(read_number(pair[0], entry + "[0]"),
                                                              read_number(pair[1], entry + "[1]"));
    }
  return m;
}

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

void require_hermitian(const Matrix& m, const std::string& field) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << "not square (" << m.rows() << "x" << m.cols() << ")";
    invalid(field, os.str());
  }
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = i; j < m.cols(); ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > kFileHermitianTol) {
        std::ostringstream os;
        os << "not Hermitian (entry [" << i << "][" << j << "] vs [" << j << "][" << i << "])";
        invalid(field, os.str());
      }
}

/// Re-throws a library validation failure with the file field prepended.
template <class F>
auto with_field(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    invalid(field, e.what());
  } catch (const DimensionMismatch& e) {
    invalid(field, e.what());
  }
}

void check_priors(const std::vector<double>& priors) {
  for (std::size_t x = 0; x < priors.size(); ++x)
    if (!(priors[x] > 0.0)) invalid(index_path("priors", x), "interior prior required");
}

}  // namespace

RawProblem parse_problem_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte);
    std::ostringstream os;
    os << "line " << line << ", column " << column << ": malformed JSON";
    throw ParseError(os.str());
  }
  if (!doc.is_object()) parse_fail("<root>", "expected an object");

  RawProblem raw;
  if (!doc.contains("kind") || !doc["kind"].is_string()) parse_fail("kind", "expected \"states\" or \"channels\"");
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "states") {
    raw.kind = ProblemKind::States;
  } else if (kind == "channels") {
    raw.kind = ProblemKind::Channels;
  } else {
    parse_fail("kind", "expected \"states\" or \"channels\", got \"" + kind + "\"");
  }

  if (!doc.contains("priors") || !doc["priors"].is_array()) parse_fail("priors", "expected a list of numbers");
  for (std::size_t x = 0; x < doc["priors"].size(); ++x)
    raw.priors.push_back(read_number(doc["priors"][x], index_path("priors", x)));

  if (raw.kind == ProblemKind::States) {
    if (!doc.contains("matrices") || !doc["matrices"].is_array()) parse_fail("matrices", "expected a list of matrices");
    for (std::size_t x = 0; x < doc["matrices"].size(); ++x)
      raw.matrices.push_back(read_matrix(doc["matrices"][x], index_path("matrices", x)));
  } else {
    if (!doc.contains("kraus") || !doc["kraus"].is_array()) parse_fail("kraus", "expected a list of Kraus lists");
    for (std::size_t x = 0; x < doc["kraus"].size(); ++x) {
      const std::string field = index_path("kraus", x);
      const json& list = doc["kraus"][x];
      if (!list.is_array() || list.empty()) parse_fail(field, "expected a non-empty list of Kraus operators");
      std::vector<Matrix> ops;
      for (std::size_t k = 0; k < list.size(); ++k) ops.push_back(read_matrix(list[k], index_path(field, k)));
      raw.kraus.push_back(std::move(ops));
    }
  }
  if (doc.contains("metadata")) raw.metadata = doc["metadata"];
  return raw;
}

RawProblem read_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_problem_text(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Ensemble validate_problem(const RawProblem& raw) {
  check_priors(raw.priors);
  if (raw.kind == ProblemKind::States) {
    if (raw.priors.size() != raw.matrices.size()) {
      std::ostringstream os;
      os << raw.priors.size() << " priors for " << raw.matrices.size() << " matrices";
      invalid("priors", os.str());
    }
    std::vector<DensityOperator> states;
    for (std::size_t x = 0; x < raw.matrices.size(); ++x) {
      const std::string field = index_path("matrices", x);
      require_hermitian(raw.matrices[x], field);
      if (x > 0 && raw.matrices[x].rows() != raw.matrices[0].rows()) invalid(field, "dimension differs from matrices[0]");
      states.push_back(with_field(field, [&] { return DensityOperator(raw.matrices[x]); }));
    }
    return with_field("priors", [&] { return StateEnsemble(raw.priors, std::move(states)); });
  }
  if (raw.priors.size() != raw.kraus.size()) {
    std::ostringstream os;
    os << raw.priors.size() << " priors for " << raw.kraus.size() << " channels";
    invalid("priors", os.str());
  }
  std::vector<QuantumChannel> channels;
  for (std::size_t x = 0; x < raw.kraus.size(); ++x) {
    const std::string field = index_path("kraus", x);
    const auto& ops = raw.kraus[x];
    channels.push_back(with_field(field, [&] { return QuantumChannel(ops[0].cols(), ops[0].rows(), ops); }));
    if (x > 0 && (channels[x].dim_in() != channels[0].dim_in() || channels[x].dim_out() != channels[0].dim_out()))
      invalid(field, "channel dimensions differ from kraus[0]");
  }
  return with_field("priors", [&] { return ChannelEnsemble(raw.priors, std::move(channels)); });
}

Ensemble parse_problem(const std::filesystem::path& path) {
  const RawProblem raw = read_problem_file(path);
  try {
    return validate_problem(raw);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

nlohmann::json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json to_json(const RawProblem& raw) {
  json doc;
  doc["kind"] = raw.kind == ProblemKind::States ? "states" : "channels";
  doc["priors"] = raw.priors;
  if (raw.kind == ProblemKind::States) {
    doc["matrices"] = json::array();
    for (const auto& m : raw.matrices) doc["matrices"].push_back(matrix_to_json(m));
  } else {
    doc["kraus"] = json::array();
    for (const auto& ops : raw.kraus) {
      json list = json::array();
      for (const auto& k : ops) list.push_back(matrix_to_json(k));
      doc["kraus"].push_back(std::move(list));
    }
  }
  doc["metadata"] = raw.metadata;
  return doc;
}

RawProblem raw_of(const StateEnsemble& ensemble) {
  RawProblem raw;
  raw.kind = ProblemKind::States;
  raw.priors = ensemble.priors();
  for (const auto& rho : ensemble.states()) raw.matrices.push_back(rho.matrix());
  return raw;
}

RawProblem raw_of(const ChannelEnsemble& ensemble) {
  RawProblem raw;
  raw.kind = ProblemKind::Channels;
  raw.priors = ensemble.priors();
  for (const auto& ch : ensemble.channels()) raw.kraus.push_back(ch.kraus());
  return raw;
}

std::string serialize_problem(const RawProblem& raw) { return to_json(raw).dump(2); }

}  // namespace qexcl
