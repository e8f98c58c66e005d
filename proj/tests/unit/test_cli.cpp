#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qexcl/cli.hpp"
#include "qexcl/errors.hpp"
#include "qexcl/problem_io.hpp"
#include "qexcl/random.hpp"
#include "qexcl/verify.hpp"

using namespace qexcl;

namespace {

const std::filesystem::path kData = QEXCL_TEST_DATA;

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qexcl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return (kData / name).string(); }

double min_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

TEST_CASE("problem files parse and validate") {
  const Ensemble e = parse_problem(data("orth.json"));
  REQUIRE(std::holds_alternative<StateEnsemble>(e));
  CHECK(std::get<StateEnsemble>(e).size() == 2);

  CHECK_THROWS_WITH_AS(parse_problem(data("boundary.json")), doctest::Contains("priors[1]: interior prior required"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(parse_problem(data("bad.json")), doctest::Contains("matrices[0]: not Hermitian (entry [0][1]"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(parse_problem(data("malformed.json")), doctest::Contains("line 4, column"), ParseError);
  CHECK_THROWS_WITH_AS(parse_problem_text(R"({"kind": "states", "priors": [0.5, "x"], "matrices": []})"),
                       doctest::Contains("priors[1]"), ParseError);
  CHECK_THROWS_WITH_AS(validate_problem(parse_problem_text(
                           R"({"kind": "states", "priors": [0.5, 0.5], "matrices": [[[[1,0],[0,0]],[[0,0],[1,0]]], [[[1,0],[0,0]],[[0,0],[0,0]]]]})")),
                       doctest::Contains("matrices[0]"), ValidationError);
  CHECK(std::holds_alternative<ChannelEnsemble>(parse_problem(data("identity_x.json"))));
}

TEST_CASE("serialization round-trips numeric content") {
  const StateEnsemble e = random_ensemble(77, 3, 3);
  const RawProblem back = parse_problem_text(serialize_problem(raw_of(e)));
  const StateEnsemble again = std::get<StateEnsemble>(validate_problem(back));
  for (std::size_t x = 0; x < 3; ++x) {
    CHECK(std::abs(again.priors()[x] - e.priors()[x]) <= 1e-15 * e.priors()[x]);
    CHECK((again.states()[x].matrix() - e.states()[x].matrix()).cwiseAbs().maxCoeff() <= 1e-15);
  }
  Rng rng = make_rng(5);
  const ChannelEnsemble c({0.5, 0.5}, {random_channel(rng, 2, 2), random_channel(rng, 2, 2)});
  const ChannelEnsemble c2 = std::get<ChannelEnsemble>(validate_problem(parse_problem_text(serialize_problem(raw_of(c)))));
  CHECK((c2.channels()[1].choi().op.matrix() - c.channels()[1].choi().op.matrix()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("random ensembles") {
  const StateEnsemble a = random_ensemble(1, 2, 2), b = random_ensemble(1, 2, 2);
  for (std::size_t x = 0; x < 2; ++x) {
    CHECK(min_eig(a.states()[x].matrix()) > 0.0);
    CHECK(a.states()[x].matrix() == b.states()[x].matrix());
    CHECK(a.priors()[x] == b.priors()[x]);
    CHECK(a.priors()[x] >= 1e-3 / (1 + 2e-3));
  }
  const StateEnsemble pure = random_ensemble(2, 3, 3, RankProfile::pure());
  for (const auto& rho : pure.states()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(1) < 1e-12);
    CHECK(es.eigenvalues()(2) == doctest::Approx(1.0));
  }
}

TEST_CASE("command line: results and exit codes") {
  const CliRun orth = cli({"pexcl", "--file", data("orth.json"), "--quiet"});
  CHECK(orth.code == 0);
  CHECK(std::stod(orth.out) == 0.0);

  const CliRun bad = cli({"radius", "--file", data("bad.json")});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("matrices[0]") != std::string::npos);

  CHECK(cli({"pexcl", "--file", data("boundary.json")}).code == 2);
  CHECK(cli({"pexcl", "--file", data("malformed.json")}).code == 2);
  CHECK(cli({"pexcl", "--file", data("missing.json")}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"divergence", "--file", data("mixed.json"), "--kind", "nope"}).code == 2);
  CHECK(cli({"chernoff", "--file", data("identity_x.json")}).code == 2);

  const CliRun div = cli({"divergence", "--file", data("mixed.json"), "--kind", "sandwiched", "--alpha", "2"});
  CHECK(div.code == 0);
  const auto j = nlohmann::json::parse(div.out);
  CHECK(j["value"].get<double>() > 0.0);

  const CliRun csv = cli({"--out", "csv", "chernoff", "--file", data("mixed.json")});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("command,", 0) == 0);

  const CliRun exp = cli({"exponent", "--file", data("orth.json"), "--n-max", "2"});
  CHECK(nlohmann::json::parse(exp.out)["value"] == "inf");

  const CliRun flip = cli({"pexcl", "--file", data("identity_x.json"), "--quiet"});
  CHECK(flip.code == 0);
  CHECK(std::stod(flip.out) <= 1e-10);

  const CliRun radius = cli({"radius", "--file", data("mixed.json"), "--kind", "umegaki"});
  CHECK(radius.code == 0);
  CHECK(nlohmann::json::parse(radius.out)["stalled"] == false);
}

TEST_CASE("verify reports: exit codes, schema, determinism") {
  const CliRun ok = cli({"verify", "--suite", "oneshot", "--trials", "3", "--seed", "42"});
  CHECK(ok.code == 0);
  const auto report = nlohmann::json::parse(ok.out);
  CHECK(report["suite"] == "oneshot");
  CHECK(report["aggregate"]["failures"] == 0);
  CHECK(report["records"].size() == 12);
  CHECK(report["tool_version"] == kToolVersion);
  CHECK(report["config"]["seed"] == 42);

  const CliRun again = cli({"verify", "--suite", "oneshot", "--trials", "3", "--seed", "42", "--threads", "3"});
  CHECK(nlohmann::json::parse(again.out)["report_hash"] == report["report_hash"]);

  const CliRun strict = cli({"verify", "--suite", "oneshot", "--trials", "2", "--tol", "-10"});
  CHECK(strict.code == 1);

  CHECK(cli({"verify", "--suite", "nope"}).code == 2);
  CHECK(cli({"verify", "--alpha", "0.5"}).code == 2);

  const CliRun csv = cli({"--out", "csv", "verify", "--trials", "1"});
  CHECK(csv.out.rfind("trial,seed,instance,check,lhs,rhs,margin,pass,note\n", 0) == 0);
}

TEST_CASE("verify suites on special instances") {
  VerifyConfig config;
  config.trials = 2;
  const VerificationReport asym = verify_asymptotic_state(config);
  CHECK(asym.records.size() == 6);
  const VerificationReport again = verify_asymptotic_state(config);
  CHECK(report_hash(asym) == report_hash(again));

  VerificationReport r;
  r.records.push_back({0, 1, "", "c", 1.0, std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity(), true, ""});
  r.records.push_back({1, 2, "", "c", 1.0, 0.5, -0.5, false, ""});
  finalize(r, 1e-6);
  CHECK(r.failures == 1);
  CHECK(r.min_margin == -0.5);
  CHECK(report_json(r)["records"][0]["rhs"] == "inf");
}

TEST_CASE("REPORT_DIR receives a copy of the report") {
  const auto dir = std::filesystem::temp_directory_path() / "qexcl-report-test";
  std::filesystem::remove_all(dir);
  setenv("REPORT_DIR", dir.c_str(), 1);
  const CliRun run = cli({"verify", "--suite", "oneshot", "--trials", "1", "--seed", "9", "--quiet"});
  unsetenv("REPORT_DIR");
  CHECK(run.code == 0);
  std::ifstream file(dir / "oneshot-seed9.json");
  REQUIRE(file.good());
  CHECK(nlohmann::json::parse(file)["suite"] == "oneshot");
  std::filesystem::remove_all(dir);
}
