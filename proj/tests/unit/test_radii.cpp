#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "qexcl/radii.hpp"
#include "qexcl/random.hpp"

using namespace qexcl;

namespace {

DensityOperator dstate(std::vector<double> d) {
  return DensityOperator(HermitianOperator::diagonal(Eigen::Map<RealVector>(d.data(), static_cast<Index>(d.size()))));
}

std::vector<double> diagonal_of(const DensityOperator& rho) {
  std::vector<double> out;
  for (Index i = 0; i < rho.dim(); ++i) out.push_back(rho.matrix()(i, i).real());
  return out;
}

double min_eig(const DensityOperator& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Grid search of the classical Chernoff objective over the 3-simplex, step 1e-3.
double classical_chernoff_grid(const std::vector<std::vector<double>>& dists) {
  double best = -oracle::kInf;
  const int steps = 1000;
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; i + j <= steps; ++j) {
      const std::vector<double> s{i / double(steps), j / double(steps), (steps - i - j) / double(steps)};
      best = std::max(best, oracle::classical_chernoff_objective(dists, s));
    }
  return best;
}

/// min over u of max_x || q_x^{(1-a)/a} (u, 1-u) ||_a by ternary search (convex in u).
double classical_affine_radius(const std::vector<std::vector<double>>& dists, double a) {
  auto g = [&](double u) {
    double worst = 0.0;
    for (const auto& q : dists) {
      const double t0 = std::abs(u) * std::pow(q[0], (1 - a) / a), t1 = std::abs(1 - u) * std::pow(q[1], (1 - a) / a);
      worst = std::max(worst, std::pow(std::pow(t0, a) + std::pow(t1, a), 1 / a));
    }
    return worst;
  };
  double lo = -2.0, hi = 3.0;
  for (int it = 0; it < 300; ++it) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (g(m1) < g(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return a / (a - 1) * std::log(g(0.5 * (lo + hi)));
}

}  // namespace

TEST_CASE("simplex weights") {
  CHECK_THROWS(SimplexWeights({0.5, 0.6}));
  CHECK_THROWS(SimplexWeights({1.2, -0.2}));
  CHECK(SimplexWeights::uniform(4)[2] == doctest::Approx(0.25));
}

TEST_CASE("log-Euclidean Chernoff quantity") {
  Rng rng = make_rng(1);
  const DensityOperator rho = random_state(rng, 2);
  const RadiusResult same = log_euclidean_chernoff({rho, rho, rho});
  CHECK(std::abs(same.value.value()) < 1e-9);
  CHECK((same.center->matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-8);

  const RadiusResult disjoint = log_euclidean_chernoff({dstate({1, 0}), dstate({0, 1})});
  CHECK(disjoint.value.is_infinite());
  for (std::size_t k = 1; k < disjoint.schedule_values.size(); ++k)
    CHECK(disjoint.schedule_values[k] > disjoint.schedule_values[k - 1]);

  for (int t = 0; t < 5; ++t) {
    std::vector<DensityOperator> states;
    std::vector<std::vector<double>> dists;
    for (int x = 0; x < 3; ++x) {
      states.push_back(random_diagonal_state(rng, 3));
      dists.push_back(diagonal_of(states.back()));
    }
    const double grid = classical_chernoff_grid(dists);
    const double value = log_euclidean_chernoff(states).value.value();
    CHECK(value >= grid - 1e-12);
    CHECK(value - grid <= 1e-5);
  }
}

TEST_CASE("Chernoff objective is concave on the simplex") {
  Rng rng = make_rng(2);
  const std::vector<DensityOperator> states{random_state(rng, 2), random_state(rng, 2), random_state(rng, 2)};
  for (int t = 0; t < 50; ++t) {
    const auto a = random_simplex_point(rng, 3), b = random_simplex_point(rng, 3);
    std::vector<double> mid(3);
    for (int x = 0; x < 3; ++x) mid[x] = 0.5 * (a[x] + b[x]);
    const double fa = log_euclidean_objective(states, SimplexWeights(a), 1e-8);
    const double fb = log_euclidean_objective(states, SimplexWeights(b), 1e-8);
    CHECK(log_euclidean_objective(states, SimplexWeights(mid), 1e-8) >= 0.5 * (fa + fb) - 1e-9);
  }
}

TEST_CASE("epsilon schedule settles on full-rank ensembles") {
  const StateEnsemble e = random_ensemble(3, 3, 2);
  const RadiusResult r = log_euclidean_chernoff(e.states());
  REQUIRE(r.schedule_values.size() == 3);
  double lambda_min = 1.0;
  for (const auto& rho : e.states()) lambda_min = std::min(lambda_min, min_eig(rho));
  // the regularised optimum moves by about eps / lambda_min per step
  CHECK(std::abs(r.schedule_values[2] - r.schedule_values[1]) <= 2e-6 / lambda_min);
  CHECK(r.schedule_values[2] <= r.value.value() + 1e-12);
}

TEST_CASE("Umegaki radius") {
  const auto rho = dstate({0.3, 0.7});
  CHECK(std::abs(umegaki_radius({rho, rho}).value.value()) < 1e-8);

  const RadiusResult r = umegaki_radius({dstate({0.9, 0.1}), dstate({0.1, 0.9})});
  CHECK(r.value.value() == doctest::Approx(0.5 * std::log(0.25 / 0.09)).epsilon(1e-7));
  CHECK((r.center->matrix() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-5);

  Rng rng = make_rng(13);
  const RadiusResult triple = umegaki_radius({random_state(rng, 2), random_state(rng, 2), random_state(rng, 2)});
  CHECK(triple.gap <= 1e-5);
  CHECK(triple.lower_bound <= triple.value.value() + 1e-12);
  CHECK_FALSE(triple.stalled);
}

TEST_CASE("sandwiched radius over the affine hull") {
  Rng rng = make_rng(21);
  const DensityOperator rho = random_state(rng, 2);
  const RadiusResult same = sandwiched_radius_affine({rho, rho}, 2.0);
  CHECK(std::abs(same.value.value()) < 1e-7);

  for (int t = 0; t < 5; ++t) {
    std::vector<DensityOperator> states;
    std::vector<std::vector<double>> dists;
    for (int x = 0; x < 3; ++x) {
      states.push_back(random_diagonal_state(rng, 2));
      dists.push_back(diagonal_of(states.back()));
    }
    const double alpha = 1.5 + 0.5 * t;
    const RadiusResult r = sandwiched_radius_affine(states, alpha);
    CHECK(std::abs(r.value.value() - classical_affine_radius(dists, alpha)) <= 1e-6);
    CHECK(r.gap <= 1e-7);
    CHECK(std::abs(r.center->matrix().trace().real() - 1.0) < 1e-10);
  }

  CHECK(sandwiched_radius_affine({dstate({1, 0}), dstate({0, 1})}, 2.0).value.is_infinite());
}

TEST_CASE("one-shot converse bound") {
  const auto rho = dstate({0.4, 0.6});
  const StateEnsemble same({0.7, 0.3}, {rho, rho});
  CHECK(oneshot_converse_bound(same, 2.0).value() == doctest::Approx(2 * std::log(1 / 0.3)).epsilon(1e-7));
  // -ln P_err = ln(1/p_min) here, strictly inside the bound
  CHECK(oneshot_converse_bound(same, 3.0).value() - std::log(1 / 0.3) > 0.1);
  const StateEnsemble orth({0.5, 0.5}, {dstate({1, 0}), dstate({0, 1})});
  CHECK(oneshot_converse_bound(orth, 2.0).is_infinite());
}

TEST_CASE("Belavkin-Staszewski state radius") {
  Rng rng = make_rng(31);
  const DensityOperator rho = random_state(rng, 2);
  CHECK(std::abs(bs_state_radius({rho, rho}).value.value()) < 1e-7);
  const std::vector<DensityOperator> states{random_state(rng, 2), random_state(rng, 2)};
  const RadiusResult bs = bs_state_radius(states);
  CHECK(bs.value.value() >= umegaki_radius(states).lower_bound - 1e-9);
  CHECK(min_eig(DensityOperator(bs.center->op())) >= -1e-10);
}

TEST_CASE("channel radius") {
  Rng rng = make_rng(41);
  const QuantumChannel n = random_channel(rng, 2, 2);
  CHECK(std::abs(channel_bs_radius({n, n}).value.value()) <= 1e-8);

  const ChannelRadiusResult id_dep =
      channel_bs_radius({QuantumChannel::identity(2), QuantumChannel::fully_depolarizing(2)}, 1e-7, 2, 0);
  REQUIRE(id_dep.value.is_finite());
  CHECK(id_dep.value.value() == doctest::Approx(1.3862943611).epsilon(1e-4));  // regression baseline

  const DensityOperator s1 = random_state(rng, 2), s2 = random_state(rng, 2);
  const double channel_side =
      channel_bs_radius({QuantumChannel::replacer(s1, 2), QuantumChannel::replacer(s2, 2)}, 1e-7, 2, 0).value.value();
  CHECK(std::abs(channel_side - bs_state_radius({s1, s2}).value.value()) <= 1e-4);

  const QuantumChannel m = random_channel(rng, 2, 2);
  const double forward = channel_bs_radius({n, m}, 1e-7, 2, 0).value.value();
  const double reversed = channel_bs_radius({m, n}, 1e-7, 2, 0).value.value();
  CHECK(std::abs(forward - reversed) <= 1e-4);
}
