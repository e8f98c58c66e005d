#include <doctest.h>

#include <cmath>

#include "qexcl/channels.hpp"
#include "qexcl/divergences.hpp"
#include "qexcl/errors.hpp"
#include "qexcl/random.hpp"

using namespace qexcl;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix pauli_x() {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

Ket max_entangled(Index d) {
  Ket v = Ket::Zero(d * d);
  for (Index i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return v;
}

}  // namespace

TEST_CASE("Choi operators of standard channels") {
  const Matrix j_id = choi_of(QuantumChannel::identity(2)).op.matrix();
  Ket phi = Ket::Zero(4);
  phi(0) = phi(3) = 1.0;
  CHECK(max_abs(j_id - phi * phi.adjoint()) < 1e-12);

  Rng rng = make_rng(4);
  const DensityOperator sigma = random_state(rng, 3);
  const Matrix j_rep = choi_of(QuantumChannel::replacer(sigma, 2)).op.matrix();
  CHECK(max_abs(j_rep - kron(Matrix(Matrix::Identity(2, 2)), sigma.matrix())) < 1e-12);

  const Matrix j_dep = choi_of(QuantumChannel::fully_depolarizing(2)).op.matrix();
  CHECK(max_abs(j_dep - 0.5 * Matrix::Identity(4, 4)) < 1e-12);
}

TEST_CASE("channel construction is validated") {
  std::vector<Matrix> not_tp{0.5 * Matrix::Identity(2, 2)};
  CHECK_THROWS_AS(QuantumChannel(2, 2, not_tp), ValidationError);
  std::vector<Matrix> wrong_shape{Matrix::Identity(3, 3)};
  CHECK_THROWS_AS(QuantumChannel(2, 2, wrong_shape), DimensionMismatch);
}

TEST_CASE("channel application") {
  Rng rng = make_rng(8);
  const DensityOperator rho = random_state(rng, 4);
  CHECK(max_abs(apply(QuantumChannel::identity(2), rho.op(), 2).matrix() - rho.matrix()) < 1e-12);

  const DensityOperator r = random_state(rng, 2), a = random_state(rng, 2), sigma = random_state(rng, 2);
  const HermitianOperator out = apply(QuantumChannel::replacer(sigma, 2), kron(r.op(), a.op()), 2);
  CHECK(max_abs(out.matrix() - kron(r.matrix(), sigma.matrix())) < 1e-12);

  const HermitianOperator bell = HermitianOperator::projector(max_entangled(2));
  CHECK(max_abs(apply(QuantumChannel::fully_depolarizing(2), bell, 2).matrix() - 0.25 * Matrix::Identity(4, 4)) < 1e-12);

  CHECK_THROWS_AS(apply(QuantumChannel::identity(2), rho.op(), 1), DimensionMismatch);
}

TEST_CASE("Kraus and Choi application agree; trace is preserved") {
  Rng rng = make_rng(12);
  for (int t = 0; t < 20; ++t) {
    const QuantumChannel n = random_channel(rng, 2, 3);
    const DensityOperator rho = random_state(rng, 2);
    const HermitianOperator a = apply(n, rho.op()), b = apply_via_choi(n.choi(), rho.op());
    CHECK(max_abs(a.matrix() - b.matrix()) <= 1e-10);
    CHECK(std::abs(trace(a) - 1.0) <= 1e-10);
  }
}

TEST_CASE("adjoint is dual to application") {
  Rng rng = make_rng(13);
  const QuantumChannel n = random_channel(rng, 2, 2);
  const DensityOperator rho = random_state(rng, 4);
  const HermitianOperator effect = random_effect(rng, 4);
  const double lhs = trace(HermitianOperator(Matrix(effect.matrix() * apply(n, rho.op(), 2).matrix())));
  const double rhs = trace(HermitianOperator(Matrix(apply_adjoint(n, effect, 2).matrix() * rho.matrix())));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("channel divergences: equal channels and support violations") {
  Rng rng = make_rng(14);
  const QuantumChannel n = random_channel(rng, 2, 2);
  CHECK(std::abs(geometric_channel_divergence(n, n, 1.5).value()) < 1e-10);
  CHECK(std::abs(bs_channel_divergence(n, n).value()) < 1e-10);

  const QuantumChannel id = QuantumChannel::identity(2), x = QuantumChannel::unitary(pauli_x());
  CHECK(geometric_channel_divergence(id, x, 1.5).is_infinite());
  CHECK(bs_channel_divergence(id, x).is_infinite());
  CHECK_THROWS_AS(geometric_channel_divergence(id, x, 3.0), InvalidAlpha);
}

TEST_CASE("replacer channels reduce to state divergences") {
  Rng rng = make_rng(15);
  for (int t = 0; t < 10; ++t) {
    const DensityOperator s1 = random_state(rng, 2), s2 = random_state(rng, 2);
    const QuantumChannel r1 = QuantumChannel::replacer(s1, 2), r2 = QuantumChannel::replacer(s2, 2);
    CHECK(std::abs(geometric_channel_divergence(r1, r2, 1.5).value() - geometric(s1, s2.op(), 1.5).value()) <= 1e-8);
    CHECK(std::abs(bs_channel_divergence(r1, r2).value() - belavkin_staszewski(s1, s2.op()).value()) <= 1e-8);
  }
}

TEST_CASE("geometric channel divergence tends to the BS channel divergence") {
  Rng rng = make_rng(16);
  for (int t = 0; t < 5; ++t) {
    const QuantumChannel n = random_channel(rng, 2, 2), m = random_channel(rng, 2, 2);
    CHECK(std::abs(geometric_channel_divergence(n, m, 1 + 1e-4).value() - bs_channel_divergence(n, m).value()) <=
          1e-3);
  }
}

TEST_CASE("closed form dominates every sampled input") {
  Rng rng = make_rng(17);
  const QuantumChannel n = random_channel(rng, 2, 2), m = random_channel(rng, 2, 2);
  const double closed = bs_channel_divergence(n, m).value();
  for (int t = 0; t < 20; ++t) {
    const HermitianOperator in = HermitianOperator::projector(haar_ket(rng, 4));
    const DensityOperator a{apply(n, in, 2)}, b{apply(m, in, 2)};
    CHECK(belavkin_staszewski(a, b.op()).value() <= closed + 1e-8);
  }
}

TEST_CASE("supremum over inputs") {
  Rng rng = make_rng(18);
  const QuantumChannel n = random_channel(rng, 2, 2), m = random_channel(rng, 2, 2);
  CHECK(std::abs(channel_divergence_input_opt(n, n, 1.5, 2, 1).value.value()) < 1e-10);

  const DensityOperator s1 = random_state(rng, 2), s2 = random_state(rng, 2);
  const auto rep = channel_divergence_input_opt(QuantumChannel::replacer(s1, 2), QuantumChannel::replacer(s2, 2), 1.5,
                                                1, 2);
  CHECK(rep.value.value() == doctest::Approx(geometric(s1, s2.op(), 1.5).value()).epsilon(1e-8));

  const double closed = geometric_channel_divergence(n, m, 1.5).value();
  const double sampled = channel_divergence_input_opt(n, m, 1.5, 5, 3).value.value();
  CHECK(sampled <= closed + 1e-7);
  CHECK(closed - sampled <= 1e-4);
}
