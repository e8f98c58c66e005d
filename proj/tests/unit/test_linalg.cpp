#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "qexcl/errors.hpp"
#include "qexcl/linalg.hpp"
#include "qexcl/random.hpp"

using namespace qexcl;

namespace {

HermitianOperator diag(std::initializer_list<double> d) {
  RealVector v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return HermitianOperator::diagonal(v);
}

HermitianOperator random_hermitian(Rng& rng, Index dim) {
  const Matrix g = ginibre(rng, dim, dim);
  return HermitianOperator(0.5 * (g + g.adjoint()));
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("eigendecomposition of small fixed matrices") {
  const Eigensystem d = eig_hermitian(diag({2, 1}));
  CHECK(d.values(0) == doctest::Approx(1.0));
  CHECK(d.values(1) == doctest::Approx(2.0));
  CHECK(max_abs(d.vectors.cwiseAbs() - Matrix::Identity(2, 2).rowwise().reverse().cwiseAbs()) < 1e-12);

  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  const Eigensystem p = eig_hermitian(HermitianOperator(x));
  CHECK(p.values(0) == doctest::Approx(-1.0));
  CHECK(p.values(1) == doctest::Approx(1.0));
}

TEST_CASE("eigendecomposition reconstructs and is unitary") {
  Rng rng = make_rng(7);
  const HermitianOperator a = random_hermitian(rng, 4);
  const Eigensystem es = eig_hermitian(a);
  const double scale = std::max(1.0, max_abs(a.matrix()));
  CHECK(max_abs(es.reconstruct() - a.matrix()) <= 1e-10 * scale);
  CHECK(max_abs(es.vectors.adjoint() * es.vectors - Matrix::Identity(4, 4)) <= 1e-10);
  for (Index i = 1; i < 4; ++i) CHECK(es.values(i - 1) <= es.values(i));
}

TEST_CASE("2x2 spectra agree with the characteristic polynomial") {
  Rng rng = make_rng(21);
  for (int t = 0; t < 100; ++t) {
    const HermitianOperator a = random_hermitian(rng, 2);
    const auto [lo, hi] = oracle::eig2(a.matrix());
    const Eigensystem es = eig_hermitian(a);
    CHECK(std::abs(es.values(0) - lo) <= 1e-10);
    CHECK(std::abs(es.values(1) - hi) <= 1e-10);
  }
}

TEST_CASE("eigendecomposition is bit-reproducible") {
  Rng rng = make_rng(99);
  const HermitianOperator a = random_hermitian(rng, 4);
  const Eigensystem first = eig_hermitian(a), second = eig_hermitian(a);
  CHECK(first.values == second.values);
  CHECK(first.vectors == second.vectors);
}

TEST_CASE("functional calculus on the support") {
  const HermitianOperator l = func_on_support(diag({1, std::exp(1.0)}), [](double t) { return std::log(t); });
  CHECK(max_abs(l.matrix() - diag({0, 1}).matrix()) < 1e-12);

  const HermitianOperator inv = func_on_support(diag({2, 0}), [](double t) { return 1.0 / t; });
  CHECK(max_abs(inv.matrix() - diag({0.5, 0}).matrix()) < 1e-12);

  Rng rng = make_rng(3);
  const DensityOperator rho = random_state(rng, 3);
  const HermitianOperator root = func_on_support(rho.op(), [](double t) { return std::sqrt(t); });
  CHECK(max_abs(root.matrix() * root.matrix() - rho.matrix()) <= 1e-9);

  CHECK_THROWS_AS(func_on_support(diag({1, -0.5}), [](double t) { return t; }), NegativeEigenvalue);
}

TEST_CASE("log then exp on the support restores the operator") {
  Rng rng = make_rng(17);
  for (int t = 0; t < 20; ++t) {
    const DensityOperator rho = random_state(rng, 3, 2);
    const HermitianOperator l = func_on_support(rho.op(), [](double v) { return std::log(v); });
    const HermitianOperator back = func_on_support(rho.op(), [](double v) { return std::exp(std::log(v)); });
    const Matrix proj = support_projector(rho.op()).matrix();
    const Eigensystem es = eig_hermitian(l);
    Matrix e = Matrix::Zero(3, 3);
    for (Index i = 0; i < 3; ++i) e += std::exp(es.values(i)) * es.vectors.col(i) * es.vectors.col(i).adjoint();
    CHECK(max_abs(proj * e * proj - rho.matrix() * proj) <= 1e-9);
    CHECK(max_abs(back.matrix() - rho.matrix()) <= 1e-9);
  }
}

TEST_CASE("support projectors") {
  CHECK(max_abs(support_projector(diag({1, 0})).matrix() - diag({1, 0}).matrix()) < 1e-12);
  CHECK(max_abs(support_projector(HermitianOperator::zero(3)).matrix()) == 0.0);
  Ket plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const HermitianOperator p = HermitianOperator::projector(plus);
  const Matrix q = support_projector(p).matrix();
  CHECK(max_abs(q * q - q) < 1e-12);
  CHECK(max_abs(q - p.matrix()) < 1e-12);
}

TEST_CASE("support domination") {
  CHECK(support_dominated(diag({1, 0}), diag({0.5, 0.5})));
  CHECK_FALSE(support_dominated(diag({1, 0}), diag({0, 1})));
  CHECK(support_dominated(diag({0.5, 0.5, 0}), diag({0.3, 0.7, 0})));
}

TEST_CASE("Schatten norms") {
  const HermitianOperator a = diag({3, -4});
  CHECK(schatten_norm(a, 1) == doctest::Approx(7.0));
  CHECK(schatten_norm(a, 2) == doctest::Approx(5.0));
  CHECK(schatten_norm(a, std::numeric_limits<double>::infinity()) == doctest::Approx(4.0));

  Rng rng = make_rng(5);
  const double alphas[] = {1, 1.5, 2, 4, std::numeric_limits<double>::infinity()};
  for (int t = 0; t < 100; ++t) {
    const HermitianOperator h = random_hermitian(rng, 3);
    for (int k = 1; k < 5; ++k) CHECK(schatten_norm(h, alphas[k]) <= schatten_norm(h, alphas[k - 1]) + 1e-12);
  }
}

TEST_CASE("tensor products and partial traces") {
  CHECK(max_abs(kron(HermitianOperator::identity(2), HermitianOperator::identity(2)).matrix() - Matrix::Identity(4, 4)) ==
        0.0);
  Rng rng = make_rng(11);
  for (int t = 0; t < 20; ++t) {
    const HermitianOperator a = random_hermitian(rng, 2), b = random_hermitian(rng, 3);
    const HermitianOperator ab = kron(a, b);
    CHECK(max_abs(partial_trace(ab, {2, 3}, Subsystem::Second).matrix() - trace(b) * a.matrix()) <= 1e-12);
    CHECK(max_abs(partial_trace(ab, {2, 3}, Subsystem::First).matrix() - trace(a) * b.matrix()) <= 1e-12);
  }
  const HermitianOperator x = random_hermitian(rng, 6);
  CHECK(trace(partial_trace(x, {2, 3}, Subsystem::Second)) == doctest::Approx(trace(x)).epsilon(1e-12));
  CHECK_THROWS_AS(partial_trace(x, {2, 2}, Subsystem::Second), DimensionMismatch);
}

TEST_CASE("extended reals") {
  CHECK(ExtendedReal::infinity().is_infinite());
  CHECK((ExtendedReal(1.0) + ExtendedReal::infinity()).is_infinite());
  CHECK(max(ExtendedReal(2.0), ExtendedReal(1.0)).value() == 2.0);
  CHECK_THROWS(ExtendedReal(std::nan("")));
}
