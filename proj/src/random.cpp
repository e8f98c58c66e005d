#include "qexcl/random.hpp"

#include <algorithm>
#include <cmath>

namespace qexcl {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) + index);
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

Matrix ginibre(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  return g;
}

Ket haar_ket(Rng& rng, Index dim) {
  Ket v = ginibre(rng, dim, 1).col(0);
  return v / v.norm();
}

Matrix haar_unitary(Rng& rng, Index dim) {
  const Matrix g = ginibre(rng, dim, dim);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  // Fix the phases so that the distribution is Haar.
  for (Index j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    if (a > 0) q.col(j) *= d / a;
  }
  return q;
}

DensityOperator random_state(Rng& rng, Index dim, Index rank) {
  const Index k = rank <= 0 ? dim : rank;
  const Matrix g = ginibre(rng, dim, k);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(rho);
}

DensityOperator random_diagonal_state(Rng& rng, Index dim) {
  const auto p = random_simplex_point(rng, static_cast<std::size_t>(dim));
  RealVector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = p[static_cast<std::size_t>(i)];
  v /= v.sum();
  return DensityOperator(HermitianOperator::diagonal(v));
}

HermitianOperator random_effect(Rng& rng, Index dim) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const Matrix u = haar_unitary(rng, dim);
  RealVector vals(dim);
  for (Index i = 0; i < dim; ++i) vals(i) = uniform(rng);
  return HermitianOperator(u * vals.cast<Complex>().asDiagonal() * u.adjoint());
}

TraceOneHermitian random_trace_one(Rng& rng, Index dim) {
  const Matrix g = ginibre(rng, dim, dim);
  Matrix h = 0.5 * (g + g.adjoint());
  h += ((1.0 - h.trace().real()) / static_cast<double>(dim)) * Matrix::Identity(dim, dim);
  return TraceOneHermitian(HermitianOperator(h));
}

std::vector<double> random_simplex_point(Rng& rng, std::size_t r) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> p(r);
  double total = 0.0;
  for (auto& v : p) {
    v = expo(rng);
    total += v;
  }
  for (auto& v : p) v /= total;
  return p;
}

QuantumChannel random_channel(Rng& rng, Index dim_in, Index dim_out, Index kraus_rank) {
  const Index k = kraus_rank <= 0 ? dim_in * dim_out : kraus_rank;
  const Matrix g = ginibre(rng, k * dim_out, dim_in);
  // Isometry V = G (G^dagger G)^{-1/2}.
  const Eigensystem es = eig_hermitian(Matrix(g.adjoint() * g));
  const Matrix inv_sqrt = func_hermitian(es, [](double t) { return 1.0 / std::sqrt(t); });
  const Matrix v = g * inv_sqrt;
  std::vector<Matrix> kraus;
  kraus.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) kraus.push_back(v.block(i * dim_out, 0, dim_out, dim_in));
  return QuantumChannel(dim_in, dim_out, std::move(kraus));
}

namespace {

std::vector<double> interior_priors(Rng& rng, int r) {
  auto p = random_simplex_point(rng, static_cast<std::size_t>(r));
  double total = 0.0;
  for (auto& v : p) {
    v = std::max(v, 1e-3);
    total += v;
  }
  for (auto& v : p) v /= total;
  return p;
}

}  // namespace

StateEnsemble random_ensemble(std::uint64_t seed, int r, Index dim, RankProfile profile) {
  Rng prior_rng = make_rng(seed, 0);
  auto priors = interior_priors(prior_rng, r);
  std::vector<DensityOperator> states;
  states.reserve(static_cast<std::size_t>(r));
  for (int x = 0; x < r; ++x) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(x) + 1);
    states.push_back(random_state(rng, dim, profile.rank));
  }
  return StateEnsemble(std::move(priors), std::move(states));
}

ChannelEnsemble random_channel_ensemble(std::uint64_t seed, int r, Index dim, Index kraus_rank) {
  Rng prior_rng = make_rng(seed, 0);
  auto priors = interior_priors(prior_rng, r);
  std::vector<QuantumChannel> channels;
  channels.reserve(static_cast<std::size_t>(r));
  for (int x = 0; x < r; ++x) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(x) + 1);
    channels.push_back(random_channel(rng, dim, dim, kraus_rank));
  }
  return ChannelEnsemble(std::move(priors), std::move(channels));
}

}  // namespace qexcl
