#pragma once

#include <cstdint>
#include <random>

#include "qexcl/channels.hpp"
#include "qexcl/exclusion.hpp"
#include "qexcl/linalg.hpp"

namespace qexcl {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-mode split of a master seed: independent stream `index`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Complex Ginibre matrix with i.i.d. standard complex normal entries.
Matrix ginibre(Rng& rng, Index rows, Index cols);
Ket haar_ket(Rng& rng, Index dim);
Matrix haar_unitary(Rng& rng, Index dim);

/// G G^dagger / Tr[G G^dagger] with G of shape dim x rank; rank <= 0 means full rank.
DensityOperator random_state(Rng& rng, Index dim, Index rank = 0);
DensityOperator random_diagonal_state(Rng& rng, Index dim);

/// 0 <= Lambda <= I with Haar eigenbasis and uniform eigenvalues.
HermitianOperator random_effect(Rng& rng, Index dim);

/// Trace-one Hermitian operator that is typically indefinite.
TraceOneHermitian random_trace_one(Rng& rng, Index dim);

/// Uniform point of the probability simplex (flat Dirichlet).
std::vector<double> random_simplex_point(Rng& rng, std::size_t r);

/// Channel whose Stinespring isometry is a normalized Ginibre matrix.
QuantumChannel random_channel(Rng& rng, Index dim_in, Index dim_out, Index kraus_rank = 0);

struct RankProfile {
  Index rank = 0;  // 0: full rank

  static RankProfile full() { return {0}; }
  static RankProfile pure() { return {1}; }
};

/// Dirichlet priors clipped to >= 1e-3 then renormalized; each state is drawn
/// from its own derived stream so the ensemble is reproducible per seed.
StateEnsemble random_ensemble(std::uint64_t seed, int r, Index dim, RankProfile profile = RankProfile::full());

/// Priors as in random_ensemble; channels from random_channel.
ChannelEnsemble random_channel_ensemble(std::uint64_t seed, int r, Index dim, Index kraus_rank = 0);

}  // namespace qexcl
