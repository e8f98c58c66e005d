#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "qexcl/divergences.hpp"
#include "qexcl/linalg.hpp"

namespace qexcl {

/// Choi operator J = sum_ij |i><j|_R (x) N(|i><j|) on R (x) B, R first.
struct ChoiOperator {
  HermitianOperator op;
  Index dim_in;
  Index dim_out;
};

/// Completely positive trace-preserving map given by Kraus operators
/// (each dim_out x dim_in). The Choi operator is computed once at
/// construction and shared between copies.
class QuantumChannel {
 public:
  /// Throws ValidationError when sum K^dagger K deviates from I by more than 1e-10,
  /// DimensionMismatch on inconsistent shapes.
  QuantumChannel(Index dim_in, Index dim_out, std::vector<Matrix> kraus);

  static QuantumChannel identity(Index dim);
  static QuantumChannel unitary(const Matrix& u);
  /// rho -> Tr[rho] sigma.
  static QuantumChannel replacer(const DensityOperator& sigma, Index dim_in);
  /// rho -> Tr[rho] I/d.
  static QuantumChannel fully_depolarizing(Index dim);
  /// Kraus decomposition of a Choi operator. Small trace-preservation
  /// residuals (below 1e-6) are absorbed by an input-side congruence.
  static QuantumChannel from_choi(const HermitianOperator& choi, Index dim_in, Index dim_out);

  Index dim_in() const { return dim_in_; }
  Index dim_out() const { return dim_out_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }
  const ChoiOperator& choi() const { return *choi_; }

 private:
  Index dim_in_;
  Index dim_out_;
  std::vector<Matrix> kraus_;
  std::shared_ptr<const ChoiOperator> choi_;
};

ChoiOperator choi_of(const QuantumChannel& channel);

/// (id_R (x) N)[input] for an input on R (x) A with d_R = dim_ref.
HermitianOperator apply(const QuantumChannel& channel, const HermitianOperator& input, Index dim_ref = 1);

/// Heisenberg picture: (id_R (x) N)^dagger[op] for op on R (x) B.
HermitianOperator apply_adjoint(const QuantumChannel& channel, const HermitianOperator& op, Index dim_ref = 1);

/// N[input] = Tr_R[(input^T (x) I_B) J_N] for an input on A alone.
HermitianOperator apply_via_choi(const ChoiOperator& choi, const HermitianOperator& input);

/// Closed form of the geometric Renyi channel divergence, alpha in (1, 2].
ExtendedReal geometric_channel_divergence(const QuantumChannel& n, const QuantumChannel& m, double alpha);

/// Closed form of the Belavkin-Staszewski channel divergence.
ExtendedReal bs_channel_divergence(const QuantumChannel& n, const QuantumChannel& m);

struct InputOptimization {
  ExtendedReal value;
  Ket best_input;  // pure state on R (x) A, d_R = dim_in
};

/// Lower estimate of the channel divergence from its definition as a
/// supremum over bipartite inputs: finite-difference gradient ascent on pure
/// inputs, `trials` Haar-random restarts with 100 iterations each.
/// alpha selects the geometric divergence; std::nullopt selects Belavkin-Staszewski.
InputOptimization channel_divergence_input_opt(const QuantumChannel& n, const QuantumChannel& m,
                                               std::optional<double> alpha, int trials, std::uint64_t seed);

}  // namespace qexcl
