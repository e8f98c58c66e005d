#pragma once

#include <utility>

#include "qexcl/linalg.hpp"

namespace qexcl {

/// Unit-trace positive semidefinite operator (min eigenvalue >= -1e-10,
/// |trace - 1| <= 1e-10). Construction throws ValidationError otherwise.
class DensityOperator {
 public:
  explicit DensityOperator(HermitianOperator op);
  /// Convenience: validates a raw matrix (symmetrized first).
  explicit DensityOperator(const Matrix& m) : DensityOperator(HermitianOperator(m)) {}

  static DensityOperator maximally_mixed(Index dim);
  static DensityOperator pure(const Ket& v);  // normalizes v

  const HermitianOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  Index dim() const { return op_.dim(); }

 private:
  HermitianOperator op_;
};

/// Unit-trace Hermitian operator, i.e. an element of the affine hull of the
/// state space. No positivity requirement.
class TraceOneHermitian {
 public:
  explicit TraceOneHermitian(HermitianOperator op);
  TraceOneHermitian(const DensityOperator& rho) : op_(rho.op()) {}  // NOLINT: every state qualifies

  const HermitianOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  Index dim() const { return op_.dim(); }

 private:
  HermitianOperator op_;
};

/// Tr[rho (ln rho - ln sigma)], or +inf when supp rho is not inside supp sigma.
ExtendedReal umegaki(const DensityOperator& rho, const HermitianOperator& sigma);

/// Sandwiched Renyi divergence, alpha > 1.
ExtendedReal sandwiched(const DensityOperator& rho, const HermitianOperator& sigma, double alpha);

/// Sandwiched formula with a trace-one Hermitian first argument; the Schatten
/// norm is taken over |eigenvalues|. Throws ZeroOperator for gamma = 0.
ExtendedReal sandwiched_extended(const TraceOneHermitian& gamma, const HermitianOperator& sigma, double alpha);

/// Geometric Renyi divergence, alpha in (1, 2].
ExtendedReal geometric(const DensityOperator& rho, const HermitianOperator& sigma, double alpha);

/// Tr[rho ln(rho^{1/2} sigma^{-1} rho^{1/2})].
ExtendedReal belavkin_staszewski(const DensityOperator& rho, const HermitianOperator& sigma);

/// Two-outcome measurement {Lambda, I - Lambda}: (Tr[Lambda x], Tr[(I - Lambda) x]).
/// Throws InvalidEffect unless every eigenvalue of Lambda lies in [-1e-10, 1 + 1e-10].
std::pair<double, double> measurement_channel(const HermitianOperator& effect, const TraceOneHermitian& input);

/// (Tr[Lambda rho])^{(a-1)/a} exp((a-1)/a * D_a(tau||rho)) - |Tr[Lambda tau]|,
/// with D_a the extended sandwiched divergence. +inf when D_a is infinite.
/// Non-negative up to rounding for every valid input.
double hoeffding_bound_residual(const TraceOneHermitian& tau, const DensityOperator& rho,
                                const HermitianOperator& effect, double alpha);

}  // namespace qexcl
