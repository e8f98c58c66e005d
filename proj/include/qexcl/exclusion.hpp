#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qexcl/channels.hpp"
#include "qexcl/divergences.hpp"

namespace qexcl {

/// Prior distribution (strictly positive, sums to 1 within 1e-12) paired with
/// r >= 2 states of a common dimension.
class StateEnsemble {
 public:
  StateEnsemble(std::vector<double> priors, std::vector<DensityOperator> states);

  std::size_t size() const { return states_.size(); }
  Index dim() const { return states_.front().dim(); }
  const std::vector<double>& priors() const { return priors_; }
  const std::vector<DensityOperator>& states() const { return states_; }
  double min_prior() const;

  /// (p, rho^{(x) n}).
  StateEnsemble tensor_power(int n) const;

 private:
  std::vector<double> priors_;
  std::vector<DensityOperator> states_;
};

/// Channel counterpart of StateEnsemble; all channels share dim_in and dim_out.
class ChannelEnsemble {
 public:
  ChannelEnsemble(std::vector<double> priors, std::vector<QuantumChannel> channels);

  std::size_t size() const { return channels_.size(); }
  Index dim_in() const { return channels_.front().dim_in(); }
  Index dim_out() const { return channels_.front().dim_out(); }
  const std::vector<double>& priors() const { return priors_; }
  const std::vector<QuantumChannel>& channels() const { return channels_; }
  double min_prior() const;

 private:
  std::vector<double> priors_;
  std::vector<QuantumChannel> channels_;
};

/// Effects are PSD within 1e-10 and sum to the identity within 1e-10.
class Povm {
 public:
  explicit Povm(std::vector<HermitianOperator> effects, double tol = 1e-10);

  std::size_t size() const { return effects_.size(); }
  const std::vector<HermitianOperator>& effects() const { return effects_; }
  const HermitianOperator& operator[](std::size_t x) const { return effects_[x]; }

 private:
  std::vector<HermitianOperator> effects_;
};

/// Feasible POVM plus a dual certificate Y (Y <= p_x rho_x for all x):
/// Tr[Y] <= optimum <= value = Tr[Y] + duality_gap.
struct ExclusionSolution {
  double value;
  Povm povm;
  HermitianOperator dual_certificate;
  double duality_gap;
  bool stalled;  // duality_gap above the requested tolerance
  int iterations;
};

/// sum_x p_x Tr[Lambda_x rho_x].
double exclusion_error(const StateEnsemble& ensemble, const Povm& povm);

/// Optimal state-exclusion error via a primal-dual interior-point method on
/// min sum_x Tr[Lambda_x p_x rho_x] s.t. sum_x Lambda_x = I, Lambda_x >= 0.
ExclusionSolution min_error_exclusion(const StateEnsemble& ensemble, double gap_tol = 1e-7);

inline constexpr Index kDefaultDimensionCap = 64;

/// min_error_exclusion on (p, rho^{(x) n}). Throws DimensionCap when d^n > dim_cap.
ExclusionSolution n_copy_error(const StateEnsemble& ensemble, int n, double gap_tol = 1e-7,
                               Index dim_cap = kDefaultDimensionCap);

/// Error probabilities at or below this are reported with exponent +inf.
inline constexpr double kErrorFloor = 1e-14;

struct ExponentEntry {
  int n;
  double error;
  ExtendedReal exponent;  // -(1/n) ln error
};

std::vector<ExponentEntry> empirical_exponent(const StateEnsemble& ensemble, int n_max, double gap_tol = 1e-7,
                                              Index dim_cap = kDefaultDimensionCap);

/// Single-use channel exclusion strategy: a pure input on R (x) A and a POVM on R (x) B.
struct ChannelExclusionResult {
  double value;  // feasible, hence an upper bound on the optimal error
  Ket input;
  Povm povm;
  int restarts_used;
  std::string note;
};

/// See-saw between the input state and the POVM, best over `restarts`
/// starts (the first start is the maximally entangled input).
ChannelExclusionResult channel_exclusion_oneshot(const ChannelEnsemble& ensemble, int restarts = 8,
                                                 std::uint64_t seed = 0);

}  // namespace qexcl
