#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qexcl/channels.hpp"
#include "qexcl/divergences.hpp"
#include "qexcl/exclusion.hpp"

namespace qexcl {

/// Point of the probability simplex (entries >= 0, sum 1 within 1e-12).
class SimplexWeights {
 public:
  explicit SimplexWeights(std::vector<double> s);
  static SimplexWeights uniform(std::size_t r);

  std::size_t size() const { return s_.size(); }
  double operator[](std::size_t x) const { return s_[x]; }
  const std::vector<double>& values() const { return s_; }

 private:
  std::vector<double> s_;
};

/// Outcome of a minimax solve. `value` is the centre-side (upper) value
/// max_x D(center || rho_x); `lower_bound` is a weight-side value that the
/// true radius cannot fall below (may be -inf when no certificate is
/// available). gap = value - lower_bound.
struct RadiusResult {
  ExtendedReal value;
  double lower_bound;
  std::optional<TraceOneHermitian> center;
  std::optional<SimplexWeights> weights;
  double gap;
  bool stalled;
  std::vector<double> schedule_values;  // log_euclidean_chernoff only: sup_s f_eps per schedule point
};

struct ChernoffOptions {
  std::vector<double> eps_schedule{1e-4, 1e-6, 1e-8};
  double s_tol = 1e-10;  // Frank-Wolfe gap at which the outer ascent stops
  int max_iterations = 5000;
};

/// f_eps(s) = -ln Tr exp(sum_x s_x ln(rho_x + eps I)).
double log_euclidean_objective(const std::vector<DensityOperator>& states, const SimplexWeights& s, double eps);

/// Multivariate log-Euclidean Chernoff quantity C = lim_{eps -> 0} sup_s f_eps(s).
/// The limit is evaluated exactly by restricting every ln rho_x to the common
/// support; it is +inf iff that intersection is trivial. The eps schedule is
/// still solved and recorded in schedule_values. value = lower_bound = f(s*)
/// at the returned weights; center is the Gibbs state exp(H)/Tr exp(H) there,
/// and max_x D(center || rho_x) = value + gap (gap is the Frank-Wolfe gap).
RadiusResult log_euclidean_chernoff(const std::vector<DensityOperator>& states, const ChernoffOptions& options = {});

/// inf_{tau state} max_x D(tau || rho_x), certified from both sides by the
/// Chernoff weights. stalled when gap > tol.
RadiusResult umegaki_radius(const std::vector<DensityOperator>& states, double tol = 1e-7);

/// inf over trace-one Hermitian tau of max_x D~_alpha(tau || rho_x) (extended
/// sandwiched divergence). The certified lower bound comes from a Hoelder dual
/// built at the final iterate.
RadiusResult sandwiched_radius_affine(const std::vector<DensityOperator>& states, double alpha, double tol = 1e-7);

/// Radius over the affine hull plus (alpha/(alpha-1)) ln(1/p_min).
ExtendedReal oneshot_converse_bound(const StateEnsemble& ensemble, double alpha);

/// inf_{tau state} max_x D_BS(tau || sigma_x), by smoothed quasi-Newton descent
/// over tau = G G^dagger / Tr. Upper value only (lower_bound = -inf).
RadiusResult bs_state_radius(const std::vector<DensityOperator>& states);

struct ChannelRadiusResult {
  ExtendedReal value;  // max_x D_BS(T* || N_x), an upper bound on the infimum
  std::optional<QuantumChannel> channel;
  std::optional<SimplexWeights> weights;  // softmax weights of the active terms
  bool stalled;
  int restarts_used;
};

/// inf over channels T of max_x D_BS(T || N_x) by projected gradient on Choi
/// operators (Dykstra projection onto PSD-with-support and Tr_B J = I).
ChannelRadiusResult channel_bs_radius(const std::vector<QuantumChannel>& channels, double tol = 1e-7, int restarts = 3,
                                      std::uint64_t seed = 0);

}  // namespace qexcl
