#include "qexcl/exclusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qexcl/errors.hpp"
#include "qexcl/random.hpp"

namespace qexcl {

namespace {

std::vector<double> validated_priors(std::vector<double> priors, std::size_t count, const char* what) {
  if (count < 2) {
    std::ostringstream os;
    os << what << ": at least two hypotheses required, got " << count;
    throw ValidationError(os.str());
  }
  if (priors.size() != count) {
    std::ostringstream os;
    os << what << ": " << priors.size() << " priors for " << count << " hypotheses";
    throw DimensionMismatch(os.str());
  }
  double total = 0.0;
  for (std::size_t x = 0; x < priors.size(); ++x) {
    if (!(priors[x] > 0.0) || !std::isfinite(priors[x])) {
      std::ostringstream os;
      os << "priors[" << x << "]: interior prior required (got " << priors[x] << ")";
      throw ValidationError(os.str());
    }
    total += priors[x];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "priors: must sum to 1 within 1e-12 (sum " << total << ")";
    throw ValidationError(os.str());
  }
  return priors;
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double min_eig(const Matrix& m) { return eig_hermitian(hermitian_part(m)).values(0); }

/// Largest t with a + t da still PSD, for positive definite a (t may be +inf).
double max_step(const Matrix& a, const Matrix& da) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return 0.0;
  const Matrix half = llt.matrixL().solve(da);
  const Matrix scaled = llt.matrixL().solve(Matrix(half.adjoint()));
  const double lowest = min_eig(scaled);
  return lowest >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lowest;
}

/// Adds (b^T (x) a) into the d^2 x d^2 block operator acting on column-major vec.
void add_kron_transpose(Matrix& out, const Matrix& b, const Matrix& a, double scale) {
  const Index d = a.rows();
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) {
      const Complex bji = scale * b(j, i);
      if (bji == Complex(0.0)) continue;
      out.block(i * d, j * d, d, d) += bji * a;
    }
}

double objective(const std::vector<Matrix>& costs, const std::vector<Matrix>& x) {
  double total = 0.0;
  for (std::size_t k = 0; k < costs.size(); ++k) total += (costs[k] * x[k]).trace().real();
  return total;
}

std::vector<Matrix> normalize_povm(const std::vector<Matrix>& raw) {
  const Index d = raw.front().rows();
  std::vector<Matrix> clipped;
  clipped.reserve(raw.size());
  Matrix total = Matrix::Zero(d, d);
  for (const auto& m : raw) {
    clipped.push_back(func_hermitian(eig_hermitian(hermitian_part(m)), [](double t) { return std::max(t, 0.0); }));
    total += clipped.back();
  }
  const Matrix fix = func_hermitian(eig_hermitian(hermitian_part(total)), [](double t) { return 1.0 / std::sqrt(t); });
  for (auto& m : clipped) m = hermitian_part(fix * m * fix);
  return clipped;
}

struct IpmResult {
  std::vector<Matrix> x;
  Matrix y;
  int iterations;
};

/// Mehrotra predictor-corrector with the HKM search direction on
/// min sum Tr[C_x X_x] s.t. sum X_x = I, X_x >= 0 and its dual
/// max Tr[Y] s.t. Z_x = C_x - Y >= 0.
IpmResult interior_point(const std::vector<Matrix>& costs, int max_iterations) {
  const std::size_t r = costs.size();
  const Index d = costs.front().rows();
  const Matrix id = Matrix::Identity(d, d);
  const double scale = static_cast<double>(r) * static_cast<double>(d);

  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& c : costs) lowest = std::min(lowest, min_eig(c));
  std::vector<Matrix> x(r, id / static_cast<double>(r));
  Matrix y = (lowest - 1.0) * id;
  std::vector<Matrix> z(r);
  for (std::size_t k = 0; k < r; ++k) z[k] = costs[k] - y;

  int it = 0;
  for (; it < max_iterations; ++it) {
    double complementarity = 0.0;
    for (std::size_t k = 0; k < r; ++k) complementarity += (x[k] * z[k]).trace().real();
    const double mu = complementarity / scale;

    Matrix rp = id;
    for (const auto& xk : x) rp -= xk;
    std::vector<Matrix> rd(r);
    double infeasibility = rp.cwiseAbs().maxCoeff();
    for (std::size_t k = 0; k < r; ++k) {
      rd[k] = costs[k] - y - z[k];
      infeasibility = std::max(infeasibility, rd[k].cwiseAbs().maxCoeff());
    }
    if (complementarity < 1e-13 && infeasibility < 1e-10) break;

    std::vector<Matrix> zinv(r);
    Matrix lhs = Matrix::Zero(d * d, d * d);
    bool ok = true;
    for (std::size_t k = 0; k < r; ++k) {
      Eigen::LLT<Matrix> llt(z[k]);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      zinv[k] = hermitian_part(llt.solve(id));
      add_kron_transpose(lhs, zinv[k], x[k], 0.5);
      add_kron_transpose(lhs, x[k], zinv[k], 0.5);
    }
    if (!ok) break;
    Eigen::LLT<Matrix> newton(lhs);
    if (newton.info() != Eigen::Success) break;

    struct Direction {
      std::vector<Matrix> dx, dz;
      Matrix dy;
    };
    auto solve = [&](double target, const std::vector<Matrix>* corr) {
      Direction dir;
      Matrix rhs = rp;
      std::vector<Matrix> base(r);
      for (std::size_t k = 0; k < r; ++k) {
        base[k] = target * zinv[k] - x[k];
        if (corr) base[k] -= (*corr)[k];
        rhs -= hermitian_part(base[k] - x[k] * rd[k] * zinv[k]);
      }
      const Eigen::VectorXcd sol = newton.solve(Eigen::Map<const Eigen::VectorXcd>(rhs.data(), d * d));
      dir.dy = hermitian_part(Eigen::Map<const Matrix>(sol.data(), d, d));
      dir.dx.resize(r);
      dir.dz.resize(r);
      for (std::size_t k = 0; k < r; ++k) {
        dir.dz[k] = rd[k] - dir.dy;
        dir.dx[k] = hermitian_part(base[k] - x[k] * dir.dz[k] * zinv[k]);
      }
      return dir;
    };
    auto steps = [&](const Direction& dir, double fraction) {
      double tp = std::numeric_limits<double>::infinity();
      double td = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < r; ++k) {
        tp = std::min(tp, max_step(x[k], dir.dx[k]));
        td = std::min(td, max_step(z[k], dir.dz[k]));
      }
      return std::pair<double, double>{std::min(1.0, fraction * tp), std::min(1.0, fraction * td)};
    };

    const Direction affine = solve(0.0, nullptr);
    const auto [ap, ad] = steps(affine, 1.0);
    double mu_affine = 0.0;
    for (std::size_t k = 0; k < r; ++k)
      mu_affine += ((x[k] + ap * affine.dx[k]) * (z[k] + ad * affine.dz[k])).trace().real();
    mu_affine /= scale;
    const double sigma = std::clamp(std::pow(std::max(mu_affine, 0.0) / mu, 3.0), 0.0, 1.0);

    std::vector<Matrix> corr(r);
    for (std::size_t k = 0; k < r; ++k) corr[k] = affine.dx[k] * affine.dz[k] * zinv[k];
    const Direction dir = solve(sigma * mu, &corr);
    const auto [tp, td] = steps(dir, 0.98);
    if (tp < 1e-12 && td < 1e-12) break;
    for (std::size_t k = 0; k < r; ++k) {
      x[k] = hermitian_part(x[k] + tp * dir.dx[k]);
      z[k] = hermitian_part(z[k] + td * dir.dz[k]);
    }
    y = hermitian_part(y + td * dir.dy);
  }
  return {std::move(x), std::move(y), it};
}

}  // namespace

StateEnsemble::StateEnsemble(std::vector<double> priors, std::vector<DensityOperator> states)
    : priors_(validated_priors(std::move(priors), states.size(), "StateEnsemble")), states_(std::move(states)) {
  for (std::size_t x = 1; x < states_.size(); ++x)
    if (states_[x].dim() != states_[0].dim()) {
      std::ostringstream os;
      os << "states[" << x << "]: dimension " << states_[x].dim() << " differs from " << states_[0].dim();
      throw DimensionMismatch(os.str());
    }
}

double StateEnsemble::min_prior() const { return *std::min_element(priors_.begin(), priors_.end()); }

StateEnsemble StateEnsemble::tensor_power(int n) const {
  if (n < 1) throw ValidationError("tensor_power: n must be at least 1");
  std::vector<DensityOperator> powered;
  powered.reserve(states_.size());
  for (const auto& rho : states_) {
    Matrix acc = rho.matrix();
    for (int k = 1; k < n; ++k) acc = kron(acc, rho.matrix());
    powered.emplace_back(acc);
  }
  return StateEnsemble(priors_, std::move(powered));
}

ChannelEnsemble::ChannelEnsemble(std::vector<double> priors, std::vector<QuantumChannel> channels)
    : priors_(validated_priors(std::move(priors), channels.size(), "ChannelEnsemble")),
      channels_(std::move(channels)) {
  for (std::size_t x = 1; x < channels_.size(); ++x)
    if (channels_[x].dim_in() != channels_[0].dim_in() || channels_[x].dim_out() != channels_[0].dim_out()) {
      std::ostringstream os;
      os << "kraus[" << x << "]: channel dimensions differ from channel 0";
      throw DimensionMismatch(os.str());
    }
}

double ChannelEnsemble::min_prior() const { return *std::min_element(priors_.begin(), priors_.end()); }

Povm::Povm(std::vector<HermitianOperator> effects, double tol) : effects_(std::move(effects)) {
  if (effects_.empty()) throw ValidationError("Povm: no effects");
  const Index d = effects_.front().dim();
  Matrix total = Matrix::Zero(d, d);
  for (std::size_t x = 0; x < effects_.size(); ++x) {
    if (effects_[x].dim() != d) throw DimensionMismatch("Povm: effects of different dimensions");
    const double lowest = min_eigenvalue(effects_[x]);
    if (lowest < -tol) {
      std::ostringstream os;
      os << "Povm: effect " << x << " has eigenvalue " << lowest;
      throw ValidationError(os.str());
    }
    total += effects_[x].matrix();
  }
  const double residual = (total - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (residual > tol) {
    std::ostringstream os;
    os << "Povm: effects sum to identity only within " << residual;
    throw ValidationError(os.str());
  }
}

double exclusion_error(const StateEnsemble& ensemble, const Povm& povm) {
  if (povm.size() != ensemble.size()) throw DimensionMismatch("exclusion_error: POVM size differs from ensemble size");
  if (povm[0].dim() != ensemble.dim()) throw DimensionMismatch("exclusion_error: POVM dimension differs from states");
  double total = 0.0;
  for (std::size_t x = 0; x < ensemble.size(); ++x)
    total += ensemble.priors()[x] * (povm[x].matrix() * ensemble.states()[x].matrix()).trace().real();
  return total;
}

ExclusionSolution min_error_exclusion(const StateEnsemble& ensemble, double gap_tol) {
  const std::size_t r = ensemble.size();
  const Index d = ensemble.dim();
  std::vector<Matrix> costs(r);
  for (std::size_t x = 0; x < r; ++x) costs[x] = ensemble.priors()[x] * ensemble.states()[x].matrix();

  IpmResult ipm = interior_point(costs, 200);

  // Primal: exact POVM from the last iterate, then try snapping tiny eigenvalues to zero.
  std::vector<Matrix> best = normalize_povm(ipm.x);
  double best_value = objective(costs, best);
  for (double threshold : {1e-5, 1e-7, 1e-9, 1e-11}) {
    std::vector<Matrix> snapped;
    snapped.reserve(r);
    for (const auto& m : best)
      snapped.push_back(func_hermitian(eig_hermitian(m), [threshold](double t) { return t < threshold ? 0.0 : t; }));
    Matrix total = Matrix::Zero(d, d);
    for (const auto& m : snapped) total += m;
    if (min_eig(total) < 0.5) continue;
    snapped = normalize_povm(snapped);
    const double value = objective(costs, snapped);
    if (value < best_value) {
      best_value = value;
      best = std::move(snapped);
    }
  }

  // Dual: shift Y down until it is feasible.
  Matrix y = ipm.y;
  double shift = 0.0;
  for (const auto& c : costs) shift = std::max(shift, -min_eig(c - y));
  y -= shift * Matrix::Identity(d, d);
  double dual_value = y.trace().real();
  if (dual_value > best_value) {
    y -= ((dual_value - best_value) / static_cast<double>(d)) * Matrix::Identity(d, d);
    dual_value = y.trace().real();
  }
  const double gap = std::max(0.0, best_value - dual_value);

  std::vector<HermitianOperator> effects;
  effects.reserve(r);
  for (auto& m : best) effects.emplace_back(m);
  // every term Tr[Lambda_x p_x rho_x] is >= 0, a negative sum is rounding
  return {std::max(best_value, 0.0), Povm(std::move(effects)), HermitianOperator(y), gap, gap > gap_tol,
          ipm.iterations};
}

ExclusionSolution n_copy_error(const StateEnsemble& ensemble, int n, double gap_tol, Index dim_cap) {
  if (n < 1) throw ValidationError("n_copy_error: n must be at least 1");
  Index total = 1;
  for (int k = 0; k < n; ++k) {
    total *= ensemble.dim();
    if (total > dim_cap) {
      std::ostringstream os;
      os << "n_copy_error: dimension " << ensemble.dim() << "^" << n << " exceeds cap " << dim_cap;
      throw DimensionCap(os.str());
    }
  }
  return n == 1 ? min_error_exclusion(ensemble, gap_tol) : min_error_exclusion(ensemble.tensor_power(n), gap_tol);
}

std::vector<ExponentEntry> empirical_exponent(const StateEnsemble& ensemble, int n_max, double gap_tol, Index dim_cap) {
  std::vector<ExponentEntry> entries;
  for (int n = 1; n <= n_max; ++n) {
    const double value = n_copy_error(ensemble, n, gap_tol, dim_cap).value;
    const ExtendedReal exponent =
        value <= kErrorFloor ? ExtendedReal::infinity() : ExtendedReal(-std::log(value) / static_cast<double>(n));
    entries.push_back({n, value, exponent});
  }
  return entries;
}

ChannelExclusionResult channel_exclusion_oneshot(const ChannelEnsemble& ensemble, int restarts, std::uint64_t seed) {
  const Index din = ensemble.dim_in();
  const Index dim = din * din;
  const std::size_t r = ensemble.size();
  constexpr int kSeeSawIterations = 100;

  auto outputs = [&](const Ket& psi) {
    const HermitianOperator input = HermitianOperator::projector(psi);
    std::vector<DensityOperator> states;
    states.reserve(r);
    for (const auto& ch : ensemble.channels()) states.emplace_back(apply(ch, input, din));
    return StateEnsemble(ensemble.priors(), std::move(states));
  };

  std::optional<ChannelExclusionResult> best;
  const int starts = std::max(restarts, 1);
  for (int start = 0; start < starts; ++start) {
    Ket psi;
    if (start == 0) {
      psi = Ket::Zero(dim);
      for (Index i = 0; i < din; ++i) psi(i * din + i) = 1.0;
      psi /= psi.norm();
    } else {
      Rng rng = make_rng(seed, static_cast<std::uint64_t>(start));
      psi = haar_ket(rng, dim);
    }
    ExclusionSolution sol = min_error_exclusion(outputs(psi));
    for (int it = 0; it < kSeeSawIterations && sol.value > kErrorFloor; ++it) {
      Matrix heisenberg = Matrix::Zero(dim, dim);
      for (std::size_t x = 0; x < r; ++x)
        heisenberg += ensemble.priors()[x] * apply_adjoint(ensemble.channels()[x], sol.povm[x], din).matrix();
      const Eigensystem es = eig_hermitian(hermitian_part(heisenberg));
      const Ket next = es.vectors.col(0);
      ExclusionSolution trial = min_error_exclusion(outputs(next));
      if (!(trial.value < sol.value - 1e-12)) break;
      psi = next;
      sol = std::move(trial);
    }
    if (!best || sol.value < best->value)
      best = ChannelExclusionResult{sol.value, psi, sol.povm, start + 1,
                                    "heuristic see-saw: feasible strategy, value is an upper bound"};
  }
  best->restarts_used = starts;
  return *best;
}

}  // namespace qexcl
