#include "qexcl/radii.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "optimize.hpp"
#include "qexcl/errors.hpp"
#include "simplex.hpp"

namespace qexcl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_family(const std::vector<DensityOperator>& states, const char* what) {
  if (states.size() < 2) {
    std::ostringstream os;
    os << what << ": at least two states required";
    throw ValidationError(os.str());
  }
  for (const auto& rho : states)
    if (rho.dim() != states.front().dim()) {
      std::ostringstream os;
      os << what << ": states of different dimensions";
      throw DimensionMismatch(os.str());
    }
}

std::vector<HermitianOperator> ops_of(const std::vector<DensityOperator>& states) {
  std::vector<HermitianOperator> ops;
  ops.reserve(states.size());
  for (const auto& rho : states) ops.push_back(rho.op());
  return ops;
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// ---------------------------------------------------------------------------
// Log-Euclidean Chernoff quantity.

struct Gibbs {
  double g;           // -ln Tr exp(H)
  RealVector grad;    // -Tr[tau L_x]
  Matrix tau;         // exp(H) / Tr exp(H)
};

Gibbs gibbs(const std::vector<Matrix>& generators, const std::vector<double>& s) {
  const Index k = generators.front().rows();
  Matrix h = Matrix::Zero(k, k);
  for (std::size_t x = 0; x < s.size(); ++x) h += s[x] * generators[x];
  const Eigensystem es = eig_hermitian(hermitian_part(h));
  const double top = es.values.maxCoeff();
  RealVector weights = (es.values.array() - top).exp();
  const double z = weights.sum();
  weights /= z;
  Gibbs out;
  out.g = -(top + std::log(z));
  out.tau = es.vectors * weights.cast<Complex>().asDiagonal() * es.vectors.adjoint();
  out.grad.resize(static_cast<Index>(s.size()));
  for (std::size_t x = 0; x < s.size(); ++x)
    out.grad(static_cast<Index>(x)) = -(out.tau * generators[x]).trace().real();
  return out;
}

double frank_wolfe_gap(const Gibbs& e, const std::vector<double>& s) {
  double inner = 0.0;
  for (std::size_t x = 0; x < s.size(); ++x) inner += s[x] * e.grad(static_cast<Index>(x));
  return e.grad.maxCoeff() - inner;
}

struct Ascent {
  std::vector<double> s;
  Gibbs at;
  double gap;
  int iterations;
};

/// Projected gradient ascent with Armijo backtracking on the simplex.
Ascent maximize_on_simplex(const std::vector<Matrix>& generators, std::vector<double> s, double tol,
                           int max_iterations) {
  Gibbs current = gibbs(generators, s);
  double gap = frank_wolfe_gap(current, s);
  double step = 1.0;
  int it = 0;
  for (; it < max_iterations && gap > tol; ++it) {
    bool accepted = false;
    while (step > 1e-14) {
      std::vector<double> moved(s.size());
      for (std::size_t x = 0; x < s.size(); ++x) moved[x] = s[x] + step * current.grad(static_cast<Index>(x));
      std::vector<double> candidate = detail::project_to_simplex(moved);
      double ascent = 0.0;
      for (std::size_t x = 0; x < s.size(); ++x) ascent += current.grad(static_cast<Index>(x)) * (candidate[x] - s[x]);
      Gibbs trial = gibbs(generators, candidate);
      if (trial.g >= current.g + 1e-4 * ascent) {
        s = std::move(candidate);
        current = std::move(trial);
        accepted = true;
        step = std::min(step * 2.0, 1e8);
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    gap = frank_wolfe_gap(current, s);
  }
  return {std::move(s), std::move(current), gap, it};
}

std::vector<Matrix> regularized_logs(const std::vector<DensityOperator>& states, double eps) {
  std::vector<Matrix> out;
  out.reserve(states.size());
  for (const auto& rho : states) {
    const Eigensystem es = eig_hermitian(rho.op());
    out.push_back(func_hermitian(es, [eps](double t) { return std::log(std::max(t, 0.0) + eps); }));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Affine-hull sandwiched radius.

/// Orthonormal (Hilbert-Schmidt) basis of the traceless Hermitian k x k matrices.
std::vector<Matrix> traceless_basis(Index k) {
  std::vector<Matrix> basis;
  for (Index m = 1; m < k; ++m) {
    Matrix e = Matrix::Zero(k, k);
    for (Index i = 0; i < m; ++i) e(i, i) = 1.0;
    e(m, m) = -static_cast<double>(m);
    basis.push_back(e / std::sqrt(static_cast<double>(m * (m + 1))));
  }
  const double root = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < k; ++i)
    for (Index j = i + 1; j < k; ++j) {
      Matrix re = Matrix::Zero(k, k);
      re(i, j) = re(j, i) = root;
      basis.push_back(re);
      Matrix im = Matrix::Zero(k, k);
      im(i, j) = Complex(0.0, root);
      im(j, i) = Complex(0.0, -root);
      basis.push_back(im);
    }
  return basis;
}

struct NormTerm {
  double norm;   // ||K tau K||_alpha
  Matrix dual;   // B with ||B||_beta = 1 and Tr[B K tau K] = norm
  Matrix grad;   // K B K, the gradient of the norm in tau
};

NormTerm norm_term(const Matrix& k, const Matrix& tau, double alpha) {
  const Eigensystem es = eig_hermitian(hermitian_part(k * tau * k));
  const double top = es.values.cwiseAbs().maxCoeff();
  NormTerm out;
  if (top == 0.0) {
    out.norm = 0.0;
    out.dual = Matrix::Zero(k.rows(), k.rows());
    out.grad = out.dual;
    return out;
  }
  const RealVector scaled = es.values / top;
  const double sum = scaled.cwiseAbs().array().pow(alpha).sum();
  out.norm = top * std::pow(sum, 1.0 / alpha);
  RealVector b(scaled.size());
  const double normalizer = std::pow(sum, (alpha - 1.0) / alpha);
  for (Index i = 0; i < scaled.size(); ++i) {
    const double v = scaled(i);
    b(i) = (v < 0 ? -1.0 : 1.0) * std::pow(std::abs(v), alpha - 1.0) / normalizer;
  }
  out.dual = es.vectors * b.cast<Complex>().asDiagonal() * es.vectors.adjoint();
  out.grad = k * out.dual * k;
  return out;
}

double schatten(const Matrix& m, double p) { return schatten_norm(HermitianOperator(m), p); }

struct AffineProblem {
  std::vector<Matrix> k;
  double alpha;
  Index dim;
  std::vector<Matrix> basis;

  Matrix tau_of(const RealVector& t) const {
    Matrix tau = Matrix::Identity(dim, dim) / static_cast<double>(dim);
    for (std::size_t j = 0; j < basis.size(); ++j) tau += t(static_cast<Index>(j)) * basis[j];
    return tau;
  }

  RealVector coords_of(const Matrix& tau) const {
    RealVector t(static_cast<Index>(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j) t(static_cast<Index>(j)) = (basis[j] * tau).trace().real();
    return t;
  }

  std::vector<NormTerm> terms(const Matrix& tau) const {
    std::vector<NormTerm> out;
    out.reserve(k.size());
    for (const auto& kx : k) out.push_back(norm_term(kx, tau, alpha));
    return out;
  }

  static double max_norm(const std::vector<NormTerm>& ts) {
    double m = 0.0;
    for (const auto& t : ts) m = std::max(m, t.norm);
    return m;
  }

  /// Softmax of ln ||.||_alpha at temperature mu.
  std::vector<double> softmax(const std::vector<NormTerm>& ts, double mu) const {
    std::vector<double> logs(ts.size());
    for (std::size_t x = 0; x < ts.size(); ++x) logs[x] = std::log(ts[x].norm);
    const double top = *std::max_element(logs.begin(), logs.end());
    std::vector<double> w(ts.size());
    double z = 0.0;
    for (std::size_t x = 0; x < ts.size(); ++x) z += (w[x] = std::exp((logs[x] - top) / mu));
    for (auto& v : w) v /= z;
    return w;
  }

  /// Hoelder lower bound on min_tau max_x ||K_x tau K_x||_alpha from weights on
  /// the dual elements at tau.
  double certificate(const std::vector<NormTerm>& ts, const std::vector<double>& w) const {
    Matrix g = Matrix::Zero(dim, dim);
    for (std::size_t x = 0; x < ts.size(); ++x) g += w[x] * ts[x].grad;
    const double c = g.trace().real() / static_cast<double>(dim);
    const Matrix perp = g - c * Matrix::Identity(dim, dim);
    const std::size_t x0 = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
    const Matrix k_inv = func_hermitian(eig_hermitian(k[x0]), [](double v) { return 1.0 / v; });
    const Matrix corrected = ts[x0].dual - k_inv * perp * k_inv / w[x0];
    const double beta = alpha / (alpha - 1.0);
    const double kappa = std::max(1.0, schatten(corrected, beta));
    return c / kappa;
  }
};

}  // namespace

SimplexWeights::SimplexWeights(std::vector<double> s) : s_(std::move(s)) {
  if (s_.empty()) throw ValidationError("SimplexWeights: empty");
  double total = 0.0;
  for (double v : s_) {
    if (!(v >= 0.0)) throw ValidationError("SimplexWeights: negative weight");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    // Renormalize rounding drift from projections; reject anything larger.
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("SimplexWeights: weights do not sum to 1");
    for (auto& v : s_) v /= total;
  }
}

SimplexWeights SimplexWeights::uniform(std::size_t r) {
  return SimplexWeights(std::vector<double>(r, 1.0 / static_cast<double>(r)));
}

double log_euclidean_objective(const std::vector<DensityOperator>& states, const SimplexWeights& s, double eps) {
  require_family(states, "log_euclidean_objective");
  if (s.size() != states.size()) throw DimensionMismatch("log_euclidean_objective: weight count differs");
  return gibbs(regularized_logs(states, eps), s.values()).g;
}

RadiusResult log_euclidean_chernoff(const std::vector<DensityOperator>& states, const ChernoffOptions& options) {
  require_family(states, "log_euclidean_chernoff");
  const std::size_t r = states.size();
  std::vector<double> s(r, 1.0 / static_cast<double>(r));

  RadiusResult result{ExtendedReal(0.0), 0.0, std::nullopt, std::nullopt, 0.0, false, {}};
  for (double eps : options.eps_schedule) {
    Ascent a = maximize_on_simplex(regularized_logs(states, eps), s, options.s_tol, options.max_iterations);
    result.schedule_values.push_back(a.at.g);
    s = std::move(a.s);
  }

  const Matrix v = support_intersection(ops_of(states));
  if (v.cols() == 0) {
    result.value = ExtendedReal::infinity();
    result.lower_bound = kInf;
    result.weights = SimplexWeights(detail::project_to_simplex(s));
    return result;
  }

  std::vector<Matrix> restricted;
  restricted.reserve(r);
  for (const auto& rho : states) {
    const Matrix log_rho = func_on_support(eig_hermitian(rho.op()), [](double t) { return std::log(t); });
    restricted.push_back(hermitian_part(v.adjoint() * log_rho * v));
  }
  Ascent a = maximize_on_simplex(restricted, s, options.s_tol, options.max_iterations);
  result.value = ExtendedReal(a.at.g);
  result.lower_bound = a.at.g;
  result.gap = a.gap;
  result.stalled = a.gap > options.s_tol;
  result.center = TraceOneHermitian(HermitianOperator(v * a.at.tau * v.adjoint()));
  result.weights = SimplexWeights(std::move(a.s));
  return result;
}

RadiusResult umegaki_radius(const std::vector<DensityOperator>& states, double tol) {
  ChernoffOptions options;
  options.s_tol = std::min(tol * 0.1, 1e-10);
  RadiusResult chernoff = log_euclidean_chernoff(states, options);
  if (chernoff.value.is_infinite()) return chernoff;
  const DensityOperator center(chernoff.center->op());
  ExtendedReal upper(0.0);
  for (const auto& rho : states) upper = max(upper, umegaki(center, rho.op()));
  RadiusResult out = chernoff;
  out.value = upper;
  out.lower_bound = chernoff.lower_bound;
  out.gap = upper.value() - chernoff.lower_bound;
  out.stalled = !(out.gap <= tol);
  return out;
}

RadiusResult sandwiched_radius_affine(const std::vector<DensityOperator>& states, double alpha, double tol) {
  require_family(states, "sandwiched_radius_affine");
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    std::ostringstream os;
    os << "sandwiched_radius_affine: alpha must exceed 1, got " << alpha;
    throw InvalidAlpha(os.str());
  }
  const std::size_t r = states.size();
  const double factor = alpha / (alpha - 1.0);
  const Matrix v = support_intersection(ops_of(states));
  if (v.cols() == 0)
    return {ExtendedReal::infinity(), kInf, std::nullopt, std::nullopt, 0.0, false, {}};

  AffineProblem problem;
  problem.alpha = alpha;
  problem.dim = v.cols();
  problem.basis = traceless_basis(problem.dim);
  for (const auto& rho : states) {
    const Matrix p = power_on_support(rho.op(), (1.0 - alpha) / alpha).matrix();
    const Matrix compressed = hermitian_part(v.adjoint() * p * v);
    problem.k.push_back(func_hermitian(eig_hermitian(compressed), [](double t) { return std::sqrt(std::max(t, 0.0)); }));
  }

  auto finish = [&](const Matrix& tau, const std::vector<double>& weights) {
    const auto ts = problem.terms(tau);
    const double upper_norm = AffineProblem::max_norm(ts);
    std::vector<double> u(r);
    double z = 0.0;
    for (std::size_t x = 0; x < r; ++x) z += (u[x] = weights[x] / ts[x].norm);
    for (auto& val : u) val /= z;
    const double lower_norm = problem.certificate(ts, u);
    RadiusResult out{ExtendedReal(factor * std::log(upper_norm)),
                     lower_norm > 0 ? factor * std::log(lower_norm) : -kInf,
                     TraceOneHermitian(HermitianOperator(v * tau * v.adjoint())),
                     SimplexWeights(weights),
                     0.0,
                     false,
                     {}};
    out.gap = out.value.value() - out.lower_bound;
    out.stalled = !(out.gap <= tol);
    return out;
  };

  if (problem.dim == 1) {
    const Matrix tau = Matrix::Identity(1, 1);
    return finish(tau, std::vector<double>(r, 1.0 / static_cast<double>(r)));
  }

  // Stage 1: subgradient steps of length 1/k along the averaged active set.
  Matrix tau = Matrix::Identity(problem.dim, problem.dim) / static_cast<double>(problem.dim);
  Matrix best_tau = tau;
  double best_value = AffineProblem::max_norm(problem.terms(tau));
  for (int it = 1; it <= 200; ++it) {
    const auto ts = problem.terms(tau);
    const double top = AffineProblem::max_norm(ts);
    if (top < best_value) {
      best_value = top;
      best_tau = tau;
    }
    Matrix g = Matrix::Zero(problem.dim, problem.dim);
    int active = 0;
    for (const auto& t : ts)
      if (t.norm >= top - 1e-8) {
        g += t.grad;
        ++active;
      }
    g /= static_cast<double>(active);
    g -= (g.trace().real() / static_cast<double>(problem.dim)) * Matrix::Identity(problem.dim, problem.dim);
    const double gn = g.norm();
    if (gn < 1e-15) break;
    tau -= (0.5 / it) * g / gn;
    // dividing by a tiny gn magnifies the rounding left in Tr g
    tau += ((1.0 - tau.trace().real()) / static_cast<double>(problem.dim)) * Matrix::Identity(problem.dim, problem.dim);
  }

  // Stage 2: log-sum-exp smoothing of max_x ln ||.||_alpha, quasi-Newton per temperature.
  RadiusResult best = finish(best_tau, std::vector<double>(r, 1.0 / static_cast<double>(r)));
  RealVector t = problem.coords_of(best_tau);
  for (double mu : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
    detail::SmoothObjective smoothed = [&](const RealVector& p, RealVector* grad) {
      const auto ts = problem.terms(problem.tau_of(p));
      for (const auto& term : ts)
        if (!(term.norm > 0)) return kInf;
      const auto w = problem.softmax(ts, mu);
      double top = -kInf;
      for (const auto& term : ts) top = std::max(top, std::log(term.norm));
      double z = 0.0;
      for (const auto& term : ts) z += std::exp((std::log(term.norm) - top) / mu);
      if (grad) {
        Matrix g = Matrix::Zero(problem.dim, problem.dim);
        for (std::size_t x = 0; x < ts.size(); ++x) g += (w[x] / ts[x].norm) * ts[x].grad;
        grad->resize(p.size());
        for (std::size_t j = 0; j < problem.basis.size(); ++j)
          (*grad)(static_cast<Index>(j)) = (problem.basis[j] * g).trace().real();
      }
      return top + mu * std::log(z);
    };
    t = detail::bfgs_minimize(smoothed, t, 200, 1e-10);
    const Matrix candidate = problem.tau_of(t);
    const auto ts = problem.terms(candidate);
    RadiusResult trial = finish(candidate, problem.softmax(ts, mu));
    if (trial.value < best.value || (trial.value == best.value && trial.lower_bound > best.lower_bound)) {
      best.value = trial.value;
      best.center = trial.center;
      best.weights = trial.weights;
    }
    best.lower_bound = std::max(best.lower_bound, trial.lower_bound);
    best.gap = best.value.value() - best.lower_bound;
    best.stalled = !(best.gap <= tol);
    if (!best.stalled) break;
  }
  return best;
}

ExtendedReal oneshot_converse_bound(const StateEnsemble& ensemble, double alpha) {
  const RadiusResult radius = sandwiched_radius_affine(ensemble.states(), alpha);
  if (radius.value.is_infinite()) return radius.value;
  return ExtendedReal(radius.value.value() + alpha / (alpha - 1.0) * std::log(1.0 / ensemble.min_prior()));
}

RadiusResult bs_state_radius(const std::vector<DensityOperator>& states) {
  require_family(states, "bs_state_radius");
  const std::size_t r = states.size();
  const Matrix v = support_intersection(ops_of(states));
  if (v.cols() == 0) return {ExtendedReal::infinity(), -kInf, std::nullopt, std::nullopt, kInf, false, {}};
  const Index k = v.cols();

  auto tau_of = [&](const RealVector& p) {
    Matrix g(k, k);
    for (Index j = 0; j < k; ++j)
      for (Index i = 0; i < k; ++i) g(i, j) = Complex(p(j * k + i), p(k * k + j * k + i));
    Matrix t = v * (g * g.adjoint()) * v.adjoint();
    return DensityOperator(HermitianOperator(t / t.trace().real()));
  };
  auto divergences = [&](const RealVector& p) {
    const DensityOperator tau = tau_of(p);
    std::vector<double> out(r);
    for (std::size_t x = 0; x < r; ++x) out[x] = belavkin_staszewski(tau, states[x].op()).value();
    return out;
  };

  Matrix mean = Matrix::Zero(k, k);
  for (const auto& rho : states) mean += v.adjoint() * rho.matrix() * v;
  const Matrix root = func_hermitian(eig_hermitian(hermitian_part(mean)), [](double t) { return std::sqrt(std::max(t, 0.0)); });
  RealVector p(2 * k * k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < k; ++i) {
      p(j * k + i) = root(i, j).real();
      p(k * k + j * k + i) = root(i, j).imag();
    }

  auto max_of = [](const std::vector<double>& d) { return *std::max_element(d.begin(), d.end()); };
  RealVector best_p = p;
  double best = max_of(divergences(p));
  std::vector<double> best_weights(r, 1.0 / static_cast<double>(r));
  for (double mu : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
    auto smoothed_value = [&](const RealVector& q) {
      const auto d = divergences(q);
      const double top = max_of(d);
      double z = 0.0;
      for (double val : d) z += std::exp((val - top) / mu);
      return top + mu * std::log(z);
    };
    detail::SmoothObjective objective = [&](const RealVector& q, RealVector* grad) {
      // Keep the parametrization on the unit sphere so the FD step has a fixed scale.
      const RealVector unit = q / q.norm();
      if (grad) *grad = detail::numeric_gradient(smoothed_value, unit, 1e-7) / q.norm();
      return smoothed_value(unit);
    };
    p = detail::bfgs_minimize(objective, p / p.norm(), 300, 1e-11);
    const auto d = divergences(p);
    if (max_of(d) < best) {
      best = max_of(d);
      best_p = p;
      std::vector<double> w(r);
      double z = 0.0;
      for (std::size_t x = 0; x < r; ++x) z += (w[x] = std::exp((d[x] - best) / mu));
      for (auto& val : w) val /= z;
      best_weights = w;
    }
  }
  return {ExtendedReal(best), -kInf, TraceOneHermitian(tau_of(best_p)), SimplexWeights(best_weights), kInf, false, {}};
}

}  // namespace qexcl
