#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qexcl/errors.hpp"
#include "qexcl/radii.hpp"
#include "qexcl/random.hpp"

namespace qexcl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double eta(double t) { return t > 0 ? t * std::log(t) : 0.0; }

/// Feasible set {J >= 0 supported on span(basis), Tr_B J = I_R} and the
/// smoothed objective over it.
class ChoiProblem {
 public:
  ChoiProblem(const std::vector<QuantumChannel>& channels, Matrix basis)
      : din_(channels.front().dim_in()), dout_(channels.front().dim_out()), basis_(std::move(basis)) {
    for (const auto& ch : channels) {
      const HermitianOperator& j = ch.choi().op;
      root_.push_back(power_on_support(j, 0.5).matrix());
      inv_root_.push_back(power_on_support(j, -0.5).matrix());
    }
  }

  Index dim() const { return din_ * dout_; }

  Matrix project_psd(const Matrix& m) const {
    const Matrix compressed = hermitian_part(basis_.adjoint() * m * basis_);
    const Matrix clipped = func_hermitian(eig_hermitian(compressed), [](double t) { return std::max(t, 0.0); });
    return basis_ * clipped * basis_.adjoint();
  }

  Matrix project_trace(const Matrix& m) const {
    const Matrix reduced = partial_trace(m, {din_, dout_}, Subsystem::Second);
    const Matrix fix = (Matrix::Identity(din_, din_) - reduced) / static_cast<double>(dout_);
    return m + kron(fix, Matrix::Identity(dout_, dout_));
  }

  /// Dykstra alternation; returns the PSD iterate with its trace-preservation residual.
  std::pair<Matrix, double> project(const Matrix& m) const {
    Matrix x = hermitian_part(m);
    Matrix p = Matrix::Zero(dim(), dim());
    Matrix y = x;
    for (int it = 0; it < 5000; ++it) {
      y = project_psd(x + p);
      p = x + p - y;
      const Matrix next = project_trace(y);
      const double change = (next - x).cwiseAbs().maxCoeff();
      x = next;
      if (change < 1e-14) break;
    }
    y = project_psd(x);
    const double residual =
        (partial_trace(y, {din_, dout_}, Subsystem::Second) - Matrix::Identity(din_, din_)).cwiseAbs().maxCoeff();
    return {y, residual};
  }

  /// Exact trace preservation by the congruence (A^{-1/2} (x) I) J (A^{-1/2} (x) I).
  Matrix normalize(const Matrix& j) const {
    const Matrix reduced = hermitian_part(partial_trace(j, {din_, dout_}, Subsystem::Second));
    const Matrix fix = func_hermitian(eig_hermitian(reduced), [](double t) { return 1.0 / std::sqrt(t); });
    const Matrix lift = kron(fix, Matrix::Identity(dout_, dout_));
    return hermitian_part(lift * j * lift.adjoint());
  }

  /// Q_x = Tr_B[J_x^{1/2} eta(J_x^{-1/2} J J_x^{-1/2}) J_x^{1/2}].
  Matrix q_term(std::size_t x, const Matrix& j, Eigensystem* inner) const {
    Eigensystem es = eig_hermitian(hermitian_part(inv_root_[x] * j * inv_root_[x]));
    const Matrix f = func_hermitian(es, eta);
    if (inner) *inner = std::move(es);
    return hermitian_part(partial_trace(Matrix(root_[x] * f * root_[x]), {din_, dout_}, Subsystem::Second));
  }

  double max_term(const Matrix& j) const {
    double top = -kInf;
    for (std::size_t x = 0; x < root_.size(); ++x)
      top = std::max(top, eig_hermitian(q_term(x, j, nullptr)).values.maxCoeff());
    return top;
  }

  /// mu ln sum_x Tr exp(Q_x / mu), its gradient in J, and per-term weights Tr W_x.
  double smoothed(const Matrix& j, double mu, Matrix* grad, std::vector<double>* weights) const {
    const std::size_t r = root_.size();
    std::vector<Eigensystem> inner(r), outer(r);
    double top = -kInf;
    for (std::size_t x = 0; x < r; ++x) {
      outer[x] = eig_hermitian(q_term(x, j, &inner[x]));
      top = std::max(top, outer[x].values.maxCoeff());
    }
    double z = 0.0;
    std::vector<RealVector> expo(r);
    for (std::size_t x = 0; x < r; ++x) {
      expo[x] = ((outer[x].values.array() - top) / mu).exp();
      z += expo[x].sum();
    }
    const double value = top + mu * std::log(z);
    if (weights) {
      weights->resize(r);
      for (std::size_t x = 0; x < r; ++x) (*weights)[x] = expo[x].sum() / z;
    }
    if (grad) {
      *grad = Matrix::Zero(dim(), dim());
      for (std::size_t x = 0; x < r; ++x) {
        const Matrix w = outer[x].vectors * (expo[x] / z).cast<Complex>().asDiagonal() * outer[x].vectors.adjoint();
        const Matrix g = root_[x] * kron(w, Matrix::Identity(dout_, dout_)) * root_[x];
        *grad += inv_root_[x] * frechet_eta(inner[x], g) * inv_root_[x];
      }
      *grad = hermitian_part(*grad);
    }
    return value;
  }

 private:
  /// Daleckii-Krein: D eta(Y)[H] = V (Gamma o V^dagger H V) V^dagger.
  static Matrix frechet_eta(const Eigensystem& es, const Matrix& h) {
    const RealVector& l = es.values;
    const Index n = l.size();
    const double floor = 1e-14 * std::max(1.0, l.cwiseAbs().maxCoeff());
    auto derivative = [floor](double t) { return std::log(std::max(t, floor)) + 1.0; };
    Matrix m = es.vectors.adjoint() * h * es.vectors;
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < n; ++k) {
        const double a = std::max(l(i), 0.0), b = std::max(l(k), 0.0);
        const double gamma = std::abs(a - b) > 1e-10 * std::max({1.0, a, b}) ? (eta(a) - eta(b)) / (a - b)
                                                                             : derivative(0.5 * (a + b));
        m(i, k) *= gamma;
      }
    return es.vectors * m * es.vectors.adjoint();
  }

  Index din_, dout_;
  Matrix basis_;
  std::vector<Matrix> root_, inv_root_;
};

struct Descent {
  Matrix j;
  std::vector<double> weights;
};

/// Projected gradient with Armijo backtracking at a fixed temperature.
Descent descend(const ChoiProblem& problem, Matrix j, double mu, int iterations) {
  Matrix grad;
  std::vector<double> weights;
  double value = problem.smoothed(j, mu, &grad, &weights);
  double step = 1.0;
  for (int it = 0; it < iterations; ++it) {
    bool accepted = false;
    while (step > 1e-14) {
      const Matrix candidate = problem.normalize(problem.project(j - step * grad).first);
      const double decrease = (candidate - j).squaredNorm();
      Matrix next_grad;
      std::vector<double> next_weights;
      const double next = problem.smoothed(candidate, mu, &next_grad, &next_weights);
      if (next <= value - 1e-4 * decrease / step) {
        const bool stuck = decrease < 1e-26;
        j = candidate;
        value = next;
        grad = std::move(next_grad);
        weights = std::move(next_weights);
        accepted = !stuck;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return {std::move(j), std::move(weights)};
}

}  // namespace

ChannelRadiusResult channel_bs_radius(const std::vector<QuantumChannel>& channels, double tol, int restarts,
                                      std::uint64_t seed) {
  if (channels.size() < 2) throw ValidationError("channel_bs_radius: at least two channels required");
  const Index din = channels.front().dim_in();
  const Index dout = channels.front().dim_out();
  for (const auto& ch : channels)
    if (ch.dim_in() != din || ch.dim_out() != dout)
      throw DimensionMismatch("channel_bs_radius: channels act between different spaces");

  std::vector<HermitianOperator> chois;
  for (const auto& ch : channels) chois.push_back(ch.choi().op);
  const Matrix basis = support_intersection(chois);
  const int starts = std::max(restarts, 1);
  ChannelRadiusResult result{ExtendedReal::infinity(), std::nullopt, std::nullopt, false, starts};
  if (basis.cols() == 0) return result;

  const ChoiProblem problem(channels, basis);
  for (int start = 0; start < starts; ++start) {
    Matrix init;
    if (start == 0) {
      init = Matrix::Zero(din * dout, din * dout);
      for (const auto& j : chois) init += j.matrix() / static_cast<double>(chois.size());
    } else {
      Rng rng = make_rng(seed, static_cast<std::uint64_t>(start));
      init = random_channel(rng, din, dout).choi().op.matrix();
    }
    auto [j, residual] = problem.project(init);
    if (residual > 1e-6) continue;  // no channel lives on the common support
    j = problem.normalize(j);

    std::vector<double> weights(channels.size(), 1.0 / static_cast<double>(channels.size()));
    double previous = problem.max_term(j);
    for (double mu : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
      Descent d = descend(problem, j, mu, 400);
      j = std::move(d.j);
      if (!d.weights.empty()) weights = std::move(d.weights);
      const double current = problem.max_term(j);
      if (mu < 1e-4 && std::abs(previous - current) < 0.1 * tol) break;
      previous = current;
    }

    QuantumChannel candidate = QuantumChannel::from_choi(HermitianOperator(j), din, dout);
    ExtendedReal value(0.0);
    for (const auto& ch : channels) value = max(value, bs_channel_divergence(candidate, ch));
    if (!result.channel || value < result.value) {
      result.value = value;
      result.channel = std::move(candidate);
      result.weights = SimplexWeights(weights);
    }
  }
  return result;
}

}  // namespace qexcl
