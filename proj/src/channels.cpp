#include "qexcl/channels.hpp"

#include <cmath>
#include <sstream>

#include "qexcl/errors.hpp"
#include "qexcl/random.hpp"

namespace qexcl {

namespace {

constexpr double kTraceTol = 1e-10;

ChoiOperator build_choi(Index dim_in, Index dim_out, const std::vector<Matrix>& kraus) {
  Matrix j = Matrix::Zero(dim_in * dim_out, dim_in * dim_out);
  Ket vec(dim_in * dim_out);
  for (const auto& k : kraus) {
    for (Index i = 0; i < dim_in; ++i)
      for (Index b = 0; b < dim_out; ++b) vec(i * dim_out + b) = k(b, i);
    j += vec * vec.adjoint();
  }
  return {HermitianOperator(j), dim_in, dim_out};
}

void require_compatible(const QuantumChannel& n, const QuantumChannel& m, const char* what) {
  if (n.dim_in() != m.dim_in() || n.dim_out() != m.dim_out()) {
    std::ostringstream os;
    os << what << ": channels act between different spaces";
    throw DimensionMismatch(os.str());
  }
}

double operator_norm(const Matrix& hermitian) {
  return eig_hermitian(hermitian).values.cwiseAbs().maxCoeff();
}

}  // namespace

QuantumChannel::QuantumChannel(Index dim_in, Index dim_out, std::vector<Matrix> kraus)
    : dim_in_(dim_in), dim_out_(dim_out), kraus_(std::move(kraus)) {
  if (dim_in < 1 || dim_out < 1) throw DimensionMismatch("QuantumChannel: dimensions must be positive");
  if (kraus_.empty()) throw ValidationError("QuantumChannel: empty Kraus list");
  Matrix total = Matrix::Zero(dim_in, dim_in);
  for (std::size_t k = 0; k < kraus_.size(); ++k) {
    const Matrix& op = kraus_[k];
    if (op.rows() != dim_out || op.cols() != dim_in) {
      std::ostringstream os;
      os << "QuantumChannel: Kraus operator " << k << " is " << op.rows() << "x" << op.cols() << ", expected "
         << dim_out << "x" << dim_in;
      throw DimensionMismatch(os.str());
    }
    total += op.adjoint() * op;
  }
  const double residual = (total - Matrix::Identity(dim_in, dim_in)).cwiseAbs().maxCoeff();
  if (residual > kTraceTol) {
    std::ostringstream os;
    os << "QuantumChannel: sum K^dagger K deviates from identity by " << residual;
    throw ValidationError(os.str());
  }
  choi_ = std::make_shared<const ChoiOperator>(build_choi(dim_in_, dim_out_, kraus_));
}

QuantumChannel QuantumChannel::identity(Index dim) {
  return QuantumChannel(dim, dim, {Matrix::Identity(dim, dim)});
}

QuantumChannel QuantumChannel::unitary(const Matrix& u) {
  if (u.rows() != u.cols()) throw DimensionMismatch("QuantumChannel::unitary: non-square matrix");
  return QuantumChannel(u.rows(), u.rows(), {u});
}

QuantumChannel QuantumChannel::replacer(const DensityOperator& sigma, Index dim_in) {
  const Eigensystem es = eig_hermitian(sigma.op());
  const Index d = sigma.dim();
  std::vector<Matrix> kraus;
  for (Index j = 0; j < d; ++j) {
    const double lambda = es.values(j);
    if (lambda <= support_tolerance(es.values)) continue;
    for (Index k = 0; k < dim_in; ++k) {
      Matrix op = Matrix::Zero(d, dim_in);
      op.col(k) = std::sqrt(lambda) * es.vectors.col(j);
      kraus.push_back(std::move(op));
    }
  }
  // Renormalize against the clipped spectrum so the map is exactly trace preserving.
  Matrix total = Matrix::Zero(dim_in, dim_in);
  for (const auto& k : kraus) total += k.adjoint() * k;
  const double scale = 1.0 / std::sqrt(total(0, 0).real());
  for (auto& k : kraus) k *= scale;
  return QuantumChannel(dim_in, d, std::move(kraus));
}

QuantumChannel QuantumChannel::fully_depolarizing(Index dim) {
  return replacer(DensityOperator::maximally_mixed(dim), dim);
}

QuantumChannel QuantumChannel::from_choi(const HermitianOperator& choi, Index dim_in, Index dim_out) {
  if (choi.dim() != dim_in * dim_out) throw DimensionMismatch("QuantumChannel::from_choi: dimension mismatch");
  const Eigensystem es = eig_hermitian(choi);
  const double tol = support_tolerance(es.values);
  std::vector<Matrix> kraus;
  for (Index k = 0; k < es.values.size(); ++k) {
    if (es.values(k) <= tol) continue;
    Matrix op(dim_out, dim_in);
    const double s = std::sqrt(es.values(k));
    for (Index i = 0; i < dim_in; ++i)
      for (Index b = 0; b < dim_out; ++b) op(b, i) = s * es.vectors(i * dim_out + b, k);
    kraus.push_back(std::move(op));
  }
  if (kraus.empty()) throw ZeroOperator("QuantumChannel::from_choi: zero Choi operator");
  Matrix total = Matrix::Zero(dim_in, dim_in);
  for (const auto& k : kraus) total += k.adjoint() * k;
  const double residual = (total - Matrix::Identity(dim_in, dim_in)).cwiseAbs().maxCoeff();
  if (residual > 1e-6) {
    std::ostringstream os;
    os << "QuantumChannel::from_choi: partial trace deviates from identity by " << residual;
    throw ValidationError(os.str());
  }
  const Matrix fix = func_hermitian(eig_hermitian(total), [](double t) { return 1.0 / std::sqrt(t); });
  for (auto& k : kraus) k = k * fix;
  return QuantumChannel(dim_in, dim_out, std::move(kraus));
}

ChoiOperator choi_of(const QuantumChannel& channel) { return channel.choi(); }

HermitianOperator apply(const QuantumChannel& channel, const HermitianOperator& input, Index dim_ref) {
  if (dim_ref < 1 || input.dim() != dim_ref * channel.dim_in()) {
    std::ostringstream os;
    os << "apply: input of dimension " << input.dim() << " does not match " << dim_ref << " x "
       << channel.dim_in();
    throw DimensionMismatch(os.str());
  }
  const Matrix id_ref = Matrix::Identity(dim_ref, dim_ref);
  const Index d_out = dim_ref * channel.dim_out();
  Matrix out = Matrix::Zero(d_out, d_out);
  for (const auto& k : channel.kraus()) {
    const Matrix big = dim_ref == 1 ? k : kron(id_ref, k);
    out += big * input.matrix() * big.adjoint();
  }
  return HermitianOperator(out);
}

HermitianOperator apply_adjoint(const QuantumChannel& channel, const HermitianOperator& op, Index dim_ref) {
  if (dim_ref < 1 || op.dim() != dim_ref * channel.dim_out()) {
    std::ostringstream os;
    os << "apply_adjoint: operator of dimension " << op.dim() << " does not match " << dim_ref << " x "
       << channel.dim_out();
    throw DimensionMismatch(os.str());
  }
  const Matrix id_ref = Matrix::Identity(dim_ref, dim_ref);
  const Index d_in = dim_ref * channel.dim_in();
  Matrix out = Matrix::Zero(d_in, d_in);
  for (const auto& k : channel.kraus()) {
    const Matrix big = dim_ref == 1 ? k : kron(id_ref, k);
    out += big.adjoint() * op.matrix() * big;
  }
  return HermitianOperator(out);
}

HermitianOperator apply_via_choi(const ChoiOperator& choi, const HermitianOperator& input) {
  if (input.dim() != choi.dim_in) throw DimensionMismatch("apply_via_choi: dimension mismatch");
  const Matrix lifted = kron(Matrix(input.matrix().transpose()), Matrix::Identity(choi.dim_out, choi.dim_out));
  return HermitianOperator(partial_trace(Matrix(lifted * choi.op.matrix()), {choi.dim_in, choi.dim_out},
                                         Subsystem::First));
}

ExtendedReal geometric_channel_divergence(const QuantumChannel& n, const QuantumChannel& m, double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) {
    std::ostringstream os;
    os << "geometric_channel_divergence: alpha must lie in (1, 2], got " << alpha;
    throw InvalidAlpha(os.str());
  }
  require_compatible(n, m, "geometric_channel_divergence");
  const HermitianOperator& jn = n.choi().op;
  const HermitianOperator& jm = m.choi().op;
  if (!support_dominated(jn, jm)) return ExtendedReal::infinity();
  const Eigensystem es_m = eig_hermitian(jm);
  const Matrix m_sqrt = func_on_support(es_m, [](double t) { return std::sqrt(t); });
  const Matrix m_inv_sqrt = func_on_support(es_m, [](double t) { return 1.0 / std::sqrt(t); });
  const Matrix x = m_inv_sqrt * jn.matrix() * m_inv_sqrt;
  const Matrix x_pow = func_on_positive_part(x, [alpha](double t) { return std::pow(t, alpha); });
  const Matrix q = partial_trace(Matrix(m_sqrt * x_pow * m_sqrt), {n.dim_in(), n.dim_out()}, Subsystem::Second);
  return ExtendedReal(std::log(operator_norm(q)) / (alpha - 1.0));
}

ExtendedReal bs_channel_divergence(const QuantumChannel& n, const QuantumChannel& m) {
  require_compatible(n, m, "bs_channel_divergence");
  const HermitianOperator& jn = n.choi().op;
  const HermitianOperator& jm = m.choi().op;
  if (!support_dominated(jn, jm)) return ExtendedReal::infinity();
  // J_N^1/2 ln(J_N^1/2 J_M^-1 J_N^1/2) J_N^1/2 = J_M^1/2 eta(J_M^-1/2 J_N J_M^-1/2) J_M^1/2, eta(t) = t ln t,
  // whenever J_N^0 <= J_M^0; the right-hand side is the numerically stable one.
  const Eigensystem es_m = eig_hermitian(jm);
  const Matrix m_sqrt = func_on_support(es_m, [](double t) { return std::sqrt(t); });
  const Matrix m_inv_sqrt = func_on_support(es_m, [](double t) { return 1.0 / std::sqrt(t); });
  const Matrix x = m_inv_sqrt * jn.matrix() * m_inv_sqrt;
  const Matrix eta_x = func_on_positive_part(x, [](double t) { return t * std::log(t); });
  const Matrix q = partial_trace(Matrix(m_sqrt * eta_x * m_sqrt), {n.dim_in(), n.dim_out()}, Subsystem::Second);
  return ExtendedReal(operator_norm(q));
}

namespace {

class InputObjective {
 public:
  InputObjective(const QuantumChannel& n, const QuantumChannel& m, std::optional<double> alpha)
      : n_(n), m_(m), alpha_(alpha), dim_(n.dim_in() * n.dim_in()) {}

  Index params() const { return 2 * dim_; }

  Ket to_ket(const RealVector& theta) const {
    Ket v(dim_);
    for (Index i = 0; i < dim_; ++i) v(i) = Complex(theta(i), theta(dim_ + i));
    return v / v.norm();
  }

  ExtendedReal operator()(const RealVector& theta) const {
    const HermitianOperator input = HermitianOperator::projector(to_ket(theta));
    const DensityOperator out_n(apply(n_, input, n_.dim_in()));
    const DensityOperator out_m(apply(m_, input, m_.dim_in()));
    return alpha_ ? geometric(out_n, out_m.op(), *alpha_) : belavkin_staszewski(out_n, out_m.op());
  }

 private:
  const QuantumChannel& n_;
  const QuantumChannel& m_;
  std::optional<double> alpha_;
  Index dim_;
};

}  // namespace

InputOptimization channel_divergence_input_opt(const QuantumChannel& n, const QuantumChannel& m,
                                               std::optional<double> alpha, int trials, std::uint64_t seed) {
  require_compatible(n, m, "channel_divergence_input_opt");
  if (alpha && !(*alpha > 1.0 && *alpha <= 2.0)) throw InvalidAlpha("channel_divergence_input_opt: alpha outside (1, 2]");
  const InputObjective objective(n, m, alpha);
  const Index p = objective.params();
  constexpr int kIterations = 100;
  constexpr double kStep = 1e-6;

  InputOptimization best{ExtendedReal(0.0), Ket::Zero(n.dim_in() * n.dim_in())};
  bool have_best = false;
  for (int trial = 0; trial < std::max(trials, 1); ++trial) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(trial));
    const Ket start = haar_ket(rng, n.dim_in() * n.dim_in());
    RealVector theta(p);
    for (Index i = 0; i < p / 2; ++i) {
      theta(i) = start(i).real();
      theta(p / 2 + i) = start(i).imag();
    }
    ExtendedReal current = objective(theta);
    if (current.is_infinite()) return {current, objective.to_ket(theta)};

    double step = 1.0;
    for (int it = 0; it < kIterations; ++it) {
      theta /= theta.norm();
      RealVector grad(p);
      for (Index i = 0; i < p; ++i) {
        RealVector up = theta, down = theta;
        up(i) += kStep;
        down(i) -= kStep;
        grad(i) = (objective(up).value() - objective(down).value()) / (2 * kStep);
      }
      // Near low Schmidt rank the support test can misfire; such probes end the trial.
      const double g2 = grad.squaredNorm();
      if (!(g2 > 1e-24) || !std::isfinite(g2)) break;
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls) {
        const RealVector trial_theta = theta + step * grad;
        const ExtendedReal value = objective(trial_theta);
        if (value.is_finite() && value.value() >= current.value() + 1e-4 * step * g2) {
          theta = trial_theta;
          current = value;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      step *= 2.0;
    }
    if (!have_best || current > best.value) {
      best = {current, objective.to_ket(theta)};
      have_best = true;
    }
  }
  return best;
}

}  // namespace qexcl
