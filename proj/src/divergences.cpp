#include "qexcl/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qexcl/errors.hpp"

namespace qexcl {

namespace {

constexpr double kStateTol = 1e-10;

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw DimensionMismatch(os.str());
  }
}

void require_alpha_above_one(double alpha, const char* what) {
  if (!(alpha > 1.0) || std::isinf(alpha)) {
    std::ostringstream os;
    os << what << ": alpha must lie in (1, inf), got " << alpha;
    throw InvalidAlpha(os.str());
  }
}

// (1/(a-1)) ln sum_i |lambda_i(W gamma W)|^a with W = sigma^{(1-a)/2a} on supp sigma.
ExtendedReal sandwiched_formula(const HermitianOperator& gamma, const HermitianOperator& sigma, double alpha) {
  if (!support_dominated(gamma, sigma)) return ExtendedReal::infinity();
  const Matrix w = power_on_support(sigma, (1.0 - alpha) / (2.0 * alpha)).matrix();
  const RealVector vals = eig_hermitian(Matrix(w * gamma.matrix() * w)).values;
  double q = 0.0;
  for (Index i = 0; i < vals.size(); ++i) q += std::pow(std::abs(vals(i)), alpha);
  return ExtendedReal(std::log(q) / (alpha - 1.0));
}

}  // namespace

DensityOperator::DensityOperator(HermitianOperator op) : op_(std::move(op)) {
  const double tr = trace(op_);
  if (std::abs(tr - 1.0) > kStateTol) {
    std::ostringstream os;
    os << "DensityOperator: trace " << tr << " differs from 1";
    throw ValidationError(os.str());
  }
  const double lo = min_eigenvalue(op_);
  if (lo < -kStateTol) {
    std::ostringstream os;
    os << "DensityOperator: negative eigenvalue " << lo;
    throw ValidationError(os.str());
  }
}

DensityOperator DensityOperator::maximally_mixed(Index dim) {
  return DensityOperator(HermitianOperator::identity(dim) * (1.0 / static_cast<double>(dim)));
}

DensityOperator DensityOperator::pure(const Ket& v) {
  const double n = v.norm();
  if (n == 0.0) throw ZeroOperator("DensityOperator::pure: zero vector");
  return DensityOperator(HermitianOperator::projector(v / n));
}

TraceOneHermitian::TraceOneHermitian(HermitianOperator op) : op_(std::move(op)) {
  const double tr = trace(op_);
  if (std::abs(tr - 1.0) > kStateTol) {
    std::ostringstream os;
    os << "TraceOneHermitian: trace " << tr << " differs from 1";
    throw ValidationError(os.str());
  }
}

ExtendedReal umegaki(const DensityOperator& rho, const HermitianOperator& sigma) {
  require_same_dim(rho.dim(), sigma.dim(), "umegaki");
  const Matrix log_sigma = func_on_support(eig_hermitian(sigma), [](double t) { return std::log(t); });
  if (!support_dominated(rho.op(), sigma)) return ExtendedReal::infinity();
  const RealVector p = eig_hermitian(rho.op()).values;
  const double tol = support_tolerance(p);
  double neg_entropy = 0.0;
  for (Index i = 0; i < p.size(); ++i)
    if (p(i) > tol) neg_entropy += p(i) * std::log(p(i));
  const double cross = (rho.matrix() * log_sigma).trace().real();
  return ExtendedReal(neg_entropy - cross);
}

ExtendedReal sandwiched(const DensityOperator& rho, const HermitianOperator& sigma, double alpha) {
  require_alpha_above_one(alpha, "sandwiched");
  require_same_dim(rho.dim(), sigma.dim(), "sandwiched");
  return sandwiched_formula(rho.op(), sigma, alpha);
}

ExtendedReal sandwiched_extended(const TraceOneHermitian& gamma, const HermitianOperator& sigma, double alpha) {
  require_alpha_above_one(alpha, "sandwiched_extended");
  require_same_dim(gamma.dim(), sigma.dim(), "sandwiched_extended");
  if (gamma.matrix().cwiseAbs().maxCoeff() == 0.0) throw ZeroOperator("sandwiched_extended: gamma = 0");
  return sandwiched_formula(gamma.op(), sigma, alpha);
}

ExtendedReal geometric(const DensityOperator& rho, const HermitianOperator& sigma, double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) {
    std::ostringstream os;
    os << "geometric: alpha must lie in (1, 2], got " << alpha;
    throw InvalidAlpha(os.str());
  }
  require_same_dim(rho.dim(), sigma.dim(), "geometric");
  const Matrix inv_sqrt = power_on_support(sigma, -0.5).matrix();
  if (!support_dominated(rho.op(), sigma)) return ExtendedReal::infinity();
  const Matrix x = inv_sqrt * rho.matrix() * inv_sqrt;
  const Matrix x_pow = func_on_positive_part(x, [alpha](double t) { return std::pow(t, alpha); });
  const double q = (sigma.matrix() * x_pow).trace().real();
  return ExtendedReal(std::log(q) / (alpha - 1.0));
}

ExtendedReal belavkin_staszewski(const DensityOperator& rho, const HermitianOperator& sigma) {
  require_same_dim(rho.dim(), sigma.dim(), "belavkin_staszewski");
  if (!support_dominated(rho.op(), sigma)) return ExtendedReal::infinity();
  // On the support branch Tr[rho ln(rho^1/2 sigma^-1 rho^1/2)] = Tr[sigma eta(sigma^-1/2 rho sigma^-1/2)]
  // with eta(t) = t ln t. The second form stays accurate when rho is nearly singular.
  const Matrix inv_sqrt = power_on_support(sigma, -0.5).matrix();
  const Matrix x = inv_sqrt * rho.matrix() * inv_sqrt;
  const Matrix eta_x = func_on_positive_part(x, [](double t) { return t * std::log(t); });
  return ExtendedReal((sigma.matrix() * eta_x).trace().real());
}

std::pair<double, double> measurement_channel(const HermitianOperator& effect, const TraceOneHermitian& input) {
  require_same_dim(effect.dim(), input.dim(), "measurement_channel");
  const RealVector vals = eig_hermitian(effect).values;
  if (vals(0) < -kStateTol || vals(vals.size() - 1) > 1.0 + kStateTol) {
    std::ostringstream os;
    os << "measurement_channel: effect spectrum [" << vals(0) << ", " << vals(vals.size() - 1)
       << "] outside [0, 1]";
    throw InvalidEffect(os.str());
  }
  const double first = (effect.matrix() * input.matrix()).trace().real();
  return {first, trace(input.op()) - first};
}

double hoeffding_bound_residual(const TraceOneHermitian& tau, const DensityOperator& rho,
                                const HermitianOperator& effect, double alpha) {
  const double tau_weight = measurement_channel(effect, tau).first;
  const double rho_weight = measurement_channel(effect, TraceOneHermitian(rho)).first;
  const ExtendedReal d = sandwiched_extended(tau, rho.op(), alpha);
  if (d.is_infinite()) return d.value();
  const double beta = (alpha - 1.0) / alpha;
  const double rhs = std::pow(std::max(rho_weight, 0.0), beta) * std::exp(beta * d.value());
  return rhs - std::abs(tau_weight);
}

}  // namespace qexcl
