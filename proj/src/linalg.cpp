#include "qexcl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qexcl/errors.hpp"

namespace qexcl {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionMismatch(os.str());
  }
}

double resolve_tol(const RealVector& values, std::optional<double> tol) {
  return tol ? *tol : support_tolerance(values);
}

}  // namespace

HermitianOperator::HermitianOperator(const Matrix& m) {
  require_square(m, "HermitianOperator");
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::identity(Index dim) {
  return HermitianOperator(Matrix::Identity(dim, dim), Trusted{});
}

HermitianOperator HermitianOperator::zero(Index dim) {
  return HermitianOperator(Matrix::Zero(dim, dim), Trusted{});
}

HermitianOperator HermitianOperator::diagonal(const RealVector& diag) {
  return HermitianOperator(diag.cast<Complex>().asDiagonal().toDenseMatrix(), Trusted{});
}

HermitianOperator HermitianOperator::projector(const Ket& v) {
  return HermitianOperator(v * v.adjoint());
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& other) {
  if (other.dim() != dim()) throw DimensionMismatch("HermitianOperator +: dimension mismatch");
  m_ += other.m_;
  return *this;
}

HermitianOperator& HermitianOperator::operator-=(const HermitianOperator& other) {
  if (other.dim() != dim()) throw DimensionMismatch("HermitianOperator -: dimension mismatch");
  m_ -= other.m_;
  return *this;
}

HermitianOperator& HermitianOperator::operator*=(double s) {
  m_ *= s;
  return *this;
}

ExtendedReal::ExtendedReal(double v) {
  if (std::isnan(v)) throw std::domain_error("ExtendedReal: NaN");
  if (std::isinf(v)) {
    if (v < 0) throw std::domain_error("ExtendedReal: -infinity");
    infinite_ = true;
    return;
  }
  v_ = v;
}

ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
  if (a.is_infinite() || b.is_infinite()) return ExtendedReal::infinity();
  return ExtendedReal(a.v_ + b.v_);
}

Matrix Eigensystem::reconstruct() const {
  return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

Eigensystem eig_hermitian(const Matrix& a) {
  require_square(a, "eig_hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: no convergence");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigensystem eig_hermitian(const HermitianOperator& a) { return eig_hermitian(a.matrix()); }

double support_tolerance(const RealVector& eigenvalues) {
  if (eigenvalues.size() == 0) return 0.0;
  return kRelativeSupportTol * eigenvalues.cwiseAbs().maxCoeff();
}

Matrix func_on_support(const Eigensystem& es, const std::function<double(double)>& f,
                       std::optional<double> support_tol) {
  const double tol = resolve_tol(es.values, support_tol);
  const Index n = es.values.size();
  if (n > 0 && es.values(0) < -tol) {
    std::ostringstream os;
    os << "func_on_support: eigenvalue " << es.values(0) << " below -" << tol;
    throw NegativeEigenvalue(os.str());
  }
  RealVector mapped(n);
  for (Index i = 0; i < n; ++i) mapped(i) = es.values(i) > tol ? f(es.values(i)) : 0.0;
  return es.vectors * mapped.cast<Complex>().asDiagonal() * es.vectors.adjoint();
}

HermitianOperator func_on_support(const HermitianOperator& a, const std::function<double(double)>& f,
                                  std::optional<double> support_tol) {
  return HermitianOperator(func_on_support(eig_hermitian(a), f, support_tol));
}

Matrix func_on_positive_part(const Matrix& a, const std::function<double(double)>& f) {
  const Eigensystem es = eig_hermitian(Matrix(0.5 * (a + a.adjoint())));
  const double tol = support_tolerance(es.values);
  return func_hermitian(es, [&f, tol](double t) { return t > tol ? f(t) : 0.0; });
}

Matrix func_hermitian(const Eigensystem& es, const std::function<double(double)>& f) {
  RealVector mapped = es.values.unaryExpr(f);
  return es.vectors * mapped.cast<Complex>().asDiagonal() * es.vectors.adjoint();
}

HermitianOperator func_hermitian(const HermitianOperator& a, const std::function<double(double)>& f) {
  return HermitianOperator(func_hermitian(eig_hermitian(a), f));
}

HermitianOperator power_on_support(const HermitianOperator& a, double p, std::optional<double> support_tol) {
  return func_on_support(a, [p](double t) { return std::pow(t, p); }, support_tol);
}

Matrix support_basis(const HermitianOperator& a, std::optional<double> support_tol) {
  const Eigensystem es = eig_hermitian(a);
  const double tol = resolve_tol(es.values, support_tol);
  std::vector<Index> keep;
  for (Index i = 0; i < es.values.size(); ++i)
    if (std::abs(es.values(i)) > tol) keep.push_back(i);
  Matrix basis(a.dim(), static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) basis.col(static_cast<Index>(k)) = es.vectors.col(keep[k]);
  return basis;
}

HermitianOperator support_projector(const HermitianOperator& a, std::optional<double> support_tol) {
  const Matrix basis = support_basis(a, support_tol);
  return HermitianOperator(basis * basis.adjoint());
}

Matrix support_intersection(const std::vector<HermitianOperator>& ops) {
  if (ops.empty()) throw DimensionMismatch("support_intersection: empty list");
  const Index d = ops.front().dim();
  // The intersection is the null space of sum_x (I - P_x).
  Matrix complement_sum = Matrix::Zero(d, d);
  for (const auto& op : ops) {
    if (op.dim() != d) throw DimensionMismatch("support_intersection: dimension mismatch");
    complement_sum += Matrix::Identity(d, d) - support_projector(op).matrix();
  }
  const Eigensystem es = eig_hermitian(complement_sum);
  std::vector<Index> keep;
  for (Index i = 0; i < d; ++i)
    if (es.values(i) < 1e-8) keep.push_back(i);
  Matrix basis(d, static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) basis.col(static_cast<Index>(k)) = es.vectors.col(keep[k]);
  return basis;
}

bool support_dominated(const HermitianOperator& gamma, const HermitianOperator& sigma, double tol) {
  if (gamma.dim() != sigma.dim()) throw DimensionMismatch("support_dominated: dimension mismatch");
  const Matrix complement = Matrix::Identity(sigma.dim(), sigma.dim()) - support_projector(sigma).matrix();
  const Matrix q = complement * support_projector(gamma).matrix() * complement;
  return eig_hermitian(HermitianOperator(q)).values.cwiseAbs().maxCoeff() <= tol;
}

double schatten_norm(const HermitianOperator& a, double alpha) {
  if (!(alpha >= 1.0)) throw std::invalid_argument("schatten_norm: alpha must be >= 1");
  const RealVector abs_vals = eig_hermitian(a).values.cwiseAbs();
  if (std::isinf(alpha)) return abs_vals.maxCoeff();
  const double top = abs_vals.maxCoeff();
  if (top == 0.0) return 0.0;
  // Scaled to avoid overflow for large alpha.
  double acc = 0.0;
  for (Index i = 0; i < abs_vals.size(); ++i) acc += std::pow(abs_vals(i) / top, alpha);
  return top * std::pow(acc, 1.0 / alpha);
}

double trace(const HermitianOperator& a) { return a.matrix().trace().real(); }

double min_eigenvalue(const HermitianOperator& a) { return eig_hermitian(a).values(0); }

double max_eigenvalue(const HermitianOperator& a) {
  const auto es = eig_hermitian(a);
  return es.values(es.values.size() - 1);
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(kron(a.matrix(), b.matrix()));
}

Matrix partial_trace(const Matrix& a, std::array<Index, 2> dims, Subsystem traced) {
  const Index da = dims[0], db = dims[1];
  if (a.rows() != da * db || a.cols() != da * db) {
    std::ostringstream os;
    os << "partial_trace: operator is " << a.rows() << "x" << a.cols() << ", dims are " << da << "x" << db;
    throw DimensionMismatch(os.str());
  }
  if (traced == Subsystem::Second) {
    Matrix out = Matrix::Zero(da, da);
    for (Index i = 0; i < da; ++i)
      for (Index j = 0; j < da; ++j) out(i, j) = a.block(i * db, j * db, db, db).trace();
    return out;
  }
  Matrix out = Matrix::Zero(db, db);
  for (Index i = 0; i < da; ++i) out += a.block(i * db, i * db, db, db);
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& a, std::array<Index, 2> dims, Subsystem traced) {
  return HermitianOperator(partial_trace(a.matrix(), dims, traced));
}

}  // namespace qexcl
