#pragma once

#include <array>
#include <compare>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace qexcl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Eigenvalues at or below this fraction of the spectral radius are treated as
/// outside the support.
inline constexpr double kRelativeSupportTol = 1e-9;

/// Dense complex Hermitian matrix. The stored matrix is always exactly
/// Hermitian: construction replaces the input by (M + M^dagger) / 2.
class HermitianOperator {
 public:
  explicit HermitianOperator(const Matrix& m);

  static HermitianOperator identity(Index dim);
  static HermitianOperator zero(Index dim);
  static HermitianOperator diagonal(const RealVector& diag);
  /// |v><v|, not normalized.
  static HermitianOperator projector(const Ket& v);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }

  HermitianOperator& operator+=(const HermitianOperator& other);
  HermitianOperator& operator-=(const HermitianOperator& other);
  HermitianOperator& operator*=(double s);

  friend HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b) { return a += b; }
  friend HermitianOperator operator-(HermitianOperator a, const HermitianOperator& b) { return a -= b; }
  friend HermitianOperator operator*(double s, HermitianOperator a) { return a *= s; }
  friend HermitianOperator operator*(HermitianOperator a, double s) { return a *= s; }

 private:
  struct Trusted {};
  HermitianOperator(Matrix m, Trusted) : m_(std::move(m)) {}
  Matrix m_;
};

/// A real number or +infinity. Divergences use the infinite value for their
/// support-violation branch; it propagates through max/sum.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  /// Throws std::domain_error on NaN or -infinity; +infinity is accepted.
  explicit ExtendedReal(double v);

  static constexpr ExtendedReal infinity() {
    ExtendedReal e;
    e.infinite_ = true;
    return e;
  }

  bool is_finite() const { return !infinite_; }
  bool is_infinite() const { return infinite_; }
  /// The finite value, or +inf.
  double value() const { return infinite_ ? std::numeric_limits<double>::infinity() : v_; }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b);
  friend ExtendedReal max(ExtendedReal a, ExtendedReal b) { return a.value() >= b.value() ? a : b; }
  friend bool operator==(ExtendedReal a, ExtendedReal b) { return a.value() == b.value(); }
  friend std::partial_ordering operator<=>(ExtendedReal a, ExtendedReal b) {
    return a.value() <=> b.value();
  }

 private:
  double v_ = 0.0;
  bool infinite_ = false;
};

struct Eigensystem {
  RealVector values;  // ascending
  Matrix vectors;     // columns, unitary

  Matrix reconstruct() const;
};

Eigensystem eig_hermitian(const HermitianOperator& a);
/// Same, for a matrix already known to be Hermitian (only the lower triangle is read).
Eigensystem eig_hermitian(const Matrix& a);

/// Default support tolerance for a spectrum: kRelativeSupportTol * max |lambda|.
double support_tolerance(const RealVector& eigenvalues);

/// V f(lambda) V^dagger with f applied to eigenvalues above the support
/// tolerance and zero elsewhere. Throws NegativeEigenvalue when the smallest
/// eigenvalue is below -support_tol.
HermitianOperator func_on_support(const HermitianOperator& a, const std::function<double(double)>& f,
                                  std::optional<double> support_tol = std::nullopt);
Matrix func_on_support(const Eigensystem& es, const std::function<double(double)>& f,
                       std::optional<double> support_tol = std::nullopt);

/// For operators that are PSD by construction (A B A with A, B >= 0): f on the
/// eigenvalues above the support tolerance, rounding-level negatives dropped
/// rather than rejected.
Matrix func_on_positive_part(const Matrix& a, const std::function<double(double)>& f);

/// Plain functional calculus: f applied to every eigenvalue.
HermitianOperator func_hermitian(const HermitianOperator& a, const std::function<double(double)>& f);
Matrix func_hermitian(const Eigensystem& es, const std::function<double(double)>& f);

/// a^p on the support of a (negative p allowed).
HermitianOperator power_on_support(const HermitianOperator& a, double p,
                                   std::optional<double> support_tol = std::nullopt);

/// Orthogonal projector onto span{v : |lambda| > support_tol}.
HermitianOperator support_projector(const HermitianOperator& a, std::optional<double> support_tol = std::nullopt);

/// Isometry (dim x k) whose columns span the support of a.
Matrix support_basis(const HermitianOperator& a, std::optional<double> support_tol = std::nullopt);

/// Isometry (dim x k) whose columns span the intersection of the supports;
/// k = 0 when the intersection is trivial.
Matrix support_intersection(const std::vector<HermitianOperator>& ops);

/// ||(I - sigma^0) gamma^0 (I - sigma^0)||_inf <= tol.
bool support_dominated(const HermitianOperator& gamma, const HermitianOperator& sigma, double tol = 1e-8);

/// Schatten alpha-norm from |eigenvalues|; alpha = +inf gives the operator norm.
double schatten_norm(const HermitianOperator& a, double alpha);

double trace(const HermitianOperator& a);
double min_eigenvalue(const HermitianOperator& a);
double max_eigenvalue(const HermitianOperator& a);

bool is_hermitian(const Matrix& m, double tol = 1e-12);

Matrix kron(const Matrix& a, const Matrix& b);
HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);

enum class Subsystem { First, Second };

/// Trace out one factor of a bipartite operator on C^{dims[0]} (x) C^{dims[1]}.
Matrix partial_trace(const Matrix& a, std::array<Index, 2> dims, Subsystem traced);
HermitianOperator partial_trace(const HermitianOperator& a, std::array<Index, 2> dims, Subsystem traced);

}  // namespace qexcl
