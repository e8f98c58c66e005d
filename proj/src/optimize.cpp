#include "optimize.hpp"

#include <cmath>

namespace qexcl::detail {

RealVector numeric_gradient(const std::function<double(const RealVector&)>& f, const RealVector& x, double step) {
  RealVector grad(x.size());
  RealVector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + step;
    const double up = f(probe);
    probe(i) = x(i) - step;
    const double down = f(probe);
    probe(i) = x(i);
    grad(i) = (up - down) / (2 * step);
  }
  return grad;
}

RealVector bfgs_minimize(const SmoothObjective& f, RealVector x, int max_iterations, double grad_tol) {
  const Index n = x.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  RealVector g(n);
  double fx = f(x, &g);
  for (int it = 0; it < max_iterations; ++it) {
    if (!(g.norm() > grad_tol)) break;
    RealVector dir = -h * g;
    double slope = g.dot(dir);
    if (!(slope < 0)) {
      h.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
    }
    double t = 1.0;
    RealVector next;
    RealVector g_next(n);
    double f_next = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      next = x + t * dir;
      f_next = f(next, nullptr);
      if (std::isfinite(f_next) && f_next <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (h.isIdentity()) break;
      h.setIdentity();
      continue;
    }
    f_next = f(next, &g_next);
    const RealVector s = next - x;
    const RealVector y = g_next - g;
    const double sy = s.dot(y);
    x = std::move(next);
    fx = f_next;
    g = g_next;
    if (sy > 1e-14 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      h = (id - rho * s * y.transpose()) * h * (id - rho * y * s.transpose()) + rho * s * s.transpose();
    } else {
      h.setIdentity();
    }
  }
  return x;
}

}  // namespace qexcl::detail
