#pragma once

#include <functional>

#include "qexcl/linalg.hpp"

namespace qexcl::detail {

/// Value and (optionally) gradient of a smooth objective on R^n.
using SmoothObjective = std::function<double(const RealVector& x, RealVector* grad)>;

/// Central finite-difference gradient.
RealVector numeric_gradient(const std::function<double(const RealVector&)>& f, const RealVector& x,
                            double step = 1e-6);

/// BFGS with Armijo backtracking; the inverse-Hessian estimate is reset
/// whenever a curvature pair is rejected. Returns the best point seen.
RealVector bfgs_minimize(const SmoothObjective& f, RealVector x, int max_iterations, double grad_tol);

}  // namespace qexcl::detail
