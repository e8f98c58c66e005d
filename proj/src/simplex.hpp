#pragma once

#include <vector>

namespace qexcl::detail {

/// Euclidean projection onto the probability simplex (sort-based).
std::vector<double> project_to_simplex(const std::vector<double>& v);

}  // namespace qexcl::detail
