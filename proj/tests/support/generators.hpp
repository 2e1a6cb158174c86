#pragma once

#include <random>
#include <vector>

#include "uvman/jet.hpp"

namespace uvman::testing {

inline Jet random_jet(const std::shared_ptr<const JetShape>& shape, std::mt19937_64& rng,
                      int valid = -1) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(shape->count());
  for (double& v : c) v = u(rng);
  return Jet::from_coefficients(shape, c, valid < 0 ? shape->order() : valid);
}

// |a - b| <= tol * max(1, |a|, |b|)
inline bool close_rel(double a, double b, double tol) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

inline bool jets_close(const Jet& a, const Jet& b, int degree, double tol) {
  const double scale = std::max({1.0, norm_up_to(a, std::min(degree, a.valid_degree())),
                                 norm_up_to(b, std::min(degree, b.valid_degree()))});
  return max_coeff_difference(a, b, degree) <= tol * scale;
}

}  // namespace uvman::testing
