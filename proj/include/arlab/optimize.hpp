#pragma once

// Local optimizers used by the scans. All are deterministic.

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace arlab {

using Objective = std::function<double(std::span<const double>)>;
/// A map R^n -> R^2 (real and imaginary part of a complex residual).
using PlanarResidual = std::function<std::array<double, 2>(std::span<const double>)>;

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead (GSL nmsimplex2) from `x0` with initial simplex size `step`.
/// Non-finite objective values are treated as 1e300.
MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0, double step, int max_evals,
                           double size_tol = 1e-13);

/// Gradient descent with central-difference gradients and Armijo backtracking.
MinimizeResult gradient_descent(const Objective& f, std::vector<double> x0, double step,
                                int max_evals, double grad_tol = 1e-13);

struct ZeroResult {
  std::vector<double> x;
  double residual = 0.0;  // |g(x)|
  int iterations = 0;
  bool converged = false;
};

/// Minimum-norm Gauss-Newton for an underdetermined g: R^n -> R^2, with
/// central-difference Jacobians. Stops when |g| <= tol or progress stalls.
ZeroResult gauss_newton_zero(const PlanarResidual& g, std::vector<double> x0, int max_iter = 60,
                             double tol = 1e-15);

}  // namespace arlab
