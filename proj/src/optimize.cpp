#include "arlab/optimize.hpp"

#include <cmath>
#include <mutex>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <Eigen/Dense>

namespace arlab {

namespace {

constexpr double kHuge = 1e300;

struct Counted {
  const Objective* f;
  int evaluations = 0;
};

double call_counted(const gsl_vector* v, void* params) {
  auto* c = static_cast<Counted*>(params);
  ++c->evaluations;
  const double value = (*c->f)(std::span<const double>(v->data, v->size));
  return std::isfinite(value) ? value : kHuge;
}

void disable_gsl_abort() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

double safe_eval(const Objective& f, std::span<const double> x) {
  const double v = f(x);
  return std::isfinite(v) ? v : kHuge;
}

}  // namespace

MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0, double step, int max_evals,
                           double size_tol) {
  disable_gsl_abort();
  const std::size_t n = x0.size();
  Counted counted{&f};
  gsl_multimin_function fn{&call_counted, n, &counted};

  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* steps = gsl_vector_alloc(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x, i, x0[i]);
    gsl_vector_set(steps, i, step);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &fn, x, steps);

  bool converged = false;
  while (counted.evaluations < max_evals) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(s);
    if (gsl_multimin_test_size(size, size_tol) == GSL_SUCCESS || s->fval == 0.0) {
      converged = true;
      break;
    }
  }

  MinimizeResult r;
  r.x.assign(s->x->data, s->x->data + n);
  r.value = s->fval;
  r.evaluations = counted.evaluations;
  r.converged = converged;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(steps);
  gsl_vector_free(x);
  return r;
}

MinimizeResult gradient_descent(const Objective& f, std::vector<double> x0, double step,
                                int max_evals, double grad_tol) {
  const std::size_t n = x0.size();
  MinimizeResult r;
  r.x = std::move(x0);
  r.value = safe_eval(f, r.x);
  r.evaluations = 1;
  double rate = step;
  std::vector<double> grad(n), trial(n), probe(n);
  const double h = 1e-7;
  while (r.evaluations + 2 * static_cast<int>(n) + 1 < max_evals) {
    probe = r.x;
    double gnorm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      probe[i] = r.x[i] + h;
      const double fp = safe_eval(f, probe);
      probe[i] = r.x[i] - h;
      const double fm = safe_eval(f, probe);
      probe[i] = r.x[i];
      grad[i] = (fp - fm) / (2.0 * h);
      gnorm2 += grad[i] * grad[i];
    }
    r.evaluations += 2 * static_cast<int>(n);
    if (std::sqrt(gnorm2) < grad_tol) {
      r.converged = true;
      break;
    }
    bool improved = false;
    while (rate > 1e-16 && r.evaluations < max_evals) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = r.x[i] - rate * grad[i];
      const double ft = safe_eval(f, trial);
      ++r.evaluations;
      if (ft <= r.value - 1e-4 * rate * gnorm2) {
        r.x = trial;
        r.value = ft;
        improved = true;
        rate *= 2.0;
        break;
      }
      rate *= 0.5;
    }
    if (!improved) {
      r.converged = true;
      break;
    }
  }
  return r;
}

ZeroResult gauss_newton_zero(const PlanarResidual& g, std::vector<double> x0, int max_iter,
                             double tol) {
  const auto n = static_cast<Eigen::Index>(x0.size());
  ZeroResult r;
  r.x = std::move(x0);
  auto value = g(r.x);
  r.residual = std::hypot(value[0], value[1]);
  std::vector<double> probe(r.x.size());
  Eigen::Matrix<double, 2, Eigen::Dynamic> jac(2, n);
  for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
    if (r.residual <= tol) {
      r.converged = true;
      break;
    }
    const double h = 1e-8;
    probe = r.x;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      probe[k] = r.x[k] + h;
      const auto gp = g(probe);
      probe[k] = r.x[k] - h;
      const auto gm = g(probe);
      probe[k] = r.x[k];
      jac(0, i) = (gp[0] - gm[0]) / (2.0 * h);
      jac(1, i) = (gp[1] - gm[1]) / (2.0 * h);
    }
    const Eigen::Matrix2d jjt = jac * jac.transpose();
    if (std::abs(jjt.determinant()) < 1e-300) break;
    const Eigen::Vector2d rhs(value[0], value[1]);
    const Eigen::VectorXd delta = jac.transpose() * jjt.ldlt().solve(rhs);

    // Damped step: halve until the residual decreases.
    double lambda = 1.0;
    bool accepted = false;
    std::vector<double> trial(r.x.size());
    for (int k = 0; k < 30; ++k) {
      for (Eigen::Index i = 0; i < n; ++i) {
        trial[static_cast<std::size_t>(i)] = r.x[static_cast<std::size_t>(i)] - lambda * delta(i);
      }
      const auto tv = g(trial);
      const double tr = std::hypot(tv[0], tv[1]);
      if (std::isfinite(tr) && tr < r.residual) {
        r.x = trial;
        value = tv;
        r.residual = tr;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  if (r.residual <= tol) r.converged = true;
  return r;
}

}  // namespace arlab
