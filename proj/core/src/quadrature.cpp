#include "charkern/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "charkern/error.hpp"

namespace charkern::quad {

Rule gauss_legendre(std::size_t n) {
  if (n == 0) throw DomainError("quadrature rule needs at least one node");
  Rule r{std::vector<double>(n), std::vector<double>(n)};
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

Rule gauss_legendre(std::size_t n, double a, double b) {
  Rule r = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < n; ++i) {
    r.nodes[i] = mid + half * r.nodes[i];
    r.weights[i] *= half;
  }
  return r;
}

namespace {

std::vector<double> apply(const Rule& r, const std::function<void(double, std::vector<double>&)>& f,
                          std::size_t dim) {
  std::vector<double> acc(dim, 0.0);
  std::vector<double> val(dim, 0.0);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    f(r.nodes[i], val);
    for (std::size_t d = 0; d < dim; ++d) acc[d] += r.weights[i] * val[d];
  }
  return acc;
}

}  // namespace

std::vector<double> integrate(const std::function<void(double, std::vector<double>&)>& f,
                              std::size_t dim, double a, double b, double tol,
                              std::size_t n_start, std::size_t n_max) {
  std::size_t n = std::max<std::size_t>(n_start, 2);
  std::vector<double> prev = apply(gauss_legendre(n, a, b), f, dim);
  while (2 * n <= n_max) {
    n *= 2;
    std::vector<double> cur = apply(gauss_legendre(n, a, b), f, dim);
    bool agree = true;
    for (std::size_t d = 0; d < dim && agree; ++d) {
      agree = std::abs(cur[d] - prev[d]) <= tol * std::max(1.0, std::abs(cur[d]));
    }
    if (agree) return cur;
    prev = std::move(cur);
  }
  throw ConvergenceError("quadrature did not converge with " + std::to_string(n) + " nodes");
}

double integrate_scalar(const std::function<double(double)>& f, double a, double b, double tol,
                        std::size_t n_start, std::size_t n_max) {
  return integrate([&f](double x, std::vector<double>& out) { out[0] = f(x); }, 1, a, b, tol,
                   n_start, n_max)[0];
}

}  // namespace charkern::quad
