#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace charkern::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
Rule gauss_legendre(std::size_t n);

/// Gauss-Legendre rule mapped to [a, b].
Rule gauss_legendre(std::size_t n, double a, double b);

/// Integrates a vector-valued function on [a, b], doubling the node count
/// from n_start until two successive estimates agree componentwise within
/// tol * max(1, |value|). Throws ConvergenceError beyond n_max nodes.
std::vector<double> integrate(const std::function<void(double, std::vector<double>&)>& f,
                              std::size_t dim, double a, double b, double tol = 1e-10,
                              std::size_t n_start = 32, std::size_t n_max = 1 << 15);

double integrate_scalar(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, std::size_t n_start = 32, std::size_t n_max = 1 << 15);

}  // namespace charkern::quad
