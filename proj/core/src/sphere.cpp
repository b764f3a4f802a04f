#include "charkern/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

#include "charkern/error.hpp"
#include "charkern/quadrature.hpp"

namespace charkern::sphere {

namespace {

double checked_cosine(double t) {
  if (!(std::abs(t) <= 1.0 + 1e-12)) {
    throw DomainError("argument " + std::to_string(t) + " lies outside [-1, 1]");
  }
  return std::clamp(t, -1.0, 1.0);
}

void require_dimension(int d) {
  if (d < 1) throw DomainError("sphere dimension must be at least 1");
}

// C_0..C_{n_max}(t) in one pass of the three-term recurrence.
std::vector<double> gegenbauer_all(int n_max, double lam, double t) {
  std::vector<double> c(static_cast<std::size_t>(std::max(n_max, 0)) + 1, 1.0);
  if (n_max < 1) return c;
  c[1] = lam == 0.0 ? t : 2.0 * lam * t;
  for (int k = 2; k <= n_max; ++k) {
    const auto kk = static_cast<double>(k);
    const auto i = static_cast<std::size_t>(k);
    if (lam == 0.0) {
      c[i] = 2.0 * t * c[i - 1] - c[i - 2];
    } else {
      c[i] = (2.0 * (kk + lam - 1.0) * t * c[i - 1] - (kk + 2.0 * lam - 2.0) * c[i - 2]) / kk;
    }
  }
  return c;
}

double binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  return std::exp(std::lgamma(static_cast<double>(n) + 1.0) -
                  std::lgamma(static_cast<double>(k) + 1.0) -
                  std::lgamma(static_cast<double>(n - k) + 1.0));
}

std::uint64_t binomial_exact(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    const std::uint64_t g = std::gcd(r, i + 1);
    r = (r / g) * ((n - i) / ((i + 1) / g));
  }
  return r;
}

}  // namespace

double gegenbauer(int n, double lam, double t) {
  if (n < 0) throw DomainError("Gegenbauer degree must be nonnegative");
  if (lam < 0.0) throw DomainError("Gegenbauer parameter must be nonnegative");
  return gegenbauer_all(n, lam, checked_cosine(t))[static_cast<std::size_t>(n)];
}

double gegenbauer_at_one(int n, double lam) { return gegenbauer(n, lam, 1.0); }

double normalized_gegenbauer(int n, int d, double t) {
  require_dimension(d);
  const double lam = sphere_lambda(d);
  const std::vector<double> c = gegenbauer_all(n, lam, checked_cosine(t));
  const std::vector<double> one = gegenbauer_all(n, lam, 1.0);
  return c[static_cast<std::size_t>(n)] / one[static_cast<std::size_t>(n)];
}

std::uint64_t dim_harmonics(int d, int n) {
  require_dimension(d);
  if (n < 0) throw DomainError("harmonic degree must be nonnegative");
  const auto nn = static_cast<std::uint64_t>(n);
  const auto dd = static_cast<std::uint64_t>(d);
  const std::uint64_t lead = binomial_exact(nn + dd, nn);
  const std::uint64_t tail = n >= 2 ? binomial_exact(nn + dd - 2, nn - 2) : 0;
  return lead - tail;
}

std::string_view to_string(Tail t) {
  switch (t) {
    case Tail::zero:
      return "zero";
    case Tail::positive:
      return "positive";
    case Tail::even_positive:
      return "even-positive";
    case Tail::odd_positive:
      return "odd-positive";
    case Tail::unknown:
      break;
  }
  return "unknown";
}

std::string_view to_string(Basis b) { return b == Basis::power ? "power" : "gegenbauer"; }

std::string_view to_string(PsiClass c) {
  switch (c) {
    case PsiClass::d_plus_2:
      return "psi-d+2";
    case PsiClass::d_plus_1_strict:
      return "psi-d+1-plus";
    case PsiClass::infinity:
      return "psi-inf";
    case PsiClass::none:
      break;
  }
  return "none";
}

Tail tail_from_string(std::string_view s) {
  if (s == "zero") return Tail::zero;
  if (s == "positive") return Tail::positive;
  if (s == "even-positive") return Tail::even_positive;
  if (s == "odd-positive") return Tail::odd_positive;
  if (s == "unknown") return Tail::unknown;
  throw DomainError("unknown tail descriptor '" + std::string(s) + "'");
}

Basis basis_from_string(std::string_view s) {
  if (s == "gegenbauer") return Basis::gegenbauer;
  if (s == "power") return Basis::power;
  throw DomainError("unknown coefficient basis '" + std::string(s) + "'");
}

PsiClass psi_class_from_string(std::string_view s) {
  if (s == "none" || s.empty()) return PsiClass::none;
  if (s == "psi-d+2") return PsiClass::d_plus_2;
  if (s == "psi-d+1-plus") return PsiClass::d_plus_1_strict;
  if (s == "psi-inf") return PsiClass::infinity;
  throw DomainError("unknown class declaration '" + std::string(s) + "'");
}

double SchoenbergKernel::at_cosine(double t) const {
  t = checked_cosine(t);
  if (b.empty()) return 0.0;
  if (basis == Basis::power) {
    double acc = 0.0;
    for (auto it = b.rbegin(); it != b.rend(); ++it) acc = acc * t + *it;
    return acc;
  }
  const double lam = sphere_lambda(d);
  const std::vector<double> c = gegenbauer_all(n_max(), lam, t);
  const std::vector<double> one = gegenbauer_all(n_max(), lam, 1.0);
  double acc = 0.0;
  for (std::size_t n = 0; n < b.size(); ++n) acc += b[n] * c[n] / one[n];
  return acc;
}

double SchoenbergKernel::operator()(double theta) const { return at_cosine(std::cos(theta)); }

SchoenbergKernel schoenberg_coeffs(const std::function<double(double)>& psi, int d, int n_max,
                                   Tail tail) {
  require_dimension(d);
  if (n_max < 0) throw DomainError("n_max must be nonnegative");
  const double lam = sphere_lambda(d);
  const auto count = static_cast<std::size_t>(n_max) + 1;
  // Numerators <psi, C_n>_w followed by norms <C_n, C_n>_w, weight sin^{d-1}.
  auto integrand = [&](double theta, std::vector<double>& out) {
    const double t = std::cos(theta);
    const double w = std::pow(std::sin(theta), d - 1);
    const double value = psi(theta);
    const std::vector<double> c = gegenbauer_all(n_max, lam, t);
    for (std::size_t n = 0; n < count; ++n) {
      out[n] = value * c[n] * w;
      out[count + n] = c[n] * c[n] * w;
    }
  };
  const std::vector<double> integrals =
      quad::integrate(integrand, 2 * count, 0.0, std::numbers::pi, 1e-10, 64, 1 << 14);
  const std::vector<double> one = gegenbauer_all(n_max, lam, 1.0);
  SchoenbergKernel sk;
  sk.d = d;
  sk.basis = Basis::gegenbauer;
  sk.tail = tail;
  sk.psi = psi;
  sk.b.resize(count);
  for (std::size_t n = 0; n < count; ++n) sk.b[n] = one[n] * integrals[n] / integrals[count + n];
  return sk;
}

SchoenbergKernel power_series_coeffs(const std::function<double(double)>& psi, int n_max, int d,
                                     Tail tail) {
  const SchoenbergKernel cheb = schoenberg_coeffs(psi, 1, n_max);
  const auto count = static_cast<std::size_t>(n_max) + 1;
  // Monomial coefficients of T_k, built by T_{k+1} = 2 t T_k - T_{k-1}.
  std::vector<std::vector<double>> t_poly(count, std::vector<double>(count, 0.0));
  t_poly[0][0] = 1.0;
  if (count > 1) t_poly[1][1] = 1.0;
  for (std::size_t k = 2; k < count; ++k) {
    for (std::size_t m = 0; m < count; ++m) {
      const double shifted = m > 0 ? 2.0 * t_poly[k - 1][m - 1] : 0.0;
      t_poly[k][m] = shifted - t_poly[k - 2][m];
    }
  }
  SchoenbergKernel sk;
  sk.d = d;
  sk.basis = Basis::power;
  sk.tail = tail;
  sk.psi = psi;
  sk.b.assign(count, 0.0);
  // Highest degree first keeps the large cancellations in the small coefficients.
  for (std::size_t k = count; k-- > 0;) {
    for (std::size_t m = 0; m <= k; ++m) sk.b[m] += cheb.b[k] * t_poly[k][m];
  }
  return sk;
}

namespace {

struct PrefixScan {
  bool all_from_zero = true;
  bool all_from_one = true;
  std::vector<int> vanishing;
  int last_vanishing = -1;
};

PrefixScan scan_prefix(const std::vector<double>& b) {
  PrefixScan s;
  double top = 0.0;
  for (double v : b) top = std::max(top, v);
  const double cut = kEigTol * top;
  for (std::size_t n = 0; n < b.size(); ++n) {
    if (b[n] > cut) continue;
    s.vanishing.push_back(static_cast<int>(n));
    s.last_vanishing = static_cast<int>(n);
    s.all_from_zero = false;
    if (n >= 1) s.all_from_one = false;
  }
  return s;
}

Ternary tail_all_positive(Tail t) {
  switch (t) {
    case Tail::positive:
      return Ternary::yes;
    case Tail::unknown:
      return Ternary::unknown;
    default:
      return Ternary::no;
  }
}

Ternary both(bool prefix_ok, Ternary tail) {
  if (!prefix_ok) return Ternary::no;
  return tail;
}

std::string list_indices(const std::vector<int>& idx) {
  std::string s;
  const std::size_t shown = std::min<std::size_t>(idx.size(), 8);
  for (std::size_t k = 0; k < shown; ++k) {
    if (k) s += ", ";
    s += std::to_string(idx[k]);
  }
  if (idx.size() > shown) s += ", ...";
  return s;
}

void apply_equivalence(SphereVerdict& v, std::string_view why) {
  Ternary* slots[] = {&v.kernel.characteristic, &v.kernel.universal, &v.strictly_pd};
  Ternary known = Ternary::unknown;
  for (Ternary* s : slots) {
    if (*s == Ternary::unknown) continue;
    if (known == Ternary::unknown) {
      known = *s;
    } else if (known != *s) {
      v.kernel.reasons.push_back("declared class " + std::string(why) +
                                 " is inconsistent with the coefficients; verdicts left as computed");
      return;
    }
  }
  if (known == Ternary::unknown) return;
  for (Ternary* s : slots) {
    if (*s == Ternary::unknown) {
      *s = known;
      v.kernel.reasons.push_back("filled by the equivalence of characteristic, universal and "
                                 "strictly positive definite for " +
                                 std::string(why));
    }
  }
}

}  // namespace

SphereVerdict sphere_verdict(const SchoenbergKernel& sk, PsiClass declared) {
  require_dimension(sk.d);
  for (double v : sk.b) {
    if (v < 0.0) throw ValidationError("Schoenberg coefficients must be nonnegative");
  }
  SphereVerdict out;
  KernelVerdict& kv = out.kernel;
  const PrefixScan scan = scan_prefix(sk.b);

  switch (sk.tail) {
    case Tail::positive:
      out.condition_b = Ternary::yes;
      break;
    case Tail::unknown:
      out.condition_b = Ternary::unknown;
      break;
    default:
      out.condition_b = Ternary::no;
      break;
  }
  kv.reasons.push_back("tail past n = " + std::to_string(sk.n_max()) + " declared " +
                       std::string(to_string(sk.tail)));
  if (!scan.vanishing.empty()) {
    kv.reasons.push_back("vanishing coefficients b_n at n = " + list_indices(scan.vanishing));
  }

  if (sk.basis == Basis::power) {
    // For psi in Psi_infinity all three notions coincide with condition b.
    kv.characteristic = kv.universal = out.strictly_pd = out.condition_b;
    kv.sipd_on_m = kv.universal;
    kv.reasons.push_back("infinity-Schoenberg sequence: characteristic, universal and strictly "
                         "positive definite all reduce to condition b");
    return out;
  }

  const Ternary tail = tail_all_positive(sk.tail);
  kv.universal = both(scan.all_from_zero, tail);
  kv.characteristic = both(scan.all_from_one, tail);
  out.eventually_positive = tail;
  if (sk.d >= 2) {
    out.strictly_pd = out.condition_b;
  } else {
    out.condition_b_necessary_only = true;
    if (out.condition_b == Ternary::no) {
      out.strictly_pd = Ternary::no;
    } else if (out.eventually_positive == Ternary::yes) {
      out.strictly_pd = Ternary::yes;
      kv.reasons.push_back("b_{n,1} > 0 for all n >= " + std::to_string(scan.last_vanishing + 1) +
                           " (sufficient on S^1)");
    } else {
      out.strictly_pd = Ternary::unknown;
      kv.reasons.push_back("condition b is only necessary on S^1; strict positive definiteness "
                           "undecided");
    }
  }

  switch (declared) {
    case PsiClass::none:
      break;
    case PsiClass::d_plus_1_strict:
      if (kv.universal == Ternary::no) {
        kv.reasons.push_back("declared class psi-d+1-plus requires b_{n,d} > 0 for all n, "
                             "which the coefficients contradict");
      } else {
        kv.universal = kv.characteristic = out.strictly_pd = Ternary::yes;
        kv.reasons.push_back("psi-d+1-plus implies b_{n,d} > 0 for all n");
      }
      break;
    case PsiClass::d_plus_2:
    case PsiClass::infinity:
      apply_equivalence(out, to_string(declared));
      break;
  }
  kv.sipd_on_m = kv.universal;
  if (kv.universal == Ternary::unknown || kv.characteristic == Ternary::unknown) {
    kv.reasons.push_back("a truncated sequence with unknown tail cannot decide 'for all n'");
  }
  return out;
}

FunkHecke funk_hecke(int k, int n, int d) {
  require_dimension(d);
  if (k < 0 || n < 0) throw DomainError("Funk-Hecke indices must be nonnegative");
  FunkHecke out;
  const bool vanishes = k > n || (n - k) % 2 != 0;
  if (vanishes) {
    if (d >= 2) out.bare_mellin = 0.0;
    return out;
  }
  const double lam = sphere_lambda(d);
  const double prefactor = std::exp(std::lgamma(0.5 * (d + 1)) - std::lgamma(0.5 * d)) /
                           std::sqrt(std::numbers::pi);
  const double c_one = gegenbauer_at_one(k, lam);
  const double integral = quad::integrate_scalar(
      [&](double theta) {
        const double t = std::cos(theta);
        return std::pow(t, n) * gegenbauer_all(k, lam, t)[static_cast<std::size_t>(k)] *
               std::pow(std::sin(theta), d - 1);
      },
      0.0, std::numbers::pi, 1e-13, 32, 1 << 14);
  out.quadrature = prefactor * integral / c_one;

  if (d == 1) {
    out.closed_form = std::ldexp(binomial(n, (n - k) / 2), -n);
    return out;
  }
  const double dd = d;
  const double nn = n;
  const double kk = k;
  const double log_int = std::log(std::numbers::pi) + (2.0 - dd - nn) * std::log(2.0) +
                         std::lgamma(kk + dd - 1.0) + std::lgamma(nn + 1.0) -
                         std::lgamma(kk + 1.0) - std::lgamma(0.5 * (dd - 1.0)) -
                         std::lgamma(0.5 * (nn - kk) + 1.0) -
                         std::lgamma(0.5 * (nn + kk + dd + 1.0));
  out.closed_form = prefactor * std::exp(log_int) / c_one;
  const double log_bare = std::log(std::numbers::pi) + (dd - nn - 1.0) * std::log(2.0) +
                          std::lgamma(kk + dd - 1.0) + std::lgamma(nn + 1.0) -
                          std::lgamma(kk + 1.0) - std::lgamma(0.5 * (dd - 1.0)) -
                          std::lgamma(0.5 * (kk + dd + nn)) - std::lgamma(0.5 * (nn - kk + 2.0));
  out.bare_mellin = std::exp(log_bare);
  return out;
}

double funk_hecke_lambda(int k, int n, int d) { return funk_hecke(k, n, d).quadrature; }

SphereGrid::SphereGrid(int d, Eigen::MatrixXd points, Eigen::VectorXd weights)
    : d_(d), points_(std::move(points)), weights_(std::move(weights)) {
  std::vector<std::string> labels;
  labels.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) labels.push_back("p" + std::to_string(i));
  std::vector<double> nu(weights_.data(), weights_.data() + weights_.size());
  space_ = make_space(std::move(labels), std::move(nu));
}

SphereGrid SphereGrid::circle(int m) {
  if (m < 1) throw DomainError("circle grid needs at least one node");
  Eigen::MatrixXd pts(m, 2);
  for (int j = 0; j < m; ++j) {
    const double phi = 2.0 * std::numbers::pi * j / m;
    pts(j, 0) = std::cos(phi);
    pts(j, 1) = std::sin(phi);
  }
  return {1, std::move(pts), Eigen::VectorXd::Constant(m, 1.0 / m)};
}

SphereGrid SphereGrid::s2(int n_polar, int n_azimuth) {
  if (n_polar < 1 || n_azimuth < 1) throw DomainError("S^2 grid needs positive node counts");
  const quad::Rule rule = quad::gauss_legendre(static_cast<std::size_t>(n_polar));
  const int total = n_polar * n_azimuth;
  Eigen::MatrixXd pts(total, 3);
  Eigen::VectorXd w(total);
  int row = 0;
  for (int i = 0; i < n_polar; ++i) {
    const double z = rule.nodes[static_cast<std::size_t>(i)];
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int j = 0; j < n_azimuth; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / n_azimuth;
      pts(row, 0) = s * std::cos(phi);
      pts(row, 1) = s * std::sin(phi);
      pts(row, 2) = z;
      w[row] = 0.5 * rule.weights[static_cast<std::size_t>(i)] / n_azimuth;
      ++row;
    }
  }
  return {2, std::move(pts), std::move(w)};
}

SphereGrid SphereGrid::for_degree(int d, int degree) {
  degree = std::max(degree, 0);
  if (d == 1) return circle(degree + 2);
  if (d == 2) return s2(degree / 2 + 1, degree + 2);
  throw DomainError("quadrature grids exist only for S^1 and S^2");
}

double integrate_on_sphere(int d, const std::function<double(const Eigen::VectorXd&)>& f,
                           double tol) {
  auto apply = [&](const SphereGrid& g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      acc += g.weights()[static_cast<Eigen::Index>(i)] *
             f(g.points().row(static_cast<Eigen::Index>(i)).transpose());
    }
    return acc;
  };
  int degree = 16;
  double prev = apply(SphereGrid::for_degree(d, degree));
  const int cap = d == 1 ? 1 << 16 : 1 << 10;
  while (degree < cap) {
    degree *= 2;
    const double cur = apply(SphereGrid::for_degree(d, degree));
    if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw ConvergenceError("sphere quadrature did not converge");
}

Eigen::VectorXd harmonic_block(int d, int k, const Eigen::VectorXd& x) {
  if (k < 0) throw DomainError("harmonic degree must be nonnegative");
  if (x.size() != d + 1) throw DomainError("point has the wrong dimension for S^d");
  if (k == 0) return Eigen::VectorXd::Ones(1);
  if (d == 1) {
    const double phi = std::atan2(x[1], x[0]);
    Eigen::VectorXd out(2);
    out << std::numbers::sqrt2 * std::cos(k * phi), std::numbers::sqrt2 * std::sin(k * phi);
    return out;
  }
  if (d != 2) throw DomainError("explicit harmonic bases exist only for S^1 and S^2");

  const double s = std::hypot(x[0], x[1]);
  const double z = std::clamp(x[2], -1.0, 1.0);
  const double phi = std::atan2(x[1], x[0]);
  Eigen::VectorXd out(2 * k + 1);
  double p_mm = 1.0;  // normalized P_m^m, scaled so that int P^2 d sigma = 1
  for (int m = 0; m <= k; ++m) {
    if (m > 0) p_mm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    double p_prev = p_mm;
    double p_cur = p_mm;
    if (k > m) {
      p_cur = std::sqrt(2.0 * m + 3.0) * z * p_mm;
      for (int n = m + 2; n <= k; ++n) {
        const double nn = n;
        const double mm = m;
        const double a = std::sqrt((4.0 * nn * nn - 1.0) / (nn * nn - mm * mm));
        const double b = std::sqrt(((nn - 1.0) * (nn - 1.0) - mm * mm) /
                                   (4.0 * (nn - 1.0) * (nn - 1.0) - 1.0));
        const double p_next = a * (z * p_cur - b * p_prev);
        p_prev = p_cur;
        p_cur = p_next;
      }
    }
    if (m == 0) {
      out[k] = p_cur;
    } else {
      out[k + m] = std::numbers::sqrt2 * p_cur * std::cos(m * phi);
      out[k - m] = std::numbers::sqrt2 * p_cur * std::sin(m * phi);
    }
  }
  return out;
}

double HarmonicCoeffs::nonconstant_magnitude() const {
  double m = 0.0;
  for (std::size_t k = 1; k < blocks.size(); ++k) {
    if (blocks[k].size() > 0) m = std::max(m, blocks[k].cwiseAbs().maxCoeff());
  }
  return m;
}

namespace {

HarmonicCoeffs zero_coeffs(int d, int max_degree) {
  HarmonicCoeffs c;
  c.d = d;
  for (int k = 0; k <= max_degree; ++k) {
    c.blocks.emplace_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_harmonics(d, k))));
  }
  return c;
}

}  // namespace

HarmonicCoeffs harmonic_coeffs(const SphereGrid& grid, const Eigen::VectorXd& values,
                               int max_degree) {
  if (static_cast<std::size_t>(values.size()) != grid.size()) {
    throw ValidationError("values must be given at every grid node");
  }
  HarmonicCoeffs c = zero_coeffs(grid.d(), max_degree);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd x = grid.points().row(row).transpose();
    const double wf = grid.weights()[row] * values[row];
    for (int k = 0; k <= max_degree; ++k) {
      c.blocks[static_cast<std::size_t>(k)] += wf * harmonic_block(grid.d(), k, x);
    }
  }
  return c;
}

namespace {

void check_pna_args(int d, int n, double a, const Eigen::VectorXd& v0) {
  if (n < 1) throw DomainError("p_{n,a} needs degree n >= 1");
  if (!(std::abs(a) <= 1.0) || a == 0.0) throw DomainError("a must lie in [-1, 1] without 0");
  if (v0.size() != d + 1 || std::abs(v0.norm() - 1.0) > 1e-12) {
    throw DomainError("v0 must be a unit vector in R^{d+1}");
  }
}

}  // namespace

PnaDensity pna_density(const SphereGrid& grid, int n, double a, const Eigen::VectorXd& v0,
                       int max_degree) {
  const int d = grid.d();
  check_pna_args(d, n, a, v0);
  const Eigen::VectorXd dots = grid.points() * v0;
  Eigen::VectorXd p(dots.size());
  for (Eigen::Index i = 0; i < dots.size(); ++i) {
    p[i] = std::max(0.0, 1.0 + a * normalized_gegenbauer(n, d, std::clamp(dots[i], -1.0, 1.0)));
  }
  HarmonicCoeffs coeffs = harmonic_coeffs(grid, p, max_degree);
  return {Density(grid.space(), std::move(p)), std::move(coeffs)};
}

HarmonicCoeffs pna_coeffs_closed_form(int d, int n, double a, const Eigen::VectorXd& v0,
                                      int max_degree) {
  check_pna_args(d, n, a, v0);
  HarmonicCoeffs c = zero_coeffs(d, max_degree);
  c.blocks[0][0] = 1.0;
  if (n <= max_degree) {
    const double scale = a / static_cast<double>(dim_harmonics(d, n));
    c.blocks[static_cast<std::size_t>(n)] = scale * harmonic_block(d, n, v0);
  }
  return c;
}

std::vector<double> zonal_multipliers(const SchoenbergKernel& sk, int max_degree) {
  std::vector<double> z(static_cast<std::size_t>(std::max(max_degree, -1) + 1), 0.0);
  for (int k = 0; k <= max_degree; ++k) {
    double zk = 0.0;
    if (sk.basis == Basis::gegenbauer) {
      if (k <= sk.n_max()) {
        zk = sk.b[static_cast<std::size_t>(k)] / static_cast<double>(dim_harmonics(sk.d, k));
      }
    } else {
      for (int n = k; n <= sk.n_max(); n += 2) {
        zk += sk.b[static_cast<std::size_t>(n)] * funk_hecke_lambda(k, n, sk.d);
      }
    }
    z[static_cast<std::size_t>(k)] = zk;
  }
  return z;
}

HarmonicCoeffs zonal_embed(const SchoenbergKernel& sk, const HarmonicCoeffs& p) {
  if (p.d != sk.d) throw ValidationError("kernel and density live on different spheres");
  const std::vector<double> z = zonal_multipliers(sk, p.max_degree());
  HarmonicCoeffs out = p;
  for (std::size_t k = 0; k < out.blocks.size(); ++k) out.blocks[k] *= z[k];
  return out;
}

bool embedding_is_constant(const HarmonicCoeffs& embedding, double tol) {
  return embedding.nonconstant_magnitude() <= tol;
}

double addition_formula_check(int d, int n, const SphereGrid& grid) {
  if (grid.d() != d) throw DomainError("grid lives on a different sphere");
  const auto count = static_cast<Eigen::Index>(grid.size());
  const auto width = static_cast<Eigen::Index>(dim_harmonics(d, n));
  Eigen::MatrixXd blocks(count, width);
  for (Eigen::Index i = 0; i < count; ++i) {
    blocks.row(i) = harmonic_block(d, n, grid.points().row(i).transpose()).transpose();
  }
  const Eigen::MatrixXd rhs = blocks * blocks.transpose() / static_cast<double>(width);
  const Eigen::MatrixXd dots = grid.points() * grid.points().transpose();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < count; ++j) {
      const double lhs = normalized_gegenbauer(n, d, std::clamp(dots(i, j), -1.0, 1.0));
      worst = std::max(worst, std::abs(lhs - rhs(i, j)));
    }
  }
  return worst;
}

KernelSpec grid_kernel(const SchoenbergKernel& sk, const SphereGrid& grid) {
  if (grid.d() != sk.d) throw DomainError("grid lives on a different sphere");
  const Eigen::MatrixXd& pts = grid.points();
  return KernelSpec::from_function(grid.space(), [&](std::size_t i, std::size_t j) {
    const double t = pts.row(static_cast<Eigen::Index>(i)).dot(pts.row(static_cast<Eigen::Index>(j)));
    return sk.at_cosine(std::clamp(t, -1.0, 1.0));
  });
}

}  // namespace charkern::sphere
