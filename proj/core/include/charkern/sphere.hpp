#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "charkern/kernel.hpp"
#include "charkern/measure.hpp"
#include "charkern/verdict.hpp"

namespace charkern::sphere {

/// Gegenbauer polynomial C_n^lam(t); for lam = 0 the Chebyshev convention C_n^0(cos x) = cos(n x).
double gegenbauer(int n, double lam, double t);
double gegenbauer_at_one(int n, double lam);
/// Gegenbauer parameter (d - 1) / 2 attached to S^d.
inline double sphere_lambda(int d) { return 0.5 * (d - 1); }
/// C_n(t) / C_n(1) with parameter (d - 1) / 2.
double normalized_gegenbauer(int n, int d, double t);

/// Dimension of the degree-n spherical harmonics on S^d.
std::uint64_t dim_harmonics(int d, int n);

/// How the coefficient sequence expands psi.
enum class Basis {
  gegenbauer,  ///< d-Schoenberg sequence: psi = sum b_n C_n(cos theta) / C_n(1)
  power,       ///< infinity-Schoenberg sequence: psi = sum b_n cos^n theta
};

/// Caller-declared behaviour of the coefficients past the stored prefix.
enum class Tail { zero, positive, even_positive, odd_positive, unknown };

/// Caller-declared membership class of psi.
enum class PsiClass { none, d_plus_2, d_plus_1_strict, infinity };

std::string_view to_string(Tail t);
std::string_view to_string(Basis b);
std::string_view to_string(PsiClass c);
Tail tail_from_string(std::string_view s);
Basis basis_from_string(std::string_view s);
PsiClass psi_class_from_string(std::string_view s);

/// Isotropic kernel k(x, y) = psi(theta(x, y)) on S^d given by Schoenberg coefficients.
struct SchoenbergKernel {
  int d = 2;
  Basis basis = Basis::gegenbauer;
  std::vector<double> b;
  Tail tail = Tail::unknown;
  /// Analytic psi when known; evaluation always uses the coefficients.
  std::function<double(double)> psi;

  /// psi evaluated through the truncated series at t = cos theta.
  double at_cosine(double t) const;
  double operator()(double theta) const;
  int n_max() const { return static_cast<int>(b.size()) - 1; }
};

/// Projects psi onto the normalized Gegenbauer basis of S^d up to degree n_max.
///
/// Uses adaptive Gauss-Legendre quadrature in theta; the projection constant
/// is chosen so that analysis after synthesis is the identity.
SchoenbergKernel schoenberg_coeffs(const std::function<double(double)>& psi, int d, int n_max,
                                   Tail tail = Tail::unknown);

/// infinity-Schoenberg (power basis) coefficients of psi, via the Chebyshev
/// expansion on S^1 converted to monomials. The result carries dimension d.
SchoenbergKernel power_series_coeffs(const std::function<double(double)>& psi, int n_max,
                                     int d = 2, Tail tail = Tail::unknown);

struct SphereVerdict {
  KernelVerdict kernel;
  Ternary strictly_pd = Ternary::unknown;
  /// Infinitely many positive even and odd coefficients.
  Ternary condition_b = Ternary::unknown;
  /// On S^1 condition b is only necessary for strict positive definiteness.
  bool condition_b_necessary_only = false;
  /// b_n > 0 for all n >= n0 (sufficient for strict positive definiteness on S^1).
  Ternary eventually_positive = Ternary::unknown;
};

SphereVerdict sphere_verdict(const SchoenbergKernel& sk, PsiClass declared = PsiClass::none);

struct FunkHecke {
  /// Quadrature of the defining integral (authoritative).
  double quadrature = 0.0;
  /// Mellin-transform closed form including the normalizing prefactor.
  double closed_form = 0.0;
  /// The Mellin expression without prefactor as commonly printed; absent for d = 1.
  std::optional<double> bare_mellin;
};

/// Coefficient of <x,y>^n on the degree-k harmonics of S^d; exactly 0 when k > n or n - k odd.
double funk_hecke_lambda(int k, int n, int d);
FunkHecke funk_hecke(int k, int n, int d);

/// Quadrature grid on S^1 or S^2 with weights summing to one.
class SphereGrid {
 public:
  /// M equispaced angles on S^1.
  static SphereGrid circle(int m);
  /// Gauss-Legendre in cos(polar angle) times equispaced azimuth on S^2.
  static SphereGrid s2(int n_polar, int n_azimuth);
  /// Smallest grid integrating polynomials of total degree `degree` exactly.
  static SphereGrid for_degree(int d, int degree);

  int d() const { return d_; }
  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  /// The grid as a DiscreteSpace with nu = weights.
  const SpacePtr& space() const { return space_; }

 private:
  SphereGrid(int d, Eigen::MatrixXd points, Eigen::VectorXd weights);

  int d_;
  Eigen::MatrixXd points_;
  Eigen::VectorXd weights_;
  SpacePtr space_;
};

/// Integrates f over S^d (d in {1, 2}) with respect to normalized sigma,
/// doubling resolution until successive values agree within tol.
double integrate_on_sphere(int d, const std::function<double(const Eigen::VectorXd&)>& f,
                           double tol = 1e-10);

/// Real L2(sigma)-orthonormal harmonics of degree k at x: Fourier pairs on
/// S^1, real spherical harmonics ordered m = -k..k on S^2.
Eigen::VectorXd harmonic_block(int d, int k, const Eigen::VectorXd& x);

/// Blocks c_{k,j}, k = 0..max_degree, of size N(d, k).
struct HarmonicCoeffs {
  int d = 2;
  std::vector<Eigen::VectorXd> blocks;

  int max_degree() const { return static_cast<int>(blocks.size()) - 1; }
  /// Largest entry of any block of degree >= 1.
  double nonconstant_magnitude() const;
};

/// c_{k,j} = int e_{k,j} f d sigma by grid quadrature.
HarmonicCoeffs harmonic_coeffs(const SphereGrid& grid, const Eigen::VectorXd& values,
                               int max_degree);

struct PnaDensity {
  Density density;
  HarmonicCoeffs coeffs;
};

/// p(x) = 1 + a C_n(<v0, x>) / C_n(1) on the grid, with its harmonic coefficients.
PnaDensity pna_density(const SphereGrid& grid, int n, double a, const Eigen::VectorXd& v0,
                       int max_degree);

/// delta_{k,0} + delta_{k,n} a / N(d,k) e_{k,j}(v0).
HarmonicCoeffs pna_coeffs_closed_form(int d, int n, double a, const Eigen::VectorXd& v0,
                                      int max_degree);

/// Multipliers z_k of the embedding x -> int k(x, y) p(y) d sigma(y) on degree-k harmonics.
std::vector<double> zonal_multipliers(const SchoenbergKernel& sk, int max_degree);

/// Harmonic coefficients of the kernel mean embedding of a density with coefficients p.
HarmonicCoeffs zonal_embed(const SchoenbergKernel& sk, const HarmonicCoeffs& p);

/// True when every block of degree >= 1 is below tol, i.e. the embedding is constant.
bool embedding_is_constant(const HarmonicCoeffs& embedding, double tol);

/// max over grid pairs of |C_n(<x,y>)/C_n(1) - (1/N) sum_j e_{n,j}(x) e_{n,j}(y)|.
double addition_formula_check(int d, int n, const SphereGrid& grid);

/// Gram of psi(theta(x, y)) on the grid, weighted by the quadrature weights.
KernelSpec grid_kernel(const SchoenbergKernel& sk, const SphereGrid& grid);

}  // namespace charkern::sphere
