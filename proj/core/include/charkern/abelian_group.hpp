#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "charkern/kernel.hpp"
#include "charkern/measure.hpp"
#include "charkern/spectral.hpp"
#include "charkern/verdict.hpp"

namespace charkern::group {

/// The finite Abelian group Z_{m1} x ... x Z_{md} with normalized Haar measure.
///
/// Elements and character indices share the same mixed-radix flattening with
/// the first modulus most significant.
class GroupSpec {
 public:
  explicit GroupSpec(std::vector<int> moduli);

  const std::vector<int>& moduli() const { return moduli_; }
  std::size_t order() const { return order_; }
  std::size_t rank() const { return moduli_.size(); }

  std::vector<int> digits(std::size_t flat) const;
  std::size_t flatten(const std::vector<int>& digits) const;
  std::size_t add(std::size_t a, std::size_t b) const;
  std::size_t negate(std::size_t a) const;
  /// Difference -a + b.
  std::size_t subtract(std::size_t a, std::size_t b) const { return add(negate(a), b); }
  std::string label(std::size_t flat) const;

  /// Haar-weighted space, shared by every kernel built on this group.
  const SpacePtr& space() const { return space_; }

  friend bool operator==(const GroupSpec& a, const GroupSpec& b) { return a.moduli_ == b.moduli_; }

 private:
  std::vector<int> moduli_;
  std::size_t order_ = 1;
  SpacePtr space_;
};

/// Self-inverse characters (i = -i) form I0; the rest is split into I+ and I-.
enum class CharacterClass { self_inverse, plus, minus };

/// The lexicographically smaller index of each pair {i, -i} goes to I+.
CharacterClass classify(const GroupSpec& g, std::size_t index);

/// e_i(x) = exp(2 pi i sum_j i_j x_j / m_j).
std::complex<double> character(const GroupSpec& g, std::size_t index, std::size_t x);

/// Fraction of a full turn of e_i at x, reduced to [0, 1) by integer arithmetic.
double character_phase(const GroupSpec& g, std::size_t index, std::size_t x);

/// Real orthonormal basis e_i^*: column i is Re e_i on I0, sqrt2 Re e_i on I+, sqrt2 Im e_i on I-.
Eigen::MatrixXd real_onb(const GroupSpec& g);

/// Translation-invariant kernel k(x, x') = kappa(-x + x') with Fourier coefficients lambda_i.
struct GroupKernel {
  GroupSpec group;
  Eigen::VectorXd coeffs;
  Eigen::VectorXd kappa;
  std::vector<std::string> warnings;

  /// Gram matrix built by index arithmetic, hence exactly translation invariant.
  KernelSpec kernel() const;
  double operator()(std::size_t x, std::size_t y) const {
    return kappa[static_cast<Eigen::Index>(group.subtract(x, y))];
  }
};

/// Builds kappa(x) = sum_i lambda_i Re e_i(x). Asymmetric input is replaced
/// by (lambda_i + lambda_{-i}) / 2 and a warning is recorded.
GroupKernel kernel_from_coeffs(const GroupSpec& g, Eigen::VectorXd coeffs);

struct CoefficientReport {
  Eigen::VectorXd coeffs;
  /// Indices with a negative coefficient; nonempty means kappa is not a kernel.
  std::vector<std::size_t> negative;
  double max_imag = 0.0;
  bool is_kernel() const { return negative.empty(); }
};

/// lambda_i = (1/N) sum_x kappa(x) e_i(x) by direct summation.
CoefficientReport coeffs_from_kernel(const GroupSpec& g, const Eigen::VectorXd& kappa);

/// Wraps kappa as a GroupKernel; throws ValidationError when kappa is not a kernel.
GroupKernel kernel_from_kappa(const GroupSpec& g, const Eigen::VectorXd& kappa);

/// Universal iff all lambda_i > 0; characteristic iff lambda_i > 0 for i != 0.
KernelVerdict group_verdict(const GroupKernel& k);

/// Mercer expansion with the real characters as eigenfunctions (exact, no eigensolver).
MercerExpansion group_mercer(const GroupKernel& k);

/// sum_i lambda_i e_i^*(x) e_i^*(x') without symmetrizing; translation invariant
/// only when lambda_i = lambda_{-i}.
KernelSpec onb_kernel(const GroupSpec& g, const Eigen::VectorXd& coeffs);

/// Kernel on G x Z_2^d with coefficients lambda_{(i, w)} = lambda_i lambda_w.
GroupKernel product_group_kernel(const GroupKernel& k_c, const GroupKernel& k_d);

/// k(0,1) = k(1,0) and k(0,0) = k(1,1) >= |k(0,1)| for a 2x2 Gram.
bool validate_z2_invariance(const Eigen::Matrix2d& gram);

}  // namespace charkern::group
