#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include <Eigen/Core>

#include "charkern/measure.hpp"
#include "charkern/verdict.hpp"

namespace charkern {

/// Relative tolerance for positive semidefiniteness: lambda_min >= -kPsdTol * ||K||.
inline constexpr double kPsdTol = 1e-10;
/// Eigenvalues at or below kEigTol * lambda_max count as zero.
inline constexpr double kEigTol = 1e-10;

/// A symmetric positive semidefinite kernel on a finite space, held as its Gram matrix.
class KernelSpec {
 public:
  /// Validates exact symmetry and positive semidefiniteness.
  KernelSpec(SpacePtr space, Eigen::MatrixXd gram);

  static KernelSpec from_function(SpacePtr space,
                                  const std::function<double(std::size_t, std::size_t)>& k);

  const DiscreteSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  std::size_t size() const { return space_->size(); }
  double operator()(std::size_t i, std::size_t j) const {
    return gram_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  /// Spectral norm ||K|| (the largest eigenvalue).
  double operator_norm() const { return lambda_max_; }
  double min_eigenvalue() const { return lambda_min_; }
  /// sup |k(x, x')|.
  double sup_norm() const;

 private:
  SpacePtr space_;
  Eigen::MatrixXd gram_;
  double lambda_max_ = 0.0;
  double lambda_min_ = 0.0;
};

/// S_k(P, x) = -sum_w k(w, x) P(w) + 1/2 sum_{w,w'} k(w, w') P(w) P(w').
double kernel_score(const KernelSpec& k, const SignedMeasure& p, std::size_t x);
double kernel_score(const KernelSpec& k, const SignedMeasure& p, const std::string& x);

/// Squared embedding norm ||Phi(mu)||_H^2 = mass^T K mass.
double mmd_sq(const KernelSpec& k, const SignedMeasure& mu);

/// <Phi(mu1), Phi(mu2)>_H as a Gram double sum.
double embedding_inner(const KernelSpec& k, const SignedMeasure& mu1, const SignedMeasure& mu2);

/// Expected score of Q minus expected score of P, both under P.
double propriety_gap(const KernelSpec& k, const SignedMeasure& p, const SignedMeasure& q);

KernelSpec sum_kernel(const KernelSpec& k1, const KernelSpec& k2);
/// Tensor product kernel on the product space; the first factor varies slowest.
KernelSpec product_kernel(const KernelSpec& k1, const KernelSpec& k2);
KernelSpec plus_one(const KernelSpec& k);

/// mu1 (x) mu2 on the product space, matching product_kernel's ordering.
SignedMeasure product_measure(const SignedMeasure& mu1, const SignedMeasure& mu2,
                              const SpacePtr& product);

/// Null-space based decision on a finite space.
///
/// Universal (equivalently strictly integrally positive definite on M) iff K
/// is nonsingular; characteristic iff no nonzero zero-sum vector lies in the
/// null space of K.
KernelVerdict verdict(const KernelSpec& k);

/// Rescale a zero-mass direction to total variation 2, first nonzero entry positive.
Eigen::VectorXd normalize_witness(Eigen::VectorXd v);

}  // namespace charkern
