#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include <Eigen/Core>

#include "charkern/kernel.hpp"
#include "charkern/measure.hpp"
#include "charkern/verdict.hpp"

namespace charkern {

/// Tolerance on L2(nu)-orthonormality of eigenfunctions.
inline constexpr double kOrthoTol = 1e-10;
/// Relative tolerance when recognizing a constant eigenfunction.
inline constexpr double kConstantTol = 1e-8;

/// Eigenvalues and L2(nu)-orthonormal eigenfunctions of the integral operator
/// T f(x) = sum_x' k(x, x') f(x') nu(x'), sorted by nonincreasing eigenvalue.
///
/// Column i of eigfuncs holds e_i evaluated at every point of the space.
/// Zero eigenvalues are kept.
class MercerExpansion {
 public:
  MercerExpansion(SpacePtr space, Eigen::VectorXd lambdas, Eigen::MatrixXd eigfuncs);

  const DiscreteSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Eigen::VectorXd& lambdas() const { return lambdas_; }
  const Eigen::MatrixXd& eigfuncs() const { return eigfuncs_; }
  Eigen::Index size() const { return lambdas_.size(); }
  /// Index i0 with e_{i0} equal to the constant one function, if any.
  std::optional<Eigen::Index> index_of_one() const { return index_of_one_; }

  /// Eigenvalues at or below this count as zero.
  double zero_cut() const;
  /// sum_i lambda_i e_i(x) e_i(x').
  Eigen::MatrixXd reconstruct() const;
  /// <f, e_i>_{L2(nu)} for every i.
  Eigen::VectorXd coefficients(const Eigen::VectorXd& f) const;
  /// int e_i d nu for every i.
  Eigen::VectorXd means() const;

 private:
  SpacePtr space_;
  Eigen::VectorXd lambdas_;
  Eigen::MatrixXd eigfuncs_;
  std::optional<Eigen::Index> index_of_one_;
};

/// Solves the nu-weighted eigenproblem D^{1/2} K D^{1/2} = U L U^T, e_i = D^{-1/2} u_i.
MercerExpansion mercer_decompose(const KernelSpec& k);

/// sum_i lambda_i <h - g, e_i>^2_{L2(nu)}.
double mmd_sq_spectral(const MercerExpansion& m, const Density& h, const Density& g);
/// sum_i lambda_i (int e_i d mu)^2 for an arbitrary signed measure.
double mmd_sq_spectral(const MercerExpansion& m, const SignedMeasure& mu);

/// Eigenvalue-based decision.
///
/// Universal iff no eigenvalue vanishes. Characteristic iff there is no
/// zero-mean null direction: at most one zero eigenvalue, and if there is one,
/// its eigenfunction has nonzero nu-mean.
KernelVerdict spectral_verdict(const MercerExpansion& m);

struct DensityPair {
  Density first;
  Density second;
};

struct MeasurePair {
  SignedMeasure first;
  SignedMeasure second;
};

/// Two distinct densities close to p whose embeddings coincide.
///
/// Requires a null direction f with int f d nu = 0; returns Q1, Q2 with
/// ||Q1 - Q2||_TV = tv_target, ||P - Qi||_TV <= tv_target and zero MMD.
DensityPair zero_mmd_pair(const MercerExpansion& m, const Density& p, double tv_target);

/// Two mutually singular probability measures (TV distance 2) with sqrt MMD <= eps.
MeasurePair near_zero_mmd_pair(const MercerExpansion& m, double eps);

/// Localized variant: ||P - Qi||_TV <= delta, ||Q1 - Q2||_TV = delta, sqrt MMD <= eps.
MeasurePair near_zero_mmd_pair(const MercerExpansion& m, const SignedMeasure& p, double delta,
                               double eps);

struct UniformPerturbation {
  SignedMeasure q;
  double tv_lower = 0.0;
  double mmd_sq_exact = 0.0;
  double c_one = 0.0;
  double c_inf = 0.0;
};

/// Q_j = (1 + e_j / c_inf) d nu with c_inf = max_i ||e_i||_inf and c_one = min_i ||e_i||_{L1(nu)}.
UniformPerturbation no_uniform_perturbation(const MercerExpansion& m, Eigen::Index j);

}  // namespace charkern
