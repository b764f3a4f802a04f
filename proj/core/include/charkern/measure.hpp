#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace charkern {

/// Tolerance on total mass when validating probability measures and densities.
inline constexpr double kMassTol = 1e-12;

/// A finite point set carrying a strictly positive reference measure nu.
///
/// Point order is fixed at construction; every vector or matrix indexed by a
/// space uses that order.
class DiscreteSpace {
 public:
  DiscreteSpace(std::vector<std::string> points, std::vector<double> nu);

  /// Space whose reference measure is the uniform probability 1/n.
  static DiscreteSpace uniform(std::vector<std::string> points);
  /// Points labelled "0", "1", ..., "n-1" with uniform probability weights.
  static DiscreteSpace indexed(std::size_t n);

  std::size_t size() const { return points_.size(); }
  const std::vector<std::string>& points() const { return points_; }
  const Eigen::VectorXd& nu() const { return nu_; }
  const std::string& label(std::size_t i) const { return points_.at(i); }

  /// Throws DomainError for unknown labels.
  std::size_t index_of(const std::string& label) const;
  bool contains(const std::string& label) const;

  /// True when nu sums to one within kMassTol.
  bool nu_is_probability() const;

  friend bool operator==(const DiscreteSpace& a, const DiscreteSpace& b);

 private:
  std::vector<std::string> points_;
  Eigen::VectorXd nu_;
  std::unordered_map<std::string, std::size_t> index_;
};

using SpacePtr = std::shared_ptr<const DiscreteSpace>;

SpacePtr make_space(std::vector<std::string> points, std::vector<double> nu);
/// Cartesian product with product reference measure; the first factor varies slowest.
SpacePtr product_space(const DiscreteSpace& a, const DiscreteSpace& b);
bool same_space(const SpacePtr& a, const SpacePtr& b);

/// Finite signed measure on a DiscreteSpace, stored as the mass of each singleton.
class SignedMeasure {
 public:
  SignedMeasure(SpacePtr space, Eigen::VectorXd mass);

  static SignedMeasure zero(SpacePtr space);
  static SignedMeasure dirac(SpacePtr space, std::size_t index);
  static SignedMeasure dirac(SpacePtr space, const std::string& label);
  /// The reference measure nu viewed as a signed measure.
  static SignedMeasure reference(SpacePtr space);

  const DiscreteSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Eigen::VectorXd& mass() const { return mass_; }
  double operator[](std::size_t i) const { return mass_[static_cast<Eigen::Index>(i)]; }
  std::size_t size() const { return space_->size(); }

  double total_mass() const;
  bool is_nonnegative() const;
  bool is_probability(double tol = kMassTol) const;
  /// Member of M0, the zero-mass signed measures.
  bool has_zero_mass(double tol = kMassTol) const;

  SignedMeasure operator+(const SignedMeasure& other) const;
  SignedMeasure operator-(const SignedMeasure& other) const;
  SignedMeasure operator*(double s) const;
  friend SignedMeasure operator*(double s, const SignedMeasure& m) { return m * s; }

 private:
  SpacePtr space_;
  Eigen::VectorXd mass_;
};

/// A nu-probability density: h >= 0 and sum h * nu = 1.
class Density {
 public:
  Density(SpacePtr space, Eigen::VectorXd values);

  /// The constant density one; requires nu to be a probability measure.
  static Density constant_one(SpacePtr space);

  const DiscreteSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Eigen::VectorXd& values() const { return h_; }

 private:
  SpacePtr space_;
  Eigen::VectorXd h_;
};

struct JordanParts {
  SignedMeasure positive;
  SignedMeasure negative;
};

/// Total variation norm: sum of |mu({x})|.
double tv_norm(const SignedMeasure& mu);

/// Hahn-Jordan split mu = positive - negative with disjoint supports.
JordanParts hahn_jordan(const SignedMeasure& mu);

/// (1 - alpha) p + alpha q.
SignedMeasure mix(double alpha, const SignedMeasure& p, const SignedMeasure& q);

/// mu - mu(X) * p, the M0 component of mu along the splitting M(X) = R p + M0(X).
SignedMeasure remove_mass_along(const SignedMeasure& mu, const SignedMeasure& p);

SignedMeasure density_to_measure(const Density& h);
/// Inverse of density_to_measure; mu must be a probability measure.
Density measure_to_density(const SignedMeasure& mu);
/// Radon-Nikodym derivative d mu / d nu for an arbitrary signed measure.
Eigen::VectorXd nu_density(const SignedMeasure& mu);

}  // namespace charkern
