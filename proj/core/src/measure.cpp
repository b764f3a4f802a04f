#include "charkern/measure.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "charkern/error.hpp"

namespace charkern {

DiscreteSpace::DiscreteSpace(std::vector<std::string> points, std::vector<double> nu)
    : points_(std::move(points)), nu_(static_cast<Eigen::Index>(nu.size())) {
  if (points_.empty()) {
    throw ValidationError("discrete space needs at least one point");
  }
  if (nu.size() != points_.size()) {
    throw ValidationError("reference weights and points differ in length (" +
                          std::to_string(nu.size()) + " vs " +
                          std::to_string(points_.size()) + ")");
  }
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (!(nu[i] > 0.0) || !std::isfinite(nu[i])) {
      throw ValidationError("reference weight of point '" + points_[i] +
                            "' must be strictly positive");
    }
    nu_[static_cast<Eigen::Index>(i)] = nu[i];
    if (!index_.emplace(points_[i], i).second) {
      throw ValidationError("duplicate point label '" + points_[i] + "'");
    }
  }
}

DiscreteSpace DiscreteSpace::uniform(std::vector<std::string> points) {
  const double w = 1.0 / static_cast<double>(points.size());
  std::vector<double> nu(points.size(), w);
  return DiscreteSpace(std::move(points), std::move(nu));
}

DiscreteSpace DiscreteSpace::indexed(std::size_t n) {
  std::vector<std::string> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) points.push_back(std::to_string(i));
  return uniform(std::move(points));
}

std::size_t DiscreteSpace::index_of(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) {
    throw DomainError("point '" + label + "' is not in the space");
  }
  return it->second;
}

bool DiscreteSpace::contains(const std::string& label) const {
  return index_.count(label) != 0;
}

bool DiscreteSpace::nu_is_probability() const {
  return std::abs(nu_.sum() - 1.0) <= kMassTol;
}

bool operator==(const DiscreteSpace& a, const DiscreteSpace& b) {
  return a.points_ == b.points_ && a.nu_ == b.nu_;
}

SpacePtr make_space(std::vector<std::string> points, std::vector<double> nu) {
  return std::make_shared<const DiscreteSpace>(std::move(points), std::move(nu));
}

SpacePtr product_space(const DiscreteSpace& a, const DiscreteSpace& b) {
  std::vector<std::string> points;
  std::vector<double> nu;
  points.reserve(a.size() * b.size());
  nu.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      points.push_back("(" + a.label(i) + "," + b.label(j) + ")");
      nu.push_back(a.nu()[static_cast<Eigen::Index>(i)] *
                   b.nu()[static_cast<Eigen::Index>(j)]);
    }
  }
  return make_space(std::move(points), std::move(nu));
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  return a == b || (a && b && *a == *b);
}

namespace {

void require_same(const SpacePtr& a, const SpacePtr& b, const char* what) {
  if (!same_space(a, b)) {
    throw SpaceMismatch(std::string(what) + ": measures live on different spaces");
  }
}

}  // namespace

SignedMeasure::SignedMeasure(SpacePtr space, Eigen::VectorXd mass)
    : space_(std::move(space)), mass_(std::move(mass)) {
  if (!space_) throw ValidationError("signed measure without a space");
  if (static_cast<std::size_t>(mass_.size()) != space_->size()) {
    throw ValidationError("mass vector has " + std::to_string(mass_.size()) +
                          " entries for a space of " + std::to_string(space_->size()) +
                          " points");
  }
  if (!mass_.allFinite()) throw ValidationError("mass vector contains non-finite values");
}

SignedMeasure SignedMeasure::zero(SpacePtr space) {
  const auto n = static_cast<Eigen::Index>(space->size());
  return {std::move(space), Eigen::VectorXd::Zero(n)};
}

SignedMeasure SignedMeasure::dirac(SpacePtr space, std::size_t index) {
  if (index >= space->size()) throw DomainError("dirac index out of range");
  const auto n = static_cast<Eigen::Index>(space->size());
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
  m[static_cast<Eigen::Index>(index)] = 1.0;
  return {std::move(space), std::move(m)};
}

SignedMeasure SignedMeasure::dirac(SpacePtr space, const std::string& label) {
  const std::size_t i = space->index_of(label);
  return dirac(std::move(space), i);
}

SignedMeasure SignedMeasure::reference(SpacePtr space) {
  Eigen::VectorXd m = space->nu();
  return {std::move(space), std::move(m)};
}

double SignedMeasure::total_mass() const { return mass_.sum(); }

bool SignedMeasure::is_nonnegative() const { return (mass_.array() >= 0.0).all(); }

bool SignedMeasure::is_probability(double tol) const {
  return is_nonnegative() && std::abs(total_mass() - 1.0) <= tol;
}

bool SignedMeasure::has_zero_mass(double tol) const { return std::abs(total_mass()) <= tol; }

SignedMeasure SignedMeasure::operator+(const SignedMeasure& other) const {
  require_same(space_, other.space_, "sum");
  return {space_, mass_ + other.mass_};
}

SignedMeasure SignedMeasure::operator-(const SignedMeasure& other) const {
  require_same(space_, other.space_, "difference");
  return {space_, mass_ - other.mass_};
}

SignedMeasure SignedMeasure::operator*(double s) const { return {space_, mass_ * s}; }

Density::Density(SpacePtr space, Eigen::VectorXd values)
    : space_(std::move(space)), h_(std::move(values)) {
  if (!space_) throw ValidationError("density without a space");
  if (static_cast<std::size_t>(h_.size()) != space_->size()) {
    throw ValidationError("density has wrong length");
  }
  if (!h_.allFinite() || (h_.array() < 0.0).any()) {
    throw ValidationError("density must be finite and nonnegative");
  }
  const double integral = h_.dot(space_->nu());
  if (std::abs(integral - 1.0) > kMassTol) {
    throw ValidationError("density integrates to " + std::to_string(integral) +
                          " instead of 1");
  }
}

Density Density::constant_one(SpacePtr space) {
  const auto n = static_cast<Eigen::Index>(space->size());
  return {std::move(space), Eigen::VectorXd::Ones(n)};
}

double tv_norm(const SignedMeasure& mu) { return mu.mass().cwiseAbs().sum(); }

JordanParts hahn_jordan(const SignedMeasure& mu) {
  Eigen::VectorXd pos = mu.mass().cwiseMax(0.0);
  Eigen::VectorXd neg = (-mu.mass()).cwiseMax(0.0);
  return {SignedMeasure(mu.space_ptr(), std::move(pos)),
          SignedMeasure(mu.space_ptr(), std::move(neg))};
}

SignedMeasure mix(double alpha, const SignedMeasure& p, const SignedMeasure& q) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("mixing weight must lie in [0,1]");
  require_same(p.space_ptr(), q.space_ptr(), "mix");
  if (alpha == 0.0) return p;
  if (alpha == 1.0) return q;
  return {p.space_ptr(), (1.0 - alpha) * p.mass() + alpha * q.mass()};
}

SignedMeasure remove_mass_along(const SignedMeasure& mu, const SignedMeasure& p) {
  require_same(mu.space_ptr(), p.space_ptr(), "mass removal");
  return {mu.space_ptr(), mu.mass() - mu.total_mass() * p.mass()};
}

SignedMeasure density_to_measure(const Density& h) {
  return {h.space_ptr(), h.values().cwiseProduct(h.space().nu())};
}

Density measure_to_density(const SignedMeasure& mu) {
  if (!mu.is_probability()) {
    throw ValidationError("only probability measures have a probability density");
  }
  return {mu.space_ptr(), nu_density(mu)};
}

Eigen::VectorXd nu_density(const SignedMeasure& mu) {
  return mu.mass().cwiseQuotient(mu.space().nu());
}

}  // namespace charkern
