#include "charkern/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "charkern/error.hpp"

namespace charkern {

MercerExpansion::MercerExpansion(SpacePtr space, Eigen::VectorXd lambdas,
                                 Eigen::MatrixXd eigfuncs)
    : space_(std::move(space)), lambdas_(std::move(lambdas)), eigfuncs_(std::move(eigfuncs)) {
  if (!space_) throw ValidationError("expansion without a space");
  const auto n = static_cast<Eigen::Index>(space_->size());
  if (eigfuncs_.rows() != n || eigfuncs_.cols() != lambdas_.size()) {
    throw ValidationError("eigenfunction matrix does not match the space and eigenvalues");
  }
  const double top = lambdas_.size() > 0 ? lambdas_.maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < lambdas_.size(); ++i) {
    if (lambdas_[i] < 0.0) {
      if (lambdas_[i] < -kPsdTol * std::max(top, 1.0)) {
        throw PsdViolation("negative eigenvalue " + std::to_string(lambdas_[i]));
      }
      lambdas_[i] = 0.0;
    }
    if (i > 0 && lambdas_[i] > lambdas_[i - 1]) {
      throw ValidationError("eigenvalues must be sorted in nonincreasing order");
    }
  }
  const Eigen::MatrixXd gram = eigfuncs_.transpose() * space_->nu().asDiagonal() * eigfuncs_;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
  if ((gram - eye).cwiseAbs().maxCoeff() > kOrthoTol) {
    throw ValidationError("eigenfunctions are not L2(nu)-orthonormal");
  }
  for (Eigen::Index i = 0; i < eigfuncs_.cols(); ++i) {
    const double first = eigfuncs_(0, i);
    if (std::abs(std::abs(first) - 1.0) > kConstantTol) continue;
    const bool constant =
        (eigfuncs_.col(i).array() - first).abs().maxCoeff() <= kConstantTol * std::abs(first);
    if (constant) {
      if (first < 0.0) eigfuncs_.col(i) *= -1.0;
      index_of_one_ = i;
      break;
    }
  }
}

double MercerExpansion::zero_cut() const {
  const double top = lambdas_.size() > 0 ? lambdas_[0] : 0.0;
  return kEigTol * std::max(0.0, top);
}

Eigen::MatrixXd MercerExpansion::reconstruct() const {
  return eigfuncs_ * lambdas_.asDiagonal() * eigfuncs_.transpose();
}

Eigen::VectorXd MercerExpansion::coefficients(const Eigen::VectorXd& f) const {
  return eigfuncs_.transpose() * f.cwiseProduct(space_->nu());
}

Eigen::VectorXd MercerExpansion::means() const { return eigfuncs_.transpose() * space_->nu(); }

MercerExpansion mercer_decompose(const KernelSpec& k) {
  const Eigen::VectorXd sqrt_nu = k.space().nu().cwiseSqrt();
  const Eigen::MatrixXd weighted = sqrt_nu.asDiagonal() * k.gram() * sqrt_nu.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(weighted);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigenvalue solver failed");
  const Eigen::Index n = weighted.rows();
  Eigen::VectorXd lambdas(n);
  Eigen::MatrixXd funcs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = n - 1 - i;
    lambdas[i] = std::max(0.0, solver.eigenvalues()[src]);
    funcs.col(i) = solver.eigenvectors().col(src).cwiseQuotient(sqrt_nu);
  }
  return {k.space_ptr(), std::move(lambdas), std::move(funcs)};
}

double mmd_sq_spectral(const MercerExpansion& m, const Density& h, const Density& g) {
  if (!same_space(m.space_ptr(), h.space_ptr()) || !same_space(m.space_ptr(), g.space_ptr())) {
    throw SpaceMismatch("densities and expansion live on different spaces");
  }
  const Eigen::VectorXd c = m.coefficients(h.values() - g.values());
  return m.lambdas().dot(c.cwiseAbs2());
}

double mmd_sq_spectral(const MercerExpansion& m, const SignedMeasure& mu) {
  if (!same_space(m.space_ptr(), mu.space_ptr())) {
    throw SpaceMismatch("measure and expansion live on different spaces");
  }
  const Eigen::VectorXd c = m.eigfuncs().transpose() * mu.mass();
  return m.lambdas().dot(c.cwiseAbs2());
}

namespace {

double mean_tol(const MercerExpansion& m) { return 1e-9 * std::sqrt(m.space().nu().sum()); }

std::vector<Eigen::Index> null_indices(const MercerExpansion& m) {
  std::vector<Eigen::Index> out;
  const double cut = m.zero_cut();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (m.lambdas()[i] <= cut) out.push_back(i);
  }
  return out;
}

// Zero-mean functions spanning the zero-mean part of the null space, smallest index first.
std::vector<Eigen::VectorXd> zero_mean_null_directions(const MercerExpansion& m) {
  const std::vector<Eigen::Index> zeros = null_indices(m);
  std::vector<Eigen::VectorXd> out;
  if (zeros.empty()) return out;
  const Eigen::VectorXd means = m.means();
  const double tol = mean_tol(m);
  Eigen::Index pivot = zeros.front();
  for (Eigen::Index z : zeros) {
    if (std::abs(means[z]) > std::abs(means[pivot])) pivot = z;
  }
  if (std::abs(means[pivot]) <= tol) {
    for (Eigen::Index z : zeros) out.emplace_back(m.eigfuncs().col(z));
    return out;
  }
  for (Eigen::Index z : zeros) {
    if (z == pivot) continue;
    out.emplace_back(m.eigfuncs().col(z) - (means[z] / means[pivot]) * m.eigfuncs().col(pivot));
  }
  return out;
}

double l1_nu(const MercerExpansion& m, const Eigen::VectorXd& f) {
  return f.cwiseAbs().dot(m.space().nu());
}

}  // namespace

KernelVerdict spectral_verdict(const MercerExpansion& m) {
  KernelVerdict out;
  const std::vector<Eigen::Index> zeros = null_indices(m);
  if (zeros.empty()) {
    out.universal = out.sipd_on_m = out.characteristic = Ternary::yes;
    out.reasons.push_back("all eigenvalues are positive");
    return out;
  }
  out.universal = out.sipd_on_m = Ternary::no;
  out.reasons.push_back(std::to_string(zeros.size()) + " zero eigenvalue(s), first at index " +
                        std::to_string(zeros.front()));

  for (const Eigen::VectorXd& f : zero_mean_null_directions(m)) {
    out.witnesses.push_back(normalize_witness(f.cwiseProduct(m.space().nu())));
  }
  if (zeros.size() >= 2) {
    out.characteristic = Ternary::no;
    out.reasons.push_back("null space has codimension >= 2 in L2(nu)");
    return out;
  }
  const Eigen::Index z = zeros.front();
  if (m.index_of_one() && *m.index_of_one() == z) {
    out.characteristic = Ternary::yes;
    out.reasons.push_back("only the constant eigenfunction has a zero eigenvalue");
  } else if (std::abs(m.means()[z]) <= mean_tol(m)) {
    out.characteristic = Ternary::no;
    out.reasons.push_back("constant function lies in the range and a null direction remains");
  } else {
    out.characteristic = Ternary::yes;
    out.reasons.push_back("the single null eigenfunction has nonzero mean");
  }
  return out;
}

DensityPair zero_mmd_pair(const MercerExpansion& m, const Density& p, double tv_target) {
  if (!(tv_target > 0.0 && tv_target < 2.0)) {
    throw DomainError("target total variation must lie in (0, 2)");
  }
  if (!same_space(m.space_ptr(), p.space_ptr())) {
    throw SpaceMismatch("density and expansion live on different spaces");
  }
  const std::vector<Eigen::VectorXd> dirs = zero_mean_null_directions(m);
  if (dirs.empty()) {
    throw PreconditionError("kernel has no L1 null direction with zero mean");
  }
  const Eigen::VectorXd& f = dirs.front();
  const Eigen::VectorXd f_pos = f.cwiseMax(0.0);
  const Eigen::VectorXd f_neg = (-f).cwiseMax(0.0);
  const double c = 0.5 * l1_nu(m, f);
  // 2 delta c / (1 + delta c) = tv_target.
  const double delta = tv_target / ((2.0 - tv_target) * c);
  const double scale = 1.0 / (1.0 + delta * c);
  Eigen::VectorXd h1 = scale * (p.values() + delta * f_pos);
  Eigen::VectorXd h2 = scale * (p.values() + delta * f_neg);
  return {Density(p.space_ptr(), std::move(h1)), Density(p.space_ptr(), std::move(h2))};
}

MeasurePair near_zero_mmd_pair(const MercerExpansion& m, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const Eigen::VectorXd means = m.means();
  const Eigen::VectorXd& lam = m.lambdas();
  const double tol = mean_tol(m);

  double best_ratio = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best;
  auto consider = [&](const Eigen::VectorXd& f, double h_norm_sq) {
    const double c = 0.5 * l1_nu(m, f);
    if (c <= 0.0) return;
    const double ratio = std::sqrt(std::max(0.0, h_norm_sq)) / c;
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = f;
    }
  };

  std::vector<Eigen::Index> pivots;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (std::abs(means[i]) <= tol) {
      consider(m.eigfuncs().col(i), lam[i]);
    } else {
      pivots.push_back(i);
    }
  }
  // Orthogonalize against the constant function through the largest-mean eigenfunctions.
  std::sort(pivots.begin(), pivots.end(),
            [&](Eigen::Index a, Eigen::Index b) { return std::abs(means[a]) > std::abs(means[b]); });
  const std::size_t pivot_count = std::min<std::size_t>(pivots.size(), 8);
  for (std::size_t pi = 0; pi < pivot_count; ++pi) {
    const Eigen::Index p = pivots[pi];
    for (Eigen::Index i : pivots) {
      if (i == p) continue;
      const double r = means[i] / means[p];
      consider(m.eigfuncs().col(i) - r * m.eigfuncs().col(p), lam[i] + r * r * lam[p]);
    }
  }

  if (best.size() == 0 || best_ratio > eps) {
    throw PreconditionError("spectrum too flat: requested eps " + std::to_string(eps) +
                            " unachievable on this space (best " + std::to_string(best_ratio) +
                            ")");
  }
  const Eigen::VectorXd mu = best.cwiseProduct(m.space().nu());
  Eigen::VectorXd pos = mu.cwiseMax(0.0);
  Eigen::VectorXd neg = (-mu).cwiseMax(0.0);
  pos /= pos.sum();
  neg /= neg.sum();
  return {SignedMeasure(m.space_ptr(), std::move(pos)), SignedMeasure(m.space_ptr(), std::move(neg))};
}

MeasurePair near_zero_mmd_pair(const MercerExpansion& m, const SignedMeasure& p, double delta,
                               double eps) {
  if (!(delta > 0.0 && delta <= 2.0)) throw DomainError("delta must lie in (0, 2]");
  if (!p.is_probability()) throw ValidationError("base distribution must be a probability");
  const double alpha = 0.5 * delta;
  const MeasurePair wide = near_zero_mmd_pair(m, eps / alpha);
  return {mix(alpha, p, wide.first), mix(alpha, p, wide.second)};
}

UniformPerturbation no_uniform_perturbation(const MercerExpansion& m, Eigen::Index j) {
  if (!m.space().nu_is_probability()) {
    throw PreconditionError("reference measure must be a probability measure");
  }
  const auto one = m.index_of_one();
  if (!one) throw PreconditionError("expansion has no constant eigenfunction");
  if (j < 0 || j >= m.size()) throw DomainError("eigenfunction index out of range");
  if (j == *one) throw DomainError("index must differ from the constant eigenfunction");

  double c_inf = 0.0;
  double c_one = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    c_inf = std::max(c_inf, m.eigfuncs().col(i).cwiseAbs().maxCoeff());
    c_one = std::min(c_one, l1_nu(m, m.eigfuncs().col(i)));
  }
  const double alpha = 1.0 / c_inf;
  Eigen::VectorXd h = (1.0 + alpha * m.eigfuncs().col(j).array()).cwiseMax(0.0);
  UniformPerturbation out{SignedMeasure(m.space_ptr(), h.cwiseProduct(m.space().nu())),
                          c_one / c_inf, m.lambdas()[j] / (c_inf * c_inf), c_one, c_inf};
  return out;
}

}  // namespace charkern
