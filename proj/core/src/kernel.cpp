#include "charkern/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "charkern/error.hpp"

namespace charkern {

std::string_view to_string(Ternary t) {
  switch (t) {
    case Ternary::yes:
      return "yes";
    case Ternary::no:
      return "no";
    case Ternary::unknown:
      break;
  }
  return "unknown";
}

KernelSpec::KernelSpec(SpacePtr space, Eigen::MatrixXd gram)
    : space_(std::move(space)), gram_(std::move(gram)) {
  if (!space_) throw ValidationError("kernel without a space");
  const auto n = static_cast<Eigen::Index>(space_->size());
  if (gram_.rows() != n || gram_.cols() != n) {
    throw ValidationError("Gram matrix is " + std::to_string(gram_.rows()) + "x" +
                          std::to_string(gram_.cols()) + " for a space of " +
                          std::to_string(n) + " points");
  }
  if (!gram_.allFinite()) throw ValidationError("Gram matrix contains non-finite values");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (gram_(i, j) != gram_(j, i)) {
        throw ValidationError("Gram matrix is not symmetric at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram_, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigenvalue solver failed");
  lambda_min_ = solver.eigenvalues()[0];
  lambda_max_ = std::max(0.0, solver.eigenvalues()[n - 1]);
  const double norm = std::max(std::abs(lambda_min_), lambda_max_);
  if (lambda_min_ < -kPsdTol * norm) {
    throw PsdViolation("Gram matrix is not positive semidefinite (smallest eigenvalue " +
                       std::to_string(lambda_min_) + ")");
  }
}

KernelSpec KernelSpec::from_function(SpacePtr space,
                                     const std::function<double(std::size_t, std::size_t)>& k) {
  const auto n = static_cast<Eigen::Index>(space->size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      g(i, j) = k(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      g(j, i) = g(i, j);
    }
  }
  return {std::move(space), std::move(g)};
}

double KernelSpec::sup_norm() const { return gram_.cwiseAbs().maxCoeff(); }

namespace {

void require_space(const KernelSpec& k, const SignedMeasure& mu) {
  if (!same_space(k.space_ptr(), mu.space_ptr())) {
    throw SpaceMismatch("measure and kernel live on different spaces");
  }
}

void require_probability(const SignedMeasure& p) {
  if (!p.is_probability()) {
    throw ValidationError("forecast is not a probability measure (total mass " +
                          std::to_string(p.total_mass()) + ")");
  }
}

}  // namespace

double kernel_score(const KernelSpec& k, const SignedMeasure& p, std::size_t x) {
  require_space(k, p);
  require_probability(p);
  if (x >= k.size()) throw DomainError("observation index out of range");
  const Eigen::VectorXd& m = p.mass();
  const double cross = k.gram().col(static_cast<Eigen::Index>(x)).dot(m);
  const double self = m.dot(k.gram() * m);
  return -cross + 0.5 * self;
}

double kernel_score(const KernelSpec& k, const SignedMeasure& p, const std::string& x) {
  return kernel_score(k, p, k.space().index_of(x));
}

double embedding_inner(const KernelSpec& k, const SignedMeasure& mu1, const SignedMeasure& mu2) {
  require_space(k, mu1);
  require_space(k, mu2);
  return mu1.mass().dot(k.gram() * mu2.mass());
}

double mmd_sq(const KernelSpec& k, const SignedMeasure& mu) {
  const double value = embedding_inner(k, mu, mu);
  if (value >= 0.0) return value;
  const double tv = tv_norm(mu);
  if (value < -kPsdTol * k.operator_norm() * tv * tv) {
    throw PsdViolation("negative squared embedding norm " + std::to_string(value));
  }
  return 0.0;
}

double propriety_gap(const KernelSpec& k, const SignedMeasure& p, const SignedMeasure& q) {
  require_space(k, p);
  require_space(k, q);
  require_probability(p);
  require_probability(q);
  const Eigen::MatrixXd& g = k.gram();
  const Eigen::VectorXd& pm = p.mass();
  const Eigen::VectorXd& qm = q.mass();
  // Scores of every point at once: S(R, .) = -K r + 1/2 r^T K r.
  const Eigen::VectorXd kp = g * pm;
  const Eigen::VectorXd kq = g * qm;
  const Eigen::VectorXd score_q = (-kq).array() + 0.5 * qm.dot(kq);
  const Eigen::VectorXd score_p = (-kp).array() + 0.5 * pm.dot(kp);
  return score_q.dot(pm) - score_p.dot(pm);
}

KernelSpec sum_kernel(const KernelSpec& k1, const KernelSpec& k2) {
  if (!same_space(k1.space_ptr(), k2.space_ptr())) {
    throw SpaceMismatch("sum of kernels requires a common space");
  }
  return {k1.space_ptr(), k1.gram() + k2.gram()};
}

KernelSpec product_kernel(const KernelSpec& k1, const KernelSpec& k2) {
  SpacePtr prod = product_space(k1.space(), k2.space());
  const Eigen::Index n1 = k1.gram().rows();
  const Eigen::Index n2 = k2.gram().rows();
  Eigen::MatrixXd g(n1 * n2, n1 * n2);
  for (Eigen::Index a = 0; a < n1; ++a) {
    for (Eigen::Index b = 0; b < n1; ++b) {
      g.block(a * n2, b * n2, n2, n2) = k1.gram()(a, b) * k2.gram();
    }
  }
  return {std::move(prod), std::move(g)};
}

KernelSpec plus_one(const KernelSpec& k) {
  return {k.space_ptr(), k.gram().array() + 1.0};
}

SignedMeasure product_measure(const SignedMeasure& mu1, const SignedMeasure& mu2,
                              const SpacePtr& product) {
  const Eigen::Index n1 = mu1.mass().size();
  const Eigen::Index n2 = mu2.mass().size();
  if (static_cast<Eigen::Index>(product->size()) != n1 * n2) {
    throw ValidationError("product space size does not match the factors");
  }
  Eigen::VectorXd m(n1 * n2);
  for (Eigen::Index a = 0; a < n1; ++a) m.segment(a * n2, n2) = mu1.mass()[a] * mu2.mass();
  return {product, std::move(m)};
}

Eigen::VectorXd normalize_witness(Eigen::VectorXd v) {
  const double l1 = v.cwiseAbs().sum();
  if (l1 == 0.0) return v;
  v *= 2.0 / l1;
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12 * scale) {
      if (v[i] < 0.0) v = -v;
      break;
    }
  }
  return v;
}

KernelVerdict verdict(const KernelSpec& k) {
  KernelVerdict out;
  const auto n = static_cast<Eigen::Index>(k.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k.gram());
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigenvalue solver failed");
  const Eigen::VectorXd& lambdas = solver.eigenvalues();
  const double cut = kEigTol * std::max(0.0, lambdas[n - 1]);

  std::vector<Eigen::Index> null_cols;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lambdas[i] <= cut) null_cols.push_back(i);
  }
  const auto rank = n - static_cast<Eigen::Index>(null_cols.size());

  if (null_cols.empty()) {
    out.universal = out.sipd_on_m = out.characteristic = Ternary::yes;
    out.reasons.push_back("Gram matrix is nonsingular (rank " + std::to_string(rank) + ")");
    return out;
  }
  out.universal = out.sipd_on_m = Ternary::no;
  out.reasons.push_back("Gram matrix is singular: rank " + std::to_string(rank) + " of " +
                        std::to_string(n));

  Eigen::MatrixXd basis(n, static_cast<Eigen::Index>(null_cols.size()));
  for (Eigen::Index c = 0; c < basis.cols(); ++c) basis.col(c) = solver.eigenvectors().col(null_cols[static_cast<std::size_t>(c)]);
  const Eigen::RowVectorXd sums = basis.colwise().sum();
  Eigen::Index pivot = 0;
  const double max_sum = sums.cwiseAbs().maxCoeff(&pivot);
  const double sum_tol = 1e-9 * std::sqrt(static_cast<double>(n));

  if (max_sum <= sum_tol) {
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
      out.witnesses.push_back(normalize_witness(basis.col(c)));
    }
  } else {
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
      if (c == pivot) continue;
      Eigen::VectorXd w = basis.col(c) - (sums[c] / sums[pivot]) * basis.col(pivot);
      out.witnesses.push_back(normalize_witness(std::move(w)));
    }
  }

  if (out.witnesses.empty()) {
    out.characteristic = Ternary::yes;
    out.reasons.push_back("the single null direction has nonzero total mass");
  } else {
    out.characteristic = Ternary::no;
    out.reasons.push_back(std::to_string(out.witnesses.size()) +
                          " zero-mass null direction(s) of the embedding");
  }
  return out;
}

}  // namespace charkern
