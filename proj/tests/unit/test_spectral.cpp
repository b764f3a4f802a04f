#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "charkern/abelian_group.hpp"
#include "charkern/error.hpp"
#include "charkern/kernel.hpp"
#include "charkern/spectral.hpp"
#include "oracles.hpp"

using namespace charkern;

namespace {

double orthonormality_error(const MercerExpansion& m) {
  const Eigen::MatrixXd& e = m.eigfuncs();
  const Eigen::MatrixXd g = e.transpose() * m.space().nu().asDiagonal() * e;
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

// K = A^T A with f in the null space of A, so f is a null direction of K.
KernelSpec kernel_annihilating(const Eigen::VectorXd& f, std::size_t rank, std::mt19937_64& rng,
                               SpacePtr space = nullptr) {
  const auto n = static_cast<std::size_t>(f.size());
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rank), f.size());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = g(rng);
    a.row(i) -= (a.row(i).dot(f) / f.squaredNorm()) * f.transpose();
  }
  Eigen::MatrixXd k = a.transpose() * a;
  k = 0.5 * (k + k.transpose()).eval();
  return {space ? space : oracle::uniform_space(n), k};
}

}  // namespace

TEST(Mercer, IdentityKernelUnderUniformWeights) {
  const KernelSpec k(oracle::uniform_space(2), Eigen::Matrix2d::Identity());
  const MercerExpansion m = mercer_decompose(k);
  EXPECT_NEAR(m.lambdas()[0], 0.5, 1e-15);
  EXPECT_NEAR(m.lambdas()[1], 0.5, 1e-15);
  // e_i = sqrt(2) * standard basis vectors, up to order and sign.
  for (Eigen::Index i = 0; i < 2; ++i) {
    const Eigen::VectorXd e = m.eigfuncs().col(i).cwiseAbs();
    EXPECT_NEAR(e.maxCoeff(), std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(e.minCoeff(), 0.0, 1e-14);
  }
  EXPECT_FALSE(m.index_of_one().has_value());
}

TEST(Mercer, ConstantKernelIsRankOneWithConstantEigenfunction) {
  const auto s = make_space({"a", "b", "c"}, {0.2, 0.3, 0.5});
  const MercerExpansion m = mercer_decompose(KernelSpec(s, Eigen::Matrix3d::Ones()));
  EXPECT_NEAR(m.lambdas()[0], 1.0, 1e-14);
  EXPECT_NEAR(m.lambdas()[1], 0.0, 1e-14);
  ASSERT_TRUE(m.index_of_one().has_value());
  EXPECT_EQ(*m.index_of_one(), 0);
  EXPECT_LE((m.eigfuncs().col(0) - Eigen::Vector3d::Ones()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Mercer, Z2KernelRecoversCoefficients) {
  Eigen::Matrix2d k;
  k << 1.5, 0.5, 0.5, 1.5;
  const MercerExpansion m = mercer_decompose(KernelSpec(oracle::uniform_space(2), k));
  EXPECT_NEAR(m.lambdas()[0], 1.0, 1e-14);
  EXPECT_NEAR(m.lambdas()[1], 0.5, 1e-14);
  EXPECT_LE((m.eigfuncs().col(0) - Eigen::Vector2d(1.0, 1.0)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(std::abs(m.eigfuncs()(0, 1)), 1.0, 1e-14);
  EXPECT_NEAR(m.eigfuncs()(0, 1), -m.eigfuncs()(1, 1), 1e-14);
}

TEST(Mercer, RandomKernelsSatisfyInvariants) {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 25;
    const auto s = oracle::weighted_space(oracle::random_weights(n, rng));
    const KernelSpec k(s, oracle::random_psd(n, 1 + trial % n, rng));
    const MercerExpansion m = mercer_decompose(k);
    EXPECT_LE(orthonormality_error(m), 1e-10);
    const double scale = 1.0 + k.gram().cwiseAbs().maxCoeff();
    EXPECT_LE((m.reconstruct() - k.gram()).cwiseAbs().maxCoeff(), 1e-9 * scale);
    for (Eigen::Index i = 1; i < m.size(); ++i) EXPECT_LE(m.lambdas()[i], m.lambdas()[i - 1]);
    // Eigen-equation of T: K D e_j = lambda_j e_j.
    const Eigen::MatrixXd lhs = k.gram() * s->nu().asDiagonal() * m.eigfuncs();
    const Eigen::MatrixXd rhs = m.eigfuncs() * m.lambdas().asDiagonal();
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10 * scale);
  }
}

TEST(Mercer, RejectsNonOrthonormalFamilies) {
  const auto s = oracle::uniform_space(2);
  Eigen::Matrix2d e;
  e << 1.0, 1.0, 1.0, 1.0;
  EXPECT_THROW(MercerExpansion(s, Eigen::Vector2d(1.0, 0.5), e), ValidationError);
  EXPECT_THROW(MercerExpansion(s, Eigen::Vector2d(0.5, 1.0), std::sqrt(2.0) * Eigen::Matrix2d::Identity()),
               ValidationError);
}

TEST(SpectralMmd, Z2HandValue) {
  Eigen::Matrix2d k;
  k << 1.5, 0.5, 0.5, 1.5;
  const KernelSpec ks(oracle::uniform_space(2), k);
  const MercerExpansion m = mercer_decompose(ks);
  const Density h(ks.space_ptr(), Eigen::Vector2d(2.0, 0.0));
  const Density g(ks.space_ptr(), Eigen::Vector2d(0.0, 2.0));
  EXPECT_NEAR(mmd_sq_spectral(m, h, g), 2.0, 1e-14);
  EXPECT_EQ(mmd_sq_spectral(m, h, h), 0.0);
}

TEST(SpectralMmd, AgreesWithGramForm) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 30;
    const auto s = oracle::weighted_space(oracle::random_weights(n, rng));
    const KernelSpec k(s, oracle::random_psd(n, 1 + trial % n, rng));
    const MercerExpansion m = mercer_decompose(k);
    const Eigen::VectorXd hv = oracle::random_probability(n, rng).cwiseQuotient(s->nu());
    const Eigen::VectorXd gv = oracle::random_probability(n, rng).cwiseQuotient(s->nu());
    const Density h(s, hv / hv.dot(s->nu()));
    const Density g(s, gv / gv.dot(s->nu()));
    const Eigen::VectorXd mu = (h.values() - g.values()).cwiseProduct(s->nu());
    const double gram = oracle::double_sum(k.gram(), mu, mu);
    const double spectral = mmd_sq_spectral(m, h, g);
    EXPECT_NEAR(spectral, gram, 1e-10 * std::max(gram, 1e-3 * k.operator_norm() * mu.squaredNorm()));
  }
}

TEST(SpectralVerdict, Cases) {
  const auto s = oracle::uniform_space(3);
  const Eigen::Matrix3d e = [] {
    Eigen::Matrix3d q;
    q.col(0) = Eigen::Vector3d::Ones();
    q.col(1) = std::sqrt(1.5) * Eigen::Vector3d(1.0, -1.0, 0.0);
    q.col(2) = std::sqrt(0.5) * Eigen::Vector3d(1.0, 1.0, -2.0);
    return q;
  }();
  const auto all_pos = spectral_verdict(MercerExpansion(s, Eigen::Vector3d(3.0, 2.0, 1.0), e));
  EXPECT_EQ(all_pos.universal, Ternary::yes);
  EXPECT_EQ(all_pos.characteristic, Ternary::yes);

  // Constant eigenfunction carries the only zero eigenvalue.
  Eigen::Matrix3d reordered;
  reordered << e.col(1), e.col(2), e.col(0);
  const auto one_zero = spectral_verdict(MercerExpansion(s, Eigen::Vector3d(2.0, 1.0, 0.0), reordered));
  EXPECT_EQ(one_zero.characteristic, Ternary::yes);
  EXPECT_EQ(one_zero.universal, Ternary::no);

  const auto two_zero = spectral_verdict(MercerExpansion(s, Eigen::Vector3d(1.0, 0.0, 0.0), e));
  EXPECT_EQ(two_zero.characteristic, Ternary::no);

  // Constant in range, a zero-mean null direction remains.
  const auto mean_zero_null = spectral_verdict(MercerExpansion(s, Eigen::Vector3d(2.0, 1.0, 0.0), e));
  EXPECT_EQ(mean_zero_null.characteristic, Ternary::no);
}

TEST(SpectralVerdict, MatchesGramVerdictOnRandomKernels) {
  std::mt19937_64 rng(31337);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 12;
    const std::size_t rank = n - static_cast<std::size_t>(trial % 3 == 0 ? 0 : (trial % 3 == 1 ? 1 : std::min<std::size_t>(2, n - 1)));
    KernelSpec k(oracle::uniform_space(n), oracle::random_psd(n, rank, rng));
    if (rank == n - 1 && coin(rng)) {
      // Null direction with zero mean.
      Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      f[0] = 1.0;
      f[1] = -1.0;
      k = kernel_annihilating(f, rank, rng);
    }
    const KernelVerdict a = verdict(k);
    const KernelVerdict b = spectral_verdict(mercer_decompose(k));
    EXPECT_EQ(a.characteristic, b.characteristic) << "trial " << trial;
    EXPECT_EQ(a.universal, b.universal) << "trial " << trial;
  }
}

TEST(ZeroMmdPair, ThreePointFixture) {
  std::mt19937_64 rng(5);
  const KernelSpec k = kernel_annihilating(Eigen::Vector3d(1.0, -1.0, 0.0), 2, rng);
  const MercerExpansion m = mercer_decompose(k);
  const Density p = Density::constant_one(k.space_ptr());
  const DensityPair pair = zero_mmd_pair(m, p, 0.5);
  const SignedMeasure q1 = density_to_measure(pair.first);
  const SignedMeasure q2 = density_to_measure(pair.second);
  EXPECT_NEAR(tv_norm(q1 - q2), 0.5, 1e-10);
  EXPECT_LE(tv_norm(density_to_measure(p) - q1), 0.5 + 1e-12);
  EXPECT_LE(tv_norm(density_to_measure(p) - q2), 0.5 + 1e-12);
  EXPECT_LE(mmd_sq_spectral(m, pair.first, pair.second), 1e-12);
  EXPECT_LE(mmd_sq(k, q1 - q2), 1e-12);
}

TEST(ZeroMmdPair, TotalVariationSweep) {
  std::mt19937_64 rng(6);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(6);
  f << 1.0, 2.0, -1.0, 0.0, -2.0, 0.0;
  const auto s = oracle::weighted_space(oracle::random_weights(6, rng));
  f[5] = -f.head(5).dot(s->nu().head(5)) / s->nu()[5];
  const KernelSpec k = kernel_annihilating(f, 4, rng, s);
  const MercerExpansion m = mercer_decompose(k);
  const Eigen::VectorXd hv = oracle::random_probability(6, rng).cwiseQuotient(s->nu());
  const Density p(s, hv);
  for (double target : {0.1, 1.0, 1.9}) {
    const DensityPair pair = zero_mmd_pair(m, p, target);
    const SignedMeasure q1 = density_to_measure(pair.first);
    const SignedMeasure q2 = density_to_measure(pair.second);
    EXPECT_NEAR(tv_norm(q1 - q2), target, 1e-10);
    EXPECT_LE(mmd_sq(k, q1 - q2), 1e-12);
    EXPECT_LE(tv_norm(density_to_measure(p) - q1), target + 1e-12);
  }
}

TEST(ZeroMmdPair, UniversalKernelHasNoNullDirection) {
  const KernelSpec k(oracle::uniform_space(3), Eigen::Matrix3d::Identity());
  EXPECT_THROW(static_cast<void>(zero_mmd_pair(mercer_decompose(k), Density::constant_one(k.space_ptr()), 0.5)),
               PreconditionError);
}

TEST(ZeroMmdPair, NullDirectionWithMassOnlyIsRejected) {
  const Eigen::Index n = 4;
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const KernelSpec ks(oracle::uniform_space(4), k);
  EXPECT_THROW(static_cast<void>(zero_mmd_pair(mercer_decompose(ks), Density::constant_one(ks.space_ptr()), 0.5)),
               PreconditionError);
}

TEST(NearZeroMmdPair, LiteralDecayingSpectrumOnZ16) {
  const group::GroupSpec g({16});
  Eigen::VectorXd lam(16);
  for (Eigen::Index i = 0; i < 16; ++i) lam[i] = std::ldexp(1.0, -static_cast<int>(i));
  const KernelSpec k = group::onb_kernel(g, lam);
  const MeasurePair pair = near_zero_mmd_pair(mercer_decompose(k), 0.05);
  EXPECT_TRUE(pair.first.is_probability());
  EXPECT_TRUE(pair.second.is_probability());
  EXPECT_NEAR(tv_norm(pair.first - pair.second), 2.0, 1e-12);
  EXPECT_LE(std::sqrt(mmd_sq(k, pair.first - pair.second)), 0.05);
}

TEST(NearZeroMmdPair, TranslationInvariantSpectrumIsTooFlat) {
  // Symmetrizing lambda_i = 2^-i on Z16 leaves lambda_min = 2^-8; Parseval gives
  // MMD^2 >= lambda_min * ||mu||_1^2 = 4 * 2^-8, so sqrt MMD >= 0.125 for TV 2.
  const group::GroupSpec g({16});
  Eigen::VectorXd lam(16);
  for (Eigen::Index i = 0; i < 16; ++i) lam[i] = std::ldexp(1.0, -static_cast<int>(i));
  const group::GroupKernel gk = group::kernel_from_coeffs(g, lam);
  const MercerExpansion m = group::group_mercer(gk);
  EXPECT_NEAR(m.lambdas().minCoeff(), std::ldexp(1.0, -8), 1e-15);
  try {
    static_cast<void>(near_zero_mmd_pair(m, 0.05));
    FAIL() << "expected a flat-spectrum error";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("spectrum too flat"), std::string::npos);
  }
  const MeasurePair best = near_zero_mmd_pair(m, 0.2);
  EXPECT_GE(std::sqrt(mmd_sq(gk.kernel(), best.first - best.second)), 0.125 - 1e-12);
}

TEST(NearZeroMmdPair, LargeEpsStillMeetsPostconditions) {
  std::mt19937_64 rng(1);
  const KernelSpec k(oracle::uniform_space(5), oracle::random_psd(5, 5, rng));
  const double eps = 2.0 * std::sqrt(k.sup_norm()) + 1.0;
  const MeasurePair pair = near_zero_mmd_pair(mercer_decompose(k), eps);
  EXPECT_NEAR(tv_norm(pair.first - pair.second), 2.0, 1e-12);
  EXPECT_LE(std::sqrt(mmd_sq(k, pair.first - pair.second)), eps);
}

TEST(NearZeroMmdPair, LocalizedVariant) {
  const group::GroupSpec g({16});
  Eigen::VectorXd lam(16);
  for (Eigen::Index i = 0; i < 16; ++i) lam[i] = std::ldexp(1.0, -static_cast<int>(i));
  const KernelSpec k = group::onb_kernel(g, lam);
  const MercerExpansion m = mercer_decompose(k);
  std::mt19937_64 rng(9);
  const SignedMeasure p(k.space_ptr(), oracle::random_probability(16, rng));
  const double delta = 0.3;
  const MeasurePair pair = near_zero_mmd_pair(m, p, delta, 0.01);
  EXPECT_NEAR(tv_norm(pair.first - pair.second), delta, 1e-12);
  EXPECT_LE(tv_norm(p - pair.first), delta + 1e-12);
  EXPECT_LE(tv_norm(p - pair.second), delta + 1e-12);
  EXPECT_LE(std::sqrt(mmd_sq(k, pair.first - pair.second)), 0.01);
  EXPECT_TRUE(pair.first.is_probability());
}

TEST(NoUniformPerturbation, CyclicGroupOfOrderEight) {
  const group::GroupSpec g({8});
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Eigen::VectorXd lam(8);
  for (Eigen::Index i = 0; i < 8; ++i) lam[i] = u(rng);
  const group::GroupKernel gk = group::kernel_from_coeffs(g, lam);
  const MercerExpansion m = group::group_mercer(gk);
  const KernelSpec k = gk.kernel();
  const SignedMeasure nu = SignedMeasure::reference(k.space_ptr());
  for (Eigen::Index j = 0; j < m.size(); ++j) {
    if (j == *m.index_of_one()) continue;
    const UniformPerturbation up = no_uniform_perturbation(m, j);
    EXPECT_TRUE(up.q.is_nonnegative());
    EXPECT_NEAR(up.q.total_mass(), 1.0, 1e-12);
    EXPECT_LE(up.c_inf, std::sqrt(2.0) + 1e-14);
    EXPECT_GE(tv_norm(nu - up.q), up.c_one / up.c_inf - 1e-12);
    EXPECT_NEAR(mmd_sq(k, nu - up.q), m.lambdas()[j] / (up.c_inf * up.c_inf), 1e-12);
    EXPECT_NEAR(up.mmd_sq_exact, m.lambdas()[j] / (up.c_inf * up.c_inf), 1e-15);
  }
  EXPECT_THROW(static_cast<void>(no_uniform_perturbation(m, *m.index_of_one())), DomainError);
}

TEST(NoUniformPerturbation, ZeroEigenvalueGivesIndistinguishableMeasure) {
  const group::GroupSpec g({8});
  Eigen::VectorXd lam = Eigen::VectorXd::Ones(8);
  lam[3] = lam[5] = 0.0;
  const group::GroupKernel gk = group::kernel_from_coeffs(g, lam);
  const MercerExpansion m = group::group_mercer(gk);
  const Eigen::Index last = m.size() - 1;
  ASSERT_EQ(m.lambdas()[last], 0.0);
  const UniformPerturbation up = no_uniform_perturbation(m, last);
  const SignedMeasure nu = SignedMeasure::reference(gk.group.space());
  EXPECT_EQ(up.mmd_sq_exact, 0.0);
  EXPECT_GT(tv_norm(nu - up.q), 0.0);
  EXPECT_LE(mmd_sq(gk.kernel(), nu - up.q), 1e-14);
}

TEST(NoUniformPerturbation, NeedsConstantEigenfunction) {
  const KernelSpec k(oracle::uniform_space(2), Eigen::Matrix2d::Identity());
  EXPECT_THROW(static_cast<void>(no_uniform_perturbation(mercer_decompose(k), 0)), PreconditionError);
}
