#include "charkern/abelian_group.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

#include "charkern/error.hpp"

namespace charkern::group {

GroupSpec::GroupSpec(std::vector<int> moduli) : moduli_(std::move(moduli)) {
  if (moduli_.empty()) throw ValidationError("group needs at least one modulus");
  for (int m : moduli_) {
    if (m < 2) throw ValidationError("group moduli must be at least 2");
    order_ *= static_cast<std::size_t>(m);
  }
  std::vector<std::string> labels;
  labels.reserve(order_);
  for (std::size_t x = 0; x < order_; ++x) labels.push_back(label(x));
  space_ = std::make_shared<const DiscreteSpace>(DiscreteSpace::uniform(std::move(labels)));
}

std::vector<int> GroupSpec::digits(std::size_t flat) const {
  if (flat >= order_) throw DomainError("group element out of range");
  std::vector<int> d(moduli_.size());
  for (std::size_t j = moduli_.size(); j-- > 0;) {
    const auto m = static_cast<std::size_t>(moduli_[j]);
    d[j] = static_cast<int>(flat % m);
    flat /= m;
  }
  return d;
}

std::size_t GroupSpec::flatten(const std::vector<int>& digits) const {
  if (digits.size() != moduli_.size()) throw DomainError("element has wrong rank");
  std::size_t flat = 0;
  for (std::size_t j = 0; j < moduli_.size(); ++j) {
    const int m = moduli_[j];
    const int r = ((digits[j] % m) + m) % m;
    flat = flat * static_cast<std::size_t>(m) + static_cast<std::size_t>(r);
  }
  return flat;
}

std::size_t GroupSpec::add(std::size_t a, std::size_t b) const {
  std::vector<int> da = digits(a);
  const std::vector<int> db = digits(b);
  for (std::size_t j = 0; j < da.size(); ++j) da[j] = (da[j] + db[j]) % moduli_[j];
  return flatten(da);
}

std::size_t GroupSpec::negate(std::size_t a) const {
  std::vector<int> da = digits(a);
  for (std::size_t j = 0; j < da.size(); ++j) da[j] = (moduli_[j] - da[j]) % moduli_[j];
  return flatten(da);
}

std::string GroupSpec::label(std::size_t flat) const {
  const std::vector<int> d = digits(flat);
  if (d.size() == 1) return std::to_string(d[0]);
  std::string s = "(";
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (j) s += ",";
    s += std::to_string(d[j]);
  }
  return s + ")";
}

CharacterClass classify(const GroupSpec& g, std::size_t index) {
  const std::size_t neg = g.negate(index);
  if (neg == index) return CharacterClass::self_inverse;
  // Flattening is order preserving for the lexicographic order on digit tuples.
  return index < neg ? CharacterClass::plus : CharacterClass::minus;
}

namespace {

std::size_t lcm_of(const std::vector<int>& moduli) {
  std::size_t l = 1;
  for (int m : moduli) l = std::lcm(l, static_cast<std::size_t>(m));
  return l;
}

// Phase numerator over the lcm, reduced into (-L/2, L/2].
long long phase_numerator(const GroupSpec& g, std::size_t index, std::size_t x, std::size_t lcm) {
  const std::vector<int> di = g.digits(index);
  const std::vector<int> dx = g.digits(x);
  std::size_t num = 0;
  for (std::size_t j = 0; j < di.size(); ++j) {
    const auto m = static_cast<std::size_t>(g.moduli()[j]);
    const std::size_t r = (static_cast<std::size_t>(di[j]) * static_cast<std::size_t>(dx[j])) % m;
    num = (num + r * (lcm / m)) % lcm;
  }
  auto signed_num = static_cast<long long>(num);
  if (2 * num > lcm) signed_num -= static_cast<long long>(lcm);
  return signed_num;
}

double angle(long long num, std::size_t lcm) {
  return 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(lcm);
}

// Phase numerators of character `index` at every element, over the lcm.
// The phase is additive in x, so it is built one modulus at a time.
std::vector<std::size_t> phase_row(const GroupSpec& g, std::size_t index, std::size_t lcm) {
  const std::vector<int> di = g.digits(index);
  std::vector<std::size_t> row{0};
  row.reserve(g.order());
  for (std::size_t j = 0; j < di.size(); ++j) {
    const auto m = static_cast<std::size_t>(g.moduli()[j]);
    const std::size_t inc = static_cast<std::size_t>(di[j]) * (lcm / m) % lcm;
    const std::size_t prev = row.size();
    row.resize(prev * m);
    for (std::size_t p = prev; p-- > 0;) {
      std::size_t v = row[p];
      for (std::size_t t = 0; t < m; ++t) {
        row[p * m + t] = v;
        v += inc;
        if (v >= lcm) v -= lcm;
      }
    }
  }
  return row;
}

// cos and sin of 2 pi r / lcm, with r reduced into (-L/2, L/2] before the division.
struct PhaseTable {
  std::vector<double> cos_of;
  std::vector<double> sin_of;
};

PhaseTable phase_table(std::size_t lcm) {
  PhaseTable t{std::vector<double>(lcm), std::vector<double>(lcm)};
  for (std::size_t r = 0; r < lcm; ++r) {
    auto num = static_cast<long long>(r);
    if (2 * r > lcm) num -= static_cast<long long>(lcm);
    const double a = angle(num, lcm);
    t.cos_of[r] = std::cos(a);
    t.sin_of[r] = std::sin(a);
  }
  return t;
}

// cos and sin tables indexed [index][x].
struct CharacterTable {
  Eigen::MatrixXd re;
  Eigen::MatrixXd im;
};

CharacterTable character_table(const GroupSpec& g) {
  const auto n = static_cast<Eigen::Index>(g.order());
  const std::size_t lcm = lcm_of(g.moduli());
  const PhaseTable pt = phase_table(lcm);
  CharacterTable t{Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::vector<std::size_t> row = phase_row(g, static_cast<std::size_t>(i), lcm);
    for (Eigen::Index x = 0; x < n; ++x) {
      t.re(i, x) = pt.cos_of[row[static_cast<std::size_t>(x)]];
      t.im(i, x) = pt.sin_of[row[static_cast<std::size_t>(x)]];
    }
  }
  return t;
}

Eigen::VectorXd symmetrize_on_group(const GroupSpec& g, const Eigen::VectorXd& v) {
  Eigen::VectorXd out = v;
  for (std::size_t x = 0; x < g.order(); ++x) {
    const std::size_t nx = g.negate(x);
    if (nx <= x) continue;
    const auto a = static_cast<Eigen::Index>(x);
    const auto b = static_cast<Eigen::Index>(nx);
    const double avg = 0.5 * (v[a] + v[b]);
    out[a] = avg;
    out[b] = avg;
  }
  return out;
}

std::string index_list(const GroupSpec& g, const std::vector<std::size_t>& idx) {
  std::string s;
  const std::size_t shown = std::min<std::size_t>(idx.size(), 8);
  for (std::size_t k = 0; k < shown; ++k) {
    if (k) s += ", ";
    s += g.label(idx[k]);
  }
  if (idx.size() > shown) s += ", ...";
  return s;
}

}  // namespace

double character_phase(const GroupSpec& g, std::size_t index, std::size_t x) {
  const std::size_t lcm = lcm_of(g.moduli());
  long long num = phase_numerator(g, index, x, lcm);
  if (num < 0) num += static_cast<long long>(lcm);
  return static_cast<double>(num) / static_cast<double>(lcm);
}

std::complex<double> character(const GroupSpec& g, std::size_t index, std::size_t x) {
  const std::size_t lcm = lcm_of(g.moduli());
  return std::polar(1.0, angle(phase_numerator(g, index, x, lcm), lcm));
}

Eigen::MatrixXd real_onb(const GroupSpec& g) {
  const auto n = static_cast<Eigen::Index>(g.order());
  const std::size_t lcm = lcm_of(g.moduli());
  const PhaseTable pt = phase_table(lcm);
  Eigen::MatrixXd e(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::vector<std::size_t> row = phase_row(g, static_cast<std::size_t>(i), lcm);
    const CharacterClass c = classify(g, static_cast<std::size_t>(i));
    const std::vector<double>& table = c == CharacterClass::minus ? pt.sin_of : pt.cos_of;
    const double scale = c == CharacterClass::self_inverse ? 1.0 : std::numbers::sqrt2;
    double* col = e.col(i).data();
    for (Eigen::Index x = 0; x < n; ++x) col[x] = scale * table[row[static_cast<std::size_t>(x)]];
  }
  return e;
}

KernelSpec GroupKernel::kernel() const {
  return KernelSpec::from_function(group.space(), [this](std::size_t x, std::size_t y) {
    return (*this)(x, y);
  });
}

GroupKernel kernel_from_coeffs(const GroupSpec& g, Eigen::VectorXd coeffs) {
  if (static_cast<std::size_t>(coeffs.size()) != g.order()) {
    throw ValidationError("expected " + std::to_string(g.order()) + " coefficients, got " +
                          std::to_string(coeffs.size()));
  }
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    if (!(coeffs[i] >= 0.0) || !std::isfinite(coeffs[i])) {
      throw ValidationError("coefficient of character " + g.label(static_cast<std::size_t>(i)) +
                            " is negative or not finite");
    }
  }
  GroupKernel out{g, Eigen::VectorXd(), Eigen::VectorXd(), {}};
  const Eigen::VectorXd sym = symmetrize_on_group(g, coeffs);
  if (sym != coeffs) {
    out.warnings.push_back("coefficients with lambda_i != lambda_-i were symmetrized");
  }
  out.coeffs = sym;
  const CharacterTable t = character_table(g);
  out.kappa = symmetrize_on_group(g, t.re.transpose() * sym);
  return out;
}

CoefficientReport coeffs_from_kernel(const GroupSpec& g, const Eigen::VectorXd& kappa) {
  if (static_cast<std::size_t>(kappa.size()) != g.order()) {
    throw ValidationError("kappa must have one value per group element");
  }
  const CharacterTable t = character_table(g);
  const double inv_n = 1.0 / static_cast<double>(g.order());
  CoefficientReport rep;
  rep.coeffs = inv_n * (t.re * kappa);
  const Eigen::VectorXd imag = inv_n * (t.im * kappa);
  rep.max_imag = imag.size() ? imag.cwiseAbs().maxCoeff() : 0.0;
  const double tol = 1e-12 * std::max(1.0, kappa.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < rep.coeffs.size(); ++i) {
    if (rep.coeffs[i] < -tol) rep.negative.push_back(static_cast<std::size_t>(i));
  }
  return rep;
}

GroupKernel kernel_from_kappa(const GroupSpec& g, const Eigen::VectorXd& kappa) {
  if (static_cast<std::size_t>(kappa.size()) != g.order()) {
    throw ValidationError("kappa must have one value per group element");
  }
  const double scale = std::max(1.0, kappa.cwiseAbs().maxCoeff());
  for (std::size_t x = 0; x < g.order(); ++x) {
    const auto a = static_cast<Eigen::Index>(x);
    const auto b = static_cast<Eigen::Index>(g.negate(x));
    if (std::abs(kappa[a] - kappa[b]) > 1e-12 * scale) {
      throw ValidationError("kappa(-x) != kappa(x) at x = " + g.label(x));
    }
  }
  CoefficientReport rep = coeffs_from_kernel(g, kappa);
  if (!rep.is_kernel()) {
    throw ValidationError("kappa has negative Fourier coefficients at " +
                          index_list(g, rep.negative) + "; it does not define a kernel");
  }
  GroupKernel out{g, rep.coeffs.cwiseMax(0.0), symmetrize_on_group(g, kappa), {}};
  return out;
}

KernelVerdict group_verdict(const GroupKernel& k) {
  const GroupSpec& g = k.group;
  KernelVerdict out;
  const double cut = kEigTol * std::max(0.0, k.coeffs.maxCoeff());
  std::vector<std::size_t> vanishing;
  for (Eigen::Index i = 0; i < k.coeffs.size(); ++i) {
    if (k.coeffs[i] <= cut) vanishing.push_back(static_cast<std::size_t>(i));
  }
  const bool zero_vanishes = !vanishing.empty() && vanishing.front() == 0;
  out.universal = out.sipd_on_m = from_bool(vanishing.empty());
  out.characteristic = from_bool(vanishing.empty() || (zero_vanishes && vanishing.size() == 1));
  if (vanishing.empty()) {
    out.reasons.push_back("all Fourier coefficients are positive");
    return out;
  }
  out.reasons.push_back("vanishing coefficients at characters " + index_list(g, vanishing));
  if (out.characteristic == Ternary::yes) {
    out.reasons.push_back("only the trivial character vanishes");
    return out;
  }
  const Eigen::MatrixXd onb = real_onb(g);
  for (std::size_t i : vanishing) {
    if (i == 0) continue;
    const Eigen::VectorXd f = onb.col(static_cast<Eigen::Index>(i));
    out.witnesses.push_back(normalize_witness(f.cwiseProduct(g.space()->nu())));
  }
  return out;
}

MercerExpansion group_mercer(const GroupKernel& k) {
  const Eigen::MatrixXd onb = real_onb(k.group);
  const Eigen::Index n = onb.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return k.coeffs[a] > k.coeffs[b]; });
  Eigen::VectorXd lambdas(n);
  Eigen::MatrixXd funcs(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    lambdas[c] = k.coeffs[order[static_cast<std::size_t>(c)]];
    funcs.col(c) = onb.col(order[static_cast<std::size_t>(c)]);
  }
  return {k.group.space(), std::move(lambdas), std::move(funcs)};
}

KernelSpec onb_kernel(const GroupSpec& g, const Eigen::VectorXd& coeffs) {
  if (static_cast<std::size_t>(coeffs.size()) != g.order()) {
    throw ValidationError("expected one coefficient per character");
  }
  if ((coeffs.array() < 0.0).any()) throw ValidationError("coefficients must be nonnegative");
  const Eigen::MatrixXd e = real_onb(g);
  Eigen::MatrixXd gram = e * coeffs.asDiagonal() * e.transpose();
  gram = 0.5 * (gram + gram.transpose()).eval();
  return {g.space(), std::move(gram)};
}

GroupKernel product_group_kernel(const GroupKernel& k_c, const GroupKernel& k_d) {
  for (int m : k_d.group.moduli()) {
    if (m != 2) throw ValidationError("second factor must live on Z_2^d");
  }
  std::vector<int> moduli = k_c.group.moduli();
  moduli.insert(moduli.end(), k_d.group.moduli().begin(), k_d.group.moduli().end());
  GroupSpec g(std::move(moduli));
  const Eigen::Index nc = k_c.coeffs.size();
  const Eigen::Index nd = k_d.coeffs.size();
  Eigen::VectorXd coeffs(nc * nd);
  Eigen::VectorXd kappa(nc * nd);
  for (Eigen::Index i = 0; i < nc; ++i) {
    coeffs.segment(i * nd, nd) = k_c.coeffs[i] * k_d.coeffs;
    kappa.segment(i * nd, nd) = k_c.kappa[i] * k_d.kappa;
  }
  GroupKernel out{std::move(g), std::move(coeffs), std::move(kappa), {}};
  return out;
}

bool validate_z2_invariance(const Eigen::Matrix2d& gram) {
  return gram(0, 1) == gram(1, 0) && gram(0, 0) == gram(1, 1) &&
         gram(0, 0) >= std::abs(gram(0, 1));
}

}  // namespace charkern::group
