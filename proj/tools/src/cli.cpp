#include "charkern_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "charkern/abelian_group.hpp"
#include "charkern/error.hpp"
#include "charkern/json_io.hpp"
#include "charkern/kernel.hpp"
#include "charkern/measure.hpp"
#include "charkern/spectral.hpp"
#include "charkern/sphere.hpp"

namespace charkern::cli {

namespace {

using io::json;

const std::vector<std::string> kCommands = {"score",    "verdict",        "group-verdict",
                                            "spectrum", "counterexample", "sphere-verdict",
                                            "sphere-embed"};

std::vector<int> parse_moduli(const std::string& text) {
  std::vector<int> moduli;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int m = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      moduli.push_back(m);
    } catch (const std::exception&) {
      throw ParseError("moduli must be a comma separated list of integers, got '" + text + "'");
    }
  }
  if (moduli.empty()) throw ParseError("empty moduli list");
  return moduli;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("expected a comma separated list of numbers, got '" + text + "'");
    }
  }
  return v;
}

json load(const std::string& path_or_inline, const std::string& what) {
  const auto first = path_or_inline.find_first_not_of(" \t\n");
  if (first != std::string::npos &&
      (path_or_inline[first] == '[' || path_or_inline[first] == '{')) {
    return io::parse_json(path_or_inline, what);
  }
  return io::read_json_file(path_or_inline);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v + 0.0;
  return os.str();
}

std::string fmt_vector(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v[i]);
  }
  return s + "]";
}

void print_rows(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  for (const auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(width) + 2) << k << v << '\n';
}

void print_verdict(std::ostream& out, const KernelVerdict& v) {
  std::vector<std::pair<std::string, std::string>> rows = {
      {"characteristic:", std::string(to_string(v.characteristic))},
      {"universal:", std::string(to_string(v.universal))},
      {"sipd on M:", std::string(to_string(v.sipd_on_m))},
  };
  for (const auto& w : v.witnesses) rows.emplace_back("witness:", fmt_vector(w));
  for (const auto& r : v.reasons) rows.emplace_back("reason:", r);
  print_rows(out, rows);
}

// Kernel from --kernel file or --gram inline matrix, on Z_n when --group is given.
KernelSpec load_kernel(const std::string& kernel_file, const std::string& gram,
                       const std::string& group_text) {
  if (!kernel_file.empty() && !gram.empty()) throw ParseError("give either --kernel or --gram");
  if (kernel_file.empty() && gram.empty()) throw ParseError("a kernel is required (--kernel or --gram)");
  json doc = kernel_file.empty() ? load(gram, "--gram") : load(kernel_file, "--kernel");
  if (doc.is_array()) doc = json{{"gram", doc}};
  if (!group_text.empty()) {
    const group::GroupSpec g(parse_moduli(group_text));
    const Eigen::MatrixXd m = io::matrix_from_json(doc.at("gram"), "gram");
    if (static_cast<std::size_t>(m.rows()) != g.order() || m.rows() != m.cols()) {
      throw SpaceMismatch("gram is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                          " but the group has order " + std::to_string(g.order()));
    }
    return {g.space(), m};
  }
  return io::kernel_from_json(doc);
}

// ---------------------------------------------------------------- score

SignedMeasure forecast_from_json(const json& j, const KernelSpec& k) {
  if (j.is_array()) return {k.space_ptr(), io::vector_from_json(j, "forecast")};
  if (j.is_object() && j.contains("density")) {
    const Density h(k.space_ptr(), io::vector_from_json(j["density"], "density"));
    return density_to_measure(h);
  }
  return io::measure_from_json(j, k.space_ptr());
}

struct RecordResult {
  std::string id;
  std::string observation;
  double score = 0.0;
  std::optional<double> competitor_score;
  std::optional<double> half_mmd_sq;
  std::optional<double> gap;
  double sim_mean = 0.0;
  double sim_se = 0.0;
};

struct ScoreInput {
  std::string id;
  SignedMeasure forecast;
  std::size_t observation;
  std::optional<SignedMeasure> competitor;
};

RecordResult score_one(const KernelSpec& k, const ScoreInput& in, std::size_t index, int simulate,
                       std::uint64_t seed) {
  RecordResult r;
  r.id = in.id;
  r.observation = k.space().label(in.observation);
  r.score = kernel_score(k, in.forecast, in.observation);
  if (!in.competitor) return r;
  r.competitor_score = kernel_score(k, *in.competitor, in.observation);
  r.gap = propriety_gap(k, in.forecast, *in.competitor);
  r.half_mmd_sq = 0.5 * mmd_sq(k, in.forecast - *in.competitor);
  if (simulate > 0) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(index)};
    std::mt19937_64 rng(seq);
    const Eigen::VectorXd& p = in.forecast.mass();
    std::discrete_distribution<std::size_t> draw(p.data(), p.data() + p.size());
    const Eigen::MatrixXd& g = k.gram();
    const Eigen::VectorXd kp = g * p;
    const Eigen::VectorXd kq = g * in.competitor->mass();
    const double sp = 0.5 * p.dot(kp);
    const double sq = 0.5 * in.competitor->mass().dot(kq);
    double sum = 0.0;
    double sum2 = 0.0;
    for (int s = 0; s < simulate; ++s) {
      const auto x = static_cast<Eigen::Index>(draw(rng));
      const double diff = (-kq[x] + sq) - (-kp[x] + sp);
      sum += diff;
      sum2 += diff * diff;
    }
    r.sim_mean = sum / simulate;
    const double var = std::max(0.0, sum2 / simulate - r.sim_mean * r.sim_mean);
    r.sim_se = std::sqrt(var / simulate);
  }
  return r;
}

int cmd_score(const std::string& kernel_file, const std::string& forecasts_file, int simulate,
              std::uint64_t seed, bool as_json, std::ostream& out) {
  const KernelSpec k = load_kernel(kernel_file, "", "");
  const json doc = load(forecasts_file, "--forecasts");
  const json* records = &doc;
  if (doc.is_object()) {
    if (!doc.contains("records")) throw ParseError("forecast file needs a \"records\" array");
    records = &doc["records"];
  }
  if (!records->is_array()) throw ParseError("\"records\" must be an array");

  std::vector<ScoreInput> inputs;
  for (std::size_t i = 0; i < records->size(); ++i) {
    const json& rec = (*records)[i];
    if (!rec.is_object() || !rec.contains("forecast") || !rec.contains("observation")) {
      throw ParseError("record " + std::to_string(i) + " needs \"forecast\" and \"observation\"");
    }
    std::string obs = rec["observation"].is_string() ? rec["observation"].get<std::string>()
                                                     : rec["observation"].dump();
    if (!k.space().contains(obs)) {
      throw SpaceMismatch("record " + std::to_string(i) + ": observation '" + obs +
                          "' is not a point of the kernel's space");
    }
    std::optional<SignedMeasure> comp;
    if (rec.contains("competitor")) comp = forecast_from_json(rec["competitor"], k);
    std::string id = rec.contains("id") ? (rec["id"].is_string() ? rec["id"].get<std::string>()
                                                                  : rec["id"].dump())
                                        : std::to_string(i);
    inputs.push_back({std::move(id), forecast_from_json(rec["forecast"], k),
                      k.space().index_of(obs), std::move(comp)});
  }

  std::vector<RecordResult> results(inputs.size());
  const std::size_t workers = std::min<std::size_t>(thread_cap(), std::max<std::size_t>(1, inputs.size()));
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < inputs.size(); i += workers) {
            results[i] = score_one(k, inputs[i], i, simulate, seed);
          }
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  double mean = 0.0;
  double mean_comp = 0.0;
  double mean_gap = 0.0;
  std::size_t paired = 0;
  for (const auto& r : results) {
    mean += r.score;
    if (r.competitor_score) {
      mean_comp += *r.competitor_score;
      mean_gap += *r.half_mmd_sq;
      ++paired;
    }
  }
  if (!results.empty()) mean /= static_cast<double>(results.size());
  if (paired) {
    mean_comp /= static_cast<double>(paired);
    mean_gap /= static_cast<double>(paired);
  }

  if (as_json) {
    json recs = json::array();
    for (const auto& r : results) {
      json j = {{"id", r.id}, {"observation", r.observation}, {"score", r.score}};
      if (r.competitor_score) {
        j["competitor_score"] = *r.competitor_score;
        j["score_difference"] = *r.competitor_score - r.score;
        j["propriety_gap"] = *r.gap;
        j["half_mmd_sq"] = *r.half_mmd_sq;
        if (simulate > 0) {
          j["simulated"] = {{"draws", simulate}, {"mean_gap", r.sim_mean}, {"std_error", r.sim_se}};
        }
      }
      recs.push_back(std::move(j));
    }
    json doc_out = {{"records", std::move(recs)}, {"mean_score", mean}};
    if (paired) {
      doc_out["mean_competitor_score"] = mean_comp;
      doc_out["mean_score_difference"] = mean_comp - mean;
      doc_out["mean_half_mmd_sq"] = mean_gap;
    }
    out << doc_out.dump(2) << '\n';
    return kExitOk;
  }

  out << std::left << std::setw(12) << "id" << std::setw(12) << "obs" << std::setw(18) << "score";
  if (paired) out << std::setw(18) << "competitor" << std::setw(18) << "difference" << std::setw(18) << "mmd_sq/2";
  if (paired && simulate > 0) out << std::setw(18) << "sim gap" << "sim se";
  out << '\n';
  for (const auto& r : results) {
    out << std::left << std::setw(12) << r.id << std::setw(12) << r.observation << std::setw(18) << fmt(r.score);
    if (r.competitor_score) {
      out << std::setw(18) << fmt(*r.competitor_score) << std::setw(18)
          << fmt(*r.competitor_score - r.score) << std::setw(18) << fmt(*r.half_mmd_sq);
      if (simulate > 0) out << std::setw(18) << fmt(r.sim_mean) << fmt(r.sim_se);
    }
    out << '\n';
  }
  out << "mean score: " << fmt(mean) << '\n';
  if (paired) {
    out << "mean competitor score: " << fmt(mean_comp) << '\n'
        << "mean difference: " << fmt(mean_comp - mean) << "  (mean mmd_sq/2: " << fmt(mean_gap) << ")\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- verdicts

int cmd_verdict(const std::string& kernel_file, const std::string& gram, const std::string& group_text,
                bool as_json, std::ostream& out) {
  const KernelSpec k = load_kernel(kernel_file, gram, group_text);
  const KernelVerdict v = verdict(k);
  if (as_json) {
    json j = io::verdict_to_json(v);
    j["points"] = k.space().points();
    out << j.dump(2) << '\n';
  } else {
    print_verdict(out, v);
  }
  return kExitOk;
}

int cmd_group_verdict(const std::string& moduli_text, const std::string& coeffs_file,
                      const std::string& kappa_file, bool as_json, std::ostream& out) {
  if (coeffs_file.empty() == kappa_file.empty()) throw ParseError("give exactly one of --coeffs or --kappa");
  const group::GroupSpec g(parse_moduli(moduli_text));
  group::GroupKernel gk = [&] {
    if (!coeffs_file.empty()) {
      return group::kernel_from_coeffs(g, io::group_vector_from_json(load(coeffs_file, "--coeffs"), "coeffs", g));
    }
    return group::kernel_from_kappa(g, io::group_vector_from_json(load(kappa_file, "--kappa"), "kappa", g));
  }();
  const KernelVerdict v = group::group_verdict(gk);
  if (as_json) {
    json j = io::verdict_to_json(v);
    j["moduli"] = g.moduli();
    j["coeffs"] = io::vector_to_json(gk.coeffs);
    j["kappa"] = io::vector_to_json(gk.kappa);
    j["warnings"] = gk.warnings;
    out << j.dump(2) << '\n';
  } else {
    for (const auto& w : gk.warnings) out << "warning: " << w << '\n';
    out << "coefficients: " << fmt_vector(gk.coeffs) << '\n';
    print_verdict(out, v);
  }
  return kExitOk;
}

int cmd_spectrum(const std::string& kernel_file, const std::string& gram, const std::string& group_text,
                 bool as_json, std::ostream& out) {
  const KernelSpec k = load_kernel(kernel_file, gram, group_text);
  const MercerExpansion m = mercer_decompose(k);
  if (as_json) {
    json j = io::mercer_to_json(m);
    j["zero_cut"] = m.zero_cut();
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "index_of_one: " << (m.index_of_one() ? std::to_string(*m.index_of_one()) : "none") << '\n';
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    out << std::setw(4) << i << "  lambda = " << std::setw(18) << fmt(m.lambdas()[i])
        << "  e = " << fmt_vector(m.eigfuncs().col(i)) << '\n';
  }
  return kExitOk;
}

int cmd_sphere_verdict(int d, const std::string& coeffs_file, const std::string& tail,
                       const std::string& basis, const std::string& cls, bool as_json, std::ostream& out) {
  sphere::SchoenbergKernel sk = io::schoenberg_from_json(load(coeffs_file, "--coeffs"));
  try {
    if (d > 0) sk.d = d;
    if (!tail.empty()) sk.tail = sphere::tail_from_string(tail);
    if (!basis.empty()) sk.basis = sphere::basis_from_string(basis);
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  sphere::PsiClass declared = sphere::PsiClass::none;
  try {
    declared = sphere::psi_class_from_string(cls);
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  const sphere::SphereVerdict v = sphere::sphere_verdict(sk, declared);
  if (as_json) {
    json j = io::sphere_verdict_to_json(v);
    j["coefficients"] = io::schoenberg_to_json(sk);
    out << j.dump(2) << '\n';
  } else {
    out << "S^" << sk.d << ", " << sphere::to_string(sk.basis) << " basis, " << sk.b.size()
        << " coefficients, tail " << sphere::to_string(sk.tail) << '\n';
    print_verdict(out, v.kernel);
    print_rows(out, {{"strictly pd:", std::string(to_string(v.strictly_pd))},
                     {"condition b:", std::string(to_string(v.condition_b)) +
                                          (v.condition_b_necessary_only ? " (necessary only)" : "")}});
  }
  return kExitOk;
}

int cmd_sphere_embed(const std::string& coeffs_file, int d, const std::string& tail, int n, double a,
                     const std::string& v0_text, int max_degree, double tol, bool as_json,
                     std::ostream& out) {
  sphere::SchoenbergKernel sk = io::schoenberg_from_json(load(coeffs_file, "--coeffs"));
  if (d > 0) sk.d = d;
  try {
    if (!tail.empty()) sk.tail = sphere::tail_from_string(tail);
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  if (sk.d != 1 && sk.d != 2) throw DomainError("sphere-embed supports S^1 and S^2");
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(sk.d + 1);
  v0[sk.d] = 1.0;
  if (!v0_text.empty()) {
    const std::vector<double> raw = parse_doubles(v0_text);
    if (raw.size() != static_cast<std::size_t>(sk.d + 1)) throw ParseError("--v0 needs d + 1 components");
    v0 = Eigen::Map<const Eigen::VectorXd>(raw.data(), static_cast<Eigen::Index>(raw.size()));
    v0.normalize();
  }
  const int degree = std::max(max_degree, n);
  const sphere::SphereGrid grid = sphere::SphereGrid::for_degree(sk.d, degree + n);
  const sphere::PnaDensity p = sphere::pna_density(grid, n, a, v0, degree);
  const sphere::HarmonicCoeffs emb = sphere::zonal_embed(sk, p.coeffs);
  const bool constant = sphere::embedding_is_constant(emb, tol);
  if (as_json) {
    json j = {{"n", n},
              {"a", a},
              {"v0", io::vector_to_json(v0)},
              {"density", io::harmonic_coeffs_to_json(p.coeffs)},
              {"embedding", io::harmonic_coeffs_to_json(emb)},
              {"multipliers", sphere::zonal_multipliers(sk, degree)},
              {"nonconstant_magnitude", emb.nonconstant_magnitude()},
              {"constant", constant}};
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  const std::vector<double> z = sphere::zonal_multipliers(sk, degree);
  out << "p_{" << n << "," << a << "} on S^" << sk.d << ", v0 = " << fmt_vector(v0) << '\n';
  for (int k = 0; k <= degree; ++k) {
    const auto& blk = emb.blocks[static_cast<std::size_t>(k)];
    out << "degree " << std::setw(3) << k << "  z = " << std::setw(16) << fmt(z[static_cast<std::size_t>(k)])
        << "  max |embedding| = " << fmt(blk.cwiseAbs().maxCoeff()) << '\n';
  }
  out << "embedding constant: " << (constant ? "yes" : "no") << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- counterexamples

struct CheckList {
  json items = json::object();
  bool passed = true;
  void add(const std::string& name, bool ok, double value, double bound) {
    items[name] = {{"value", value}, {"bound", bound}, {"passed", ok}};
    passed = passed && ok;
  }
};

void check_probability(CheckList& c, const std::string& name, const SignedMeasure& q) {
  c.add(name + "_mass", std::abs(q.total_mass() - 1.0) <= kMassTol, q.total_mass(), kMassTol);
  c.add(name + "_nonnegative", q.is_nonnegative(), q.mass().minCoeff(), 0.0);
}

MercerExpansion literal_group_expansion(const group::GroupSpec& g, const Eigen::VectorXd& coeffs) {
  const Eigen::MatrixXd onb = group::real_onb(g);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(coeffs.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return coeffs[a] > coeffs[b]; });
  Eigen::VectorXd lam(coeffs.size());
  Eigen::MatrixXd e(onb.rows(), onb.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    lam[static_cast<Eigen::Index>(i)] = coeffs[order[i]];
    e.col(static_cast<Eigen::Index>(i)) = onb.col(order[i]);
  }
  return {g.space(), lam, e};
}

struct CounterexampleOptions {
  std::string kind = "near-zero";
  std::string group;
  double decay = 0.5;
  bool symmetric = false;
  std::string kernel_file;
  std::string gram;
  double eps = 0.05;
  double tv = 1.0;
  double delta = 0.0;
  std::string base_file;
  int index = -1;
};

int cmd_counterexample(const CounterexampleOptions& o, bool as_json, std::ostream& out) {
  std::optional<KernelSpec> k;
  std::optional<MercerExpansion> m;
  json source;
  if (!o.group.empty() && o.kernel_file.empty() && o.gram.empty()) {
    const group::GroupSpec g(parse_moduli(o.group));
    if (!(o.decay > 0.0 && o.decay <= 1.0)) throw DomainError("--decay must lie in (0, 1]");
    Eigen::VectorXd coeffs(static_cast<Eigen::Index>(g.order()));
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs[i] = std::pow(o.decay, static_cast<double>(i));
    if (o.symmetric) {
      const group::GroupKernel gk = group::kernel_from_coeffs(g, coeffs);
      k = gk.kernel();
      m = group::group_mercer(gk);
      source = {{"moduli", g.moduli()}, {"coeffs", io::vector_to_json(gk.coeffs)}, {"translation_invariant", true}};
    } else {
      k = group::onb_kernel(g, coeffs);
      m = literal_group_expansion(g, coeffs);
      source = {{"moduli", g.moduli()}, {"coeffs", io::vector_to_json(coeffs)}, {"translation_invariant", false}};
    }
  } else {
    k = load_kernel(o.kernel_file, o.gram, o.group);
    m = mercer_decompose(*k);
    source = {{"points", k->space().points()}};
  }

  std::optional<SignedMeasure> base;
  if (!o.base_file.empty()) base = io::measure_from_json(load(o.base_file, "--base"), k->space_ptr());

  CheckList checks;
  json doc = {{"kind", o.kind}, {"kernel", source}};
  const double scale = std::max(1.0, k->operator_norm());
  if (o.kind == "near-zero") {
    const MeasurePair pair = o.delta > 0.0
                                 ? near_zero_mmd_pair(*m, base ? *base : SignedMeasure::reference(k->space_ptr()), o.delta, o.eps)
                                 : near_zero_mmd_pair(*m, o.eps);
    const SignedMeasure diff = pair.first - pair.second;
    const double tv = tv_norm(diff);
    const double sq = mmd_sq(*k, diff);
    check_probability(checks, "first", pair.first);
    check_probability(checks, "second", pair.second);
    const double tv_goal = o.delta > 0.0 ? o.delta : 2.0;
    checks.add("tv", std::abs(tv - tv_goal) <= 1e-10, tv, tv_goal);
    checks.add("sqrt_mmd", std::sqrt(sq) <= o.eps, std::sqrt(sq), o.eps);
    if (o.delta > 0.0) {
      const SignedMeasure p = base ? *base : SignedMeasure::reference(k->space_ptr());
      checks.add("tv_first_to_base", tv_norm(p - pair.first) <= o.delta + 1e-10, tv_norm(p - pair.first), o.delta);
      checks.add("tv_second_to_base", tv_norm(p - pair.second) <= o.delta + 1e-10, tv_norm(p - pair.second), o.delta);
    }
    doc["first"] = io::measure_to_json(pair.first);
    doc["second"] = io::measure_to_json(pair.second);
    doc["verification"] = {{"tv", tv}, {"mmd_sq", sq}, {"sqrt_mmd", std::sqrt(sq)}};
  } else if (o.kind == "zero") {
    const Density p = base ? measure_to_density(*base) : Density::constant_one(k->space_ptr());
    const DensityPair pair = zero_mmd_pair(*m, p, o.tv);
    const SignedMeasure q1 = density_to_measure(pair.first);
    const SignedMeasure q2 = density_to_measure(pair.second);
    const SignedMeasure pm = density_to_measure(p);
    const double tv = tv_norm(q1 - q2);
    const double sq = mmd_sq(*k, q1 - q2);
    check_probability(checks, "first", q1);
    check_probability(checks, "second", q2);
    checks.add("tv", std::abs(tv - o.tv) <= 1e-10, tv, o.tv);
    checks.add("mmd_sq", sq <= 1e-12 * scale, sq, 1e-12 * scale);
    checks.add("tv_first_to_base", tv_norm(pm - q1) <= o.tv + 1e-10, tv_norm(pm - q1), o.tv);
    checks.add("tv_second_to_base", tv_norm(pm - q2) <= o.tv + 1e-10, tv_norm(pm - q2), o.tv);
    doc["first"] = io::measure_to_json(q1);
    doc["second"] = io::measure_to_json(q2);
    doc["verification"] = {{"tv", tv}, {"mmd_sq", sq}};
  } else if (o.kind == "no-uniform") {
    const Eigen::Index j = o.index >= 0 ? o.index : 0;
    const UniformPerturbation up = no_uniform_perturbation(*m, j);
    const SignedMeasure diff = up.q - SignedMeasure::reference(k->space_ptr());
    const double tv = tv_norm(diff);
    const double sq = mmd_sq(*k, diff);
    check_probability(checks, "q", up.q);
    checks.add("tv_lower", tv >= up.c_one / up.c_inf - 1e-12, tv, up.c_one / up.c_inf);
    checks.add("mmd_sq", std::abs(sq - up.mmd_sq_exact) <= 1e-12 * scale, sq, up.mmd_sq_exact);
    doc["first"] = io::measure_to_json(up.q);
    doc["second"] = io::measure_to_json(SignedMeasure::reference(k->space_ptr()));
    doc["verification"] = {{"tv", tv}, {"mmd_sq", sq}, {"c_one", up.c_one}, {"c_inf", up.c_inf},
                           {"eigenvalue", m->lambdas()[j]}};
  } else {
    throw ParseError("unknown --kind '" + o.kind + "' (near-zero, zero, no-uniform)");
  }
  doc["verification"]["checks"] = checks.items;
  doc["verification"]["passed"] = checks.passed;

  if (as_json) {
    out << doc.dump(2) << '\n';
  } else {
    out << "counterexample: " << o.kind << '\n';
    out << "Q1 = " << fmt_vector(io::vector_from_json(doc["first"]["mass"], "mass")) << '\n';
    out << "Q2 = " << fmt_vector(io::vector_from_json(doc["second"]["mass"], "mass")) << '\n';
    std::vector<std::pair<std::string, std::string>> rows;
    for (const auto& [name, c] : checks.items.items()) {
      rows.emplace_back(name + ":", fmt(c["value"].get<double>()) + " (bound " + fmt(c["bound"].get<double>()) +
                                        ") " + (c["passed"].get<bool>() ? "ok" : "FAILED"));
    }
    print_rows(out, rows);
    out << "verification: " << (checks.passed ? "passed" : "FAILED") << '\n';
  }
  return checks.passed ? kExitOk : kExitVerification;
}

bool known_command(const std::string& s) {
  return std::find(kCommands.begin(), kCommands.end(), s) != kCommands.end();
}

}  // namespace

unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CHARKERN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return hw;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel scores, MMD and characteristic/universal kernel verdicts", "charkern"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "Machine-readable JSON output");

  std::string kernel_file, gram, group_text, forecasts, coeffs, kappa, tail, basis, cls, v0;
  int simulate = 0;
  std::uint64_t seed = 0;
  int d = 0;
  int n = 2;
  double a = 1.0;
  int max_degree = 8;
  double tol = 1e-10;
  CounterexampleOptions ce;

  auto* score = app.add_subcommand("score", "Score forecasts against observations");
  score->add_option("--kernel", kernel_file, "Kernel JSON")->required();
  score->add_option("--forecasts", forecasts, "Forecast records JSON")->required();
  score->add_option("--simulate", simulate, "Monte Carlo draws per paired record")->check(CLI::NonNegativeNumber);
  score->add_option("--seed", seed, "RNG seed for --simulate");
  score->add_flag("--json", as_json);

  auto* ver = app.add_subcommand("verdict", "Characteristic/universal verdict from a Gram matrix");
  ver->add_option("--kernel", kernel_file, "Kernel JSON");
  ver->add_option("--gram", gram, "Gram matrix JSON");
  ver->add_option("--group", group_text, "Use Z_m1 x ... as the space (comma separated moduli)");
  ver->add_flag("--json", as_json);

  auto* gver = app.add_subcommand("group-verdict", "Verdict for a translation-invariant kernel on a finite Abelian group");
  gver->add_option("--moduli", group_text, "Comma separated moduli")->required();
  gver->add_option("--coeffs", coeffs, "Fourier coefficient JSON");
  gver->add_option("--kappa", kappa, "kappa(x) JSON");
  gver->add_flag("--json", as_json);

  auto* spec = app.add_subcommand("spectrum", "Mercer expansion of a kernel");
  spec->add_option("--kernel", kernel_file, "Kernel JSON");
  spec->add_option("--gram", gram, "Gram matrix JSON");
  spec->add_option("--group", group_text, "Use Z_m1 x ... as the space");
  spec->add_flag("--json", as_json);

  auto* cex = app.add_subcommand("counterexample", "Construct measures a kernel cannot tell apart");
  cex->add_option("--kind", ce.kind, "near-zero, zero or no-uniform")->capture_default_str();
  cex->add_option("--group", ce.group, "Group moduli; with --decay builds lambda_i = decay^i");
  cex->add_option("--decay", ce.decay, "Coefficient decay for --group")->capture_default_str();
  cex->add_flag("--symmetric", ce.symmetric, "Symmetrize the coefficients (translation-invariant kernel)");
  cex->add_option("--kernel", ce.kernel_file, "Kernel JSON");
  cex->add_option("--gram", ce.gram, "Gram matrix JSON");
  cex->add_option("--eps", ce.eps, "sqrt MMD bound for near-zero")->capture_default_str();
  cex->add_option("--tv", ce.tv, "Total variation target for zero")->capture_default_str();
  cex->add_option("--delta", ce.delta, "Localize near-zero pairs within this distance of the base");
  cex->add_option("--base", ce.base_file, "Base probability measure JSON");
  cex->add_option("--index", ce.index, "Eigenfunction index for no-uniform");
  cex->add_flag("--json", as_json);

  auto* sver = app.add_subcommand("sphere-verdict", "Verdict for an isotropic kernel on S^d");
  sver->add_option("--d", d, "Sphere dimension (overrides the file)");
  sver->add_option("--coeffs", coeffs, "Schoenberg coefficient JSON")->required();
  sver->add_option("--tail", tail, "zero, positive, even-positive, odd-positive or unknown");
  sver->add_option("--basis", basis, "gegenbauer or power");
  sver->add_option("--class", cls, "psi-d+2, psi-d+1-plus or psi-inf");
  sver->add_flag("--json", as_json);

  auto* semb = app.add_subcommand("sphere-embed", "Kernel mean embedding of p_{n,a}");
  semb->add_option("--coeffs", coeffs, "Schoenberg coefficient JSON")->required();
  semb->add_option("--d", d, "Sphere dimension (overrides the file)");
  semb->add_option("--tail", tail, "Tail descriptor");
  semb->add_option("--n", n, "Degree of the perturbation")->capture_default_str();
  semb->add_option("--a", a, "Amplitude in [-1, 1]")->capture_default_str();
  semb->add_option("--v0", v0, "Pole, comma separated");
  semb->add_option("--max-degree", max_degree, "Highest harmonic degree reported")->capture_default_str();
  semb->add_option("--tol", tol, "Constancy tolerance")->capture_default_str();
  semb->add_flag("--json", as_json);

  if (args.empty()) {
    err << app.help();
    return kExitUnknownCommand;
  }
  const auto first = std::find_if(args.begin(), args.end(), [](const std::string& s) { return s.empty() || s[0] != '-'; });
  if (first != args.end() && !known_command(*first)) {
    err << "charkern: unknown subcommand '" << *first << "'\n";
    return kExitUnknownCommand;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "charkern: " << e.what() << '\n';
    return first == args.end() ? kExitUnknownCommand : kExitParse;
  }

  try {
    if (score->parsed()) return cmd_score(kernel_file, forecasts, simulate, seed, as_json, out);
    if (ver->parsed()) return cmd_verdict(kernel_file, gram, group_text, as_json, out);
    if (gver->parsed()) return cmd_group_verdict(group_text, coeffs, kappa, as_json, out);
    if (spec->parsed()) return cmd_spectrum(kernel_file, gram, group_text, as_json, out);
    if (cex->parsed()) return cmd_counterexample(ce, as_json, out);
    if (sver->parsed()) return cmd_sphere_verdict(d, coeffs, tail, basis, cls, as_json, out);
    if (semb->parsed()) return cmd_sphere_embed(coeffs, d, tail, n, a, v0, max_degree, tol, as_json, out);
  } catch (const SpaceMismatch& e) {
    err << "charkern: space mismatch: " << e.what() << '\n';
    return kExitSpaceMismatch;
  } catch (const ParseError& e) {
    err << "charkern: parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ValidationError& e) {
    err << "charkern: invalid input: " << e.what() << '\n';
    return kExitParse;
  } catch (const PsdViolation& e) {
    err << "charkern: invalid kernel: " << e.what() << '\n';
    return kExitParse;
  } catch (const json::exception& e) {
    err << "charkern: parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const Error& e) {
    err << "charkern: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUnknownCommand;
}

}  // namespace charkern::cli
