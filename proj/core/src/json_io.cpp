#include "charkern/json_io.hpp"

#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "charkern/error.hpp"

namespace charkern::io {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path.string());
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json(m.row(i).transpose()));
  return rows;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + " must be an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(what + " must be an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ParseError(what + " must be a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Eigen::VectorXd row = vector_from_json(j[i], what + " row");
    if (static_cast<std::size_t>(row.size()) != cols) throw ParseError(what + " is ragged");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

json space_to_json(const DiscreteSpace& s) {
  return {{"points", s.points()}, {"nu", vector_to_json(s.nu())}};
}

SpacePtr space_from_json(const json& j) {
  if (!j.is_object() || !j.contains("points") || !j["points"].is_array()) {
    throw ParseError("space needs a \"points\" array");
  }
  std::vector<std::string> points;
  for (const json& p : j["points"]) {
    if (p.is_string()) {
      points.push_back(p.get<std::string>());
    } else if (p.is_number_integer()) {
      points.push_back(std::to_string(p.get<long long>()));
    } else {
      throw ParseError("point labels must be strings or integers");
    }
  }
  std::vector<double> nu;
  if (j.contains("nu")) {
    const Eigen::VectorXd v = vector_from_json(j["nu"], "nu");
    nu.assign(v.data(), v.data() + v.size());
  } else {
    nu.assign(points.size(), points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size()));
  }
  return make_space(std::move(points), std::move(nu));
}

json measure_to_json(const SignedMeasure& mu) {
  json j = space_to_json(mu.space());
  j["mass"] = vector_to_json(mu.mass());
  return j;
}

SignedMeasure measure_from_json(const json& j, const SpacePtr& space) {
  if (!j.is_object() || !j.contains("mass")) throw ParseError("measure needs a \"mass\" array");
  SpacePtr s = space;
  if (j.contains("points")) {
    SpacePtr declared = space_from_json(j);
    if (space && declared->points() != space->points()) {
      throw SpaceMismatch("measure points differ from the kernel's space");
    }
    if (!space) s = std::move(declared);
  }
  if (!s) throw ParseError("measure has no \"points\" and no space to attach to");
  Eigen::VectorXd mass = vector_from_json(j["mass"], "mass");
  if (static_cast<std::size_t>(mass.size()) != s->size()) {
    throw SpaceMismatch("mass has " + std::to_string(mass.size()) + " entries, space has " +
                        std::to_string(s->size()));
  }
  return {std::move(s), std::move(mass)};
}

json kernel_to_json(const KernelSpec& k) {
  return {{"space", space_to_json(k.space())}, {"gram", matrix_to_json(k.gram())}};
}

KernelSpec kernel_from_json(const json& j) {
  if (!j.is_object() || !j.contains("gram")) throw ParseError("kernel needs a \"gram\" matrix");
  Eigen::MatrixXd gram = matrix_from_json(j["gram"], "gram");
  SpacePtr s;
  if (j.contains("space")) {
    s = space_from_json(j["space"]);
  } else {
    s = std::make_shared<const DiscreteSpace>(
        DiscreteSpace::indexed(static_cast<std::size_t>(gram.rows())));
  }
  if (gram.rows() != gram.cols() || static_cast<std::size_t>(gram.rows()) != s->size()) {
    throw SpaceMismatch("gram shape does not match the space");
  }
  return {std::move(s), std::move(gram)};
}

json verdict_to_json(const KernelVerdict& v) {
  json w = json::array();
  for (const Eigen::VectorXd& x : v.witnesses) w.push_back(vector_to_json(x));
  return {{"characteristic", to_string(v.characteristic)},
          {"universal", to_string(v.universal)},
          {"sipd_on_m", to_string(v.sipd_on_m)},
          {"witnesses", std::move(w)},
          {"reasons", v.reasons}};
}

json mercer_to_json(const MercerExpansion& m) {
  json j = {{"points", m.space().points()},
            {"lambdas", vector_to_json(m.lambdas())},
            {"eigfuncs", matrix_to_json(m.eigfuncs().transpose())}};
  if (m.index_of_one()) {
    j["index_of_one"] = *m.index_of_one();
  } else {
    j["index_of_one"] = nullptr;
  }
  return j;
}

json schoenberg_to_json(const sphere::SchoenbergKernel& sk) {
  return {{"d", sk.d},
          {"b", sk.b},
          {"tail", sphere::to_string(sk.tail)},
          {"basis", sphere::to_string(sk.basis)}};
}

sphere::SchoenbergKernel schoenberg_from_json(const json& j) {
  sphere::SchoenbergKernel sk;
  const json* b = &j;
  if (j.is_object()) {
    if (!j.contains("b")) throw ParseError("coefficient file needs a \"b\" array");
    b = &j["b"];
    try {
      if (j.contains("d")) sk.d = j["d"].get<int>();
      if (j.contains("tail")) sk.tail = sphere::tail_from_string(j["tail"].get<std::string>());
      if (j.contains("basis")) sk.basis = sphere::basis_from_string(j["basis"].get<std::string>());
    } catch (const json::exception& e) {
      throw ParseError(std::string("coefficient file: ") + e.what());
    } catch (const DomainError& e) {
      throw ParseError(e.what());
    }
  }
  const Eigen::VectorXd v = vector_from_json(*b, "b");
  sk.b.assign(v.data(), v.data() + v.size());
  if (sk.b.empty()) throw ParseError("coefficient array is empty");
  return sk;
}

json sphere_verdict_to_json(const sphere::SphereVerdict& v) {
  json j = verdict_to_json(v.kernel);
  j["strictly_pd"] = to_string(v.strictly_pd);
  j["condition_b"] = to_string(v.condition_b);
  j["condition_b_necessary_only"] = v.condition_b_necessary_only;
  j["eventually_positive"] = to_string(v.eventually_positive);
  return j;
}

json harmonic_coeffs_to_json(const sphere::HarmonicCoeffs& c) {
  json blocks = json::array();
  for (const Eigen::VectorXd& b : c.blocks) blocks.push_back(vector_to_json(b));
  return {{"d", c.d}, {"blocks", std::move(blocks)}};
}

Eigen::VectorXd group_vector_from_json(const json& j, const std::string& key,
                                       const group::GroupSpec& g) {
  const json* arr = &j;
  if (j.is_object()) {
    if (!j.contains(key)) throw ParseError("expected an array or an object with \"" + key + "\"");
    arr = &j[key];
    if (j.contains("moduli")) {
      std::vector<int> moduli;
      try {
        moduli = j["moduli"].get<std::vector<int>>();
      } catch (const json::exception& e) {
        throw ParseError(std::string("moduli: ") + e.what());
      }
      if (moduli != g.moduli()) throw SpaceMismatch("file moduli differ from --moduli");
    }
  }
  Eigen::VectorXd v = vector_from_json(*arr, key);
  if (static_cast<std::size_t>(v.size()) != g.order()) {
    throw SpaceMismatch(key + " has " + std::to_string(v.size()) + " entries, group order is " +
                        std::to_string(g.order()));
  }
  return v;
}

}  // namespace charkern::io
