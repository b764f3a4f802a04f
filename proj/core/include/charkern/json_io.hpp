#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "charkern/abelian_group.hpp"
#include "charkern/kernel.hpp"
#include "charkern/measure.hpp"
#include "charkern/spectral.hpp"
#include "charkern/sphere.hpp"
#include "charkern/verdict.hpp"

namespace charkern::io {

using nlohmann::json;

/// Reads and parses a JSON document; ParseError on I/O or syntax failure.
json read_json_file(const std::filesystem::path& path);
/// Parses inline JSON text, reporting `what` in the error message.
json parse_json(const std::string& text, const std::string& what);

json vector_to_json(const Eigen::VectorXd& v);
json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::VectorXd vector_from_json(const json& j, const std::string& what);
/// Square or rectangular array of rows.
Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what);

/// {"points": [...], "nu": [...]}; nu defaults to uniform.
json space_to_json(const DiscreteSpace& s);
SpacePtr space_from_json(const json& j);

/// {"points": [...], "nu": [...], "mass": [...]}.
json measure_to_json(const SignedMeasure& mu);
/// When `space` is given the document must name the same points, else SpaceMismatch.
SignedMeasure measure_from_json(const json& j, const SpacePtr& space = nullptr);

/// {"space": {...}, "gram": [[...]]}.
json kernel_to_json(const KernelSpec& k);
KernelSpec kernel_from_json(const json& j);

json verdict_to_json(const KernelVerdict& v);
json mercer_to_json(const MercerExpansion& m);

/// {"d": 2, "b": [...], "tail": "zero", "basis": "gegenbauer"}.
json schoenberg_to_json(const sphere::SchoenbergKernel& sk);
sphere::SchoenbergKernel schoenberg_from_json(const json& j);
json sphere_verdict_to_json(const sphere::SphereVerdict& v);
/// {"d": 2, "blocks": [[...], ...]}.
json harmonic_coeffs_to_json(const sphere::HarmonicCoeffs& c);

/// A group coefficient or kappa file: a bare array, or an object holding it under `key`.
Eigen::VectorXd group_vector_from_json(const json& j, const std::string& key,
                                       const group::GroupSpec& g);

}  // namespace charkern::io
