#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace charkern {

enum class Ternary { no, yes, unknown };

std::string_view to_string(Ternary t);
inline Ternary from_bool(bool b) { return b ? Ternary::yes : Ternary::no; }

/// Outcome of a characteristic / universal decision.
///
/// Witnesses are zero-mass signed measures (mass vectors on the kernel's
/// space, scaled to total variation 2) that the kernel mean embedding sends
/// to zero. Reasons name the coefficient or eigenvalue that decided the case.
struct KernelVerdict {
  Ternary characteristic = Ternary::unknown;
  Ternary universal = Ternary::unknown;
  Ternary sipd_on_m = Ternary::unknown;
  std::vector<Eigen::VectorXd> witnesses;
  std::vector<std::string> reasons;
};

}  // namespace charkern
