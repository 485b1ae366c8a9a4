#pragma once

#include <string>
#include <vector>

#include "lpl/prox.hpp"

namespace lpl {

struct PropertyCheck {
  std::string name;
  bool pass = false;
  double measured = 0.0;  // worst observed statistic
  double bound = 0.0;     // the limit it must stay within
  std::string detail;
};

/// Deterministic proximal/Moreau property suite over the shipped
/// regularizers: fixed-point identity, gradient identity vs finite
/// differences, prox Lipschitz bounds, envelope monotonicity and gamma->0
/// convergence, the Lipschitz-g rate, smoothness and weak-convexity
/// transfer, Hessian formula, and brute-force-oracle agreement.
std::vector<PropertyCheck> run_prox_property_suite(std::uint64_t seed);

bool all_pass(const std::vector<PropertyCheck>& checks);
std::string format_check_table(const std::vector<PropertyCheck>& checks);

}  // namespace lpl
