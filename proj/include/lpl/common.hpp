#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lpl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Violated precondition or malformed input.
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

/// A Markov chain iterate left the admissible region (norm > 1e8 or non-finite).
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::int64_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

/// Worker count: min(LPL_THREADS, hardware_concurrency), at least 1.
int worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads.
/// Results must be written to caller-owned, index-disjoint storage.
void parallel_for(int n, const std::function<void(int)>& fn);

/// Compensated (Kahan) accumulator; keeps streaming moments within
/// 1e-10 of their batch counterparts over 1e6-sample chains.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace lpl
