#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hop {

inline constexpr double pi = std::numbers::pi;

// Violated precondition (bad argument, invalid parameter regime).
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Iteration did not converge or a matrix was numerically singular.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Quantity exists mathematically but has no evaluator here.
struct UnsupportedError : std::logic_error {
  using std::logic_error::logic_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

// Real value or a tagged +infinity (divergence marker).
class Ext {
 public:
  constexpr Ext() = default;
  constexpr explicit Ext(double v) : v_(v) {}

  static constexpr Ext infinity() {
    Ext e;
    e.inf_ = true;
    e.v_ = std::numeric_limits<double>::infinity();
    return e;
  }

  constexpr bool is_infinite() const { return inf_; }
  constexpr bool is_finite() const { return !inf_; }

  double value() const {
    if (inf_) throw PreconditionError("value requested from a divergence marker");
    return v_;
  }

  // +inf for the marker; convenient in comparisons.
  constexpr double as_double() const { return v_; }

 private:
  double v_ = 0.0;
  bool inf_ = false;
};

// Integer coordinates of a vertex of an infinite catalog graph.
using Site = std::vector<long>;

inline int resolve_workers(int workers) {
  if (workers > 0) return workers;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
// handled exactly once; callers write into per-index slots so that results
// do not depend on the schedule.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  int w = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(count, 1));
  if (w <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(w);
  std::vector<std::exception_ptr> errors(w);
  for (int t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += w) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Neumaier compensated summation, fixed order.
class KahanSum {
 public:
  void add(double x) {
    double t = s_ + x;
    if (std::abs(s_) >= std::abs(x))
      c_ += (s_ - t) + x;
    else
      c_ += (x - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace hop
