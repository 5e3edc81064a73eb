#pragma once

#include <array>
#include <chrono>
#include <string_view>

namespace icatopo {

// "F(rho)" covers the equilibrium solve and the adjoint solve; "K_T", "RHS",
// "Factorizations" and "Linear systems" are its parts.
enum class TimeCategory {
  Total,
  Objective,
  Tangent,
  Rhs,
  Factorizations,
  LinearSystems,
  Gradient,
  Subproblem,
  Filtering,
  Other,
};

inline constexpr int kNumTimeCategories = 10;

constexpr std::string_view category_name(TimeCategory c) {
  constexpr std::array<std::string_view, kNumTimeCategories> names{
      "Total", "F(rho)", "K_T", "RHS", "Factorizations", "Linear systems",
      "grad F(rho)", "Subproblem solving", "Filtering", "Other"};
  return names[static_cast<int>(c)];
}

/// Accumulated wall-clock seconds per category.
class Timings {
 public:
  void add(TimeCategory c, double seconds) { s_[static_cast<int>(c)] += seconds; }
  double operator[](TimeCategory c) const { return s_[static_cast<int>(c)]; }
  double& operator[](TimeCategory c) { return s_[static_cast<int>(c)]; }
  Timings& operator+=(const Timings& o) {
    for (int i = 0; i < kNumTimeCategories; ++i) s_[i] += o.s_[i];
    return *this;
  }

 private:
  std::array<double, kNumTimeCategories> s_{};
};

/// Adds the lifetime of the object to one category. A null sink disables it.
class ScopedTimer {
 public:
  ScopedTimer(Timings* sink, TimeCategory c) : sink_(sink), c_(c), t0_(std::chrono::steady_clock::now()) {}
  ~ScopedTimer() {
    if (sink_) sink_->add(c_, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count());
  }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  Timings* sink_;
  TimeCategory c_;
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace icatopo
