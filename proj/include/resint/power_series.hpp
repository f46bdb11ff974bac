#pragma once

// Short-time Taylor expansion of the two-bath amplitude and populations.
// Exact and additive population series agree through t^3 and first differ at
// t^4, by a term bilinear in the two baths' couplings.

#include <optional>
#include <span>
#include <vector>

#include "resint/bath_kernels.hpp"

namespace resint {

/// Truncated series sum_{n=0..N} a_n t^n. Arithmetic truncates at the smaller
/// order of the operands.
class PowerSeries {
 public:
  explicit PowerSeries(int truncation_order);
  explicit PowerSeries(std::vector<double> coeffs);

  int truncation_order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double operator[](int n) const { return coeffs_[static_cast<std::size_t>(n)]; }
  double& operator[](int n) { return coeffs_[static_cast<std::size_t>(n)]; }

  double evaluate(double t) const;

  friend PowerSeries operator+(const PowerSeries& a, const PowerSeries& b);
  friend PowerSeries operator-(const PowerSeries& a, const PowerSeries& b);
  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b);
  friend PowerSeries operator*(double s, const PowerSeries& a);
  PowerSeries squared() const { return *this * *this; }

 private:
  std::vector<double> coeffs_;
};

/// One exponential memory kernel a * exp(-rate * tau).
struct KernelTerm {
  double amplitude = 0.0;  // gamma * lambda / 2
  double rate = 0.0;       // lambda
};

KernelTerm kernel_term(const BathParams& bath);

inline constexpr int kDefaultTruncationOrder = 8;

/// Taylor coefficients of c_e(t) for c' = -int_0^t sum_i a_i e^{-l_i (t-t')} c(t') dt'.
PowerSeries series_amplitude(std::span<const KernelTerm> kernels, int order, double c0 = 1.0);

/// |c_e(t)|^2 of the exact dynamics (c_e is real).
PowerSeries exact_population_series(std::span<const KernelTerm> kernels, int order,
                                    double c0 = 1.0);

/// c0^2 times the square of the product of the single-bath amplitude series.
PowerSeries additive_population_series(std::span<const KernelTerm> kernels, int order,
                                       double c0 = 1.0);

struct InterferenceOrder {
  std::optional<int> order;  // empty: no difference up to the truncation order
  double gap = 0.0;          // exact - additive coefficient at `order`
};

/// First power of t where exact and additive population series differ by more
/// than 1e-12 relative.
InterferenceOrder interference_order(std::span<const KernelTerm> kernels,
                                     int order = kDefaultTruncationOrder, double c0 = 1.0);

}  // namespace resint
