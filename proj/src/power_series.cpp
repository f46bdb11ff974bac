#include "resint/power_series.hpp"

#include <algorithm>
#include <cmath>

#include "resint/errors.hpp"

namespace resint {

PowerSeries::PowerSeries(int truncation_order) {
  if (truncation_order < 0) throw ParameterError("series truncation order must be >= 0");
  coeffs_.assign(static_cast<std::size_t>(truncation_order) + 1, 0.0);
}

PowerSeries::PowerSeries(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw ParameterError("series needs at least one coefficient");
}

double PowerSeries::evaluate(double t) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
  PowerSeries out(std::min(a.truncation_order(), b.truncation_order()));
  for (int n = 0; n <= out.truncation_order(); ++n) out[n] = a[n] + b[n];
  return out;
}

PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) { return a + (-1.0) * b; }

PowerSeries operator*(double s, const PowerSeries& a) {
  PowerSeries out = a;
  for (int n = 0; n <= out.truncation_order(); ++n) out[n] *= s;
  return out;
}

PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
  PowerSeries out(std::min(a.truncation_order(), b.truncation_order()));
  for (int n = 0; n <= out.truncation_order(); ++n)
    for (int k = 0; k <= n; ++k) out[n] += a[k] * b[n - k];
  return out;
}

KernelTerm kernel_term(const BathParams& bath) {
  return {0.5 * bath.gamma * bath.width, bath.width};
}

PowerSeries series_amplitude(std::span<const KernelTerm> kernels, int order, double c0) {
  if (order < 4) throw ParameterError("series_amplitude needs truncation order >= 4");

  // K(tau) = sum_m kappa_m tau^m and int_0^t (t-s)^m s^n ds = m! n!/(m+n+1)! t^{m+n+1},
  // so (p+1) c_{p+1} = -sum_{m+n=p-1} kappa_m c_n m! n!/(m+n+1)!.
  // With kappa_m m! = sum_i a_i (-l_i)^m this is
  //   (p+1) c_{p+1} = -sum_{m+n=p-1} mu_m c_n n!/p!,   mu_m = sum_i a_i (-l_i)^m.
  const auto size = static_cast<std::size_t>(order) + 1;
  std::vector<double> mu(size, 0.0);
  for (const auto& k : kernels) {
    double power = 1.0;
    for (std::size_t m = 0; m < size; ++m) {
      mu[m] += k.amplitude * power;
      power *= -k.rate;
    }
  }
  std::vector<double> factorial(size + 1, 1.0);
  for (std::size_t n = 1; n <= size; ++n) factorial[n] = factorial[n - 1] * double(n);

  PowerSeries c(order);
  c[0] = c0;
  for (int p = 0; p < order; ++p) {
    double rhs = 0.0;
    if (p >= 1) {
      for (int n = 0; n <= p - 1; ++n) {
        const int m = p - 1 - n;
        rhs += mu[static_cast<std::size_t>(m)] * c[n] * factorial[static_cast<std::size_t>(n)];
      }
      rhs /= factorial[static_cast<std::size_t>(p)];
    }
    c[p + 1] = -rhs / double(p + 1);
  }
  return c;
}

PowerSeries exact_population_series(std::span<const KernelTerm> kernels, int order, double c0) {
  return series_amplitude(kernels, order, c0).squared();
}

PowerSeries additive_population_series(std::span<const KernelTerm> kernels, int order,
                                       double c0) {
  PowerSeries product(order);
  product[0] = c0;
  for (const auto& k : kernels) product = product * series_amplitude({&k, 1}, order, 1.0);
  return product.squared();
}

InterferenceOrder interference_order(std::span<const KernelTerm> kernels, int order, double c0) {
  if (order < 6) throw ParameterError("interference_order needs truncation order >= 6");
  const auto exact = exact_population_series(kernels, order, c0);
  const auto additive = additive_population_series(kernels, order, c0);
  for (int n = 0; n <= order; ++n) {
    const double diff = exact[n] - additive[n];
    const double scale = std::max(std::abs(exact[n]), std::abs(additive[n]));
    if (std::abs(diff) > 1e-12 * scale) return {n, diff};
  }
  return {};
}

}  // namespace resint
