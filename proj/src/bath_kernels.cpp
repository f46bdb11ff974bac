#include "resint/bath_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "resint/errors.hpp"

namespace resint {
namespace {

// sinh(x)/x, series near the origin.
cdouble sinhc(cdouble x) {
  if (std::abs(x) < 0.5) {
    const cdouble x2 = x * x;
    cdouble term = 1.0;
    cdouble sum = 1.0;
    for (int k = 1; k < 20; ++k) {
      term *= x2 / double((2 * k) * (2 * k + 1));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::sinh(x) / x;
}

cdouble discriminant_root(const BathParams& b) {
  return std::sqrt(cdouble(b.width * b.width - 2.0 * b.gamma * b.width, 0.0));
}

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

}  // namespace

void validate(const BathParams& b) {
  if (!std::isfinite(b.gamma) || b.gamma < 0.0)
    throw ParameterError("bath gamma must be finite and >= 0, got " + std::to_string(b.gamma));
  if (!std::isfinite(b.width) || b.width <= 0.0)
    throw ParameterError("bath width must be finite and > 0, got " + std::to_string(b.width));
  if (!std::isfinite(b.center))
    throw ParameterError("bath center frequency must be finite");
}

double spectral_density(const BathParams& b, double omega) {
  const double detuning = b.center - omega;
  return b.gamma * b.width * b.width /
         (2.0 * std::numbers::pi * (detuning * detuning + b.width * b.width));
}

cdouble memory_kernel(const BathParams& b, double t) {
  return 0.5 * b.gamma * b.width * std::exp(-b.width * std::abs(t));
}

cdouble single_bath_amplitude(const BathParams& b, double t) {
  const double lambda = b.width;
  const cdouble d = discriminant_root(b);
  const cdouble x = 0.5 * d * t;
  if (std::abs(x) < 0.5) {
    return std::exp(-0.5 * lambda * t) * (std::cosh(x) + 0.5 * lambda * t * sinhc(x));
  }
  const cdouble ratio = lambda / d;
  return 0.5 * ((1.0 + ratio) * std::exp(x - 0.5 * lambda * t) +
                (1.0 - ratio) * std::exp(-x - 0.5 * lambda * t));
}

std::optional<double> single_bath_decay_rate(const BathParams& b, double t, double pole_tolerance) {
  const double lambda = b.width;
  const double scale = 2.0 * b.gamma * lambda;
  const cdouble d = discriminant_root(b);
  const cdouble x = 0.5 * d * t;

  cdouble numerator;
  cdouble denominator;  // scaled so that it equals 1 at t = 0
  if (std::abs(x) < 0.5) {
    const cdouble sinh_over_d = 0.5 * t * sinhc(x);
    const double damping = std::exp(-std::abs(x.real()));
    numerator = scale * sinh_over_d * damping;
    denominator = (std::cosh(x) + lambda * sinh_over_d) * damping;
  } else {
    // Multiply through by exp(-x) (Re d >= 0) to keep both sums bounded.
    const cdouble e = std::exp(-2.0 * x);
    numerator = scale * (1.0 - e) / (2.0 * d);
    denominator = 0.5 * (1.0 + e) + lambda * (1.0 - e) / (2.0 * d);
  }
  if (std::abs(denominator) < pole_tolerance) return std::nullopt;
  return (numerator / denominator).real();
}

void validate(const KernelSpec& kernel) {
  std::visit(overloaded{
                 [](const LorentzianKernel& k) { validate(k.bath); },
                 [](const ConstantUnitKernel&) {},
                 [](const MarkovianDeltaKernel& k) {
                   if (!std::isfinite(k.weight) || k.weight <= 0.0)
                     throw ParameterError("Markovian delta kernel weight must be > 0");
                 },
                 [](const TabulatedKernel& k) {
                   if (k.times.empty() || k.times.size() != k.values.size())
                     throw ParameterError("tabulated kernel needs equal, non-empty times and values");
                   if (k.times.front() != 0.0)
                     throw ParameterError("tabulated kernel times must start at 0");
                   for (std::size_t i = 1; i < k.times.size(); ++i)
                     if (!(k.times[i] > k.times[i - 1]))
                       throw ParameterError("tabulated kernel times must be strictly increasing");
                   for (const auto& v : k.values)
                     if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                       throw ParameterError("tabulated kernel values must be finite");
                 },
             },
             kernel);
}

cdouble evaluate(const KernelSpec& kernel, double tau) {
  tau = std::abs(tau);
  return std::visit(
      overloaded{
          [tau](const LorentzianKernel& k) { return memory_kernel(k.bath, tau); },
          [](const ConstantUnitKernel&) { return cdouble(1.0); },
          [](const MarkovianDeltaKernel&) { return cdouble(0.0); },
          [tau](const TabulatedKernel& k) {
            const auto& ts = k.times;
            if (tau > ts.back() * (1.0 + 1e-12))
              throw ParameterError("tabulated kernel evaluated at lag " + std::to_string(tau) +
                                   " beyond its last time " + std::to_string(ts.back()));
            if (ts.size() == 1 || tau >= ts.back()) return k.values.back();
            const auto it = std::upper_bound(ts.begin(), ts.end(), tau);
            const auto hi = static_cast<std::size_t>(it - ts.begin());
            const std::size_t lo = hi - 1;
            const double w = (tau - ts[lo]) / (ts[hi] - ts[lo]);
            return (1.0 - w) * k.values[lo] + w * k.values[hi];
          },
      },
      kernel);
}

double delta_weight(const KernelSpec& kernel) {
  if (const auto* k = std::get_if<MarkovianDeltaKernel>(&kernel)) return k->weight;
  return 0.0;
}

double max_lag(const KernelSpec& kernel) {
  if (const auto* k = std::get_if<TabulatedKernel>(&kernel)) return k->times.back();
  return std::numeric_limits<double>::infinity();
}

}  // namespace resint
