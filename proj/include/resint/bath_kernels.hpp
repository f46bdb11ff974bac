#pragma once

#include <complex>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace resint {

using cdouble = std::complex<double>;

/// Lorentzian reservoir: decay-rate scale gamma, spectral width lambda and
/// peak frequency. The peak frequency is carried along but never enters the
/// resonant kernels.
struct BathParams {
  double gamma = 0.0;
  double width = 1.0;
  double center = 0.0;
};

void validate(const BathParams& bath);

/// gamma * width^2 / (2 pi ((center - omega)^2 + width^2))
double spectral_density(const BathParams& bath, double omega);

/// gamma * width * exp(-width |t|) / 2
cdouble memory_kernel(const BathParams& bath, double t);

/// Normalized excited amplitude of a two-level system coupled to this bath
/// alone: exp(-width t/2) [cosh(d t/2) + (width/d) sinh(d t/2)] with
/// d = sqrt(width^2 - 2 gamma width) taken in complex arithmetic.
cdouble single_bath_amplitude(const BathParams& bath, double t);

inline constexpr double kDefaultPoleTolerance = 1e-12;

/// Time-dependent decay rate of the single-bath problem.
///
/// Returns std::nullopt when the (scaled) denominator falls below
/// `pole_tolerance` times its t = 0 value, i.e. the amplitude crosses zero
/// and the rate diverges.
std::optional<double> single_bath_decay_rate(const BathParams& bath, double t,
                                             double pole_tolerance = kDefaultPoleTolerance);

// Memory-kernel choices for the integro-differential solvers.

struct LorentzianKernel {
  BathParams bath;
};

/// K(tau) = 1.
struct ConstantUnitKernel {};

/// K(tau) = weight * delta(tau); the delta carries its full weight at the
/// upper end of a history integral.
struct MarkovianDeltaKernel {
  double weight = 1.0;
};

/// Piecewise-linear K(tau) through (times[i], values[i]); times start at 0.
struct TabulatedKernel {
  std::vector<double> times;
  std::vector<cdouble> values;
};

using KernelSpec =
    std::variant<LorentzianKernel, ConstantUnitKernel, MarkovianDeltaKernel, TabulatedKernel>;

void validate(const KernelSpec& kernel);

/// Regular (non-delta) part of the kernel at lag tau >= 0.
cdouble evaluate(const KernelSpec& kernel, double tau);

/// Weight of the delta(tau) component, zero for regular kernels.
double delta_weight(const KernelSpec& kernel);

/// Largest lag the kernel can be evaluated at (infinite unless tabulated).
double max_lag(const KernelSpec& kernel);

}  // namespace resint
