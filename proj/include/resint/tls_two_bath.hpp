#pragma once

// Two-level emitter coupled to two independent Lorentzian reservoirs:
// closed-form amplitude from the cubic characteristic polynomial, the
// numerical Volterra route, and the additive master-equation comparison.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "resint/bath_kernels.hpp"
#include "resint/time_grid.hpp"

namespace resint {

struct TwoBathModel {
  BathParams bath1;
  BathParams bath2;
  double c0 = 1.0;  // real initial excited amplitude, in (0, 1]
};

void validate(const TwoBathModel& model);

/// Roots of p(s) = s(s+l1)(s+l2) + g1 l1 (s+l2)/2 + g2 l2 (s+l1)/2, sorted by
/// real part then imaginary part.
struct CubicRoots {
  std::array<cdouble, 3> s;
  bool near_degenerate = false;  // some pair closer than 1e-8 * scale
};

/// Monic coefficients {1, b, c, e} of p(s).
std::array<double, 4> characteristic_coefficients(const TwoBathModel& model);
cdouble characteristic_polynomial(const TwoBathModel& model, cdouble s);

CubicRoots characteristic_roots(const TwoBathModel& model);

/// Closed-form c_e(t) as a residue sum over the roots. Throws
/// DegenerateRootsError if the roots are flagged near-degenerate.
cdouble exact_amplitude(const TwoBathModel& model, const CubicRoots& roots, double t);

/// Gamma_12(t) = -2 Re[c_e'(t)/c_e(t)]; std::nullopt at amplitude zeros.
std::optional<double> exact_decay_rate(const TwoBathModel& model, const CubicRoots& roots,
                                       double t, double pole_tolerance = kDefaultPoleTolerance);

/// Gamma_1(t) + Gamma_2(t); std::nullopt if either rate sits on a pole.
std::optional<double> additive_decay_rate(const TwoBathModel& model, double t,
                                          double pole_tolerance = kDefaultPoleTolerance);

/// |c_e(t)|^2. Falls back to volterra_solve on degenerate roots.
double exact_population(const TwoBathModel& model, double t);
std::vector<double> exact_population(const TwoBathModel& model, const UniformGrid& grid);

/// c0^2 |u1(t)|^2 |u2(t)|^2 with u_i the normalized single-bath amplitudes,
/// i.e. the solution of the additive master equation.
double additive_population(const TwoBathModel& model, double t);

struct ExactDynamics {
  std::vector<double> population;
  std::vector<std::optional<double>> decay_rate;  // empty entries at poles
};

/// Exact population and decay rate on a grid, from the closed form or, for
/// degenerate roots, from a refined volterra_solve run.
ExactDynamics exact_dynamics(const TwoBathModel& model, const UniformGrid& grid,
                             double pole_tolerance = kDefaultPoleTolerance);

/// epsilon(t) = exact_population - additive_population on the grid.
std::vector<double> additivity_error(const TwoBathModel& model, const UniformGrid& grid);

struct AmplitudeTrajectory {
  std::vector<double> times;
  std::vector<cdouble> values;
  std::vector<cdouble> derivatives;  // c_e'(t) from the discrete memory integral
};

/// Second-order solution of c'(t) = -int_0^t K(t-t') c(t') dt' for the summed
/// kernel. Throws StabilityError when h * sum_i |k_i(0)| > 0.1.
AmplitudeTrajectory volterra_solve(std::span<const KernelSpec> kernels, double c0,
                                   const UniformGrid& grid);

/// The two Lorentzian kernels of a model.
std::array<KernelSpec, 2> model_kernels(const TwoBathModel& model);

}  // namespace resint
