#include "resint/tls_two_bath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "resint/errors.hpp"

namespace resint {
namespace {

cdouble derivative(const std::array<double, 4>& a, cdouble s) {
  return (3.0 * s + 2.0 * a[1]) * s + a[2];
}

cdouble evaluate_poly(const std::array<double, 4>& a, cdouble s) {
  return ((s + a[1]) * s + a[2]) * s + a[3];
}

// Cube root on the principal branch.
cdouble cbrt(cdouble z) {
  if (z == cdouble(0.0)) return 0.0;
  return std::polar(std::cbrt(std::abs(z)), std::arg(z) / 3.0);
}

std::array<cdouble, 3> cardano(const std::array<double, 4>& a) {
  const double b = a[1], c = a[2], e = a[3];
  const double shift = b / 3.0;
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + e;
  const cdouble disc = std::sqrt(cdouble(q * q / 4.0 + p * p * p / 27.0));
  // Pick the larger of -q/2 +- sqrt(disc) to avoid cancellation.
  const cdouble plus = -q / 2.0 + disc;
  const cdouble minus = -q / 2.0 - disc;
  const cdouble u = cbrt(std::abs(plus) >= std::abs(minus) ? plus : minus);

  const cdouble omega = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  std::array<cdouble, 3> roots;
  cdouble rot = 1.0;
  for (auto& r : roots) {
    const cdouble uk = u * rot;
    const cdouble vk = uk == cdouble(0.0) ? cdouble(0.0) : -p / (3.0 * uk);
    r = uk + vk - shift;
    rot *= omega;
  }
  return roots;
}

}  // namespace

void validate(const TwoBathModel& m) {
  validate(m.bath1);
  validate(m.bath2);
  if (!std::isfinite(m.c0) || m.c0 <= 0.0 || m.c0 > 1.0)
    throw ParameterError("initial amplitude c0 must lie in (0, 1], got " + std::to_string(m.c0));
}

std::array<double, 4> characteristic_coefficients(const TwoBathModel& m) {
  const double l1 = m.bath1.width, l2 = m.bath2.width;
  const double a1 = 0.5 * m.bath1.gamma * l1, a2 = 0.5 * m.bath2.gamma * l2;
  return {1.0, l1 + l2, l1 * l2 + a1 + a2, a1 * l2 + a2 * l1};
}

cdouble characteristic_polynomial(const TwoBathModel& m, cdouble s) {
  return evaluate_poly(characteristic_coefficients(m), s);
}

CubicRoots characteristic_roots(const TwoBathModel& m) {
  validate(m);
  const auto a = characteristic_coefficients(m);
  auto s = cardano(a);

  for (auto& r : s) {
    const cdouble dp = derivative(a, r);
    if (std::abs(dp) == 0.0) continue;
    const cdouble polished = r - evaluate_poly(a, r) / dp;
    if (std::abs(evaluate_poly(a, polished)) <= std::abs(evaluate_poly(a, r))) r = polished;
  }

  // A real cubic has one real root plus a real root or a conjugate pair.
  const double root_scale = std::max({std::abs(s[0]), std::abs(s[1]), std::abs(s[2]), 1e-300});
  std::sort(s.begin(), s.end(),
            [](cdouble x, cdouble y) { return std::abs(x.imag()) < std::abs(y.imag()); });
  s[0].imag(0.0);
  if (std::abs(s[2].imag()) <= 1e-12 * root_scale) {
    s[1].imag(0.0);
    s[2].imag(0.0);
  } else {
    const cdouble mean = 0.5 * (s[1] + std::conj(s[2]));
    s[1] = mean;
    s[2] = std::conj(mean);
  }

  std::sort(s.begin(), s.end(), [](cdouble x, cdouble y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });

  CubicRoots out{s, false};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(s[i] - s[j]) < 1e-8 * root_scale) out.near_degenerate = true;
  return out;
}

namespace {

struct Residues {
  std::array<cdouble, 3> weight;
  double reference_rate;  // max real part, factored out of the exponentials
};

Residues residues(const TwoBathModel& m, const CubicRoots& roots) {
  if (roots.near_degenerate)
    throw DegenerateRootsError("characteristic roots are near-degenerate; use volterra_solve");
  const double l1 = m.bath1.width, l2 = m.bath2.width;
  Residues r{};
  cdouble total = 0.0;
  // p'(s_i) as the product over the computed roots keeps the partial
  // fractions consistent when two roots are close.
  for (int i = 0; i < 3; ++i) {
    const cdouble s = roots.s[i];
    cdouble dp = 1.0;
    for (int j = 0; j < 3; ++j)
      if (j != i) dp *= s - roots.s[j];
    r.weight[i] = (s + l1) * (s + l2) / dp;
    total += r.weight[i];
  }
  for (auto& w : r.weight) w /= total;
  r.reference_rate = std::max({roots.s[0].real(), roots.s[1].real(), roots.s[2].real()});
  return r;
}

}  // namespace

cdouble exact_amplitude(const TwoBathModel& m, const CubicRoots& roots, double t) {
  const Residues r = residues(m, roots);
  cdouble sum = 0.0;
  for (int i = 0; i < 3; ++i) sum += r.weight[i] * std::exp(roots.s[i] * t);
  return m.c0 * sum;
}

std::optional<double> exact_decay_rate(const TwoBathModel& m, const CubicRoots& roots, double t,
                                       double pole_tolerance) {
  const Residues r = residues(m, roots);
  cdouble value = 0.0;
  cdouble slope = 0.0;
  for (int i = 0; i < 3; ++i) {
    const cdouble term = r.weight[i] * std::exp((roots.s[i] - r.reference_rate) * t);
    value += term;
    slope += roots.s[i] * term;
  }
  if (std::abs(value) < pole_tolerance) return std::nullopt;
  return -2.0 * (slope / value).real();
}

std::optional<double> additive_decay_rate(const TwoBathModel& m, double t, double pole_tolerance) {
  const auto g1 = single_bath_decay_rate(m.bath1, t, pole_tolerance);
  const auto g2 = single_bath_decay_rate(m.bath2, t, pole_tolerance);
  if (!g1 || !g2) return std::nullopt;
  return *g1 + *g2;
}

std::array<KernelSpec, 2> model_kernels(const TwoBathModel& m) {
  return {KernelSpec{LorentzianKernel{m.bath1}}, KernelSpec{LorentzianKernel{m.bath2}}};
}

namespace {

// Volterra fallback for degenerate roots: refine the grid until the stability
// guard is comfortably met, then sample back onto the requested grid.
ExactDynamics volterra_dynamics(const TwoBathModel& m, const UniformGrid& grid,
                                double pole_tolerance) {
  const auto kernels = model_kernels(m);
  const double k0 = std::abs(memory_kernel(m.bath1, 0.0)) + std::abs(memory_kernel(m.bath2, 0.0));
  std::size_t refine = 1;
  while (grid.step() / double(refine) * k0 > 0.01 || grid.n_steps * refine < 4000) refine *= 2;
  const UniformGrid fine{grid.t_max, grid.n_steps * refine};
  const auto traj = volterra_solve(kernels, m.c0, fine);
  ExactDynamics out;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const cdouble c = traj.values[k * refine];
    out.population.push_back(std::norm(c));
    if (std::abs(c) < pole_tolerance * m.c0)
      out.decay_rate.emplace_back();
    else
      out.decay_rate.emplace_back(-2.0 * (traj.derivatives[k * refine] / c).real());
  }
  return out;
}

}  // namespace

double exact_population(const TwoBathModel& m, double t) {
  const auto roots = characteristic_roots(m);
  if (t <= 0.0) return m.c0 * m.c0;
  if (roots.near_degenerate)
    return volterra_dynamics(m, UniformGrid{t, 1}, kDefaultPoleTolerance).population.back();
  return std::norm(exact_amplitude(m, roots, t));
}

std::vector<double> exact_population(const TwoBathModel& m, const UniformGrid& grid) {
  validate(grid);
  const auto roots = characteristic_roots(m);
  if (roots.near_degenerate) return volterra_dynamics(m, grid, kDefaultPoleTolerance).population;
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    out[k] = std::norm(exact_amplitude(m, roots, grid.time(k)));
  return out;
}

ExactDynamics exact_dynamics(const TwoBathModel& m, const UniformGrid& grid,
                             double pole_tolerance) {
  validate(grid);
  const auto roots = characteristic_roots(m);
  if (roots.near_degenerate) return volterra_dynamics(m, grid, pole_tolerance);
  ExactDynamics out;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid.time(k);
    out.population.push_back(std::norm(exact_amplitude(m, roots, t)));
    out.decay_rate.push_back(exact_decay_rate(m, roots, t, pole_tolerance));
  }
  return out;
}

double additive_population(const TwoBathModel& m, double t) {
  return m.c0 * m.c0 * std::norm(single_bath_amplitude(m.bath1, t)) *
         std::norm(single_bath_amplitude(m.bath2, t));
}

std::vector<double> additivity_error(const TwoBathModel& m, const UniformGrid& grid) {
  auto eps = exact_population(m, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) eps[k] -= additive_population(m, grid.time(k));
  return eps;
}

}  // namespace resint
