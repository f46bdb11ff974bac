#include <algorithm>
#include <cmath>
#include <string>

#include "resint/errors.hpp"
#include "resint/tls_two_bath.hpp"

namespace resint {
namespace {

constexpr std::size_t kBlock = 64;

// out[b] = sum_{j=1..n0} K_{n0+1+b-j} c_j for b < kBlock. One pass over the
// stored amplitudes serves a whole block of upcoming steps.
template <class T>
void history_block(const T* kernel, const T* c, std::size_t n0, T* out) {
  T acc[kBlock] = {};
  for (std::size_t j = 1; j <= n0; ++j) {
    const T cj = c[j];
    const T* k = kernel + (n0 + 1 - j);
#pragma omp simd
    for (std::size_t b = 0; b < kBlock; ++b) acc[b] += k[b] * cj;
  }
  std::copy(acc, acc + kBlock, out);
}

// Trapezoidal rule for both the memory integral and the time step. The
// integral's endpoint term is linear in the unknown c_{n+1}, so the implicit
// trapezoidal step is solved exactly instead of iterating a corrector.
//
//   c_{n+1} (1 + h^2 K_0/4 + h w/2) = c_n + h/2 f_n - h^2/2 P_{n+1}
//   P_{n+1} = K_{n+1} c_0 / 2 + sum_{j=1..n} K_{n+1-j} c_j
template <class T>
void integrate(std::vector<T> kernel, double delta, T c0, double h,
               std::vector<cdouble>& values, std::vector<cdouble>& derivatives) {
  const std::size_t n_points = kernel.size();
  const std::size_t last = n_points - 1;
  kernel.resize(n_points + kBlock, T{});

  std::vector<T> c(n_points);
  c[0] = c0;
  T f = -delta * c0;

  values.assign(n_points, cdouble{});
  derivatives.assign(n_points, cdouble{});
  values[0] = c0;
  derivatives[0] = f;

  const T denom = T(1.0) + h * h * kernel[0] / 4.0 + T(h * delta / 2.0);
  T old[kBlock];
  for (std::size_t n0 = 0; n0 < last; n0 += kBlock) {
    history_block(kernel.data(), c.data(), n0, old);
    const std::size_t stop = std::min(last, n0 + kBlock);
    for (std::size_t n = n0; n < stop; ++n) {
      T partial = 0.5 * kernel[n + 1] * c[0] + old[n - n0];
      for (std::size_t j = std::max<std::size_t>(n0 + 1, 1); j <= n; ++j)
        partial += kernel[n + 1 - j] * c[j];
      const T next = (c[n] + 0.5 * h * f - 0.5 * h * h * partial) / denom;
      c[n + 1] = next;
      f = -h * (partial + 0.5 * kernel[0] * next) - delta * next;
      values[n + 1] = next;
      derivatives[n + 1] = f;
    }
  }
}

}  // namespace

AmplitudeTrajectory volterra_solve(std::span<const KernelSpec> kernels, double c0,
                                   const UniformGrid& grid) {
  validate(grid);
  if (!std::isfinite(c0)) throw ParameterError("initial amplitude must be finite");
  for (const auto& k : kernels) {
    validate(k);
    if (max_lag(k) < grid.t_max * (1.0 - 1e-12))
      throw ParameterError("tabulated kernel does not cover the grid's t_max");
  }

  const double h = grid.step();
  double k0_sum = 0.0;
  double delta = 0.0;
  for (const auto& k : kernels) {
    k0_sum += std::abs(evaluate(k, 0.0));
    delta += delta_weight(k);
  }
  if (h * k0_sum > 0.1)
    throw StabilityError("volterra step rejected: h * sum|k(0)| = " + std::to_string(h * k0_sum) +
                         " exceeds 0.1");

  std::vector<cdouble> summed(grid.size(), cdouble{});
  bool real = true;
  for (std::size_t m = 0; m < grid.size(); ++m) {
    for (const auto& k : kernels) summed[m] += evaluate(k, grid.time(m));
    real = real && summed[m].imag() == 0.0;
  }

  AmplitudeTrajectory out;
  out.times = grid.times();
  if (real) {
    std::vector<double> kr(summed.size());
    for (std::size_t m = 0; m < summed.size(); ++m) kr[m] = summed[m].real();
    integrate<double>(kr, delta, c0, h, out.values, out.derivatives);
  } else {
    integrate<cdouble>(summed, delta, cdouble(c0), h, out.values, out.derivatives);
  }
  return out;
}

}  // namespace resint
