#pragma once

#include <cstddef>
#include <vector>

namespace resint {

/// Uniform grid t_k = k * t_max / n_steps, k = 0..n_steps.
struct UniformGrid {
  double t_max = 1.0;
  std::size_t n_steps = 100;

  double step() const { return t_max / static_cast<double>(n_steps); }
  std::size_t size() const { return n_steps + 1; }
  double time(std::size_t k) const {
    return k == n_steps ? t_max : static_cast<double>(k) * step();
  }
  std::vector<double> times() const;
};

void validate(const UniformGrid& grid);

}  // namespace resint
