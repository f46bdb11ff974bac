#include "resint/time_grid.hpp"

#include <cmath>

#include "resint/errors.hpp"

namespace resint {

std::vector<double> UniformGrid::times() const {
  std::vector<double> out(size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = time(k);
  return out;
}

void validate(const UniformGrid& grid) {
  if (!std::isfinite(grid.t_max) || grid.t_max <= 0.0)
    throw ParameterError("grid t_max must be finite and > 0");
  if (grid.n_steps < 1) throw ParameterError("grid needs at least one step");
}

}  // namespace resint
