#include <cmath>
#include <functional>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

#include "resint/errors.hpp"
#include "resint/lambda_system.hpp"

namespace resint {
namespace {

using MatrixX = Eigen::MatrixXcd;
using VectorX = Eigen::VectorXcd;

double memory_strength(const LambdaParams& p) { return 0.5 * p.gamma_perp * p.gamma_perp; }

void check_hermitian(const DensityMatrix3& rho, double t) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
    throw SolverError("state lost Hermiticity beyond 1e-8 at t = " + std::to_string(t));
}

LambdaTrajectory start_trajectory(const LambdaParams& p, const UniformGrid& grid) {
  validate(p);
  validate(grid);
  LambdaTrajectory traj;
  traj.times = grid.times();
  traj.states.reserve(grid.size());
  return traj;
}

// Integrates a time-independent linear system x' = A x on the grid with one
// cached step exponential; `extract` maps the augmented vector to rho.
void run_augmented(const MatrixX& generator, const VectorX& x0, const UniformGrid& grid,
                   const std::function<DensityMatrix3(const VectorX&)>& extract,
                   LambdaTrajectory& traj) {
  const MatrixX step = (generator * grid.step()).exp();
  VectorX x = x0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0) x = step * x;
    DensityMatrix3 rho = extract(x);
    check_hermitian(rho, grid.time(k));
    traj.states.push_back(rho);
  }
}

DensityMatrix3 head(const VectorX& x) { return unvectorize(x.head<9>()); }

// rho' = L0 rho - g int_0^t G(t-t') rho(t') dt' with G(m h) = lag(m), by the
// trapezoidal rule in both the history and the step. The endpoint history
// term is implicit and folded into a constant 9x9 solve.
void run_memory_quadrature(const Superoperator9& l0, double g,
                           const std::vector<Superoperator9>& lag, const DensityMatrix3& rho0,
                           const UniformGrid& grid, LambdaTrajectory& traj) {
  const double h = grid.step();
  const std::size_t n_points = grid.size();
  const Superoperator9 id = Superoperator9::Identity();
  const Eigen::PartialPivLU<Superoperator9> solve(id - 0.5 * h * l0 + 0.25 * g * h * h * lag[0]);

  std::vector<Vector9> rho(n_points);
  rho[0] = vectorize(rho0);
  Vector9 f = l0 * rho[0];
  traj.states.push_back(rho0);
  for (std::size_t n = 0; n + 1 < n_points; ++n) {
    Vector9 partial = 0.5 * lag[n + 1] * rho[0];
    for (std::size_t j = 1; j <= n; ++j) partial += lag[n + 1 - j] * rho[j];
    rho[n + 1] = solve.solve(rho[n] + 0.5 * h * f - 0.5 * g * h * h * partial);
    f = l0 * rho[n + 1] - g * h * (partial + 0.5 * lag[0] * rho[n + 1]);
    const DensityMatrix3 state = unvectorize(rho[n + 1]);
    check_hermitian(state, grid.time(n + 1));
    traj.states.push_back(state);
  }
}

void guard_memory_step(const LambdaParams& p, const UniformGrid& grid) {
  const double k0 = memory_strength(p) * std::abs(evaluate(p.kernel, 0.0));
  if (grid.step() * k0 > 0.1)
    throw StabilityError("memory step rejected: h * |k(0)| = " + std::to_string(grid.step() * k0) +
                         " exceeds 0.1");
  if (max_lag(p.kernel) < grid.t_max * (1.0 - 1e-12))
    throw ParameterError("tabulated kernel does not cover the grid's t_max");
}

std::vector<cdouble> sample_kernel(const KernelSpec& kernel, const UniformGrid& grid) {
  std::vector<cdouble> out(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m) out[m] = evaluate(kernel, grid.time(m));
  return out;
}

// Scale that keeps the augmented second-order blocks O(1) when the dressed
// generator is stiff.
double coupling_scale(const Superoperator9& l0) {
  return std::max(1.0, l0.cwiseAbs().rowwise().sum().maxCoeff());
}

LambdaTrajectory quantum_by_augmentation(const LambdaParams& p, const UniformGrid& grid) {
  LambdaTrajectory traj = start_trajectory(p, grid);
  const Superoperator9 l0 = dressed_liouvillian(p);
  const Superoperator9 c = commutator_superoperator(sigma_z());
  const double g = memory_strength(p);
  const double s = coupling_scale(l0);
  const Vector9 rho0 = vectorize(p.initial_state);

  if (const auto* delta = std::get_if<MarkovianDeltaKernel>(&p.kernel)) {
    // (rho0, s^2 Z):  Z' = L0 Z + w C C rho0
    MatrixX a = MatrixX::Zero(18, 18);
    a.block<9, 9>(0, 0) = l0;
    a.block<9, 9>(9, 9) = l0;
    a.block<9, 9>(9, 0) = s * s * delta->weight * c * c;
    VectorX x0 = VectorX::Zero(18);
    x0.head<9>() = rho0;
    run_augmented(a, x0, grid,
                  [&](const VectorX& x) {
                    return DensityMatrix3(head(x) - g / (s * s) * unvectorize(x.tail<9>()));
                  },
                  traj);
    return traj;
  }

  // (rho0, s X, s^2 Z):  X' = L0 X + C rho0,  Z' = L0 Z + C X
  MatrixX a = MatrixX::Zero(27, 27);
  a.block<9, 9>(0, 0) = l0;
  a.block<9, 9>(9, 9) = l0;
  a.block<9, 9>(18, 18) = l0;
  a.block<9, 9>(9, 0) = s * c;
  a.block<9, 9>(18, 9) = s * c;
  VectorX x0 = VectorX::Zero(27);
  x0.head<9>() = rho0;
  run_augmented(a, x0, grid,
                [&](const VectorX& x) {
                  return DensityMatrix3(head(x) - g / (s * s) * unvectorize(x.tail<9>()));
                },
                traj);
  return traj;
}

// Triangular trapezoidal rule for the double time integral:
//   X_n = int_0^{t_n} K(t_n - t1) e^{L0 (t_n - t1)} C rho0(t1) dt1
//   Z_n = int_0^{t_n} e^{L0 (t_n - t2)} C X(t2) dt2
std::vector<DensityMatrix3> quantum_quadrature_states(const LambdaParams& p,
                                                      const UniformGrid& grid) {
  const Superoperator9 l0 = dressed_liouvillian(p);
  const Superoperator9 c = commutator_superoperator(sigma_z());
  const double g = memory_strength(p);
  const double h = grid.step();
  const std::size_t n_points = grid.size();
  const auto kernel = sample_kernel(p.kernel, grid);

  const Superoperator9 step = (l0 * h).exp();
  std::vector<Superoperator9> power(n_points);
  power[0] = Superoperator9::Identity();
  for (std::size_t m = 1; m < n_points; ++m) power[m] = step * power[m - 1];

  std::vector<Vector9> bare(n_points);
  std::vector<Vector9> kicked(n_points);
  bare[0] = vectorize(p.initial_state);
  for (std::size_t j = 0; j < n_points; ++j) {
    if (j > 0) bare[j] = step * bare[j - 1];
    kicked[j] = c * bare[j];
  }

  std::vector<Vector9> inner(n_points, Vector9::Zero());
  for (std::size_t n = 1; n < n_points; ++n) {
    Vector9 acc = 0.5 * kernel[n] * (power[n] * kicked[0]) + 0.5 * kernel[0] * kicked[n];
    for (std::size_t j = 1; j < n; ++j) acc += kernel[n - j] * (power[n - j] * kicked[j]);
    inner[n] = h * acc;
  }

  std::vector<DensityMatrix3> states(n_points);
  Vector9 outer = Vector9::Zero();
  states[0] = p.initial_state;
  for (std::size_t n = 1; n < n_points; ++n) {
    outer = step * (outer + 0.5 * h * (c * inner[n - 1])) + 0.5 * h * (c * inner[n]);
    states[n] = unvectorize(bare[n] - g * outer);
  }
  return states;
}

LambdaTrajectory quantum_by_quadrature(const LambdaParams& p, const UniformGrid& grid,
                                       double tolerance) {
  LambdaTrajectory traj = start_trajectory(p, grid);
  guard_memory_step(p, grid);
  traj.states = quantum_quadrature_states(p, grid);
  for (std::size_t k = 0; k < traj.states.size(); ++k) check_hermitian(traj.states[k], traj.times[k]);

  if (grid.n_steps % 2 == 0 && grid.n_steps >= 4) {
    const auto coarse = quantum_quadrature_states(p, UniformGrid{grid.t_max, grid.n_steps / 2});
    double worst = 0.0;
    for (std::size_t k = 0; k < coarse.size(); ++k)
      worst = std::max(worst, (coarse[k] - traj.states[2 * k]).cwiseAbs().maxCoeff());
    traj.error_estimate = worst;
    if (worst > tolerance)
      throw SolverError("double-time quadrature discrepancy " + std::to_string(worst) +
                        " exceeds tolerance " + std::to_string(tolerance) + "; refine the grid");
  }
  return traj;
}

void warn_perturbative_range(const LambdaParams& p, const UniformGrid& grid,
                             LambdaTrajectory& traj) {
  if (p.gamma_perp * grid.t_max > 1.0)
    traj.warnings.push_back("gamma_perp * t_max = " + std::to_string(p.gamma_perp * grid.t_max) +
                            " > 1: second-order dephasing result is outside its validity range");
}

}  // namespace

LambdaTrajectory dressed_solve(const LambdaParams& p, const UniformGrid& grid) {
  LambdaTrajectory traj = start_trajectory(p, grid);
  VectorX x0 = vectorize(p.initial_state);
  run_augmented(dressed_liouvillian(p), x0, grid, head, traj);
  return traj;
}

LambdaTrajectory quantum_darkstate_solution(const LambdaParams& p, const UniformGrid& grid,
                                            double quadrature_tolerance) {
  LambdaTrajectory traj = std::holds_alternative<TabulatedKernel>(p.kernel)
                              ? quantum_by_quadrature(p, grid, quadrature_tolerance)
                              : quantum_by_augmentation(p, grid);
  warn_perturbative_range(p, grid, traj);
  return traj;
}

LambdaTrajectory additive_me_solve(const LambdaParams& p, const UniformGrid& grid) {
  LambdaTrajectory traj = start_trajectory(p, grid);
  const Superoperator9 l0 = dressed_liouvillian(p);
  const Superoperator9 d = dissipator(sigma_z());
  const double g = memory_strength(p);
  const Vector9 rho0 = vectorize(p.initial_state);

  if (const auto* delta = std::get_if<MarkovianDeltaKernel>(&p.kernel)) {
    run_augmented(l0 - g * delta->weight * d, VectorX(rho0), grid, head, traj);
  } else if (std::holds_alternative<ConstantUnitKernel>(p.kernel)) {
    // (rho, M) with M' = rho, rho' = L0 rho - g D M
    MatrixX a = MatrixX::Zero(18, 18);
    a.block<9, 9>(0, 0) = l0;
    a.block<9, 9>(0, 9) = -g * d;
    a.block<9, 9>(9, 0) = Superoperator9::Identity();
    VectorX x0 = VectorX::Zero(18);
    x0.head<9>() = rho0;
    run_augmented(a, x0, grid, head, traj);
  } else {
    guard_memory_step(p, grid);
    const auto kernel = sample_kernel(p.kernel, grid);
    std::vector<Superoperator9> lag(grid.size());
    for (std::size_t m = 0; m < lag.size(); ++m) lag[m] = kernel[m] * d;
    run_memory_quadrature(l0, g, lag, p.initial_state, grid, traj);
  }
  return traj;
}

LambdaTrajectory me2_solve(const LambdaParams& p, const UniformGrid& grid) {
  LambdaTrajectory traj = start_trajectory(p, grid);
  const Superoperator9 l0 = dressed_liouvillian(p);
  const Superoperator9 c = commutator_superoperator(sigma_z());
  const cdouble i(0.0, 1.0);
  const Superoperator9 drive = -i * commutator_superoperator(drive_hamiltonian(p));
  const double g = memory_strength(p);
  const Vector9 rho0 = vectorize(p.initial_state);

  // The dressed history term is [sigma_z, int K U(t-t') [sigma_z, rho(t')] U^dag(t-t') dt'].
  if (const auto* delta = std::get_if<MarkovianDeltaKernel>(&p.kernel)) {
    run_augmented(l0 - g * delta->weight * c * c, VectorX(rho0), grid, head, traj);
  } else if (std::holds_alternative<ConstantUnitKernel>(p.kernel)) {
    // (rho, Q) with Q' = [sigma_z, rho] - i[H_Omega, Q], rho' = L0 rho - g [sigma_z, Q]
    MatrixX a = MatrixX::Zero(18, 18);
    a.block<9, 9>(0, 0) = l0;
    a.block<9, 9>(0, 9) = -g * c;
    a.block<9, 9>(9, 0) = c;
    a.block<9, 9>(9, 9) = drive;
    VectorX x0 = VectorX::Zero(18);
    x0.head<9>() = rho0;
    run_augmented(a, x0, grid, head, traj);
  } else {
    guard_memory_step(p, grid);
    const auto kernel = sample_kernel(p.kernel, grid);
    const Superoperator9 unitary_step = (drive * grid.step()).exp();
    Superoperator9 unitary = Superoperator9::Identity();
    std::vector<Superoperator9> lag(grid.size());
    for (std::size_t m = 0; m < lag.size(); ++m) {
      lag[m] = kernel[m] * (c * unitary * c);
      unitary = unitary_step * unitary;
    }
    run_memory_quadrature(l0, g, lag, p.initial_state, grid, traj);
  }
  return traj;
}

LambdaTrajectory markovian_dephasing_solve(const LambdaParams& p, const UniformGrid& grid) {
  LambdaTrajectory traj = start_trajectory(p, grid);
  const Superoperator9 generator =
      dressed_liouvillian(p) - 0.5 * p.gamma_perp * dissipator(sigma_z());
  run_augmented(generator, VectorX(vectorize(p.initial_state)), grid, head, traj);
  return traj;
}

}  // namespace resint
