#pragma once

// Resonantly driven Lambda system |1>, |2> <-> |3> with Markovian relaxation
// 3 -> 1, 3 -> 2 and sigma_z = |2><2| - |1><1| dephasing with memory kernel K.
//
// Density matrices are vectorized column-major, vec(A X B) = (B^T (x) A) vec(X).

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "resint/bath_kernels.hpp"
#include "resint/time_grid.hpp"

namespace resint {

using DensityMatrix3 = Eigen::Matrix3cd;
using Operator3 = Eigen::Matrix3cd;
using StateVector3 = Eigen::Vector3cd;
using Vector9 = Eigen::Matrix<cdouble, 9, 1>;
using Superoperator9 = Eigen::Matrix<cdouble, 9, 9>;

/// sigma_ij = |i><j| with 1-based level labels.
Operator3 transition(int i, int j);
Operator3 sigma_z();
StateVector3 dark_state();    // (|1> - |2>)/sqrt(2)
StateVector3 bright_state();  // (|1> + |2>)/sqrt(2)
DensityMatrix3 projector(const StateVector3& psi);

struct LambdaParams {
  double omega = 0.0;       // Rabi drive
  double gamma1 = 0.0;      // relaxation 3 -> 1
  double gamma2 = 0.0;      // relaxation 3 -> 2
  double gamma_perp = 0.0;  // dephasing scale
  KernelSpec kernel = ConstantUnitKernel{};
  DensityMatrix3 initial_state = projector(dark_state());
};

void validate(const LambdaParams& p);

/// (Omega/2)(sigma_13 + sigma_23 + h.c.)
Operator3 drive_hamiltonian(const LambdaParams& p);

Vector9 vectorize(const Operator3& x);
Operator3 unvectorize(const Vector9& v);

Superoperator9 left_multiplication(const Operator3& a);   // X -> A X
Superoperator9 right_multiplication(const Operator3& b);  // X -> X B
Superoperator9 commutator_superoperator(const Operator3& a);  // X -> [A, X]
/// D[O] X = {O^dag O, X} - 2 O X O^dag
Superoperator9 dissipator(const Operator3& o);

/// L0 X = -i[H_Omega, X] - sum_i (Gamma_i/2) D[sigma_i3] X
Superoperator9 dressed_liouvillian(const LambdaParams& p);

/// exp(L t) applied to an arbitrary operator (no state checks).
Operator3 evolve(const Superoperator9& generator, const Operator3& x, double t);

/// exp(L t) rho0. Throws SolverError if the result drifts from Hermiticity by
/// more than 1e-8.
DensityMatrix3 propagate(const Superoperator9& generator, const DensityMatrix3& rho0, double t);

/// Where an operator stands relative to the observable inside a multi-time
/// average: Left for <A(t1) ... O(t)>, Right for <O(t) ... A(t1)>.
enum class OperatorSide { Left, Right };

/// Quantum-regression evaluation of a three-time average under the dressed
/// semigroup, e.g. <A(t1) B(t2) O(t)> for (Left, Left) and <O(t) B(t2) A(t1)>
/// for (Right, Right). Requires 0 <= t1 <= t2 <= t.
cdouble regression_correlator(const LambdaParams& p, double t1, double t2, double t,
                              const Operator3& a, OperatorSide a_side, const Operator3& b,
                              OperatorSide b_side, const Operator3& observable);

/// <[A(t1), [B(t2), O(t)]]> assembled from the four orderings.
cdouble double_commutator_correlator(const LambdaParams& p, double t1, double t2, double t,
                                     const Operator3& a, const Operator3& b,
                                     const Operator3& observable);

double dark_state_population(const DensityMatrix3& rho);
double min_eigenvalue(const DensityMatrix3& rho);

struct LambdaTrajectory {
  std::vector<double> times;
  std::vector<DensityMatrix3> states;
  std::vector<std::string> warnings;
  double error_estimate = 0.0;  // coarse/fine discrepancy of quadrature paths
};

std::vector<double> dark_state_populations(const LambdaTrajectory& traj);

/// Drive and relaxation only.
LambdaTrajectory dressed_solve(const LambdaParams& p, const UniformGrid& grid);

/// Second order in the dephasing, all orders in drive and relaxation. Every
/// three-time average is the regression value under the dressed semigroup.
/// Constant and delta kernels are integrated by state augmentation; tabulated
/// kernels by a triangular trapezoidal rule whose coarse/fine discrepancy must
/// stay below `quadrature_tolerance`.
LambdaTrajectory quantum_darkstate_solution(const LambdaParams& p, const UniformGrid& grid,
                                            double quadrature_tolerance = 1e-4);

/// rho' = L0 rho - (gamma_perp^2/2) int_0^t K(t-t') D[sigma_z] rho(t') dt'
LambdaTrajectory additive_me_solve(const LambdaParams& p, const UniformGrid& grid);

/// Additive ME with the dephasing history dressed by U(tau) = exp(-i H_Omega tau).
LambdaTrajectory me2_solve(const LambdaParams& p, const UniformGrid& grid);

/// rho' = L0 rho - (gamma_perp/2) D[sigma_z] rho
LambdaTrajectory markovian_dephasing_solve(const LambdaParams& p, const UniformGrid& grid);

}  // namespace resint
