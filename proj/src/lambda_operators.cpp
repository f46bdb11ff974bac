#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "resint/errors.hpp"
#include "resint/lambda_system.hpp"

namespace resint {

Operator3 transition(int i, int j) {
  if (i < 1 || i > 3 || j < 1 || j > 3) throw ParameterError("level labels run from 1 to 3");
  Operator3 m = Operator3::Zero();
  m(i - 1, j - 1) = 1.0;
  return m;
}

Operator3 sigma_z() { return transition(2, 2) - transition(1, 1); }

StateVector3 dark_state() {
  return StateVector3(1.0, -1.0, 0.0) / std::numbers::sqrt2;
}

StateVector3 bright_state() {
  return StateVector3(1.0, 1.0, 0.0) / std::numbers::sqrt2;
}

DensityMatrix3 projector(const StateVector3& psi) { return psi * psi.adjoint(); }

void validate(const LambdaParams& p) {
  for (double rate : {p.omega, p.gamma1, p.gamma2, p.gamma_perp})
    if (!std::isfinite(rate) || rate < 0.0)
      throw ParameterError("Lambda-system rates must be finite and >= 0");
  if (std::holds_alternative<LorentzianKernel>(p.kernel))
    throw ParameterError("dephasing kernel must be constant, Markovian delta or tabulated");
  validate(p.kernel);
  if (!p.initial_state.allFinite()) throw ParameterError("initial state must be finite");
  if ((p.initial_state - p.initial_state.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw ParameterError("initial state must be Hermitian");
  if (std::abs(p.initial_state.trace() - 1.0) > 1e-9)
    throw ParameterError("initial state must have unit trace");
}

Operator3 drive_hamiltonian(const LambdaParams& p) {
  const Operator3 raise = transition(1, 3) + transition(2, 3);
  return 0.5 * p.omega * (raise + raise.adjoint());
}

Vector9 vectorize(const Operator3& x) { return Eigen::Map<const Vector9>(x.data()); }

Operator3 unvectorize(const Vector9& v) { return Eigen::Map<const Operator3>(v.data()); }

namespace {

Superoperator9 kron(const Operator3& a, const Operator3& b) {
  Superoperator9 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
  return out;
}

}  // namespace

Superoperator9 left_multiplication(const Operator3& a) {
  return kron(Operator3::Identity(), a);
}

Superoperator9 right_multiplication(const Operator3& b) {
  return kron(b.transpose(), Operator3::Identity());
}

Superoperator9 commutator_superoperator(const Operator3& a) {
  return left_multiplication(a) - right_multiplication(a);
}

Superoperator9 dissipator(const Operator3& o) {
  const Operator3 od_o = o.adjoint() * o;
  return left_multiplication(od_o) + right_multiplication(od_o) -
         2.0 * left_multiplication(o) * right_multiplication(o.adjoint());
}

Superoperator9 dressed_liouvillian(const LambdaParams& p) {
  const cdouble i(0.0, 1.0);
  return -i * commutator_superoperator(drive_hamiltonian(p)) -
         0.5 * p.gamma1 * dissipator(transition(1, 3)) -
         0.5 * p.gamma2 * dissipator(transition(2, 3));
}

Operator3 evolve(const Superoperator9& generator, const Operator3& x, double t) {
  if (t == 0.0) return x;
  const Superoperator9 step = (generator * t).exp();
  return unvectorize(step * vectorize(x));
}

DensityMatrix3 propagate(const Superoperator9& generator, const DensityMatrix3& rho0, double t) {
  if (!(t >= 0.0)) throw ParameterError("propagation time must be >= 0");
  DensityMatrix3 rho = evolve(generator, rho0, t);
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
    throw SolverError("propagated state lost Hermiticity beyond 1e-8");
  return rho;
}

cdouble regression_correlator(const LambdaParams& p, double t1, double t2, double t,
                              const Operator3& a, OperatorSide a_side, const Operator3& b,
                              OperatorSide b_side, const Operator3& observable) {
  if (!(0.0 <= t1 && t1 <= t2 && t2 <= t))
    throw ParameterError("regression correlator needs 0 <= t1 <= t2 <= t");
  const Superoperator9 l0 = dressed_liouvillian(p);
  // An operator standing left of the observable multiplies the state from
  // the right, and vice versa.
  const auto insert = [](const Operator3& x, const Operator3& op, OperatorSide side) {
    return side == OperatorSide::Left ? Operator3(x * op) : Operator3(op * x);
  };
  Operator3 x = evolve(l0, p.initial_state, t1);
  x = evolve(l0, insert(x, a, a_side), t2 - t1);
  x = evolve(l0, insert(x, b, b_side), t - t2);
  return (observable * x).trace();
}

cdouble double_commutator_correlator(const LambdaParams& p, double t1, double t2, double t,
                                     const Operator3& a, const Operator3& b,
                                     const Operator3& observable) {
  using S = OperatorSide;
  const auto c = [&](S sa, S sb) {
    return regression_correlator(p, t1, t2, t, a, sa, b, sb, observable);
  };
  // [A,[B,O]] = ABO - AOB - BOA + OBA
  return c(S::Left, S::Left) - c(S::Left, S::Right) - c(S::Right, S::Left) +
         c(S::Right, S::Right);
}

double dark_state_population(const DensityMatrix3& rho) {
  return 0.5 * (rho(0, 0).real() + rho(1, 1).real() - 2.0 * rho(0, 1).real());
}

double min_eigenvalue(const DensityMatrix3& rho) {
  const Operator3 hermitian = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator3> solver(hermitian, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

std::vector<double> dark_state_populations(const LambdaTrajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (const auto& rho : traj.states) out.push_back(dark_state_population(rho));
  return out;
}

}  // namespace resint
