#include "resint/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "resint/errors.hpp"
#include "resint/power_series.hpp"

namespace resint {
namespace {

using Row = std::vector<std::optional<double>>;

// Runs fn(i) for every index on up to `threads` workers. The exception of the
// lowest failing index is rethrown so failures do not depend on scheduling.
template <typename Fn>
std::vector<Row> parallel_rows(std::size_t count, unsigned threads, Fn fn) {
  std::vector<Row> rows(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        rows[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

ResultTable tls_run(const TwoBathModel& m, const UniformGrid& grid) {
  ResultTable table;
  table.columns = {"t", "rho_exact", "rho_additive", "epsilon", "gamma12_exact", "gamma12_additive"};
  const ExactDynamics exact = exact_dynamics(m, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid.time(k);
    const double add = additive_population(m, t);
    table.rows.push_back({t, exact.population[k], add, exact.population[k] - add,
                          exact.decay_rate[k], additive_decay_rate(m, t)});
  }
  return table;
}

ResultTable tls_sweep_lambda(const TwoBathModel& base, const UniformGrid& grid, const SweepSpec& sweep,
                             unsigned threads) {
  ResultTable table;
  table.columns = {"lambda", "sup_abs_epsilon"};
  table.rows = parallel_rows(sweep.values.size(), threads, [&](std::size_t i) -> Row {
    TwoBathModel m = base;
    m.bath1.width = m.bath2.width = sweep.values[i];
    double sup = 0.0;
    for (double e : additivity_error(m, grid)) sup = std::max(sup, std::abs(e));
    return {sweep.values[i], sup};
  });
  return table;
}

ResultTable series_order(const TwoBathModel& m, int order) {
  const std::array<KernelTerm, 2> kernels{kernel_term(m.bath1), kernel_term(m.bath2)};
  const InterferenceOrder io = interference_order(kernels, order, m.c0);
  const PowerSeries exact = exact_population_series(kernels, order, m.c0);
  const PowerSeries additive = additive_population_series(kernels, order, m.c0);
  ResultTable table;
  table.columns = {"order", "gap", "n", "exact_coefficient", "additive_coefficient"};
  const std::optional<double> o = io.order ? std::optional<double>(*io.order) : std::nullopt;
  const std::optional<double> gap = io.order ? std::optional<double>(io.gap) : std::nullopt;
  for (int n = 0; n <= order; ++n)
    table.rows.push_back({o, gap, static_cast<double>(n), exact[n], additive[n]});
  return table;
}

struct FourWay {
  LambdaTrajectory quantum, additive, me2, markovian;
};

FourWay solve_all(const LambdaParams& p, const UniformGrid& grid) {
  FourWay out;
  out.quantum = quantum_darkstate_solution(p, grid);
  out.additive = additive_me_solve(p, grid);
  out.me2 = me2_solve(p, grid);
  out.markovian = markovian_dephasing_solve(p, grid);
  return out;
}

void collect_warnings(const FourWay& f, std::vector<std::string>& sink) {
  for (const auto* traj : {&f.quantum, &f.additive, &f.me2, &f.markovian})
    for (const auto& w : traj->warnings)
      if (std::find(sink.begin(), sink.end(), w) == sink.end()) sink.push_back(w);
}

ResultTable lambda_compare(const LambdaParams& p, const UniformGrid& grid) {
  const FourWay f = solve_all(p, grid);
  ResultTable table;
  table.columns = {"t", "pd_quantum", "pd_additive", "pd_me2", "pd_markovian", "min_eigenvalue_me2"};
  for (std::size_t k = 0; k < grid.size(); ++k)
    table.rows.push_back({grid.time(k), dark_state_population(f.quantum.states[k]),
                          dark_state_population(f.additive.states[k]),
                          dark_state_population(f.me2.states[k]),
                          dark_state_population(f.markovian.states[k]),
                          min_eigenvalue(f.me2.states[k])});
  std::vector<std::string> warnings;
  collect_warnings(f, warnings);
  for (auto& w : warnings) table.metadata.emplace_back("warning", std::move(w));
  return table;
}

ResultTable lambda_sweep(const LambdaParams& base, const UniformGrid& grid, const SweepSpec& sweep,
                         unsigned threads) {
  ResultTable table;
  table.columns = {sweep.parameter, "delta_f_quantum", "delta_f_additive", "delta_f_me2",
                   "delta_f_markovian"};
  std::vector<std::vector<std::string>> warnings(sweep.values.size());
  table.rows = parallel_rows(sweep.values.size(), threads, [&](std::size_t i) -> Row {
    const double v = sweep.values[i];
    LambdaParams p = base;
    if (sweep.parameter == "omega" || sweep.parameter == "gamma_omega") p.omega = v;
    if (sweep.parameter == "gamma" || sweep.parameter == "gamma_omega") p.gamma1 = p.gamma2 = v;
    const FourWay f = solve_all(p, grid);
    collect_warnings(f, warnings[i]);
    const auto infidelity = [](const LambdaTrajectory& traj) {
      return 1.0 - dark_state_population(traj.states.back());
    };
    return {v, infidelity(f.quantum), infidelity(f.additive), infidelity(f.me2),
            infidelity(f.markovian)};
  });
  std::vector<std::string> merged;
  for (const auto& list : warnings)
    for (const auto& w : list)
      if (std::find(merged.begin(), merged.end(), w) == merged.end()) merged.push_back(w);
  for (auto& w : merged) table.metadata.emplace_back("warning", std::move(w));
  return table;
}

ResultTable dispatch(const ScenarioConfig& cfg, unsigned threads) {
  switch (cfg.scenario) {
    case ScenarioKind::TlsRun:
      return tls_run(std::get<TwoBathModel>(cfg.model), cfg.grid);
    case ScenarioKind::TlsSweepLambda:
      return tls_sweep_lambda(std::get<TwoBathModel>(cfg.model), cfg.grid, *cfg.sweep, threads);
    case ScenarioKind::SeriesOrder:
      return series_order(std::get<TwoBathModel>(cfg.model), cfg.truncation_order);
    case ScenarioKind::LambdaCompare:
      return lambda_compare(std::get<LambdaParams>(cfg.model), cfg.grid);
    case ScenarioKind::LambdaSweepGamma:
    case ScenarioKind::LambdaSweepOmega:
      return lambda_sweep(std::get<LambdaParams>(cfg.model), cfg.grid, *cfg.sweep, threads);
  }
  throw ParameterError("unhandled scenario");
}

}  // namespace

void validate(const ResultTable& table) {
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.columns.size())
      throw SolverError("row " + std::to_string(r) + " has " + std::to_string(table.rows[r].size()) +
                        " cells, expected " + std::to_string(table.columns.size()));
    for (const auto& cell : table.rows[r])
      if (cell && !std::isfinite(*cell))
        throw SolverError("row " + std::to_string(r) + " contains a non-finite value");
  }
}

ResultTable run_scenario(const ScenarioConfig& cfg, unsigned threads) {
  const std::string context = "scenario " + std::string(to_string(cfg.scenario)) + ": ";
  ResultTable table;
  try {
    table = dispatch(cfg, threads);
    validate(table);
  } catch (const DegenerateRootsError& e) {
    throw DegenerateRootsError(context + e.what());
  } catch (const StabilityError& e) {
    throw StabilityError(context + e.what());
  } catch (const SolverError& e) {
    throw SolverError(context + e.what());
  } catch (const ParameterError& e) {
    throw ParameterError(context + e.what());
  }
  auto metadata = describe(cfg);
  metadata.insert(metadata.begin() + 1, {"tool_version", std::string(kToolVersion)});
  metadata.insert(metadata.end(), std::make_move_iterator(table.metadata.begin()),
                  std::make_move_iterator(table.metadata.end()));
  table.metadata = std::move(metadata);
  return table;
}

}  // namespace resint
