#include "pmpkit/ekeland.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmpkit/errors.hpp"
#include "pmpkit/spike.hpp"

namespace pmpkit {

double distance_to_cone(const std::vector<Eigen::VectorXd>& g_at_nodes) {
  double d = 0.0;
  for (const auto& g : g_at_nodes) d = std::max(d, g.maxCoeff());
  return std::max(d, 0.0);
}

namespace {

struct Evaluation {
  double j_value = 0.0;
  double cost = 0.0;
  double feasibility = 0.0;
};

std::vector<Eigen::VectorXd> constraint_samples(const Problem& problem, const Trajectory& q) {
  std::vector<Eigen::VectorXd> g;
  if (problem.j == 0) return g;
  g.reserve(q.grid().node_count());
  for (std::size_t k = 0; k < q.grid().node_count(); ++k) {
    Eigen::VectorXd row(problem.j);
    for (int i = 0; i < problem.j; ++i)
      row[i] = problem.constraint_value(i, q.state(k), q.grid().node(k));
    g.push_back(std::move(row));
  }
  return g;
}

Evaluation evaluate(const Problem& problem, const ControlSignal& u, double reference_cost,
                    double eps, const TimeGrid& grid) {
  const TimeGrid solve_grid = grid.merged_with(u.grid());
  const Trajectory q = solve_forward(problem, u, solve_grid);
  Evaluation out;
  out.cost = problem.terminal_cost(q.state(solve_grid.node_count() - 1));
  out.feasibility = distance_to_cone(constraint_samples(problem, q));
  const double shifted = std::max(out.cost - reference_cost + eps, 0.0);
  out.j_value = std::sqrt(shifted * shifted + out.feasibility * out.feasibility);
  return out;
}

}  // namespace

double penalized_cost(const Problem& problem, const ControlSignal& u, double reference_cost,
                      double eps, const TimeGrid& grid) {
  return evaluate(problem, u, reference_cost, eps, grid).j_value;
}

PenaltyState ekeland_descend(const Problem& problem, const ControlSignal& u0,
                             const std::vector<ControlSignal>& candidate_pool,
                             const TimeGrid& grid, const DescentOptions& options) {
  if (options.eps_schedule.empty())
    throw Error(ErrorCode::InvalidArgument, "eps schedule must be nonempty");

  std::vector<double> bounds = options.control_bound_schedule;
  if (bounds.empty()) bounds.push_back(std::numeric_limits<double>::infinity());

  // User pool first, then the deterministic defaults (Omega corners and
  // midpoints as constant signals).
  std::vector<ControlSignal> pool = candidate_pool;
  for (const auto& point : problem.omega.corner_and_center_points())
    pool.push_back(ControlSignal::constant(u0.grid(), point));

  PenaltyState state{u0, 0.0, options.eps_schedule.front(), bounds.front(), 0.0, {}, false};

  Evaluation current = evaluate(problem, u0, 0.0, 0.0, grid);
  state.reference_cost = current.cost;  // best cost seen so far, feasible or provisional
  bool reference_feasible = current.feasibility == 0.0;

  std::size_t eps_index = 0;
  std::size_t bound_index = 0;
  state.eps = options.eps_schedule[eps_index];
  current = evaluate(problem, u0, state.reference_cost, state.eps, grid);
  state.j_value = current.j_value;
  state.history.push_back(
      {0, current.j_value, current.j_value, state.eps, current.feasibility, current.cost});

  int accepted = 0;
  while (accepted < options.budget) {
    // One sweep: every pool candidate at every rho; keep the best strictly
    // improving move that beats the variational slack. Ties resolve by pool
    // order then by ladder order.
    bool found = false;
    Evaluation best_eval;
    ControlSignal best_control = state.u;

    const TimeGrid h_grid = grid.merged_with(state.u.grid());

    for (const auto& candidate : pool) {
      if (candidate.linf_norm() > bounds[bound_index]) continue;
      const TimeGrid pair_grid = h_grid.merged_with(candidate.grid());
      const Trajectory q_pair = solve_forward(problem, state.u, pair_grid);
      const std::vector<Eigen::VectorXd> h =
          spike_direction(problem, q_pair, state.u, candidate, pair_grid);
      for (double rho : options.rho_ladder) {
        Evaluation trial_eval;
        ControlSignal trial = state.u;
        try {
          const SpikeSet spikes = build_qrho(h, rho, pair_grid);
          trial = spike_control(state.u, candidate, spikes);
          trial_eval = evaluate(problem, trial, state.reference_cost, state.eps, grid);
        } catch (const Error&) {
          continue;  // blow-up or domain failure: candidate move is unusable
        }
        if (trial_eval.j_value >= state.j_value) continue;
        const double slack = std::sqrt(state.eps) * l1_distance(trial, state.u);
        const double improvement = state.j_value - trial_eval.j_value;
        if (improvement <= slack || improvement <= options.min_improvement) continue;
        if (!found || trial_eval.j_value < best_eval.j_value) {
          found = true;
          best_eval = trial_eval;
          best_control = std::move(trial);
        }
      }
    }

    if (!found) {
      // Stagnation: tighten eps, then widen the control bound, else stop.
      if (eps_index + 1 < options.eps_schedule.size()) {
        state.eps = options.eps_schedule[++eps_index];
      } else if (bound_index + 1 < bounds.size()) {
        state.control_bound = bounds[++bound_index];
      } else {
        break;
      }
      current = evaluate(problem, state.u, state.reference_cost, state.eps, grid);
      state.j_value = current.j_value;
      continue;
    }

    const double j_before = state.j_value;
    state.u = best_control;
    current = best_eval;
    ++accepted;

    // Reference update: a feasible iterate below the reference resets the
    // penalization offset (this is the guard for the J = 0 branch).
    if (current.feasibility == 0.0 &&
        (current.cost < state.reference_cost || !reference_feasible)) {
      state.reference_cost = current.cost;
      reference_feasible = true;
      current = evaluate(problem, state.u, state.reference_cost, state.eps, grid);
    }
    state.j_value = current.j_value;
    state.history.push_back({accepted, best_eval.j_value, j_before, state.eps,
                             current.feasibility, current.cost});
  }

  state.budget_exhausted = accepted >= options.budget;
  return state;
}

std::pair<double, std::vector<NbvMeasure>> extract_multipliers(const Problem& problem,
                                                               const PenaltyState& state,
                                                               const TimeGrid& grid) {
  if (state.history.empty())
    throw Error(ErrorCode::InvalidArgument, "descent history is empty");

  const TimeGrid solve_grid = grid.merged_with(state.u.grid());
  const Trajectory q = solve_forward(problem, state.u, solve_grid);
  const std::vector<Eigen::VectorXd> g = constraint_samples(problem, q);
  const double d = distance_to_cone(g);

  if (d == 0.0) {
    std::vector<NbvMeasure> etas;
    etas.reserve(static_cast<std::size_t>(problem.j));
    for (int i = 0; i < problem.j; ++i) etas.push_back(NbvMeasure::zero(solve_grid));
    return {1.0, std::move(etas)};
  }

  const double cost = problem.terminal_cost(q.state(solve_grid.node_count() - 1));
  const double shifted = std::max(cost - state.reference_cost + state.eps, 0.0);
  const double j_value = std::sqrt(shifted * shifted + d * d);
  if (j_value == 0.0)
    throw Error(ErrorCode::DegenerateState, "penalized cost vanished at the final iterate");

  const double psi_raw = shifted / j_value;
  const double mass_raw = d / j_value;

  // Atoms where each constraint attains the sup-norm distance; ties split
  // equally across attaining constraints and attainment times.
  const double tie_tol = 1e-12 * std::max(1.0, d);
  std::vector<std::vector<std::size_t>> attain(static_cast<std::size_t>(problem.j));
  int attaining_constraints = 0;
  for (int i = 0; i < problem.j; ++i) {
    for (std::size_t k = 0; k < solve_grid.node_count(); ++k)
      if (std::abs(g[k][i] - d) <= tie_tol && solve_grid.node(k) > 0.0)
        attain[static_cast<std::size_t>(i)].push_back(k);
    if (!attain[static_cast<std::size_t>(i)].empty()) ++attaining_constraints;
  }
  if (attaining_constraints == 0)
    throw Error(ErrorCode::DegenerateState, "sup-norm distance attained only at t = 0");

  // Per-constraint variation mass_raw / sqrt(count) keeps
  // psi^2 + sum V^2 = psi_raw^2 + mass_raw^2 = 1.
  const double per_constraint =
      mass_raw / std::sqrt(static_cast<double>(attaining_constraints));
  std::vector<NbvMeasure> etas;
  etas.reserve(static_cast<std::size_t>(problem.j));
  double sum_v_squared = 0.0;
  for (int i = 0; i < problem.j; ++i) {
    const auto& nodes = attain[static_cast<std::size_t>(i)];
    std::vector<double> atoms(solve_grid.node_count(), 0.0);
    std::vector<double> densities(solve_grid.cell_count(), 0.0);
    if (!nodes.empty()) {
      const double weight = per_constraint / static_cast<double>(nodes.size());
      for (std::size_t k : nodes) atoms[k] = weight;
      sum_v_squared += per_constraint * per_constraint;
    }
    etas.emplace_back(solve_grid, std::move(atoms), std::move(densities));
  }

  // Final polish of the normalization against accumulated rounding.
  const double norm = std::sqrt(psi_raw * psi_raw + sum_v_squared);
  std::vector<NbvMeasure> scaled;
  scaled.reserve(etas.size());
  for (auto& eta : etas) scaled.push_back(eta.scaled(1.0 / norm));
  return {psi_raw / norm, std::move(scaled)};
}

}  // namespace pmpkit
