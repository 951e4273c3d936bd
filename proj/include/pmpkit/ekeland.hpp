#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "pmpkit/bv.hpp"
#include "pmpkit/ode.hpp"
#include "pmpkit/problem.hpp"

namespace pmpkit {

/// Experimental descent mirroring the penalization mechanism: spike-variation
/// candidate moves accepted against the variational slack sqrt(eps) |du|_L1.
/// Not a competitive solver.

struct DescentOptions {
  std::vector<double> eps_schedule{0.5, 0.125, 0.03125, 0.0078125};
  std::vector<double> control_bound_schedule{};  // R_l; empty = one permissive level
  std::vector<double> rho_ladder{0.5, 0.25, 0.1, 0.05};
  int budget = 500;               // accepted-move budget
  double min_improvement = 1e-9;  // numerical floor for "strictly improving"
};

struct HistoryRow {
  int iteration = 0;
  double j_value = 0.0;          // penalized cost after the move
  double j_before = 0.0;         // incumbent penalized cost when the move was accepted
  double eps = 0.0;
  double feasibility = 0.0;      // sup-norm distance to the nonpositive cone
  double cost = 0.0;             // terminal cost of the iterate
};

struct PenaltyState {
  ControlSignal u;
  double j_value = 0.0;
  double eps = 0.0;
  double control_bound = 0.0;
  double reference_cost = 0.0;
  std::vector<HistoryRow> history;
  bool budget_exhausted = false;
};

/// Sup-norm distance to the nonpositive cone: max_i max_t (g_i(t))^+.
double distance_to_cone(const std::vector<Eigen::VectorXd>& g_at_nodes);

/// J(u) = sqrt( ((Psi(q(T,u)) - reference + eps)^+)^2 + d_S(G(q(.,u)))^2 ).
double penalized_cost(const Problem& problem, const ControlSignal& u, double reference_cost,
                      double eps, const TimeGrid& grid);

PenaltyState ekeland_descend(const Problem& problem, const ControlSignal& u0,
                             const std::vector<ControlSignal>& candidate_pool,
                             const TimeGrid& grid, const DescentOptions& options = {});

/// Multiplier estimates at the final iterate: psi from the penalization
/// formula; eta_i as atoms at the times where constraint i attains the
/// sup-norm distance (ties split equally), normalized so that
/// psi^2 + sum_i V(eta_i)^2 = 1.
std::pair<double, std::vector<NbvMeasure>> extract_multipliers(const Problem& problem,
                                                               const PenaltyState& state,
                                                               const TimeGrid& grid);

}  // namespace pmpkit
