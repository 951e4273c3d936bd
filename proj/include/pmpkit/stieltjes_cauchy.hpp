#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pmpkit/bv.hpp"
#include "pmpkit/grid.hpp"
#include "pmpkit/ode.hpp"

namespace pmpkit {

struct CspOptions {
  double tolerance = 1e-12;
  int max_iterations = 200;
};

/// Picard iteration of the integral map behind the linear Cauchy-Stieltjes
/// problems
///   forward:  dq = A q dt + sum_i B_i d eta_i,  q(0) = boundary,
///   backward: -dp = A^T p dt + sum_i B_i d eta_i,  p(T) = boundary.
/// Atom jumps are exact (the output jumps by B_i(atom) * weight); the dt and
/// density terms are integrated per cell against the cell's linear flow, so
/// the fixed point coincides with the Duhamel route. Iterates until
/// successive sweeps differ by at most `tolerance` in sup norm; throws
/// NoConvergence after `max_iterations`.
BvPath solve_csp_fixed_point(const std::vector<Eigen::MatrixXd>& a_at_nodes,
                             const std::vector<std::vector<Eigen::VectorXd>>& b_at_nodes,
                             const std::vector<NbvMeasure>& measures,
                             const Eigen::VectorXd& boundary, Direction direction,
                             const TimeGrid& grid, const CspOptions& options = {});

/// Duhamel-type evaluation of the same problems through the state-transition
/// table: e.g. backward,
///   p(t) = Z(T,t)^T p_T + sum_i int_(t,T] Z(tau,t)^T B_i(tau) d eta_i(tau).
/// Atoms are exact under the shared convention; densities use the same cell
/// kernels as the transition matrices.
BvPath solve_csp_duhamel(const std::vector<Eigen::MatrixXd>& a_at_nodes,
                         const std::vector<std::vector<Eigen::VectorXd>>& b_at_nodes,
                         const std::vector<NbvMeasure>& measures,
                         const Eigen::VectorXd& boundary, Direction direction,
                         const TimeGrid& grid);

}  // namespace pmpkit
